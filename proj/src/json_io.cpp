#include "iaudit/json_io.hpp"

namespace iaudit {

using nlohmann::json;

json to_json(const DataTypeSet& types) {
    json array = json::array();
    for (DataType type : types) array.push_back(std::string{id_of(type)});
    return array;
}

json to_json(const TechniqueSet& techniques) {
    json array = json::array();
    for (Technique technique : techniques) array.push_back(std::string{id_of(technique)});
    return array;
}

DataTypeSet data_type_set_from_json(const json& array) {
    DataTypeSet set;
    for (const json& entry : array) {
        auto type = data_type_from_id(entry.get<std::string>());
        if (!type) throw ParseError("unknown data type id '" + entry.get<std::string>() + "'");
        set.insert(*type);
    }
    return set;
}

TechniqueSet technique_set_from_json(const json& array) {
    TechniqueSet set;
    for (const json& entry : array) {
        auto technique = technique_from_id(entry.get<std::string>());
        if (!technique) throw ParseError("unknown technique id '" + entry.get<std::string>() + "'");
        set.insert(*technique);
    }
    return set;
}

json to_json(const CollectionClaim& claim) {
    json support = json::array();
    for (const SupportSentence& sentence : claim.support) {
        support.push_back(json{{"sentence", sentence.sentence},
                               {"begin", sentence.begin},
                               {"end", sentence.end},
                               {"keywords", sentence.keywords}});
    }
    return json{{"app_id", claim.app_id},
                {"source", claim.source},
                {"claimed_types", to_json(claim.claimed_types)},
                {"claimed_techniques", to_json(claim.claimed_techniques)},
                {"claim_text", render_claim(claim.claimed_types, claim.claimed_techniques)},
                {"support", std::move(support)}};
}

CollectionClaim claim_from_json(const json& object) {
    CollectionClaim claim;
    claim.app_id = object.at("app_id").get<std::string>();
    claim.source = object.value("source", std::string{});
    claim.claimed_types = data_type_set_from_json(object.at("claimed_types"));
    claim.claimed_techniques = technique_set_from_json(object.at("claimed_techniques"));
    for (const json& entry : object.value("support", json::array())) {
        SupportSentence sentence;
        sentence.sentence = entry.at("sentence").get<std::string>();
        sentence.begin = entry.value("begin", std::size_t{0});
        sentence.end = entry.value("end", std::size_t{0});
        sentence.keywords = entry.value("keywords", std::vector<std::string>{});
        claim.support.push_back(std::move(sentence));
    }
    return claim;
}

json to_json(const EvidenceRecord& record) {
    return json{{"widget",
                 {{"layout", record.widget.layout_file},
                  {"id", record.widget.id_name},
                  {"element", record.widget.element_name}}},
                {"data_type", std::string{id_of(record.data_type)}},
                {"techniques", to_json(record.techniques)},
                {"invocation",
                 {{"class", record.invocation.class_name},
                  {"method", record.invocation.method_name},
                  {"descriptor", record.invocation.method_descriptor},
                  {"index", record.invocation.instruction_index}}},
                {"library", record.library},
                {"callback", record.callback},
                {"listener", record.listener_class}};
}

EvidenceRecord record_from_json(const json& object) {
    EvidenceRecord record;
    const json& widget = object.at("widget");
    record.widget.layout_file = widget.value("layout", std::string{});
    record.widget.id_name = widget.value("id", std::string{});
    record.widget.element_name = widget.value("element", std::string{});
    auto type = data_type_from_id(object.at("data_type").get<std::string>());
    if (!type) throw ParseError("unknown data type in evidence record");
    record.data_type = *type;
    record.techniques = technique_set_from_json(object.at("techniques"));
    const json& invocation = object.at("invocation");
    record.invocation.class_name = invocation.at("class").get<std::string>();
    record.invocation.method_name = invocation.at("method").get<std::string>();
    record.invocation.method_descriptor = invocation.at("descriptor").get<std::string>();
    record.invocation.instruction_index = invocation.at("index").get<int>();
    record.library = object.value("library", std::string{});
    record.callback = object.value("callback", std::string{});
    record.listener_class = object.value("listener", std::string{});
    return record;
}

json to_json(const CollectionEvidence& evidence) {
    json records = json::array();
    for (const EvidenceRecord& record : evidence.records) records.push_back(to_json(record));
    return json{{"app_id", evidence.app_id},
                {"record_count", evidence.records.size()},
                {"evidenced_types", to_json(evidence.evidenced_types)},
                {"evidenced_techniques", to_json(evidence.evidenced_techniques)},
                {"records", std::move(records)}};
}

CollectionEvidence evidence_from_json(const json& object) {
    CollectionEvidence evidence;
    evidence.app_id = object.at("app_id").get<std::string>();
    for (const json& entry : object.value("records", json::array())) {
        evidence.records.push_back(record_from_json(entry));
    }
    if (object.contains("evidenced_types")) {
        evidence.evidenced_types = data_type_set_from_json(object.at("evidenced_types"));
        evidence.evidenced_techniques =
            technique_set_from_json(object.at("evidenced_techniques"));
    } else {
        refresh_evidence_unions(evidence);
    }
    return evidence;
}

json to_json(const FactCheckResult& result) {
    return json{{"app_id", result.app_id},
                {"claimed_types", to_json(result.claimed_types)},
                {"evidenced_types", to_json(result.evidenced_types)},
                {"claimed_techniques", to_json(result.claimed_techniques)},
                {"evidenced_techniques", to_json(result.evidenced_techniques)},
                {"missing_types", to_json(result.missing_types)},
                {"missing_techniques", to_json(result.missing_techniques)},
                {"overclaimed_types", to_json(result.overclaimed_types)},
                {"overclaimed_techniques", to_json(result.overclaimed_techniques)},
                {"checked_claim_text", result.checked_claim_text}};
}

FactCheckResult factcheck_from_json(const json& object) {
    FactCheckResult result;
    result.app_id = object.at("app_id").get<std::string>();
    result.claimed_types = data_type_set_from_json(object.at("claimed_types"));
    result.evidenced_types = data_type_set_from_json(object.at("evidenced_types"));
    result.claimed_techniques = technique_set_from_json(object.at("claimed_techniques"));
    result.evidenced_techniques = technique_set_from_json(object.at("evidenced_techniques"));
    result.missing_types = data_type_set_from_json(object.at("missing_types"));
    result.missing_techniques = technique_set_from_json(object.at("missing_techniques"));
    result.overclaimed_types = data_type_set_from_json(object.at("overclaimed_types"));
    result.overclaimed_techniques =
        technique_set_from_json(object.at("overclaimed_techniques"));
    result.checked_claim_text = object.at("checked_claim_text").get<std::string>();
    return result;
}

json to_json(const CorpusStats& stats) {
    json per_type = json::object();
    for (const auto& [type, entry] : stats.per_type) {
        json shares = json::object();
        for (const auto& [technique, share] : entry.technique_shares) {
            shares[std::string{id_of(technique)}] = share;
        }
        per_type[std::string{id_of(type)}] = json{{"app_count", entry.app_count},
                                                  {"percent_collected", entry.percent_collected},
                                                  {"avg_distinct_dcms", entry.avg_distinct_dcms},
                                                  {"technique_shares", std::move(shares)}};
    }
    return json{{"total_apps", stats.total_apps}, {"per_type", std::move(per_type)}};
}

json to_json(const ExtractedSentence& sentence) {
    return json{{"sentence", sentence.sentence.sentence},
                {"begin", sentence.sentence.begin},
                {"end", sentence.sentence.end},
                {"matched_verbs", sentence.matched_verbs},
                {"matched_nouns", sentence.matched_nouns},
                {"inferred_types", to_json(sentence.inferred_types)},
                {"inferred_techniques", to_json(sentence.inferred_techniques)},
                {"classification", std::string{to_string(sentence.classification)}}};
}

}  // namespace iaudit
