#include "iaudit/report.hpp"

#include <sstream>

namespace iaudit {

using nlohmann::json;

json to_json(const AuditReport& report) {
    json inputs = json::object();
    for (const auto& [key, value] : report.inputs) inputs[key] = value;
    return json{{"version", report.version},
                {"app_id", report.app_id},
                {"claim", to_json(report.claim)},
                {"evidence", to_json(report.evidence)},
                {"fact_check", to_json(report.fact_check)},
                {"diagnostics", report.diagnostics},
                {"timing_ms", report.timing_ms},
                {"inputs", std::move(inputs)}};
}

AuditReport report_from_json(const json& object) {
    AuditReport report;
    report.version = object.at("version").get<std::string>();
    report.app_id = object.at("app_id").get<std::string>();
    report.claim = claim_from_json(object.at("claim"));
    report.evidence = evidence_from_json(object.at("evidence"));
    report.fact_check = factcheck_from_json(object.at("fact_check"));
    report.diagnostics = object.at("diagnostics").get<std::vector<std::string>>();
    report.timing_ms = object.value("timing_ms", 0.0);
    const json inputs = object.value("inputs", json::object());
    for (const auto& [key, value] : inputs.items()) {
        report.inputs[key] = value.get<std::string>();
    }
    return report;
}

std::string render_evidence_table(const CollectionEvidence& evidence) {
    std::ostringstream out;
    out << "| widget | element | data type | techniques | library | callback | invocation |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const EvidenceRecord& record : evidence.records) {
        out << "| " << (record.widget.id_name.empty() ? "-" : record.widget.id_name) << " | "
            << (record.widget.element_name.empty() ? "-" : record.widget.element_name) << " | "
            << label(record.data_type) << " | ";
        bool first = true;
        for (Technique technique : record.techniques) {
            if (!first) out << ", ";
            out << label(technique);
            first = false;
        }
        out << " | " << record.library << " | " << record.callback << " | "
            << record.invocation.class_name << "->" << record.invocation.method_name << " @"
            << record.invocation.instruction_index << " |\n";
    }
    return out.str();
}

namespace {

template <typename Set>
std::string label_list(const Set& set) {
    if (set.empty()) return "none";
    std::string out;
    for (auto item : set) {
        if (!out.empty()) out += ", ";
        out += label(item);
    }
    return out;
}

}  // namespace

std::string render_report_text(const AuditReport& report, bool include_diagnostics) {
    std::ostringstream out;
    out << "interaction-audit " << report.version << " | app " << report.app_id << "\n\n";

    out << "Claim (policy: " << report.claim.source << ")\n";
    out << "  " << render_claim(report.claim.claimed_types, report.claim.claimed_techniques)
        << "\n";
    out << "  supporting sentences: " << report.claim.support.size() << "\n\n";

    out << "Evidence (" << report.evidence.records.size() << " records)\n";
    out << "  types: " << label_list(report.evidence.evidenced_types) << "\n";
    out << "  techniques: " << label_list(report.evidence.evidenced_techniques) << "\n";
    if (!report.evidence.records.empty()) out << render_evidence_table(report.evidence);
    out << "\n";

    out << "Fact check\n";
    out << "  missing types: " << label_list(report.fact_check.missing_types) << "\n";
    out << "  missing techniques: " << label_list(report.fact_check.missing_techniques) << "\n";
    out << "  overclaimed types (advisory): " << label_list(report.fact_check.overclaimed_types)
        << "\n";
    out << "  overclaimed techniques (advisory): "
        << label_list(report.fact_check.overclaimed_techniques) << "\n";
    out << "  checked claim:\n  " << report.fact_check.checked_claim_text << "\n";

    if (include_diagnostics && !report.diagnostics.empty()) {
        out << "\nDiagnostics (" << report.diagnostics.size() << ")\n";
        for (const std::string& diagnostic : report.diagnostics) {
            out << "  - " << diagnostic << "\n";
        }
    }
    return out.str();
}

std::string content_digest(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char byte : bytes) {
        hash ^= byte;
        hash *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << hash;
    return out.str();
}

}  // namespace iaudit
