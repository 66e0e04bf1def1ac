#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iaudit/report.hpp"

namespace py = pybind11;
using namespace iaudit;

namespace {

// nlohmann::json -> native python objects, so callers get plain dicts and
// lists instead of wrapped C++ types.
py::object json_to_py(const nlohmann::json& value) {
    switch (value.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(value.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(value.get<nlohmann::json::number_integer_t>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(value.get<nlohmann::json::number_unsigned_t>());
        case nlohmann::json::value_t::number_float: return py::float_(value.get<double>());
        case nlohmann::json::value_t::string: return py::str(value.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list list;
            for (const nlohmann::json& item : value) list.append(json_to_py(item));
            return list;
        }
        case nlohmann::json::value_t::object: {
            py::dict dict;
            for (const auto& [key, item] : value.items()) {
                dict[py::str(key)] = json_to_py(item);
            }
            return dict;
        }
        default: return py::none();
    }
}

nlohmann::json py_to_json(const py::handle& value) {
    if (value.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(value)) return value.cast<bool>();
    if (py::isinstance<py::int_>(value)) return value.cast<long long>();
    if (py::isinstance<py::float_>(value)) return value.cast<double>();
    if (py::isinstance<py::str>(value)) return value.cast<std::string>();
    if (py::isinstance<py::dict>(value)) {
        nlohmann::json object = nlohmann::json::object();
        for (const auto& item : value.cast<py::dict>()) {
            object[item.first.cast<std::string>()] = py_to_json(item.second);
        }
        return object;
    }
    if (py::isinstance<py::iterable>(value)) {
        nlohmann::json array = nlohmann::json::array();
        for (const auto& item : value.cast<py::iterable>()) array.push_back(py_to_json(item));
        return array;
    }
    throw py::type_error("cannot convert python value to JSON");
}

DataTypeSet types_from_ids(const std::vector<std::string>& ids) {
    DataTypeSet set;
    for (const std::string& id : ids) {
        auto type = data_type_from_id(id);
        if (!type) throw py::value_error("unknown data type id: " + id);
        set.insert(*type);
    }
    return set;
}

TechniqueSet techniques_from_ids(const std::vector<std::string>& ids) {
    TechniqueSet set;
    for (const std::string& id : ids) {
        auto technique = technique_from_id(id);
        if (!technique) throw py::value_error("unknown technique id: " + id);
        set.insert(*technique);
    }
    return set;
}

Lexicon lexicon_for(const std::string& path) {
    return path.empty() ? default_lexicon() : load_lexicon(path);
}

SignatureDb signatures_for(const std::string& path) {
    return path.empty() ? default_signatures() : load_signatures(path);
}

py::object run_extract_evidence(const std::string& app_dir, const std::string& signatures_path,
                                int depth, bool include_diagnostics) {
    AppModel app = load_app(app_dir);
    LinkerOptions options;
    options.depth = depth;
    ExtractionResult result =
        extract_evidence(app, signatures_for(signatures_path), default_linker_tables(), options);
    nlohmann::json object = to_json(result.evidence);
    if (include_diagnostics) {
        std::vector<std::string> diagnostics = app.warnings;
        diagnostics.insert(diagnostics.end(), result.diagnostics.begin(),
                           result.diagnostics.end());
        object["diagnostics"] = diagnostics;
    }
    return json_to_py(object);
}

py::object run_audit(const std::string& app_dir, const std::string& policy_path,
                     const std::string& signatures_path, const std::string& lexicon_path,
                     int depth) {
    AuditReport report;
    AppModel app = load_app(app_dir);
    LinkerOptions options;
    options.depth = depth;
    ExtractionResult extraction =
        extract_evidence(app, signatures_for(signatures_path), default_linker_tables(), options);

    PolicyDocument document = load_policy_file(policy_path);
    report.app_id = app.manifest.package_name;
    report.claim = extract_claims(document, lexicon_for(lexicon_path), report.app_id);
    report.evidence = extraction.evidence;
    report.fact_check = fact_check(report.claim, report.evidence);
    report.diagnostics = app.warnings;
    report.diagnostics.insert(report.diagnostics.end(), extraction.diagnostics.begin(),
                              extraction.diagnostics.end());
    report.inputs = {{"app_dir", app_dir}, {"policy", policy_path}};
    return json_to_py(to_json(report));
}

}  // namespace

PYBIND11_MODULE(interaction_audit, m) {
    m.doc() = "Extracts interaction-data collection claims from privacy policies, collection "
              "evidence from apktool-decoded Android apps, and fact-checks one against the "
              "other.";
    m.attr("__version__") = std::string{kToolVersion};
    m.attr("DATA_TYPES") = json_to_py(to_json(DataTypeSet{kAllDataTypes.begin(),
                                                          kAllDataTypes.end()}));
    m.attr("TECHNIQUES") = json_to_py(to_json(TechniqueSet{kAllTechniques.begin(),
                                                           kAllTechniques.end()}));

    m.def(
        "render_claim",
        [](const std::vector<std::string>& types, const std::vector<std::string>& techniques) {
            return render_claim(types_from_ids(types), techniques_from_ids(techniques));
        },
        py::arg("types"), py::arg("techniques"),
        "Render the standardized collection claim for data-type and technique ids.");

    m.def(
        "parse_claim_text",
        [](const std::string& text) {
            ParsedClaim parsed = parse_claim_text(text);
            return py::make_tuple(json_to_py(to_json(parsed.types)),
                                  json_to_py(to_json(parsed.techniques)));
        },
        py::arg("text"), "Inverse of render_claim; raises ValueError on non-template text.");

    m.def(
        "strip_html", [](const std::string& bytes) { return strip_html(bytes); },
        py::arg("data"));

    m.def(
        "segment_sentences",
        [](const std::string& text) {
            py::list out;
            for (const Sentence& sentence : segment_sentences(text)) {
                out.append(py::make_tuple(sentence.text, sentence.begin, sentence.end));
            }
            return out;
        },
        py::arg("text"));

    m.def(
        "match_sentence",
        [](const std::string& sentence, const std::string& lexicon_path) -> py::object {
            auto matched = match_sentence(sentence, lexicon_for(lexicon_path));
            if (!matched) return py::none();
            return json_to_py(to_json(*matched));
        },
        py::arg("sentence"), py::arg("lexicon_path") = std::string{});

    m.def(
        "extract_claims",
        [](const std::string& policy_path, const std::string& app_id,
           const std::string& lexicon_path) {
            PolicyDocument document = load_policy_file(policy_path);
            std::string resolved = app_id.empty()
                                       ? std::filesystem::path{policy_path}.stem().string()
                                       : app_id;
            return json_to_py(
                to_json(extract_claims(document, lexicon_for(lexicon_path), resolved)));
        },
        py::arg("policy_path"), py::arg("app_id") = std::string{},
        py::arg("lexicon_path") = std::string{},
        "Extract the standardized collection claim from a policy file.");

    m.def(
        "load_app_summary",
        [](const std::string& app_dir) {
            AppModel app = load_app(app_dir);
            nlohmann::json summary{{"package", app.manifest.package_name},
                                   {"activities", app.manifest.activities},
                                   {"classes", app.classes.size()},
                                   {"widgets", app.layouts.size()},
                                   {"warnings", app.warnings}};
            return json_to_py(summary);
        },
        py::arg("app_dir"), "Parse an apktool-decoded directory and summarize its contents.");

    m.def("extract_evidence", &run_extract_evidence, py::arg("app_dir"),
          py::arg("signatures_path") = std::string{}, py::arg("depth") = 2,
          py::arg("diagnostics") = false,
          "Extract collection evidence from an apktool-decoded app directory.");

    m.def(
        "fact_check",
        [](const py::dict& claim, const py::dict& evidence) {
            return json_to_py(to_json(
                fact_check(claim_from_json(py_to_json(claim)),
                           evidence_from_json(py_to_json(evidence)))));
        },
        py::arg("claim"), py::arg("evidence"),
        "Diff a claim dict against an evidence dict; returns the fact-check result.");

    m.def("audit", &run_audit, py::arg("app_dir"), py::arg("policy_path"),
          py::arg("signatures_path") = std::string{}, py::arg("lexicon_path") = std::string{},
          py::arg("depth") = 2, "Run the full pipeline and return the audit report as a dict.");

    m.def(
        "corpus_stats",
        [](const py::list& evidences) {
            std::vector<CollectionEvidence> corpus;
            for (const auto& item : evidences) {
                corpus.push_back(evidence_from_json(py_to_json(item)));
            }
            return json_to_py(to_json(corpus_stats(corpus)));
        },
        py::arg("evidences"), "Aggregate statistics over a list of evidence dicts.");

    py::register_exception<ParseError>(m, "IaParseError", PyExc_ValueError);
}
