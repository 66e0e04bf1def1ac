#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "iaudit/report.hpp"

namespace {

using iaudit::AuditReport;

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

struct CommonOptions {
    std::string signatures_path;
    std::string lexicon_path;
    std::string tables_path;
    int depth = 2;
    bool json = false;
    bool diagnostics = false;
    std::string out_path;
};

std::string read_file_bytes(const std::string& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

iaudit::SignatureDb resolve_signatures(const CommonOptions& options,
                                       std::map<std::string, std::string>& inputs) {
    std::string path = options.signatures_path;
    if (path.empty()) {
        if (const char* env = std::getenv("INTERACTION_AUDIT_SIGNATURES")) path = env;
    }
    if (path.empty()) {
        inputs["signatures"] = "<builtin>";
        return iaudit::default_signatures();
    }
    inputs["signatures"] = path;
    inputs["signatures_digest"] = iaudit::content_digest(read_file_bytes(path));
    return iaudit::load_signatures(path);
}

iaudit::Lexicon resolve_lexicon(const CommonOptions& options,
                                std::map<std::string, std::string>& inputs) {
    if (options.lexicon_path.empty()) {
        inputs["lexicon"] = "<builtin>";
        return iaudit::default_lexicon();
    }
    inputs["lexicon"] = options.lexicon_path;
    inputs["lexicon_digest"] =
        iaudit::content_digest(read_file_bytes(options.lexicon_path));
    return iaudit::load_lexicon(options.lexicon_path);
}

iaudit::LinkerTables resolve_tables(const CommonOptions& options) {
    if (options.tables_path.empty()) return iaudit::default_linker_tables();
    return iaudit::load_linker_tables(options.tables_path);
}

void write_output(const std::string& text, const CommonOptions& options) {
    if (options.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out{options.out_path, std::ios::binary};
    if (!out) throw std::runtime_error("cannot write output file: " + options.out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string default_app_id(const std::string& policy_path) {
    return std::filesystem::path{policy_path}.stem().string();
}

int run_claims(const std::string& policy_path, std::string app_id,
               const CommonOptions& options) {
    std::map<std::string, std::string> inputs;
    iaudit::Lexicon lexicon = resolve_lexicon(options, inputs);
    iaudit::PolicyDocument document = iaudit::load_policy_file(policy_path);
    if (app_id.empty()) app_id = default_app_id(policy_path);
    iaudit::CollectionClaim claim = iaudit::extract_claims(document, lexicon, app_id);

    if (options.json) {
        write_output(iaudit::to_json(claim).dump(2), options);
    } else {
        std::ostringstream out;
        out << iaudit::render_claim(claim.claimed_types, claim.claimed_techniques) << "\n";
        out << "(" << claim.support.size() << " supporting sentences from " << claim.source
            << ")\n";
        if (options.diagnostics) {
            for (const iaudit::SupportSentence& support : claim.support) {
                out << "  - [" << support.begin << "," << support.end << ") "
                    << support.sentence << "\n";
            }
        }
        write_output(out.str(), options);
    }
    return kExitClean;
}

int run_evidence(const std::string& app_dir, const CommonOptions& options) {
    std::map<std::string, std::string> inputs;
    iaudit::SignatureDb db = resolve_signatures(options, inputs);
    iaudit::AppModel app = iaudit::load_app(app_dir);
    iaudit::LinkerOptions linker_options;
    linker_options.depth = options.depth;
    iaudit::ExtractionResult extraction =
        iaudit::extract_evidence(app, db, resolve_tables(options), linker_options);

    std::vector<std::string> diagnostics = app.warnings;
    diagnostics.insert(diagnostics.end(), extraction.diagnostics.begin(),
                       extraction.diagnostics.end());

    if (options.json) {
        nlohmann::json object = iaudit::to_json(extraction.evidence);
        if (options.diagnostics) object["diagnostics"] = diagnostics;
        write_output(object.dump(2), options);
    } else {
        std::ostringstream out;
        out << "app " << extraction.evidence.app_id << ": " << extraction.evidence.records.size()
            << " evidence records\n";
        out << iaudit::render_evidence_table(extraction.evidence);
        if (options.diagnostics && !diagnostics.empty()) {
            out << "\nDiagnostics (" << diagnostics.size() << ")\n";
            for (const std::string& diagnostic : diagnostics) out << "  - " << diagnostic << "\n";
        }
        write_output(out.str(), options);
    }
    return kExitClean;
}

int run_audit(const std::string& app_dir, const std::string& policy_path,
              const CommonOptions& options) {
    auto started = std::chrono::steady_clock::now();

    AuditReport report;
    iaudit::SignatureDb db = resolve_signatures(options, report.inputs);
    iaudit::Lexicon lexicon = resolve_lexicon(options, report.inputs);
    report.inputs["app_dir"] = app_dir;
    report.inputs["policy"] = policy_path;
    report.inputs["policy_digest"] = iaudit::content_digest(read_file_bytes(policy_path));

    iaudit::AppModel app = iaudit::load_app(app_dir);
    iaudit::LinkerOptions linker_options;
    linker_options.depth = options.depth;
    iaudit::ExtractionResult extraction =
        iaudit::extract_evidence(app, db, resolve_tables(options), linker_options);

    iaudit::PolicyDocument document = iaudit::load_policy_file(policy_path);
    report.app_id = app.manifest.package_name;
    report.claim = iaudit::extract_claims(document, lexicon, report.app_id);
    report.evidence = extraction.evidence;
    report.fact_check = iaudit::fact_check(report.claim, report.evidence);

    report.diagnostics = app.warnings;
    report.diagnostics.insert(report.diagnostics.end(), extraction.diagnostics.begin(),
                              extraction.diagnostics.end());
    report.timing_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();

    if (options.json) {
        write_output(iaudit::to_json(report).dump(2), options);
    } else {
        write_output(iaudit::render_report_text(report, options.diagnostics), options);
    }
    // Diagnostics never drive the exit status; only audit findings do.
    return report.fact_check.has_findings() ? kExitFindings : kExitClean;
}

int run_corpus_stats(const std::string& directory, const CommonOptions& options) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(directory)) {
        throw std::runtime_error("not a directory: " + directory);
    }
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw std::runtime_error("no evidence JSON files in " + directory);
    }

    std::vector<iaudit::CollectionEvidence> corpus;
    for (const std::filesystem::path& file : files) {
        nlohmann::json object = nlohmann::json::parse(read_file_bytes(file.string()));
        // Accept both bare evidence objects and full audit reports.
        if (object.contains("evidence")) {
            corpus.push_back(iaudit::evidence_from_json(object.at("evidence")));
        } else {
            corpus.push_back(iaudit::evidence_from_json(object));
        }
    }

    iaudit::CorpusStats stats = iaudit::corpus_stats(corpus);
    if (options.json) {
        write_output(iaudit::to_json(stats).dump(2), options);
    } else {
        std::ostringstream out;
        out << "Corpus of " << stats.total_apps << " apps\n\n";
        out << iaudit::render_corpus_stats_markdown(stats);
        write_output(out.str(), options);
    }
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fact-checks privacy-policy interaction-data claims against "
                 "static-analysis evidence from apktool-decoded Android apps"};
    app.require_subcommand(1);

    CommonOptions options;
    std::string policy_path;
    std::string app_dir;
    std::string app_id;
    std::string corpus_dir;

    auto add_common = [&](CLI::App* command) {
        command->add_option("--signatures", options.signatures_path,
                            "DCM signature DB (JSON); overrides the builtin database");
        command->add_option("--lexicon", options.lexicon_path,
                            "policy lexicon (JSON); overrides the builtin lexicon");
        command->add_option("--tables", options.tables_path,
                            "callback/widget tables (JSON); overrides the builtin tables");
        command->add_option("--depth", options.depth,
                            "intra-app call depth for DCM reachability")
            ->default_val(2);
        command->add_flag("--json", options.json, "emit JSON instead of text");
        command->add_option("--out", options.out_path, "write output to a file");
        command->add_flag("--diagnostics", options.diagnostics,
                          "include heuristic misses and parser warnings");
    };

    CLI::App* claims = app.add_subcommand("claims", "extract a standardized claim from a policy");
    claims->add_option("--policy", policy_path, "policy file (.html or .txt)")->required();
    claims->add_option("--app-id", app_id, "app identifier for the claim");
    add_common(claims);

    CLI::App* evidence =
        app.add_subcommand("evidence", "extract collection evidence from a decoded app");
    evidence->add_option("--app", app_dir, "apktool-decoded app directory")->required();
    add_common(evidence);

    CLI::App* audit = app.add_subcommand("audit", "fact-check a policy against app evidence");
    audit->add_option("--app", app_dir, "apktool-decoded app directory")->required();
    audit->add_option("--policy", policy_path, "policy file (.html or .txt)")->required();
    add_common(audit);

    CLI::App* corpus =
        app.add_subcommand("corpus-stats", "aggregate statistics over evidence JSON files");
    corpus->add_option("directory", corpus_dir, "directory of evidence JSON files")->required();
    add_common(corpus);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (claims->parsed()) return run_claims(policy_path, app_id, options);
        if (evidence->parsed()) return run_evidence(app_dir, options);
        if (audit->parsed()) return run_audit(app_dir, policy_path, options);
        if (corpus->parsed()) return run_corpus_stats(corpus_dir, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
