#pragma once

#include <map>

#include "iaudit/json_io.hpp"
#include "iaudit/linker.hpp"

namespace iaudit {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Everything the audit command knows about one app, in one place; the
/// human and JSON renderings both come from this struct.
struct AuditReport {
    std::string version{kToolVersion};
    std::string app_id;
    CollectionClaim claim;
    CollectionEvidence evidence;
    FactCheckResult fact_check;
    std::vector<std::string> diagnostics;
    double timing_ms = 0.0;
    std::map<std::string, std::string> inputs;  // input paths and digests

    bool operator==(const AuditReport&) const = default;
};

nlohmann::json to_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& object);

std::string render_report_text(const AuditReport& report, bool include_diagnostics);
std::string render_evidence_table(const CollectionEvidence& evidence);

/// FNV-1a 64-bit content digest, "fnv1a64:<hex>".
std::string content_digest(std::string_view bytes);

}  // namespace iaudit
