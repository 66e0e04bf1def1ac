#include "iaudit/factcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iaudit {
namespace {

template <typename T>
std::set<T> set_difference(const std::set<T>& a, const std::set<T>& b) {
    std::set<T> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
    return out;
}

template <typename T>
std::set<T> set_union(const std::set<T>& a, const std::set<T>& b) {
    std::set<T> out = a;
    out.insert(b.begin(), b.end());
    return out;
}

std::string format_percent(double fraction) {
    std::ostringstream out;
    double percent = fraction * 100.0;
    if (std::abs(percent - std::round(percent)) < 1e-9) {
        out << static_cast<long>(std::llround(percent)) << "%";
    } else {
        out.precision(1);
        out << std::fixed << percent << "%";
    }
    return out.str();
}

std::string format_average(double value) {
    std::ostringstream out;
    if (std::abs(value - std::round(value)) < 1e-9) {
        out << static_cast<long>(std::llround(value));
        return out.str();
    }
    out.precision(2);
    out << std::fixed << value;
    std::string text = out.str();
    while (text.ends_with('0')) text.pop_back();
    if (text.ends_with('.')) text.pop_back();
    return text;
}

}  // namespace

FactCheckResult fact_check(const CollectionClaim& claim, const CollectionEvidence& evidence) {
    if (claim.app_id != evidence.app_id) {
        throw std::invalid_argument("fact_check app id mismatch: claim is for '" + claim.app_id +
                                    "', evidence for '" + evidence.app_id + "'");
    }

    FactCheckResult result;
    result.app_id = claim.app_id;
    result.claimed_types = claim.claimed_types;
    result.claimed_techniques = claim.claimed_techniques;
    result.evidenced_types = evidence.evidenced_types;
    result.evidenced_techniques = evidence.evidenced_techniques;

    result.missing_types = set_difference(result.evidenced_types, result.claimed_types);
    result.missing_techniques =
        set_difference(result.evidenced_techniques, result.claimed_techniques);
    result.overclaimed_types = set_difference(result.claimed_types, result.evidenced_types);
    result.overclaimed_techniques =
        set_difference(result.claimed_techniques, result.evidenced_techniques);

    result.checked_claim_text = render_checked_claim(
        set_union(result.claimed_types, result.evidenced_types),
        set_union(result.claimed_techniques, result.evidenced_techniques), result.missing_types,
        result.missing_techniques);
    return result;
}

CorpusStats corpus_stats(const std::vector<CollectionEvidence>& corpus) {
    if (corpus.empty()) throw std::invalid_argument("corpus_stats requires at least one app");

    CorpusStats stats;
    stats.total_apps = static_cast<int>(corpus.size());

    for (DataType type : kAllDataTypes) {
        TypeStats entry;
        long site_total = 0;
        std::map<Technique, int> technique_counts;

        for (const CollectionEvidence& app : corpus) {
            std::set<InvocationSite> sites;
            TechniqueSet techniques;
            for (const EvidenceRecord& record : app.records) {
                if (record.data_type != type) continue;
                sites.insert(record.invocation);
                techniques.insert(record.techniques.begin(), record.techniques.end());
            }
            if (sites.empty()) continue;
            ++entry.app_count;
            site_total += static_cast<long>(sites.size());
            for (Technique technique : techniques) ++technique_counts[technique];
        }

        entry.percent_collected = static_cast<double>(entry.app_count) / stats.total_apps;
        if (entry.app_count > 0) {
            entry.avg_distinct_dcms = static_cast<double>(site_total) / entry.app_count;
            for (const auto& [technique, count] : technique_counts) {
                entry.technique_shares[technique] =
                    static_cast<double>(count) / entry.app_count;
            }
        }
        stats.per_type.emplace(type, std::move(entry));
    }
    return stats;
}

std::string render_corpus_stats_markdown(const CorpusStats& stats) {
    std::ostringstream out;
    out << "| UI data type | Top techniques of collection | Percent collected | Avg # collected |\n";
    out << "|---|---|---|---|\n";
    for (const auto& [type, entry] : stats.per_type) {
        if (entry.app_count == 0) continue;

        // Techniques ordered by share (descending), canonical order on ties.
        std::vector<std::pair<Technique, double>> shares(entry.technique_shares.begin(),
                                                         entry.technique_shares.end());
        std::stable_sort(shares.begin(), shares.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });

        out << "| " << label(type) << " | ";
        for (std::size_t i = 0; i < shares.size(); ++i) {
            if (i > 0) out << ", ";
            out << label(shares[i].first) << " (" << format_percent(shares[i].second) << ")";
        }
        out << " | " << format_percent(entry.percent_collected) << " | "
            << format_average(entry.avg_distinct_dcms) << " |\n";
    }
    return out.str();
}

}  // namespace iaudit
