#pragma once

#include <map>

#include "iaudit/claim_text.hpp"

namespace iaudit {

/// Diffs a claim against evidence. Throws std::invalid_argument when the
/// app ids differ. The checked claim text renders claimed ∪ evidenced with
/// every missing item wrapped as [missing: <label>].
FactCheckResult fact_check(const CollectionClaim& claim, const CollectionEvidence& evidence);

struct TypeStats {
    int app_count = 0;               // apps with at least one record of the type
    double percent_collected = 0.0;  // app_count / total apps
    double avg_distinct_dcms = 0.0;  // mean distinct invocation sites per collecting app
    std::map<Technique, double> technique_shares;  // fraction of collecting apps using it
};

struct CorpusStats {
    int total_apps = 0;
    std::map<DataType, TypeStats> per_type;
};

/// Aggregates evidence across a corpus. Throws std::invalid_argument on an
/// empty list; permutation-invariant.
CorpusStats corpus_stats(const std::vector<CollectionEvidence>& corpus);

/// Markdown table: UI type, top techniques with shares, percent collected,
/// average distinct DCMs.
std::string render_corpus_stats_markdown(const CorpusStats& stats);

}  // namespace iaudit
