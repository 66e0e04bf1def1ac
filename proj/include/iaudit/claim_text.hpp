#pragma once

#include "iaudit/model.hpp"

namespace iaudit {

/// Renders the standardized collection claim sentence for the given sets.
/// Deterministic and injective over canonicalized (types, techniques) pairs;
/// empty sets render as "none".
std::string render_claim(const DataTypeSet& types, const TechniqueSet& techniques);

/// Same sentence, but items in the missing sets are wrapped as
/// `[missing: <label>]` in place. Used for checked (fact-checked) claims;
/// the missing sets must be subsets of the rendered sets.
std::string render_checked_claim(const DataTypeSet& types, const TechniqueSet& techniques,
                                 const DataTypeSet& missing_types,
                                 const TechniqueSet& missing_techniques);

struct ParsedClaim {
    DataTypeSet types;
    TechniqueSet techniques;

    bool operator==(const ParsedClaim&) const = default;
};

/// Exact inverse of render_claim on its image. Throws ParseError for any
/// text outside the template grammar.
ParsedClaim parse_claim_text(std::string_view text);

}  // namespace iaudit
