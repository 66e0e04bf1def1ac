#include "iaudit/claim_text.hpp"

#include <map>

namespace iaudit {
namespace {

constexpr std::string_view kPrefix = "We collect the following types of user interaction data: ";
constexpr std::string_view kJoiner = ", along with their ";
constexpr std::string_view kSuffix = ".";
constexpr std::string_view kEmpty = "none";

// Data types render grouped by family. A family's members join with "and"
// and all families except app presentation take a trailing "interactions":
// {Presentation, Binary, Categorical, UserInput} renders as
// "app presentation, binary and categorical interactions, and user input
// interactions". Family groups join with ", " and the final junction is
// ", and ".
struct Family {
    std::vector<DataType> members;
    bool interactions_suffix;
};

const std::vector<Family>& families() {
    static const std::vector<Family> f{
        {{DataType::Presentation}, false},
        {{DataType::Binary, DataType::Categorical}, true},
        {{DataType::UserInput}, true},
        {{DataType::Gesture, DataType::CompositeGesture}, true},
    };
    return f;
}

std::string item_label(DataType type, const DataTypeSet& missing) {
    std::string text{label(type)};
    if (missing.count(type)) return "[missing: " + text + "]";
    return text;
}

std::string item_label(Technique technique, const TechniqueSet& missing) {
    std::string text{label(technique)};
    if (missing.count(technique)) return "[missing: " + text + "]";
    return text;
}

std::string render_types(const DataTypeSet& types, const DataTypeSet& missing) {
    if (types.empty()) return std::string{kEmpty};

    std::vector<std::string> groups;
    for (const Family& family : families()) {
        std::string group;
        for (DataType member : family.members) {
            if (!types.count(member)) continue;
            if (!group.empty()) group += " and ";
            group += item_label(member, missing);
        }
        if (group.empty()) continue;
        if (family.interactions_suffix) group += " interactions";
        groups.push_back(std::move(group));
    }

    std::string out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (i > 0) out += (i + 1 == groups.size()) ? ", and " : ", ";
        out += groups[i];
    }
    return out;
}

// Techniques render as a plain list: "frequency, duration and motion details".
std::string render_techniques(const TechniqueSet& techniques, const TechniqueSet& missing) {
    if (techniques.empty()) return std::string{kEmpty};

    std::vector<std::string> items;
    for (Technique technique : techniques) items.push_back(item_label(technique, missing));

    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

// Both halves of the grammar are finite (64 and 8 strings), so the parser
// is a rendered-form lookup.
const std::map<std::string, DataTypeSet, std::less<>>& type_parse_table() {
    static const auto table = [] {
        std::map<std::string, DataTypeSet, std::less<>> t;
        for (unsigned mask = 0; mask < (1u << kAllDataTypes.size()); ++mask) {
            DataTypeSet set;
            for (std::size_t bit = 0; bit < kAllDataTypes.size(); ++bit) {
                if (mask & (1u << bit)) set.insert(kAllDataTypes[bit]);
            }
            t.emplace(render_types(set, {}), std::move(set));
        }
        return t;
    }();
    return table;
}

const std::map<std::string, TechniqueSet, std::less<>>& technique_parse_table() {
    static const auto table = [] {
        std::map<std::string, TechniqueSet, std::less<>> t;
        for (unsigned mask = 0; mask < (1u << kAllTechniques.size()); ++mask) {
            TechniqueSet set;
            for (std::size_t bit = 0; bit < kAllTechniques.size(); ++bit) {
                if (mask & (1u << bit)) set.insert(kAllTechniques[bit]);
            }
            t.emplace(render_techniques(set, {}), std::move(set));
        }
        return t;
    }();
    return table;
}

}  // namespace

std::string render_claim(const DataTypeSet& types, const TechniqueSet& techniques) {
    return render_checked_claim(types, techniques, {}, {});
}

std::string render_checked_claim(const DataTypeSet& types, const TechniqueSet& techniques,
                                 const DataTypeSet& missing_types,
                                 const TechniqueSet& missing_techniques) {
    std::string out{kPrefix};
    out += render_types(types, missing_types);
    out += kJoiner;
    out += render_techniques(techniques, missing_techniques);
    out += kSuffix;
    return out;
}

ParsedClaim parse_claim_text(std::string_view text) {
    if (text.substr(0, kPrefix.size()) != kPrefix) {
        throw ParseError("claim text does not start with the standard template");
    }
    if (text.empty() || text.back() != '.') {
        throw ParseError("claim text does not end with '.'");
    }
    std::string_view body = text.substr(kPrefix.size(), text.size() - kPrefix.size() - 1);

    // Neither half can contain the joiner, so the first occurrence splits.
    std::size_t split = body.find(kJoiner);
    if (split == std::string_view::npos) {
        throw ParseError("claim text lacks the 'along with their' clause");
    }
    std::string_view types_part = body.substr(0, split);
    std::string_view techniques_part = body.substr(split + kJoiner.size());

    auto type_it = type_parse_table().find(types_part);
    if (type_it == type_parse_table().end()) {
        throw ParseError("unrecognized data-type list: '" + std::string{types_part} + "'");
    }
    auto technique_it = technique_parse_table().find(techniques_part);
    if (technique_it == technique_parse_table().end()) {
        throw ParseError("unrecognized technique list: '" + std::string{techniques_part} + "'");
    }
    return ParsedClaim{type_it->second, technique_it->second};
}

}  // namespace iaudit
