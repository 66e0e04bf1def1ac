#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iaudit {

/// The six kinds of user interaction data an Android UI can produce.
/// Enumerator order is the canonical presentation order everywhere
/// (reports, claim texts, JSON arrays).
enum class DataType : std::uint8_t {
    Presentation,
    Binary,
    Categorical,
    UserInput,
    Gesture,
    CompositeGesture,
};

/// How interaction data gets collected once an event fires.
enum class Technique : std::uint8_t {
    Frequency,
    Duration,
    MotionDetails,
};

inline constexpr std::array<DataType, 6> kAllDataTypes{
    DataType::Presentation, DataType::Binary,  DataType::Categorical,
    DataType::UserInput,    DataType::Gesture, DataType::CompositeGesture,
};

inline constexpr std::array<Technique, 3> kAllTechniques{
    Technique::Frequency,
    Technique::Duration,
    Technique::MotionDetails,
};

// std::set sorts by enum value, so iteration order over these sets is
// already the canonical order.
using DataTypeSet = std::set<DataType>;
using TechniqueSet = std::set<Technique>;

/// Human label used in claim texts ("app presentation", "motion details", ...).
std::string_view label(DataType type);
std::string_view label(Technique technique);

/// Stable machine identifier used in JSON ("presentation", "motion_details", ...).
std::string_view id_of(DataType type);
std::string_view id_of(Technique technique);

std::optional<DataType> data_type_from_id(std::string_view id);
std::optional<Technique> technique_from_id(std::string_view id);

std::vector<DataType> canonical_order(const DataTypeSet& types);
std::vector<Technique> canonical_order(const TechniqueSet& techniques);

/// Parse failure in any of the text inputs (smali, XML, claim text, data
/// files). Carries an optional source location.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::string source = {}, int line = 0)
        : std::runtime_error(format(message, source, line)),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const { return source_; }
    int line() const { return line_; }

private:
    static std::string format(const std::string& message, const std::string& source, int line);

    std::string source_;
    int line_;
};

/// One policy sentence backing a claim: verbatim text, character span in
/// the source document, and the lexicon keywords that matched it.
struct SupportSentence {
    std::string sentence;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<std::string> keywords;

    bool operator==(const SupportSentence&) const = default;
};

/// What a privacy policy says the app collects.
struct CollectionClaim {
    std::string app_id;
    std::string source;
    DataTypeSet claimed_types;
    TechniqueSet claimed_techniques;
    std::vector<SupportSentence> support;

    bool operator==(const CollectionClaim&) const = default;
};

/// UI widget identity as declared in a layout file. All fields empty means
/// "no widget": evidence attached directly to an activity.
struct WidgetRef {
    std::string layout_file;
    std::string id_name;
    std::string element_name;

    bool is_null() const { return layout_file.empty() && id_name.empty() && element_name.empty(); }
    bool operator==(const WidgetRef&) const = default;
    auto operator<=>(const WidgetRef&) const = default;
};

/// Bytecode location of one data-collection call.
struct InvocationSite {
    std::string class_name;         // declaring class of the call site
    std::string method_name;        // enclosing method
    std::string method_descriptor;  // enclosing method descriptor
    int instruction_index = 0;

    bool operator==(const InvocationSite&) const = default;
    auto operator<=>(const InvocationSite&) const = default;
};

/// One statically derived finding: this widget's listener callback reaches
/// that analytics call, collecting this kind of data these ways.
struct EvidenceRecord {
    WidgetRef widget;
    DataType data_type = DataType::Presentation;
    TechniqueSet techniques;  // never empty; always contains Frequency
    InvocationSite invocation;
    std::string library;
    std::string callback;
    std::string listener_class;

    bool operator==(const EvidenceRecord&) const = default;
};

struct CollectionEvidence {
    std::string app_id;
    std::vector<EvidenceRecord> records;
    DataTypeSet evidenced_types;        // union of record data types
    TechniqueSet evidenced_techniques;  // union of record techniques

    bool operator==(const CollectionEvidence&) const = default;
};

/// Recomputes the evidenced_types / evidenced_techniques unions from records.
void refresh_evidence_unions(CollectionEvidence& evidence);

/// Set-difference of a claim against evidence plus the annotated claim text.
struct FactCheckResult {
    std::string app_id;
    DataTypeSet claimed_types;
    DataTypeSet evidenced_types;
    TechniqueSet claimed_techniques;
    TechniqueSet evidenced_techniques;
    DataTypeSet missing_types;            // evidenced but not claimed
    TechniqueSet missing_techniques;
    DataTypeSet overclaimed_types;        // claimed but not evidenced
    TechniqueSet overclaimed_techniques;
    std::string checked_claim_text;

    bool has_findings() const { return !missing_types.empty() || !missing_techniques.empty(); }
    bool operator==(const FactCheckResult&) const = default;
};

}  // namespace iaudit
