#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "iaudit/model.hpp"

namespace iaudit {

/// Converts raw policy bytes to plain text: tags stripped, script/style
/// content dropped, block-level tags turned into newlines, entities decoded,
/// invalid UTF-8 replaced with U+FFFD. Tag-free input passes through
/// unchanged.
std::string strip_html(std::string_view bytes);

struct Sentence {
    std::string text;
    std::size_t begin = 0;  // character span in the source text
    std::size_t end = 0;

    bool operator==(const Sentence&) const = default;
};

/// Splits on '.', '?', '!' and newlines. An abbreviation guard list
/// ("e.g.", "i.e.", "etc.", "Inc.", "No.", ...) and a digit.digit rule
/// suppress false boundaries; spans shorter than 3 non-space characters
/// are dropped.
std::vector<Sentence> segment_sentences(std::string_view text);

struct PolicyDocument {
    std::string source;
    std::string raw_text;
    std::vector<Sentence> sentences;
};

PolicyDocument make_policy_document(std::string source, std::string raw_text);

/// Reads a policy file; .html/.htm (or content starting with '<') goes
/// through strip_html first.
PolicyDocument load_policy_file(const std::filesystem::path& path);

/// Keyword lexicon driving sentence matching. All keys lowercase. Shipped
/// as data/lexicon.json; users extend it with --lexicon.
struct Lexicon {
    std::map<std::string, std::vector<std::string>> nouns;  // keyword -> synonyms
    std::map<std::string, std::vector<std::string>> verbs;
    std::map<std::string, DataType> type_rules;      // phrase pattern -> data type
    std::map<std::string, Technique> technique_rules;
};

Lexicon parse_lexicon_json(std::string_view json_text, const std::string& source);
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon default_lexicon();

enum class SentenceClass {
    Both,
    TechniquesOnly,
    TypesOnly,
    Neither,
};

std::string_view to_string(SentenceClass c);

struct ExtractedSentence {
    SupportSentence sentence;  // text, span, merged keyword list
    std::vector<std::string> matched_verbs;  // canonical lexicon keywords
    std::vector<std::string> matched_nouns;
    DataTypeSet inferred_types;
    TechniqueSet inferred_techniques;
    SentenceClass classification = SentenceClass::Neither;
};

/// Returns a record iff the sentence contains at least one verb keyword and
/// at least one noun keyword or type/technique phrase (synonyms count).
/// Matching runs on lowercased, suffix-normalized tokens.
std::optional<ExtractedSentence> match_sentence(std::string_view sentence, const Lexicon& lexicon);

std::vector<ExtractedSentence> extract_sentences(const PolicyDocument& document,
                                                 const Lexicon& lexicon);

CollectionClaim extract_claims(const PolicyDocument& document, const Lexicon& lexicon,
                               std::string app_id);

struct ClaimStats {
    double both = 0.0;
    double techniques_only = 0.0;
    double types_only = 0.0;
};

/// Fractions over matched sentences, Neither excluded from the denominator.
/// Throws std::invalid_argument if nothing remains.
ClaimStats corpus_claim_stats(const std::vector<ExtractedSentence>& sentences);

}  // namespace iaudit
