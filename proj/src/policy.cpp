#include "iaudit/policy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iaudit/embedded_data.hpp"

namespace iaudit {
namespace {

using nlohmann::json;

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::string to_lower(std::string_view text) {
    std::string out{text};
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view bytes) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = bytes[i];
        std::size_t len = 0;
        if (c < 0x80) {
            len = 1;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
        }
        bool valid = len > 0 && i + len <= bytes.size();
        for (std::size_t k = 1; valid && k < len; ++k) {
            valid = (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
        }
        if (valid) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

const std::set<std::string, std::less<>>& block_tags() {
    static const std::set<std::string, std::less<>> tags{
        "address", "article", "aside",  "blockquote", "body",    "br",     "center",
        "dd",      "div",     "dl",     "dt",         "fieldset", "figcaption",
        "figure",  "footer",  "form",   "h1",         "h2",      "h3",     "h4",
        "h5",      "h6",      "head",   "header",     "hr",      "html",   "li",
        "main",    "nav",     "ol",     "option",     "p",       "pre",    "section",
        "table",   "tbody",   "td",     "tfoot",      "th",      "thead",  "title",
        "tr",      "ul",
    };
    return tags;
}

// Decodes the entity starting at text[pos] (which is '&'). Returns the
// decoded string and advances pos past the entity, or returns nullopt
// leaving pos untouched.
std::optional<std::string> decode_entity(std::string_view text, std::size_t& pos) {
    std::size_t semi = text.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) return std::nullopt;
    std::string_view body = text.substr(pos + 1, semi - pos - 1);
    std::string decoded;
    if (body == "amp") {
        decoded = "&";
    } else if (body == "lt") {
        decoded = "<";
    } else if (body == "gt") {
        decoded = ">";
    } else if (body == "quot") {
        decoded = "\"";
    } else if (body == "apos" || body == "#39") {
        decoded = "'";
    } else if (body == "nbsp") {
        decoded = " ";
    } else if (!body.empty() && body[0] == '#') {
        int base = 10;
        std::string_view digits = body.substr(1);
        if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
            base = 16;
            digits = digits.substr(1);
        }
        if (digits.empty()) return std::nullopt;
        unsigned long code = 0;
        for (char d : digits) {
            int v;
            if (d >= '0' && d <= '9') {
                v = d - '0';
            } else if (base == 16 && d >= 'a' && d <= 'f') {
                v = d - 'a' + 10;
            } else if (base == 16 && d >= 'A' && d <= 'F') {
                v = d - 'A' + 10;
            } else {
                return std::nullopt;
            }
            code = code * base + static_cast<unsigned long>(v);
            if (code > 0x10FFFF) return std::nullopt;
        }
        // UTF-8 encode
        if (code < 0x80) {
            decoded += static_cast<char>(code);
        } else if (code < 0x800) {
            decoded += static_cast<char>(0xC0 | (code >> 6));
            decoded += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
            decoded += static_cast<char>(0xE0 | (code >> 12));
            decoded += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            decoded += static_cast<char>(0x80 | (code & 0x3F));
        } else {
            decoded += static_cast<char>(0xF0 | (code >> 18));
            decoded += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
            decoded += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            decoded += static_cast<char>(0x80 | (code & 0x3F));
        }
    } else {
        return std::nullopt;
    }
    pos = semi + 1;
    return decoded;
}

// Extracts the element name from a tag starting at '<'.
std::string tag_name(std::string_view tag_body) {
    std::size_t i = 0;
    if (i < tag_body.size() && tag_body[i] == '/') ++i;
    std::size_t start = i;
    while (i < tag_body.size() &&
           (std::isalnum(static_cast<unsigned char>(tag_body[i])) || tag_body[i] == '-')) {
        ++i;
    }
    return to_lower(tag_body.substr(start, i - start));
}

// Skips past the closing tag of a raw-content element (script/style).
std::size_t skip_raw_element(std::string_view text, std::size_t pos, std::string_view name) {
    while (pos < text.size()) {
        std::size_t lt = text.find('<', pos);
        if (lt == std::string_view::npos) return text.size();
        if (lt + 1 < text.size() && text[lt + 1] == '/' &&
            iequals(text.substr(lt + 2, name.size()), name)) {
            std::size_t gt = text.find('>', lt);
            return gt == std::string_view::npos ? text.size() : gt + 1;
        }
        pos = lt + 1;
    }
    return text.size();
}

const std::set<std::string, std::less<>>& abbreviation_guards() {
    // Stored lowercase with the trailing dot.
    static const std::set<std::string, std::less<>> guards{
        "e.g.", "i.e.", "etc.", "inc.", "no.", "dr.", "mr.", "mrs.",
        "ms.",  "vs.",  "cf.",  "approx.", "st.", "u.s.",
    };
    return guards;
}

// Irregular forms the plain -s/-ing/-ed stripper would mangle.
const std::map<std::string, std::string, std::less<>>& suffix_exceptions() {
    static const std::map<std::string, std::string, std::less<>> exceptions{
        {"being", "being"},       {"captured", "capture"}, {"capturing", "capture"},
        {"during", "during"},     {"logged", "log"},       {"logging", "log"},
        {"rating", "rating"},     {"ratings", "rating"},   {"settings", "settings"},
        {"stored", "store"},      {"storing", "store"},    {"used", "use"},
        {"using", "use"},
    };
    return exceptions;
}

std::string normalize_token(std::string_view token) {
    std::string word = to_lower(token);
    if (auto it = suffix_exceptions().find(word); it != suffix_exceptions().end()) {
        return it->second;
    }
    if (word.size() > 5 && word.ends_with("ing")) {
        return word.substr(0, word.size() - 3);
    }
    if (word.size() > 4 && word.ends_with("ed")) {
        return word.substr(0, word.size() - 2);
    }
    if (word.size() > 3 && word.ends_with("s") && !word.ends_with("ss") &&
        !word.ends_with("us") && !word.ends_with("is")) {
        return word.substr(0, word.size() - 1);
    }
    return word;
}

std::vector<std::string> tokenize_normalized(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isalnum(c)) {
            std::size_t start = i;
            while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
            tokens.push_back(normalize_token(text.substr(start, i - start)));
        } else {
            ++i;
        }
    }
    return tokens;
}

std::vector<std::string> split_pattern(std::string_view pattern) {
    std::vector<std::string> parts;
    std::istringstream in{std::string{pattern}};
    std::string word;
    while (in >> word) parts.push_back(normalize_token(word));
    return parts;
}

// Phrase patterns match on token boundaries; every pattern token must be a
// prefix of the corresponding sentence token ("typ" matches "typing",
// "gestur" matches "gestures", but "form" does not match "information").
bool phrase_matches(const std::vector<std::string>& pattern,
                    const std::vector<std::string>& tokens) {
    if (pattern.empty() || pattern.size() > tokens.size()) return false;
    for (std::size_t start = 0; start + pattern.size() <= tokens.size(); ++start) {
        bool all = true;
        for (std::size_t k = 0; k < pattern.size(); ++k) {
            if (!tokens[start + k].starts_with(pattern[k])) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

struct CompiledKeyword {
    std::string canonical;
    std::vector<std::string> forms;  // normalized keyword + synonyms
};

struct CompiledRule {
    std::string pattern;  // original phrase
    std::vector<std::string> tokens;
};

struct CompiledLexicon {
    std::vector<CompiledKeyword> nouns;
    std::vector<CompiledKeyword> verbs;
    std::vector<std::pair<CompiledRule, DataType>> type_rules;
    std::vector<std::pair<CompiledRule, Technique>> technique_rules;
};

CompiledLexicon compile(const Lexicon& lexicon) {
    CompiledLexicon out;
    auto compile_keywords = [](const std::map<std::string, std::vector<std::string>>& source) {
        std::vector<CompiledKeyword> keywords;
        for (const auto& [keyword, synonyms] : source) {
            CompiledKeyword entry;
            entry.canonical = keyword;
            entry.forms.push_back(normalize_token(keyword));
            for (const std::string& synonym : synonyms) {
                entry.forms.push_back(normalize_token(synonym));
            }
            keywords.push_back(std::move(entry));
        }
        return keywords;
    };
    out.nouns = compile_keywords(lexicon.nouns);
    out.verbs = compile_keywords(lexicon.verbs);
    for (const auto& [pattern, type] : lexicon.type_rules) {
        out.type_rules.push_back({CompiledRule{pattern, split_pattern(pattern)}, type});
    }
    for (const auto& [pattern, technique] : lexicon.technique_rules) {
        out.technique_rules.push_back(
            {CompiledRule{pattern, split_pattern(pattern)}, technique});
    }
    return out;
}

std::optional<ExtractedSentence> match_compiled(std::string_view sentence,
                                                const CompiledLexicon& lexicon) {
    const std::vector<std::string> tokens = tokenize_normalized(sentence);
    if (tokens.empty()) return std::nullopt;

    auto match_keywords = [&](const std::vector<CompiledKeyword>& keywords) {
        std::vector<std::string> hits;
        for (const CompiledKeyword& keyword : keywords) {
            bool hit = std::any_of(keyword.forms.begin(), keyword.forms.end(),
                                   [&](const std::string& form) {
                                       return std::find(tokens.begin(), tokens.end(), form) !=
                                              tokens.end();
                                   });
            if (hit) hits.push_back(keyword.canonical);
        }
        return hits;
    };

    ExtractedSentence result;
    result.matched_verbs = match_keywords(lexicon.verbs);
    if (result.matched_verbs.empty()) return std::nullopt;
    result.matched_nouns = match_keywords(lexicon.nouns);

    std::vector<std::string> rule_hits;
    for (const auto& [rule, type] : lexicon.type_rules) {
        if (phrase_matches(rule.tokens, tokens)) {
            result.inferred_types.insert(type);
            rule_hits.push_back(rule.pattern);
        }
    }
    for (const auto& [rule, technique] : lexicon.technique_rules) {
        if (phrase_matches(rule.tokens, tokens)) {
            result.inferred_techniques.insert(technique);
            rule_hits.push_back(rule.pattern);
        }
    }

    // A lone verb is not a claim: require a noun keyword or a concrete
    // interaction phrase.
    if (result.matched_nouns.empty() && rule_hits.empty()) return std::nullopt;

    const bool has_types = !result.inferred_types.empty();
    const bool has_techniques = !result.inferred_techniques.empty();
    result.classification = has_types && has_techniques ? SentenceClass::Both
                            : has_techniques            ? SentenceClass::TechniquesOnly
                            : has_types                 ? SentenceClass::TypesOnly
                                                        : SentenceClass::Neither;

    result.sentence.sentence = std::string{sentence};
    result.sentence.keywords = result.matched_verbs;
    result.sentence.keywords.insert(result.sentence.keywords.end(), result.matched_nouns.begin(),
                                    result.matched_nouns.end());
    result.sentence.keywords.insert(result.sentence.keywords.end(), rule_hits.begin(),
                                    rule_hits.end());
    return result;
}

void require_lowercase_key(const std::string& key, const std::string& source) {
    if (key != to_lower(key)) {
        throw ParseError("lexicon key must be lowercase: '" + key + "'", source);
    }
}

}  // namespace

std::string strip_html(std::string_view bytes) {
    const std::string text = sanitize_utf8(bytes);
    std::string out;
    out.reserve(text.size());

    auto emit_newline = [&out] {
        if (!out.empty() && out.back() != '\n') out += '\n';
    };

    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '<') {
            if (text.compare(i, 4, "<!--") == 0) {
                std::size_t end = text.find("-->", i + 4);
                i = end == std::string::npos ? text.size() : end + 3;
                continue;
            }
            if (i + 1 < text.size() && (text[i + 1] == '!' || text[i + 1] == '?')) {
                std::size_t gt = text.find('>', i);
                i = gt == std::string::npos ? text.size() : gt + 1;
                continue;
            }
            std::size_t gt = i + 1;
            char quote = 0;
            while (gt < text.size()) {
                char t = text[gt];
                if (quote != 0) {
                    if (t == quote) quote = 0;
                } else if (t == '"' || t == '\'') {
                    quote = t;
                } else if (t == '>') {
                    break;
                }
                ++gt;
            }
            if (gt >= text.size()) {
                // Dangling '<' without a closing '>': keep it literal.
                out += c;
                ++i;
                continue;
            }
            std::string name = tag_name(text.substr(i + 1, gt - i - 1));
            bool closing = text[i + 1] == '/';
            i = gt + 1;
            if (!closing && (name == "script" || name == "style")) {
                i = skip_raw_element(text, i, name);
                continue;
            }
            if (block_tags().count(name)) emit_newline();
            continue;
        }
        if (c == '&') {
            if (auto decoded = decode_entity(text, i)) {
                out += *decoded;
                continue;
            }
        }
        out += c;
        ++i;
    }
    return out;
}

std::vector<Sentence> segment_sentences(std::string_view text) {
    std::vector<Sentence> sentences;

    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(text[begin])) ++begin;
        while (end > begin && is_space(text[end - 1])) --end;
        if (end <= begin) return;
        int visible = 0;
        for (std::size_t k = begin; k < end; ++k) {
            if (!is_space(text[k])) ++visible;
        }
        if (visible < 3) return;
        sentences.push_back(Sentence{std::string{text.substr(begin, end - begin)}, begin, end});
    };

    // The dotted token around position `dot` ("e.g." hits on either of its
    // dots).
    auto guarded_abbreviation = [&](std::size_t dot) {
        std::size_t start = dot;
        while (start > 0 &&
               (std::isalnum(static_cast<unsigned char>(text[start - 1])) ||
                text[start - 1] == '.')) {
            --start;
        }
        std::size_t end = dot + 1;
        while (end < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '.')) {
            ++end;
        }
        std::string token = to_lower(text.substr(start, end - start));
        return abbreviation_guards().count(token) > 0;
    };

    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            emit(start, i);
            start = i + 1;
            ++i;
            continue;
        }
        if (c == '.' || c == '?' || c == '!') {
            if (c == '.') {
                bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
                bool digit_after =
                    i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
                if ((digit_before && digit_after) || guarded_abbreviation(i)) {
                    ++i;
                    continue;
                }
            }
            std::size_t end = i + 1;
            while (end < text.size() &&
                   (text[end] == '.' || text[end] == '?' || text[end] == '!')) {
                ++end;
            }
            emit(start, end);
            start = end;
            i = end;
            continue;
        }
        ++i;
    }
    emit(start, text.size());
    return sentences;
}

PolicyDocument make_policy_document(std::string source, std::string raw_text) {
    PolicyDocument document;
    document.source = std::move(source);
    document.raw_text = std::move(raw_text);
    document.sentences = segment_sentences(document.raw_text);
    return document;
}

PolicyDocument load_policy_file(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw std::runtime_error("cannot read policy file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string bytes = buffer.str();

    std::string extension = to_lower(path.extension().string());
    bool looks_like_html = extension == ".html" || extension == ".htm";
    if (!looks_like_html) {
        std::size_t first = bytes.find_first_not_of(" \t\r\n");
        looks_like_html = first != std::string::npos && bytes[first] == '<';
    }
    std::string text = looks_like_html ? strip_html(bytes) : sanitize_utf8(bytes);
    return make_policy_document(path.string(), std::move(text));
}

Lexicon parse_lexicon_json(std::string_view json_text, const std::string& source) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string{"invalid lexicon JSON: "} + e.what(), source);
    }
    if (!root.is_object()) throw ParseError("lexicon root must be an object", source);

    Lexicon lexicon;
    auto read_keywords = [&](const char* field,
                             std::map<std::string, std::vector<std::string>>& target) {
        if (!root.contains(field)) throw ParseError(std::string{"missing map: "} + field, source);
        for (const auto& [key, value] : root.at(field).items()) {
            require_lowercase_key(key, source);
            std::vector<std::string> synonyms;
            for (const auto& synonym : value) {
                synonyms.push_back(to_lower(synonym.get<std::string>()));
            }
            target.emplace(key, std::move(synonyms));
        }
    };
    read_keywords("nouns", lexicon.nouns);
    read_keywords("verbs", lexicon.verbs);

    if (!root.contains("type_rules")) throw ParseError("missing map: type_rules", source);
    for (const auto& [pattern, value] : root.at("type_rules").items()) {
        require_lowercase_key(pattern, source);
        auto type = data_type_from_id(value.get<std::string>());
        if (!type) {
            throw ParseError("unknown data type '" + value.get<std::string>() + "' for pattern '" +
                                 pattern + "'",
                             source);
        }
        lexicon.type_rules.emplace(pattern, *type);
    }
    if (!root.contains("technique_rules")) throw ParseError("missing map: technique_rules", source);
    for (const auto& [pattern, value] : root.at("technique_rules").items()) {
        require_lowercase_key(pattern, source);
        auto technique = technique_from_id(value.get<std::string>());
        if (!technique) {
            throw ParseError("unknown technique '" + value.get<std::string>() + "' for pattern '" +
                                 pattern + "'",
                             source);
        }
        lexicon.technique_rules.emplace(pattern, *technique);
    }
    return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw std::runtime_error("cannot read lexicon file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_lexicon_json(buffer.str(), path.string());
}

Lexicon default_lexicon() {
    return parse_lexicon_json(embedded::kLexiconJson, "<builtin lexicon>");
}

std::string_view to_string(SentenceClass c) {
    switch (c) {
        case SentenceClass::Both: return "both";
        case SentenceClass::TechniquesOnly: return "techniques_only";
        case SentenceClass::TypesOnly: return "types_only";
        case SentenceClass::Neither: return "neither";
    }
    return "";
}

std::optional<ExtractedSentence> match_sentence(std::string_view sentence,
                                                const Lexicon& lexicon) {
    return match_compiled(sentence, compile(lexicon));
}

std::vector<ExtractedSentence> extract_sentences(const PolicyDocument& document,
                                                 const Lexicon& lexicon) {
    const CompiledLexicon compiled = compile(lexicon);
    std::vector<ExtractedSentence> out;
    for (const Sentence& sentence : document.sentences) {
        if (auto matched = match_compiled(sentence.text, compiled)) {
            matched->sentence.begin = sentence.begin;
            matched->sentence.end = sentence.end;
            out.push_back(std::move(*matched));
        }
    }
    return out;
}

CollectionClaim extract_claims(const PolicyDocument& document, const Lexicon& lexicon,
                               std::string app_id) {
    CollectionClaim claim;
    claim.app_id = std::move(app_id);
    claim.source = document.source;
    for (ExtractedSentence& sentence : extract_sentences(document, lexicon)) {
        claim.claimed_types.insert(sentence.inferred_types.begin(), sentence.inferred_types.end());
        claim.claimed_techniques.insert(sentence.inferred_techniques.begin(),
                                        sentence.inferred_techniques.end());
        claim.support.push_back(std::move(sentence.sentence));
    }
    return claim;
}

ClaimStats corpus_claim_stats(const std::vector<ExtractedSentence>& sentences) {
    long both = 0;
    long techniques_only = 0;
    long types_only = 0;
    for (const ExtractedSentence& sentence : sentences) {
        switch (sentence.classification) {
            case SentenceClass::Both: ++both; break;
            case SentenceClass::TechniquesOnly: ++techniques_only; break;
            case SentenceClass::TypesOnly: ++types_only; break;
            case SentenceClass::Neither: break;
        }
    }
    const long total = both + techniques_only + types_only;
    if (total == 0) throw std::invalid_argument("no matched sentences");
    const double denominator = static_cast<double>(total);
    return ClaimStats{both / denominator, techniques_only / denominator, types_only / denominator};
}

}  // namespace iaudit
