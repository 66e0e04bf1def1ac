#include <doctest.h>

#include "iaudit/json_io.hpp"
#include "iaudit/policy.hpp"

using namespace iaudit;

namespace {

const char* kDamiSentence =
    "We may work with analytics companies to help us understand how the Applications are being "
    "used, such as the frequency and duration of usage.";

const char* kDuolingoSentence =
    "We do record the following data: Patterns, Clicks, Mouse movements, Scrolling, Typing, "
    "Pages visited, Referrers, URL parameters, Session duration.";

std::filesystem::path fixture(const char* relative) {
    return std::filesystem::path{IAUDIT_FIXTURE_DIR} / relative;
}

}  // namespace

TEST_CASE("strip_html removes simple tags") {
    CHECK(strip_html("<p>We collect data.</p>") == "We collect data.\n");
}

TEST_CASE("strip_html drops script and style content") {
    CHECK(strip_html("<script>x()</script>Hello") == "Hello");
    CHECK(strip_html("<style>p { color: red }</style>Hello") == "Hello");
}

TEST_CASE("strip_html passes plain text through unchanged") {
    CHECK(strip_html("We collect data.") == "We collect data.");
    CHECK(strip_html("no markup here\njust lines") == "no markup here\njust lines");
}

TEST_CASE("strip_html decodes entities and handles inline tags") {
    CHECK(strip_html("a &amp; b") == "a & b");
    CHECK(strip_html("We <b>collect</b> data.") == "We collect data.");
    CHECK(strip_html("x &#65; &#x42;") == "x A B");
    CHECK(strip_html("<!-- hidden -->shown") == "shown");
}

TEST_CASE("strip_html replaces invalid utf-8") {
    std::string bad = "ok\xFFok";
    std::string cleaned = strip_html(bad);
    CHECK(cleaned.find('\xFF') == std::string::npos);
    CHECK(cleaned.starts_with("ok"));
    CHECK(cleaned.ends_with("ok"));
}

TEST_CASE("segment_sentences splits on terminators") {
    auto sentences = segment_sentences("We collect data. We track usage.");
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].text == "We collect data.");
    CHECK(sentences[1].text == "We track usage.");
}

TEST_CASE("segment_sentences honors the abbreviation guard") {
    auto sentences = segment_sentences("e.g. clicks and taps are logged.");
    REQUIRE(sentences.size() == 1);
    CHECK(sentences[0].text == "e.g. clicks and taps are logged.");
}

TEST_CASE("segment_sentences drops fragments shorter than 3 visible chars") {
    auto sentences = segment_sentences("A. We collect data.");
    REQUIRE(sentences.size() == 1);
    CHECK(sentences[0].text == "We collect data.");
}

TEST_CASE("segment_sentences keeps decimals intact") {
    auto sentences = segment_sentences("Version 2.5 collects data. More text here.");
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].text == "Version 2.5 collects data.");
}

TEST_CASE("sentence spans reconstruct the document") {
    std::string text = "First sentence here. Second one?  Third!\nFourth via newline";
    auto sentences = segment_sentences(text);
    std::size_t previous_end = 0;
    for (const Sentence& sentence : sentences) {
        CHECK(sentence.begin >= previous_end);
        CHECK(sentence.end <= text.size());
        CHECK(text.substr(sentence.begin, sentence.end - sentence.begin) == sentence.text);
        previous_end = sentence.end;
    }
    CHECK(sentences.size() == 4);
}

TEST_CASE("match_sentence matches the DAMI policy sentence as techniques-only") {
    Lexicon lexicon = default_lexicon();
    auto matched = match_sentence(kDamiSentence, lexicon);
    REQUIRE(matched.has_value());
    CHECK(matched->inferred_techniques ==
          TechniqueSet{Technique::Frequency, Technique::Duration});
    CHECK(matched->inferred_types.empty());
    CHECK(matched->classification == SentenceClass::TechniquesOnly);
}

TEST_CASE("match_sentence ignores keyword-free sentences") {
    Lexicon lexicon = default_lexicon();
    CHECK(!match_sentence("Our offices are located in Berlin.", lexicon).has_value());
}

TEST_CASE("match_sentence handles the Duolingo data list") {
    Lexicon lexicon = default_lexicon();
    auto matched = match_sentence(kDuolingoSentence, lexicon);
    REQUIRE(matched.has_value());
    CHECK(matched->inferred_techniques.count(Technique::Duration) == 1);
    for (DataType type : {DataType::Binary, DataType::Gesture, DataType::UserInput,
                          DataType::Presentation}) {
        CHECK(matched->inferred_types.count(type) == 1);
    }
    CHECK(matched->classification == SentenceClass::Both);
}

TEST_CASE("a verb without any interaction noun or phrase is not a claim") {
    Lexicon lexicon = default_lexicon();
    CHECK(!match_sentence("We use cookies.", lexicon).has_value());
}

TEST_CASE("suffix normalization keeps exception words intact") {
    Lexicon lexicon = default_lexicon();
    // "used" maps to the verb "use"; "settings" must still fire the
    // categorical rule despite the exception list.
    auto matched = match_sentence("Your settings are used for analytics.", lexicon);
    REQUIRE(matched.has_value());
    CHECK(matched->inferred_types == DataTypeSet{DataType::Categorical});
}

TEST_CASE("extract_claims on an empty document yields empty sets") {
    Lexicon lexicon = default_lexicon();
    PolicyDocument document = make_policy_document("empty.txt", "");
    CollectionClaim claim = extract_claims(document, lexicon, "app");
    CHECK(claim.claimed_types.empty());
    CHECK(claim.claimed_techniques.empty());
    CHECK(claim.support.empty());
}

TEST_CASE("extract_claims on the DAMI-only document") {
    Lexicon lexicon = default_lexicon();
    PolicyDocument document = make_policy_document("dami.txt", kDamiSentence);
    CollectionClaim claim = extract_claims(document, lexicon, "dami");
    CHECK(claim.claimed_techniques == TechniqueSet{Technique::Frequency, Technique::Duration});
    CHECK(claim.claimed_types.empty());
    REQUIRE(claim.support.size() == 1);
    CHECK(claim.support[0].sentence == kDamiSentence);
}

TEST_CASE("bundled sample policy segments exactly as hand-annotated") {
    PolicyDocument document = load_policy_file(fixture("policies/sample_policy.html"));
    std::vector<std::string> expected{
        "Privacy Policy",
        "Privacy Policy",
        "We value your privacy.",
        "We collect usage statistics, e.g. how often you tap buttons in the app.",
        "Our analytics partners track the duration of your sessions.",
        "We log scrolling and swiping gestures.",
        "Contact us at No. 5 Example Street.",
        "We store your search inputs to improve results.",
        "We may record the pages visited and the content you view.",
    };
    std::vector<std::string> actual;
    for (const Sentence& sentence : document.sentences) actual.push_back(sentence.text);
    CHECK(actual == expected);
}

TEST_CASE("extract_claims equals an independent per-sentence union") {
    Lexicon lexicon = default_lexicon();
    PolicyDocument document = load_policy_file(fixture("policies/sample_policy.html"));
    CollectionClaim claim = extract_claims(document, lexicon, "sample");

    // Oracle: hand-split sentences, match each in isolation, union by hand.
    std::vector<std::string> hand_split{
        "Privacy Policy",
        "Privacy Policy",
        "We value your privacy.",
        "We collect usage statistics, e.g. how often you tap buttons in the app.",
        "Our analytics partners track the duration of your sessions.",
        "We log scrolling and swiping gestures.",
        "Contact us at No. 5 Example Street.",
        "We store your search inputs to improve results.",
        "We may record the pages visited and the content you view.",
    };
    DataTypeSet oracle_types;
    TechniqueSet oracle_techniques;
    int oracle_matches = 0;
    for (const std::string& sentence : hand_split) {
        if (auto matched = match_sentence(sentence, lexicon)) {
            ++oracle_matches;
            oracle_types.insert(matched->inferred_types.begin(), matched->inferred_types.end());
            oracle_techniques.insert(matched->inferred_techniques.begin(),
                                     matched->inferred_techniques.end());
        }
    }

    CHECK(oracle_matches == 5);
    CHECK(claim.support.size() == 5);
    CHECK(claim.claimed_types == oracle_types);
    CHECK(claim.claimed_techniques == oracle_techniques);
    CHECK(claim.claimed_types == DataTypeSet{DataType::Binary, DataType::UserInput,
                                             DataType::Gesture, DataType::Presentation});
    CHECK(claim.claimed_techniques ==
          TechniqueSet{Technique::Frequency, Technique::Duration});
}

TEST_CASE("claims are deterministic across runs") {
    Lexicon lexicon = default_lexicon();
    PolicyDocument document = load_policy_file(fixture("policies/sample_policy.html"));
    CollectionClaim first = extract_claims(document, lexicon, "sample");
    CollectionClaim second = extract_claims(document, lexicon, "sample");
    CHECK(first == second);
    CHECK(to_json(first).dump() == to_json(second).dump());
}

TEST_CASE("adding a synonym never removes a matched sentence") {
    Lexicon base = default_lexicon();
    std::vector<std::string> sentences{
        kDamiSentence,
        kDuolingoSentence,
        "We value your privacy.",
        "We harvest your usage data.",  // unmatched until 'harvest' is a synonym
        "We collect usage statistics.",
        "Our analytics partners track the duration of your sessions.",
        "Contact us at No. 5 Example Street.",
    };

    std::vector<bool> matched_before;
    for (const std::string& sentence : sentences) {
        matched_before.push_back(match_sentence(sentence, base).has_value());
    }

    Lexicon extended = base;
    extended.verbs["collect"].push_back("harvest");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        bool matched_after = match_sentence(sentences[i], extended).has_value();
        if (matched_before[i]) CHECK(matched_after);
    }
    // The extension actually adds a match.
    CHECK(!match_sentence("We harvest your usage data.", base).has_value());
    CHECK(match_sentence("We harvest your usage data.", extended).has_value());
}

TEST_CASE("every matched sentence gets exactly one classification") {
    Lexicon lexicon = default_lexicon();
    PolicyDocument document = load_policy_file(fixture("policies/sample_policy.html"));
    for (const ExtractedSentence& sentence : extract_sentences(document, lexicon)) {
        bool has_types = !sentence.inferred_types.empty();
        bool has_techniques = !sentence.inferred_techniques.empty();
        SentenceClass expected = has_types && has_techniques ? SentenceClass::Both
                                 : has_techniques            ? SentenceClass::TechniquesOnly
                                 : has_types                 ? SentenceClass::TypesOnly
                                                             : SentenceClass::Neither;
        CHECK(sentence.classification == expected);
    }
}

TEST_CASE("corpus_claim_stats computes fractions over matched sentences") {
    auto make = [](SentenceClass c) {
        ExtractedSentence sentence;
        sentence.classification = c;
        return sentence;
    };
    std::vector<ExtractedSentence> sentences{
        make(SentenceClass::Both),
        make(SentenceClass::TechniquesOnly),
        make(SentenceClass::TypesOnly),
        make(SentenceClass::TechniquesOnly),
    };
    ClaimStats stats = corpus_claim_stats(sentences);
    CHECK(stats.both == doctest::Approx(0.25));
    CHECK(stats.techniques_only == doctest::Approx(0.50));
    CHECK(stats.types_only == doctest::Approx(0.25));
    CHECK(stats.both + stats.techniques_only + stats.types_only == doctest::Approx(1.0));

    SUBCASE("all Both") {
        std::vector<ExtractedSentence> all_both{make(SentenceClass::Both),
                                                make(SentenceClass::Both)};
        ClaimStats s = corpus_claim_stats(all_both);
        CHECK(s.both == doctest::Approx(1.0));
        CHECK(s.techniques_only == doctest::Approx(0.0));
    }

    SUBCASE("Neither excluded from the denominator") {
        sentences.push_back(make(SentenceClass::Neither));
        ClaimStats s = corpus_claim_stats(sentences);
        CHECK(s.both == doctest::Approx(0.25));
    }

    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(corpus_claim_stats({}), std::invalid_argument);
        std::vector<ExtractedSentence> only_neither{make(SentenceClass::Neither)};
        CHECK_THROWS_AS(corpus_claim_stats(only_neither), std::invalid_argument);
    }
}

TEST_CASE("lexicon file validation") {
    CHECK_THROWS_AS(parse_lexicon_json("not json", "test"), ParseError);
    CHECK_THROWS_AS(parse_lexicon_json(R"({"nouns": {}})", "test"), ParseError);
    CHECK_THROWS_AS(parse_lexicon_json(
                        R"({"nouns": {"Upper": []}, "verbs": {}, "type_rules": {},
                            "technique_rules": {}})",
                        "test"),
                    ParseError);
    CHECK_THROWS_AS(parse_lexicon_json(
                        R"({"nouns": {}, "verbs": {}, "type_rules": {"tap": "nonsense"},
                            "technique_rules": {}})",
                        "test"),
                    ParseError);
}
