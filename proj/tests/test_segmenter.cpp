#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "slrkb/segmenter.hpp"
#include "slrkb/sentences.hpp"

#include "test_helpers.hpp"

using slrkb::SectionLabel;

namespace {

slrkb::PrimaryStudy study_with(const std::string& abstract_text) {
    slrkb::PrimaryStudy s;
    s.id = "t";
    s.title = "t";
    s.year = 2000;
    s.abstract_text = abstract_text;
    return s;
}

std::vector<SectionLabel> labels_of(const slrkb::StructuredAbstract& sa) {
    std::vector<SectionLabel> out;
    for (const auto& ls : sa.labeled) out.push_back(ls.label);
    return out;
}

const std::string kSeedAbstract =
    "[Background]: Systematic Literature Review (SLR) has become an important software "
    "engineering research method but costs tremendous efforts. [Aim]: This paper proposes an "
    "approach to leverage on empirically evolved ontology to support automating key SLR "
    "activities. [Method]: First, we propose an ontology, SLRONT, built on SLR experiences and "
    "best practices as a groundwork to capture common terminologies and their relationships "
    "during SLR processes; second, we present an extended version of SLRONT, the COSONT and "
    "instantiate it with the knowledge and concepts extracted from structured abstracts. Case "
    "studies illustrate the details of applying it for supporting SLR steps. [Results]: Results "
    "show that through using COSONT, we acquire the same conclusion compared with sheer manual "
    "works, but the efforts involved is significantly reduced. [Conclusions]: The approach of "
    "using ontology could effectively and efficiently support the conducting of systematic "
    "literature review.";

}  // namespace

TEST_CASE("two plain sentences split at the period") {
    auto s = slrkb::split_sentences("We propose X. Results show Y.");
    REQUIRE(s.size() == 2);
    CHECK(s[0].text == "We propose X.");
    CHECK(s[1].text == "Results show Y.");
    CHECK(s[0].position_ratio == 0.0);
    CHECK(s[1].position_ratio == 1.0);
}

TEST_CASE("abbreviation stop list suppresses false splits") {
    auto s = slrkb::split_sentences("Budgen et al. proved Z.");
    REQUIRE(s.size() == 1);
    auto s2 = slrkb::split_sentences("See Fig. 3 for details. We continue.");
    REQUIRE(s2.size() == 2);
    auto s3 = slrkb::split_sentences("This is e.g. An example without split.");
    CHECK(s3.size() == 1);
}

TEST_CASE("single sentence without terminator") {
    auto s = slrkb::split_sentences("One sentence only");
    REQUIRE(s.size() == 1);
    CHECK(s[0].position_ratio == 0.0);
    CHECK(s[0].index == 0);
}

TEST_CASE("joining sentences reproduces the normalized abstract") {
    std::mt19937 rng(5150);
    const std::vector<std::string> words = {"We",    "propose", "a",       "model.",
                                            "Results", "show",  "gains!",  "e.g.",
                                            "Fig.",  "3",       "is",      "nice?",
                                            "It",    "works."};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len(1, 40);
    for (int iter = 0; iter < 300; ++iter) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (i) text += (iter % 3 == 0 ? "  " : " ");
            text += words[pick(rng)];
        }
        auto sentences = slrkb::split_sentences(text);
        REQUIRE(!sentences.empty());
        std::string joined;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (i) joined += " ";
            joined += sentences[i].text;
            CHECK(sentences[i].index == i);
            CHECK(!sentences[i].text.empty());
        }
        CHECK(joined == slrkb::normalize_ws(text));
    }
}

TEST_CASE("heading detection finds the five bracketed headings") {
    auto h = slrkb::detect_headings(kSeedAbstract);
    REQUIRE(h.has_value());
    REQUIRE(h->size() == 5);
    CHECK((*h)[0].token == "background");
    CHECK((*h)[1].token == "aim");
    CHECK((*h)[2].token == "method");
    CHECK((*h)[3].token == "results");
    CHECK((*h)[4].token == "conclusions");
}

TEST_CASE("no headings in plain prose") {
    CHECK(!slrkb::detect_headings("We propose a method.").has_value());
    // one heading alone is not enough
    CHECK(!slrkb::detect_headings("Background: just one.").has_value());
}

TEST_CASE("colon-delimited uppercase headings are recognized") {
    auto h = slrkb::detect_headings("BACKGROUND: x. METHODS: y. CONCLUSIONS: z.");
    REQUIRE(h.has_value());
    REQUIRE(h->size() == 3);
    CHECK((*h)[0].token == "background");
    CHECK((*h)[1].token == "methods");
    CHECK((*h)[2].token == "conclusions");
    // lowercase running text does not trigger the colon form
    CHECK(!slrkb::detect_headings("the results: good. the methods: varied.").has_value());
}

TEST_CASE("heading merge table") {
    CHECK(slrkb::map_heading("Aim") == SectionLabel::Method);
    CHECK(slrkb::map_heading("Objective") == SectionLabel::Method);
    CHECK(slrkb::map_heading("Results") == SectionLabel::Conclusion);
    CHECK(slrkb::map_heading("Finding") == SectionLabel::Conclusion);
    CHECK(slrkb::map_heading("Background") == SectionLabel::Background);
    CHECK(slrkb::map_heading("Context") == SectionLabel::Background);
    CHECK(slrkb::map_heading("Purpose") == SectionLabel::Background);
    CHECK_THROWS_AS(slrkb::map_heading("banana"), slrkb::UnknownHeadingError);
}

TEST_CASE("cue and prior scoring hand traces") {
    const auto lex = slrkb::default_cue_lexicons();
    auto score_at = [&](const std::string& text, double ratio) {
        slrkb::Sentence s{0, text, ratio};
        return slrkb::score_sentence(s, lex);
    };
    {
        auto s = score_at("Results show that the model outperforms the baseline.", 0.9);
        CHECK(s[2] > s[0]);
        CHECK(s[2] > s[1]);
    }
    {
        auto s = score_at("Software cost estimation has attracted much attention.", 0.0);
        CHECK(s[0] > s[1]);
        CHECK(s[0] > s[2]);
    }
    {
        // no cue hits: the band priors decide, and mid-position favors Method
        auto s = score_at("The quick brown fox jumps.", 0.5);
        CHECK(s[1] > s[0]);
        CHECK(s[1] > s[2]);
        CHECK(s[0] == 0.2);
        CHECK(s[1] == 1.0);
        CHECK(s[2] == 0.2);
    }
}

TEST_CASE("gapped cue phrases match across words") {
    const auto lex = slrkb::default_cue_lexicons();
    slrkb::Sentence s{0, "Estimation plays a truly central role in planning.", 0.0};
    auto scores = slrkb::score_sentence(s, lex);
    CHECK(scores[0] == 1.5 + 1.0);  // "plays a * role" plus the early-band prior
}

TEST_CASE("monotone labeling DP equals brute force on random scores") {
    std::mt19937 rng(424242);
    for (int iter = 0; iter < 300; ++iter) {
        auto scores = testutil::random_scores(rng);
        auto dp = slrkb::choose_monotone_labels(scores);
        auto [best_score, best_labels] = testutil::brute_force_monotone_best(scores);
        double dp_score = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            dp_score += scores[i][static_cast<std::size_t>(dp[i])];
        }
        CHECK(dp_score == best_score);
        CHECK(dp == best_labels);  // tie-break agreement, not just score equality
    }
}

TEST_CASE("segmenting the bracketed-heading fixture maps through the merge table") {
    auto sa = slrkb::segment_abstract(study_with(kSeedAbstract), slrkb::default_cue_lexicons());
    CHECK(sa.explicit_headings);
    REQUIRE(sa.labeled.size() == 6);
    CHECK(labels_of(sa) == std::vector<SectionLabel>{
                               SectionLabel::Background, SectionLabel::Method,
                               SectionLabel::Method, SectionLabel::Method,
                               SectionLabel::Conclusion, SectionLabel::Conclusion});
    for (const auto& ls : sa.labeled) CHECK(ls.confidence == 1.0);
}

TEST_CASE("single method-flavored sentence lands on Method") {
    auto sa = slrkb::segment_abstract(study_with("We evaluate regression models."),
                                      slrkb::default_cue_lexicons());
    REQUIRE(sa.labeled.size() == 1);
    CHECK(sa.labeled[0].label == SectionLabel::Method);
    CHECK(!sa.explicit_headings);
}

TEST_CASE("three-sentence abstract with ordered cues labels B M C") {
    auto sa = slrkb::segment_abstract(
        study_with("Cost estimation has attracted much attention. We propose a new model. "
                   "Results show clear gains."),
        slrkb::default_cue_lexicons());
    REQUIRE(sa.labeled.size() == 3);
    CHECK(labels_of(sa) == std::vector<SectionLabel>{SectionLabel::Background,
                                                     SectionLabel::Method,
                                                     SectionLabel::Conclusion});
}

TEST_CASE("confidence is a bounded share of the three scores") {
    auto sa = slrkb::segment_abstract(
        study_with("We propose a model. Results show gains."), slrkb::default_cue_lexicons());
    for (const auto& ls : sa.labeled) {
        CHECK(ls.confidence > 0.0);
        CHECK(ls.confidence <= 1.0);
    }
}

TEST_CASE("labels stay monotone on fuzzed abstracts") {
    std::mt19937 rng(777);
    const std::vector<std::string> sentence_pool = {
        "Software cost estimation has attracted much attention.",
        "We propose a neural approach.",
        "Results show that it outperforms the baseline.",
        "This paper presents a tool.",
        "In recent years the field has grown.",
        "We conclude that more data helps.",
        "The model is applied to new projects.",
        "Nothing special here.",
        "BACKGROUND: context matters.",
        "METHODS: we did things.",
    };
    std::uniform_int_distribution<std::size_t> pick(0, sentence_pool.size() - 1);
    std::uniform_int_distribution<int> len(1, 9);
    const auto lex = slrkb::default_cue_lexicons();
    for (int iter = 0; iter < 300; ++iter) {
        std::string text;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (i) text += " ";
            text += sentence_pool[pick(rng)];
        }
        auto sa = slrkb::segment_abstract(study_with(text), lex);
        std::vector<SectionLabel> ls = labels_of(sa);
        CHECK(slrkb::labels_monotone(ls));
        // totality: every sentence labeled exactly once, nothing dropped
        std::string joined;
        for (std::size_t i = 0; i < sa.labeled.size(); ++i) {
            if (i) joined += " ";
            joined += sa.labeled[i].sentence.text;
            CHECK(sa.labeled[i].sentence.index == i);
        }
        CHECK(joined == slrkb::normalize_ws(text));
    }
}

TEST_CASE("explicit headings override any cue lexicon") {
    const std::string text = "BACKGROUND: One thing. METHODS: Another thing. RESULTS: Done.";
    auto base = slrkb::segment_abstract(study_with(text), slrkb::default_cue_lexicons());
    REQUIRE(base.explicit_headings);

    // adversarial lexicon: every cue pushes toward Conclusion
    slrkb::CueLexicons twisted = slrkb::default_cue_lexicons();
    twisted.cues[0].clear();
    twisted.cues[1].clear();
    twisted.cues[2] = {"thing", "background", "methods", "one", "another"};
    twisted.priors = {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {9.0, 9.0, 9.0}}};
    auto adversarial = slrkb::segment_abstract(study_with(text), twisted);
    CHECK(adversarial.explicit_headings);
    CHECK(labels_of(adversarial) == labels_of(base));
}

TEST_CASE("out-of-order headings fall back to the scored path") {
    // Results before Background would break monotonicity if headings were
    // trusted blindly.
    const std::string text = "RESULTS: Early spoiler. BACKGROUND: Context arrives late.";
    auto sa = slrkb::segment_abstract(study_with(text), slrkb::default_cue_lexicons());
    CHECK(!sa.explicit_headings);
    CHECK(slrkb::labels_monotone(labels_of(sa)));
}

TEST_CASE("cue lexicon file round trips against built-in defaults") {
    auto from_file = slrkb::load_cue_lexicons(testutil::data_file("cue_lexicon.txt"));
    auto builtin = slrkb::default_cue_lexicons();
    CHECK(from_file.cues[0] == builtin.cues[0]);
    CHECK(from_file.cues[1] == builtin.cues[1]);
    CHECK(from_file.cues[2] == builtin.cues[2]);
    CHECK(from_file.bands == builtin.bands);
    CHECK(from_file.priors == builtin.priors);
    CHECK(from_file.cue_weight == builtin.cue_weight);
    CHECK(from_file.max_hits == builtin.max_hits);
}

TEST_CASE("lexicon parser rejects bad input") {
    std::istringstream bad1("prior.bands = 0.25");
    CHECK_THROWS_AS(slrkb::parse_cue_lexicons(bad1), slrkb::ConfigError);
    std::istringstream bad2("no equals sign here");
    CHECK_THROWS_AS(slrkb::parse_cue_lexicons(bad2), slrkb::ConfigError);
    std::istringstream bad3("unknown.key = 1");
    CHECK_THROWS_AS(slrkb::parse_cue_lexicons(bad3), slrkb::ConfigError);
}

TEST_CASE("segmentation jsonl io round trips") {
    auto corpus = testutil::load_bundled_corpus();
    std::vector<slrkb::StructuredAbstract> sas;
    for (const auto& s : corpus.studies) {
        sas.push_back(slrkb::segment_abstract(s, slrkb::default_cue_lexicons()));
    }
    std::ostringstream os;
    slrkb::write_segments_jsonl(os, sas);
    std::istringstream in(os.str());
    auto back = slrkb::read_segments_jsonl(in);
    REQUIRE(back.size() == sas.size());
    for (std::size_t i = 0; i < sas.size(); ++i) {
        CHECK(back[i].study_id == sas[i].study_id);
        CHECK(back[i].explicit_headings == sas[i].explicit_headings);
        REQUIRE(back[i].labeled.size() == sas[i].labeled.size());
        for (std::size_t j = 0; j < sas[i].labeled.size(); ++j) {
            CHECK(back[i].labeled[j].sentence.text == sas[i].labeled[j].sentence.text);
            CHECK(back[i].labeled[j].label == sas[i].labeled[j].label);
        }
    }
}
