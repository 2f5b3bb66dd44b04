#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "slrkb/replicate.hpp"

#include "test_helpers.hpp"

namespace {

struct Bundle {
    slrkb::Corpus corpus;
    slrkb::GoldAnnotations gold;
    slrkb::CueLexicons lexicons;
    slrkb::Schema schema;
    slrkb::Vocabulary vocab;

    Bundle()
        : corpus(testutil::load_bundled_corpus()),
          gold(testutil::load_bundled_gold()),
          lexicons(slrkb::default_cue_lexicons()),
          schema(slrkb::build_schema()),
          vocab(slrkb::default_vocabulary(schema)) {}

    slrkb::PipelineArtifacts run(const slrkb::Corpus& c) const {
        return slrkb::run_pipeline(c, lexicons, vocab);
    }
};

}  // namespace

TEST_CASE("selection replication matches gold with perfect precision and recall") {
    Bundle b;
    auto art = b.run(b.corpus);
    b.gold.validate_against(art.corpus);
    auto report = slrkb::replicate_selection(art, b.gold);
    CHECK(report.pass);
    CHECK(report.precision == 1.0);
    CHECK(report.recall == 1.0);
    CHECK(report.selected == std::vector<std::string>{"S03", "S07", "S11", "S15"});
    CHECK(report.corpus_size == 20);
}

TEST_CASE("selection agrees with the substring-scan oracle") {
    Bundle b;
    auto art = b.run(b.corpus);
    auto report = slrkb::replicate_selection(art, b.gold);
    CHECK(report.selected == testutil::substring_selection_oracle(b.corpus, b.gold));
}

TEST_CASE("verdict replication reproduces the expected counts and winner") {
    Bundle b;
    auto art = b.run(b.corpus);
    auto report = slrkb::replicate_verdict(art, b.gold);
    CHECK(report.pass);
    CHECK(report.result.x_better == 3);
    CHECK(report.result.y_better == 0);
    CHECK(report.result.equivalent == 2);
    CHECK(report.result.comparisons() == 5);
    CHECK(report.result.winner == slrkb::Verdict::Winner::X);
    CHECK(report.x == "neural network");
}

TEST_CASE("background-only mentions keep the trap studies out of the selection") {
    Bundle b;
    auto art = b.run(b.corpus);
    auto report = slrkb::replicate_selection(art, b.gold);
    REQUIRE(b.gold.background_traps.size() == 3);
    for (const auto& trap : b.gold.background_traps) {
        CAPTURE(trap);
        CHECK(std::find(report.selected.begin(), report.selected.end(), trap) ==
              report.selected.end());
        // the traps really do name both models somewhere in the abstract
        const auto* study = [&]() -> const slrkb::PrimaryStudy* {
            for (const auto& s : b.corpus.studies) {
                if (s.id == trap) return &s;
            }
            return nullptr;
        }();
        REQUIRE(study != nullptr);
        const std::string lower = slrkb::to_lower(study->abstract_text);
        CHECK(lower.find("regression") != std::string::npos);
        CHECK(lower.find("neural network") != std::string::npos);
    }
}

TEST_CASE("removing the positives empties the selection") {
    Bundle b;
    slrkb::Corpus stripped;
    stripped.source_description = b.corpus.source_description;
    for (const auto& s : b.corpus.studies) {
        if (std::find(b.gold.selection.begin(), b.gold.selection.end(), s.id) ==
            b.gold.selection.end()) {
            stripped.studies.push_back(s);
        }
    }
    auto art = b.run(stripped);
    auto selected = slrkb::studies_mentioning_all(art.kb, {"regression", "neural network"});
    CHECK(selected.empty());
}

TEST_CASE("flipping every comparative flips the winner") {
    Bundle b;
    auto art = b.run(b.corpus);
    auto selected = slrkb::studies_mentioning_all(art.kb, {"neural network", "regression"});
    auto conclusions = slrkb::conclusions_for(art.kb, selected);
    for (auto& c : conclusions) {
        if (c.relation == slrkb::Relation::Better && c.object) {
            std::swap(c.subject, *c.object);
        }
    }
    auto v = slrkb::verdict(conclusions, "neural network", "regression");
    CHECK(v.winner == slrkb::Verdict::Winner::Y);  // regression after the flip
    CHECK(v.x_better == 0);
    CHECK(v.y_better == 3);
    CHECK(v.equivalent == 2);
}

TEST_CASE("per-study gold annotations match the pipeline exactly") {
    Bundle b;
    auto art = b.run(b.corpus);
    REQUIRE(art.segments.size() == art.corpus.studies.size());
    for (std::size_t i = 0; i < art.segments.size(); ++i) {
        const auto& sa = art.segments[i];
        const auto& x = art.extractions[i];
        auto git = b.gold.studies.find(sa.study_id);
        REQUIRE(git != b.gold.studies.end());
        const auto& gold = git->second;
        CAPTURE(sa.study_id);

        CHECK(sa.explicit_headings == gold.explicit_headings);
        REQUIRE(sa.labeled.size() == gold.labels.size());
        for (std::size_t j = 0; j < gold.labels.size(); ++j) {
            CHECK(slrkb::label_name(sa.labeled[j].label) == gold.labels[j]);
        }

        REQUIRE(x.concepts.size() == gold.concepts.size());
        for (std::size_t j = 0; j < gold.concepts.size(); ++j) {
            CHECK(x.concepts[j].canonical == gold.concepts[j].first);
            CHECK(x.concepts[j].category.str() == gold.concepts[j].second);
        }

        REQUIRE(x.conclusions.size() == gold.conclusions.size());
        for (std::size_t j = 0; j < gold.conclusions.size(); ++j) {
            CHECK(x.conclusions[j].subject == gold.conclusions[j].subject);
            CHECK(slrkb::relation_name(x.conclusions[j].relation) ==
                  gold.conclusions[j].relation);
            if (gold.conclusions[j].object) {
                REQUIRE(x.conclusions[j].object);
                CHECK(*x.conclusions[j].object == *gold.conclusions[j].object);
            } else {
                CHECK(!x.conclusions[j].object);
            }
        }
    }
}

TEST_CASE("consecutive runs are byte-identical") {
    Bundle b;
    auto art1 = b.run(b.corpus);
    auto art2 = b.run(b.corpus);
    CHECK(slrkb::serialize(art1.kb) == slrkb::serialize(art2.kb));
    auto r1 = slrkb::replicate_selection(art1, b.gold);
    auto r2 = slrkb::replicate_selection(art2, b.gold);
    CHECK(slrkb::selection_report_text(r1) == slrkb::selection_report_text(r2));
    CHECK(slrkb::selection_report_json(r1).dump() == slrkb::selection_report_json(r2).dump());
    auto v1 = slrkb::replicate_verdict(art1, b.gold);
    auto v2 = slrkb::replicate_verdict(art2, b.gold);
    CHECK(slrkb::verdict_report_text(v1) == slrkb::verdict_report_text(v2));
}

TEST_CASE("gold validation catches broken annotation files") {
    Bundle b;
    auto art = b.run(b.corpus);

    auto bad_id = b.gold;
    bad_id.selection.push_back("S99");
    CHECK_THROWS_AS(bad_id.validate_against(art.corpus), slrkb::ConfigError);

    auto bad_labels = b.gold;
    bad_labels.studies["S01"].labels = {"Conclusion", "Background"};
    CHECK_THROWS_AS(bad_labels.validate_against(art.corpus), slrkb::ConfigError);
}

TEST_CASE("gold annotations themselves satisfy the section ordering") {
    Bundle b;
    for (const auto& [id, gs] : b.gold.studies) {
        int prev = 0;
        for (const auto& name : gs.labels) {
            auto l = slrkb::label_from_name(name);
            REQUIRE(l.has_value());
            CHECK(static_cast<int>(*l) >= prev);
            prev = static_cast<int>(*l);
        }
    }
}
