#pragma once

// End-to-end runs over the bundled gold-labeled corpus: study selection
// (which studies discuss both target models?) and verdict extraction
// (which model do the comparative conclusions favor?). Reports carry a
// machine-checkable JSON twin next to the text table and must match the
// gold annotations exactly for the run to exit clean.

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slrkb/errors.hpp"
#include "slrkb/extractor.hpp"
#include "slrkb/ingest.hpp"
#include "slrkb/kb.hpp"
#include "slrkb/query.hpp"
#include "slrkb/segmenter.hpp"
#include "slrkb/vocabulary.hpp"

namespace slrkb {

// ---------------------------------------------------------------------------
// Gold annotations

struct GoldConclusion {
    std::string subject;
    std::string relation;
    std::optional<std::string> object;
};

struct GoldStudy {
    bool explicit_headings = false;
    std::vector<std::string> labels;  // one section name per sentence
    std::vector<std::pair<std::string, std::string>> concepts;  // canonical, category
    std::vector<GoldConclusion> conclusions;
};

struct GoldAnnotations {
    std::string corpus_file;
    std::vector<std::string> selection;      // gold both-model study ids
    std::vector<std::string> background_traps;
    std::vector<std::string> explicit_heading_studies;
    std::string verdict_x;
    std::string verdict_y;
    int x_better = 0;
    int y_better = 0;
    int equivalent = 0;
    std::string winner;  // "X", "Y", "Tie" or "Insufficient"
    std::map<std::string, GoldStudy> studies;

    // every gold id must exist in the corpus and gold labels must be monotone
    void validate_against(const Corpus& corpus) const {
        std::set<std::string> ids;
        for (const auto& s : corpus.studies) ids.insert(s.id);
        auto require_known = [&ids](const std::string& id) {
            if (!ids.count(id)) throw ConfigError("gold references unknown study id: " + id);
        };
        for (const auto& id : selection) require_known(id);
        for (const auto& id : background_traps) require_known(id);
        for (const auto& id : explicit_heading_studies) require_known(id);
        for (const auto& [id, gold] : studies) {
            require_known(id);
            int prev = 0;
            for (const auto& name : gold.labels) {
                auto label = label_from_name(name);
                if (!label) throw ConfigError("gold label '" + name + "' for " + id);
                if (static_cast<int>(*label) < prev) {
                    throw ConfigError("gold labels for " + id + " are not monotone");
                }
                prev = static_cast<int>(*label);
            }
        }
    }
};

inline GoldAnnotations read_gold_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("gold file is not a JSON object");
    GoldAnnotations g;
    g.corpus_file = j.value("corpus", "");
    for (const auto& s : j.value("selection", nlohmann::json::array())) {
        g.selection.push_back(s.get<std::string>());
    }
    for (const auto& s : j.value("background_traps", nlohmann::json::array())) {
        g.background_traps.push_back(s.get<std::string>());
    }
    for (const auto& s : j.value("explicit_heading_studies", nlohmann::json::array())) {
        g.explicit_heading_studies.push_back(s.get<std::string>());
    }
    const auto& v = j.at("verdict");
    g.verdict_x = v.at("x").get<std::string>();
    g.verdict_y = v.at("y").get<std::string>();
    g.x_better = v.at("x_better").get<int>();
    g.y_better = v.at("y_better").get<int>();
    g.equivalent = v.at("equivalent").get<int>();
    g.winner = v.at("winner").get<std::string>();
    const nlohmann::json studies = j.value("studies", nlohmann::json::object());
    for (const auto& [id, s] : studies.items()) {
        GoldStudy gs;
        gs.explicit_headings = s.value("explicit_headings", false);
        for (const auto& l : s.value("labels", nlohmann::json::array())) {
            gs.labels.push_back(l.get<std::string>());
        }
        for (const auto& c : s.value("concepts", nlohmann::json::array())) {
            gs.concepts.emplace_back(c.at("canonical").get<std::string>(),
                                     c.at("category").get<std::string>());
        }
        for (const auto& c : s.value("conclusions", nlohmann::json::array())) {
            GoldConclusion gc;
            gc.subject = c.at("subject").get<std::string>();
            gc.relation = c.at("relation").get<std::string>();
            if (c.contains("object")) gc.object = c["object"].get<std::string>();
            gs.conclusions.push_back(std::move(gc));
        }
        g.studies[id] = std::move(gs);
    }
    return g;
}

inline GoldAnnotations load_gold_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open gold file: " + path);
    return read_gold_json(in);
}

inline ReviewProtocol read_protocol_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("protocol file is not a JSON object");
    ReviewProtocol p;
    p.id = j.value("id", "review_protocol");
    p.research_question = j.at("research_question").get<std::string>();
    p.search_string = j.value("search_string", "");
    for (const auto& s : j.value("sources", nlohmann::json::array())) {
        p.sources.push_back(s.get<std::string>());
    }
    for (const auto& s : j.value("inclusion_criteria", nlohmann::json::array())) {
        p.inclusion_criteria.push_back(s.get<std::string>());
    }
    for (const auto& s : j.value("exclusion_criteria", nlohmann::json::array())) {
        p.exclusion_criteria.push_back(s.get<std::string>());
    }
    return p;
}

inline ReviewProtocol load_protocol_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open protocol file: " + path);
    return read_protocol_json(in);
}

// ---------------------------------------------------------------------------
// Pipeline driver

struct PipelineArtifacts {
    Corpus corpus;  // after dedupe
    std::vector<std::string> dropped_ids;
    std::vector<StructuredAbstract> segments;
    std::vector<StudyExtraction> extractions;
    KnowledgeBase kb;
};

inline KnowledgeBase build_kb(const Corpus& corpus, const std::vector<StructuredAbstract>& segments,
                              const std::vector<StudyExtraction>& extractions,
                              const std::optional<ReviewProtocol>& protocol = std::nullopt) {
    std::map<std::string, const StructuredAbstract*> sa_by_id;
    for (const auto& sa : segments) sa_by_id[sa.study_id] = &sa;
    std::map<std::string, const StudyExtraction*> ex_by_id;
    for (const auto& x : extractions) ex_by_id[x.study_id] = &x;

    KnowledgeBase kb;
    std::optional<std::string> protocol_id;
    if (protocol) protocol_id = kb.assert_protocol(*protocol);
    static const StudyExtraction empty_extraction;
    for (const auto& study : corpus.studies) {
        auto sit = sa_by_id.find(study.id);
        if (sit == sa_by_id.end()) {
            throw ConfigError("no segmentation for study " + study.id);
        }
        const StudyExtraction* x = &empty_extraction;
        if (auto xit = ex_by_id.find(study.id); xit != ex_by_id.end()) x = xit->second;
        kb.assert_study(study, *sit->second, x->concepts, x->conclusions, protocol_id);
    }
    kb.seal();
    return kb;
}

inline PipelineArtifacts run_pipeline(Corpus corpus, const CueLexicons& lexicons,
                                      const Vocabulary& vocab,
                                      const std::optional<ReviewProtocol>& protocol = std::nullopt) {
    PipelineArtifacts art;
    DedupeResult dd = dedupe(corpus);
    art.corpus = std::move(dd.corpus);
    art.dropped_ids = std::move(dd.dropped_ids);
    for (const auto& study : art.corpus.studies) {
        art.segments.push_back(segment_abstract(study, lexicons));
    }
    for (const auto& sa : art.segments) {
        art.extractions.push_back(extract_study(sa, vocab));
    }
    art.kb = build_kb(art.corpus, art.segments, art.extractions, protocol);
    return art;
}

// ---------------------------------------------------------------------------
// Reports

struct SelectionReport {
    std::vector<std::string> models;  // the inclusion criterion
    std::size_t corpus_size = 0;
    std::vector<std::string> selected;  // sorted study ids
    std::vector<std::string> gold;      // sorted study ids
    double precision = 0.0;
    double recall = 0.0;
    bool pass = false;
};

struct VerdictReport {
    std::string x;
    std::string y;
    Verdict result;
    int gold_x_better = 0;
    int gold_y_better = 0;
    int gold_equivalent = 0;
    std::string gold_winner;
    bool pass = false;
};

namespace detail {

inline std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out.push_back(' ');
        out += ids[i];
    }
    return out.empty() ? "(none)" : out;
}

inline std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

inline SelectionReport make_selection_report(const PipelineArtifacts& art,
                                             const std::vector<std::string>& models,
                                             std::vector<std::string> gold_ids) {
    SelectionReport r;
    r.models = models;
    r.corpus_size = art.corpus.studies.size();
    r.selected = studies_mentioning_all(art.kb, models);
    std::sort(gold_ids.begin(), gold_ids.end());
    r.gold = std::move(gold_ids);
    std::size_t true_pos = 0;
    for (const auto& id : r.selected) {
        if (std::binary_search(r.gold.begin(), r.gold.end(), id)) ++true_pos;
    }
    r.precision = r.selected.empty() ? (r.gold.empty() ? 1.0 : 0.0)
                                     : static_cast<double>(true_pos) / r.selected.size();
    r.recall = r.gold.empty() ? 1.0 : static_cast<double>(true_pos) / r.gold.size();
    r.pass = r.selected == r.gold;
    return r;
}

inline std::string selection_report_text(const SelectionReport& r) {
    std::ostringstream os;
    os << "study selection: papers discussing all of {";
    for (std::size_t i = 0; i < r.models.size(); ++i) {
        if (i) os << ", ";
        os << r.models[i];
    }
    os << "}\n\n";
    os << "source          papers  identified\n";
    os << "--------------  ------  ----------\n";
    os << "bundled corpus  " << r.corpus_size << "      " << r.selected.size() << "\n\n";
    os << "selected:  " << detail::join_ids(r.selected) << "\n";
    os << "expected:  " << detail::join_ids(r.gold) << "\n";
    os << "precision: " << detail::format_ratio(r.precision) << "\n";
    os << "recall:    " << detail::format_ratio(r.recall) << "\n";
    os << "agreement: " << (r.pass ? "yes" : "NO") << "\n";
    return os.str();
}

inline nlohmann::json selection_report_json(const SelectionReport& r) {
    return {{"models", r.models},
            {"corpus_size", r.corpus_size},
            {"selected", r.selected},
            {"expected", r.gold},
            {"precision", r.precision},
            {"recall", r.recall},
            {"agreement", r.pass}};
}

inline std::string verdict_report_text(const VerdictReport& r) {
    std::ostringstream os;
    const std::string winner =
        r.result.winner == Verdict::Winner::X
            ? r.x
            : (r.result.winner == Verdict::Winner::Y ? r.y
                                                     : std::string(winner_name(r.result.winner)));
    os << "data extraction: is '" << r.x << "' better than '" << r.y << "'?\n\n";
    const std::vector<std::string> headers = {"tester", "comparisons", r.x + " better",
                                              r.y + " better", "same", "verdict"};
    const std::vector<std::string> cells = {"pipeline",
                                            std::to_string(r.result.comparisons()),
                                            std::to_string(r.result.x_better),
                                            std::to_string(r.result.y_better),
                                            std::to_string(r.result.equivalent),
                                            winner};
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const std::size_t w = std::max(headers[i].size(), cells[i].size());
        os << headers[i] << std::string(w - headers[i].size() + 2, ' ');
    }
    os << "\n";
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const std::size_t w = std::max(headers[i].size(), cells[i].size());
        os << std::string(w, '-') << "  ";
    }
    os << "\n";
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const std::size_t w = std::max(headers[i].size(), cells[i].size());
        os << cells[i] << std::string(w - cells[i].size() + 2, ' ');
    }
    os << "\n\n";
    os << "expected counts: " << r.gold_x_better << "/" << r.gold_y_better << "/"
       << r.gold_equivalent << ", winner " << r.gold_winner << "\n";
    os << "agreement: " << (r.pass ? "yes" : "NO") << "\n";
    return os.str();
}

inline nlohmann::json verdict_report_json(const VerdictReport& r) {
    return {{"x", r.x},
            {"y", r.y},
            {"comparisons", r.result.comparisons()},
            {"x_better", r.result.x_better},
            {"y_better", r.result.y_better},
            {"equivalent", r.result.equivalent},
            {"winner", winner_name(r.result.winner)},
            {"gold_x_better", r.gold_x_better},
            {"gold_y_better", r.gold_y_better},
            {"gold_equivalent", r.gold_equivalent},
            {"gold_winner", r.gold_winner},
            {"agreement", r.pass}};
}

// Selection case: ingest -> segment -> extract -> build -> both-model query,
// checked against the gold selection set.
inline SelectionReport replicate_selection(const PipelineArtifacts& art,
                                           const GoldAnnotations& gold) {
    return make_selection_report(art, {gold.verdict_x, gold.verdict_y}, gold.selection);
}

// Verdict case: selection, then conclusions over the selected studies, then
// pairwise aggregation; checked against the gold counts and winner.
inline VerdictReport replicate_verdict(const PipelineArtifacts& art, const GoldAnnotations& gold) {
    VerdictReport r;
    r.x = gold.verdict_x;
    r.y = gold.verdict_y;
    const std::vector<std::string> selected =
        studies_mentioning_all(art.kb, {gold.verdict_x, gold.verdict_y});
    const std::vector<SimpleConclusion> conclusions = conclusions_for(art.kb, selected);
    r.result = verdict(conclusions, gold.verdict_x, gold.verdict_y);
    r.gold_x_better = gold.x_better;
    r.gold_y_better = gold.y_better;
    r.gold_equivalent = gold.equivalent;
    r.gold_winner = gold.winner;
    r.pass = r.result.x_better == gold.x_better && r.result.y_better == gold.y_better &&
             r.result.equivalent == gold.equivalent &&
             std::string(winner_name(r.result.winner)) == gold.winner;
    return r;
}

// ---------------------------------------------------------------------------
// Stage artifact files (shared by `replicate` and the standalone stages so
// the two routes are byte-comparable)

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline void write_pipeline_artifacts(const std::filesystem::path& dir,
                                     const PipelineArtifacts& art) {
    std::filesystem::create_directories(dir);
    {
        std::ostringstream os;
        write_corpus_jsonl(os, art.corpus);
        write_file(dir / "corpus.jsonl", os.str());
    }
    {
        std::ostringstream os;
        write_segments_jsonl(os, art.segments);
        write_file(dir / "segments.jsonl", os.str());
    }
    {
        std::ostringstream os;
        write_extractions_jsonl(os, art.extractions);
        write_file(dir / "extractions.jsonl", os.str());
    }
    write_file(dir / "kb.nt", serialize(art.kb));
}

}  // namespace slrkb
