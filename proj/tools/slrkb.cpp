// slrkb: command-line front end for the abstract-to-knowledge-base pipeline.
// Stages communicate through files (JSONL and .nt), so each subcommand can
// be run and inspected on its own:
//
//   ingest -> segment -> extract -> build-kb -> query
//
// `replicate` drives the same stages in-process over the bundled corpus and
// checks the results against the gold annotations.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slrkb/data_paths.hpp"
#include "slrkb/errors.hpp"
#include "slrkb/extractor.hpp"
#include "slrkb/ingest.hpp"
#include "slrkb/kb.hpp"
#include "slrkb/query.hpp"
#include "slrkb/replicate.hpp"
#include "slrkb/segmenter.hpp"
#include "slrkb/vocabulary.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw slrkb::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw slrkb::ConfigError("cannot write " + path);
    os << bytes;
}

slrkb::Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw slrkb::ConfigError("cannot open " + path);
    return slrkb::read_corpus_jsonl(in, path);
}

slrkb::CueLexicons lexicons_from(const std::string& override_path) {
    if (!override_path.empty()) return slrkb::load_cue_lexicons(override_path);
    const fs::path bundled = fs::path(slrkb::default_data_dir()) / "cue_lexicon.txt";
    if (fs::exists(bundled)) return slrkb::load_cue_lexicons(bundled.string());
    return slrkb::default_cue_lexicons();
}

slrkb::Vocabulary vocabulary_from(const std::string& override_path, const slrkb::Schema& schema) {
    if (!override_path.empty()) return slrkb::load_vocabulary(override_path, schema);
    const fs::path bundled = fs::path(slrkb::default_data_dir()) / "vocabulary.txt";
    if (fs::exists(bundled)) return slrkb::load_vocabulary(bundled.string(), schema);
    return slrkb::default_vocabulary(schema);
}

struct IngestOptions {
    std::string in_path;
    std::string format = "jsonl";
    std::string out_path;
    bool keep_duplicates = false;
};

int cmd_ingest(const IngestOptions& opt) {
    std::ifstream in(opt.in_path, std::ios::binary);
    if (!in) throw slrkb::ConfigError("cannot open " + opt.in_path);
    const auto format = opt.format == "bibtex" ? slrkb::RecordFormat::BibTexSubset
                                               : slrkb::RecordFormat::JsonLines;
    slrkb::IngestResult result = slrkb::parse_records(in, format, opt.in_path);
    for (const auto& issue : result.issues) {
        std::cerr << "warning: record " << issue.index << ": " << issue.reason << "\n";
    }
    slrkb::Corpus corpus = std::move(result.corpus);
    if (!opt.keep_duplicates) {
        slrkb::DedupeResult dd = slrkb::dedupe(corpus);
        for (const auto& id : dd.dropped_ids) {
            std::cerr << "warning: dropped duplicate title: " << id << "\n";
        }
        corpus = std::move(dd.corpus);
    }
    std::ostringstream os;
    slrkb::write_corpus_jsonl(os, corpus);
    write_output(opt.out_path, os.str());
    std::cerr << corpus.studies.size() << " studies ingested\n";
    return 0;
}

struct SegmentOptions {
    std::string in_path;
    std::string out_path;
    std::string lexicon_path;
};

int cmd_segment(const SegmentOptions& opt) {
    const slrkb::Corpus corpus = load_corpus_file(opt.in_path);
    const slrkb::CueLexicons lex = lexicons_from(opt.lexicon_path);
    std::vector<slrkb::StructuredAbstract> segments;
    segments.reserve(corpus.studies.size());
    for (const auto& study : corpus.studies) {
        segments.push_back(slrkb::segment_abstract(study, lex));
    }
    std::ostringstream os;
    slrkb::write_segments_jsonl(os, segments);
    write_output(opt.out_path, os.str());
    return 0;
}

struct ExtractOptions {
    std::string in_path;
    std::string out_path;
    std::string vocab_path;
};

int cmd_extract(const ExtractOptions& opt) {
    const slrkb::Schema schema = slrkb::build_schema();
    const slrkb::Vocabulary vocab = vocabulary_from(opt.vocab_path, schema);
    std::ifstream in(opt.in_path);
    if (!in) throw slrkb::ConfigError("cannot open " + opt.in_path);
    const auto segments = slrkb::read_segments_jsonl(in);
    std::vector<slrkb::StudyExtraction> extractions;
    extractions.reserve(segments.size());
    for (const auto& sa : segments) {
        extractions.push_back(slrkb::extract_study(sa, vocab));
    }
    std::ostringstream os;
    slrkb::write_extractions_jsonl(os, extractions);
    write_output(opt.out_path, os.str());
    return 0;
}

struct BuildKbOptions {
    std::string corpus_path;
    std::string segments_path;
    std::string extractions_path;
    std::string protocol_path;
    std::string out_path;
    std::string audit_out;
};

int cmd_build_kb(const BuildKbOptions& opt) {
    const slrkb::Corpus corpus = load_corpus_file(opt.corpus_path);
    std::ifstream seg_in(opt.segments_path);
    if (!seg_in) throw slrkb::ConfigError("cannot open " + opt.segments_path);
    const auto segments = slrkb::read_segments_jsonl(seg_in);
    std::ifstream ext_in(opt.extractions_path);
    if (!ext_in) throw slrkb::ConfigError("cannot open " + opt.extractions_path);
    const auto extractions = slrkb::read_extractions_jsonl(ext_in);
    std::optional<slrkb::ReviewProtocol> protocol;
    if (!opt.protocol_path.empty()) protocol = slrkb::load_protocol_json(opt.protocol_path);

    const slrkb::KnowledgeBase kb = slrkb::build_kb(corpus, segments, extractions, protocol);
    write_output(opt.out_path, slrkb::serialize(kb));

    std::ostringstream report;
    const auto violations = kb.audit();
    report << "triples: " << kb.triples().size() << "\n";
    report << "violations: " << violations.size() << "\n";
    for (const auto& v : violations) {
        report << "  " << v.rule << ": " << v.detail << "\n";
    }
    if (opt.audit_out.empty()) std::cerr << report.str();
    else write_output(opt.audit_out, report.str());
    return violations.empty() ? 0 : 1;
}

struct QueryOptions {
    std::string kb_path;
    std::string query_path;
    std::string ask_both_models;
    std::string ask_verdict;
    bool json = false;
    bool lax = false;
};

std::vector<std::string> comma_names(const std::string& arg) {
    std::vector<std::string> out;
    for (auto& part : slrkb::split(arg, ',')) {
        std::string name = slrkb::trim(part);
        if (!name.empty()) out.push_back(std::move(name));
    }
    return out;
}

int cmd_query(const QueryOptions& opt) {
    slrkb::DeserializeResult loaded = slrkb::deserialize(read_file(opt.kb_path), opt.lax);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    if (opt.lax) {
        for (const auto& v : loaded.kb.audit()) {
            std::cerr << "warning: " << v.rule << ": " << v.detail << "\n";
        }
    }
    loaded.kb.seal(!opt.lax);
    const slrkb::KnowledgeBase& kb = loaded.kb;

    if (!opt.query_path.empty()) {
        const slrkb::Query q = slrkb::parse_query(read_file(opt.query_path));
        const slrkb::Bindings rows = slrkb::evaluate(q, kb);
        if (opt.json) std::cout << slrkb::bindings_to_json(rows).dump(2) << "\n";
        else std::cout << slrkb::render_table(rows);
        return 0;
    }
    if (!opt.ask_both_models.empty()) {
        const auto ids = slrkb::studies_mentioning_all(kb, comma_names(opt.ask_both_models));
        if (opt.json) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& id : ids) arr.push_back({{"study", id}});
            std::cout << arr.dump(2) << "\n";
        } else {
            slrkb::Bindings b;
            b.columns = {"study"};
            for (const auto& id : ids) b.rows.push_back({slrkb::Value::resource(id)});
            std::cout << slrkb::render_table(b);
        }
        return 0;
    }
    if (!opt.ask_verdict.empty()) {
        const auto names = comma_names(opt.ask_verdict);
        if (names.size() != 2) throw slrkb::Error("--ask-verdict needs exactly two names: x,y");
        const auto ids = slrkb::studies_mentioning_all(kb, names);
        const auto conclusions = slrkb::conclusions_for(kb, ids);
        const slrkb::Verdict v = slrkb::verdict(conclusions, slrkb::unslug(names[0]),
                                                slrkb::unslug(names[1]));
        const std::string winner =
            v.winner == slrkb::Verdict::Winner::X
                ? slrkb::unslug(names[0])
                : (v.winner == slrkb::Verdict::Winner::Y ? slrkb::unslug(names[1])
                                                         : slrkb::winner_name(v.winner));
        if (opt.json) {
            nlohmann::json out{{"x", slrkb::unslug(names[0])},   {"y", slrkb::unslug(names[1])},
                               {"comparisons", v.comparisons()}, {"x_better", v.x_better},
                               {"y_better", v.y_better},         {"equivalent", v.equivalent},
                               {"winner", winner}};
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "comparisons  x_better  y_better  equivalent  winner\n";
            std::cout << v.comparisons() << "            " << v.x_better << "         "
                      << v.y_better << "         " << v.equivalent << "           " << winner
                      << "\n";
        }
        return 0;
    }
    throw slrkb::Error("one of --query, --ask-both-models or --ask-verdict is required");
}

struct ReplicateOptions {
    std::string case_name = "all";
    std::string corpus_path;
    std::string out_dir;
    std::string lexicon_path;
    std::string vocab_path;
    std::string gold_path;
    std::string protocol_path;
};

int cmd_replicate(const ReplicateOptions& opt) {
    const fs::path data_dir(slrkb::default_data_dir());
    const std::string corpus_path =
        opt.corpus_path.empty() ? (data_dir / "mini_corpus.jsonl").string() : opt.corpus_path;
    const std::string gold_path =
        opt.gold_path.empty() ? (data_dir / "gold.json").string() : opt.gold_path;

    const slrkb::Corpus corpus = load_corpus_file(corpus_path);
    const slrkb::GoldAnnotations gold = slrkb::load_gold_json(gold_path);
    const slrkb::CueLexicons lex = lexicons_from(opt.lexicon_path);
    const slrkb::Schema schema = slrkb::build_schema();
    const slrkb::Vocabulary vocab = vocabulary_from(opt.vocab_path, schema);

    std::optional<slrkb::ReviewProtocol> protocol;
    if (!opt.protocol_path.empty()) {
        protocol = slrkb::load_protocol_json(opt.protocol_path);
    } else if (fs::exists(data_dir / "protocol.json")) {
        protocol = slrkb::load_protocol_json((data_dir / "protocol.json").string());
    }

    const slrkb::PipelineArtifacts art = slrkb::run_pipeline(corpus, lex, vocab, protocol);
    gold.validate_against(art.corpus);

    if (!opt.out_dir.empty()) slrkb::write_pipeline_artifacts(opt.out_dir, art);

    bool all_pass = true;
    const bool run_selection = opt.case_name == "selection" || opt.case_name == "all";
    const bool run_verdict = opt.case_name == "verdict" || opt.case_name == "all";
    if (!run_selection && !run_verdict) {
        throw slrkb::Error("unknown case: " + opt.case_name + " (use selection|verdict|all)");
    }
    if (run_selection) {
        const slrkb::SelectionReport r = slrkb::replicate_selection(art, gold);
        std::cout << slrkb::selection_report_text(r) << "\n";
        if (!opt.out_dir.empty()) {
            slrkb::write_file(fs::path(opt.out_dir) / "selection_report.txt",
                              slrkb::selection_report_text(r));
            slrkb::write_file(fs::path(opt.out_dir) / "selection_report.json",
                              slrkb::selection_report_json(r).dump(2) + "\n");
        }
        all_pass = all_pass && r.pass;
    }
    if (run_verdict) {
        const slrkb::VerdictReport r = slrkb::replicate_verdict(art, gold);
        std::cout << slrkb::verdict_report_text(r) << "\n";
        if (!opt.out_dir.empty()) {
            slrkb::write_file(fs::path(opt.out_dir) / "verdict_report.txt",
                              slrkb::verdict_report_text(r));
            slrkb::write_file(fs::path(opt.out_dir) / "verdict_report.json",
                              slrkb::verdict_report_json(r).dump(2) + "\n");
        }
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured-abstract mining into a queryable review knowledge base"};
    app.require_subcommand(1);
    std::function<int()> run;

    IngestOptions ingest_opt;
    auto* ingest = app.add_subcommand("ingest", "parse bibliographic records into corpus JSONL");
    ingest->add_option("--in", ingest_opt.in_path, "input file (JSONL or BibTeX)")->required();
    ingest->add_option("--format", ingest_opt.format, "input format: jsonl|bibtex")
        ->check(CLI::IsMember({"jsonl", "bibtex"}));
    ingest->add_option("--out", ingest_opt.out_path, "output corpus JSONL (default stdout)");
    ingest->add_flag("--keep-duplicates", ingest_opt.keep_duplicates,
                     "skip title-based deduplication");
    ingest->callback([&run, &ingest_opt]() { run = [&ingest_opt]() { return cmd_ingest(ingest_opt); }; });

    SegmentOptions segment_opt;
    auto* segment = app.add_subcommand("segment", "label abstract sentences by section");
    segment->add_option("--in", segment_opt.in_path, "corpus JSONL")->required();
    segment->add_option("--out", segment_opt.out_path, "segmentation JSONL (default stdout)");
    segment->add_option("--lexicon", segment_opt.lexicon_path, "cue lexicon/prior config file");
    segment->callback([&run, &segment_opt]() { run = [&segment_opt]() { return cmd_segment(segment_opt); }; });

    ExtractOptions extract_opt;
    auto* extract = app.add_subcommand("extract", "extract concepts and simple conclusions");
    extract->add_option("--in", extract_opt.in_path, "segmentation JSONL")->required();
    extract->add_option("--out", extract_opt.out_path, "extraction JSONL (default stdout)");
    extract->add_option("--vocab", extract_opt.vocab_path, "vocabulary file");
    extract->callback([&run, &extract_opt]() { run = [&extract_opt]() { return cmd_extract(extract_opt); }; });

    BuildKbOptions build_opt;
    auto* build = app.add_subcommand("build-kb", "assemble the knowledge base file");
    build->add_option("--corpus", build_opt.corpus_path, "corpus JSONL")->required();
    build->add_option("--segments", build_opt.segments_path, "segmentation JSONL")->required();
    build->add_option("--extractions", build_opt.extractions_path, "extraction JSONL")->required();
    build->add_option("--protocol", build_opt.protocol_path, "review protocol JSON");
    build->add_option("--out", build_opt.out_path, "knowledge base .nt file (default stdout)");
    build->add_option("--audit-out", build_opt.audit_out, "audit report file (default stderr)");
    build->callback([&run, &build_opt]() { run = [&build_opt]() { return cmd_build_kb(build_opt); }; });

    QueryOptions query_opt;
    auto* query = app.add_subcommand("query", "evaluate a query against a knowledge base file");
    query->add_option("--kb", query_opt.kb_path, "knowledge base .nt file")->required();
    auto* mode = query->add_option_group("mode", "what to ask");
    mode->add_option("--query", query_opt.query_path, "query file");
    mode->add_option("--ask-both-models", query_opt.ask_both_models,
                     "comma-separated model names; studies mentioning all of them");
    mode->add_option("--ask-verdict", query_opt.ask_verdict,
                     "x,y: aggregate comparative conclusions between two models");
    mode->require_option(1);
    query->add_flag("--json", query_opt.json, "JSON output instead of a text table");
    query->add_flag("--lax", query_opt.lax, "accept undeclared names in the KB file as warnings");
    query->callback([&run, &query_opt]() { run = [&query_opt]() { return cmd_query(query_opt); }; });

    ReplicateOptions replicate_opt;
    auto* replicate = app.add_subcommand("replicate", "run the bundled end-to-end case studies");
    replicate->add_option("--case", replicate_opt.case_name, "selection|verdict|all")
        ->check(CLI::IsMember({"selection", "verdict", "all"}));
    replicate->add_option("--corpus", replicate_opt.corpus_path, "corpus JSONL (default bundled)");
    replicate->add_option("--out", replicate_opt.out_dir, "directory for stage artifacts and reports");
    replicate->add_option("--lexicon", replicate_opt.lexicon_path, "cue lexicon/prior config file");
    replicate->add_option("--vocab", replicate_opt.vocab_path, "vocabulary file");
    replicate->add_option("--gold", replicate_opt.gold_path, "gold annotations JSON (default bundled)");
    replicate->add_option("--protocol", replicate_opt.protocol_path, "review protocol JSON");
    replicate->callback(
        [&run, &replicate_opt]() { run = [&replicate_opt]() { return cmd_replicate(replicate_opt); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    }

    try {
        return run ? run() : 2;
    } catch (const slrkb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
