#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately re-derive results through a different route than the library
// code they check.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slrkb/data_paths.hpp"
#include "slrkb/extractor.hpp"
#include "slrkb/ingest.hpp"
#include "slrkb/kb.hpp"
#include "slrkb/query.hpp"
#include "slrkb/replicate.hpp"
#include "slrkb/segmenter.hpp"

namespace testutil {

inline std::string data_file(const std::string& name) {
    return (std::filesystem::path(slrkb::default_data_dir()) / name).string();
}

inline slrkb::Corpus load_bundled_corpus() {
    std::ifstream in(data_file("mini_corpus.jsonl"));
    return slrkb::read_corpus_jsonl(in, "bundled");
}

inline slrkb::GoldAnnotations load_bundled_gold() {
    return slrkb::load_gold_json(data_file("gold.json"));
}

// Hand-assembled structured abstract for extractor tests.
inline slrkb::StructuredAbstract make_sa(
    std::string study_id,
    const std::vector<std::pair<std::string, slrkb::SectionLabel>>& sentences) {
    slrkb::StructuredAbstract sa;
    sa.study_id = std::move(study_id);
    const double denom = sentences.size() > 1 ? static_cast<double>(sentences.size() - 1) : 1.0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        slrkb::LabeledSentence ls;
        ls.sentence.index = i;
        ls.sentence.text = sentences[i].first;
        ls.sentence.position_ratio = static_cast<double>(i) / denom;
        ls.label = sentences[i].second;
        ls.confidence = 1.0;
        sa.labeled.push_back(std::move(ls));
    }
    return sa;
}

// ---------------------------------------------------------------------------
// Brute-force oracle for the monotone labeling DP: enumerate every
// Background^a Method^b Conclusion^c split, sum scores left to right, keep
// the maximum with the label-sequence lexicographic tie-break.

inline std::pair<double, std::vector<slrkb::SectionLabel>> brute_force_monotone_best(
    const std::vector<std::array<double, 3>>& scores) {
    const std::size_t n = scores.size();
    bool have = false;
    double best_score = 0.0;
    std::vector<slrkb::SectionLabel> best_labels;
    for (std::size_t a = 0; a <= n; ++a) {
        for (std::size_t b = 0; a + b <= n; ++b) {
            std::vector<slrkb::SectionLabel> labels(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                slrkb::SectionLabel l = i < a ? slrkb::SectionLabel::Background
                                              : (i < a + b ? slrkb::SectionLabel::Method
                                                           : slrkb::SectionLabel::Conclusion);
                labels[i] = l;
                total += scores[i][static_cast<std::size_t>(l)];
            }
            const bool better =
                !have || total > best_score || (total == best_score && labels < best_labels);
            if (better) {
                have = true;
                best_score = total;
                best_labels = labels;
            }
        }
    }
    return {best_score, best_labels};
}

// Random score matrix over quarter-integers so sums compare exactly no
// matter the summation order.
inline std::vector<std::array<double, 3>> random_scores(std::mt19937& rng, std::size_t max_n = 8) {
    std::uniform_int_distribution<std::size_t> len(1, max_n);
    std::uniform_int_distribution<int> quarter(-8, 16);
    std::vector<std::array<double, 3>> scores(len(rng));
    for (auto& row : scores) {
        for (auto& v : row) v = static_cast<double>(quarter(rng)) / 4.0;
    }
    return scores;
}

// ---------------------------------------------------------------------------
// Exhaustive assignment oracle for the query engine. Matching semantics are
// re-derived here: direct scan of the triple set plus an independent
// ancestor walk for `type` patterns.

inline bool oracle_type_matches(const slrkb::KnowledgeBase& kb, const std::string& instance,
                                const std::string& cls) {
    std::optional<std::string> direct;
    for (const auto& t : kb.triples()) {
        if (t.predicate == slrkb::kbnames::kType && t.subject == instance &&
            t.object.kind == slrkb::Value::Kind::Resource) {
            direct = t.object.text;
            break;
        }
    }
    if (!direct) return false;
    std::string cur = *direct;
    while (true) {
        if (cur == cls) return true;
        auto it = kb.schema().parent.find(cur);
        if (it == kb.schema().parent.end()) return false;
        cur = it->second;
    }
}

inline bool oracle_holds(const slrkb::KnowledgeBase& kb, const slrkb::Value& s,
                         const slrkb::Value& p, const slrkb::Value& o) {
    if (s.kind != slrkb::Value::Kind::Resource || p.kind != slrkb::Value::Kind::Resource) {
        return false;
    }
    if (p.text == slrkb::kbnames::kType) {
        return o.kind == slrkb::Value::Kind::Resource && oracle_type_matches(kb, s.text, o.text);
    }
    for (const auto& t : kb.triples()) {
        if (t.subject == s.text && t.predicate == p.text && t.object == o) return true;
    }
    return false;
}

inline slrkb::Value term_to_value(const slrkb::Term& t,
                                  const std::map<std::string, slrkb::Value>& assignment) {
    switch (t.kind) {
        case slrkb::Term::Kind::Resource: return slrkb::Value::resource(t.name);
        case slrkb::Term::Kind::Literal: return t.literal;
        case slrkb::Term::Kind::Variable: return assignment.at(t.name);
    }
    return {};
}

// Every assignment of the query's variables over the full term universe.
inline slrkb::Bindings oracle_evaluate(const slrkb::Query& q, const slrkb::KnowledgeBase& kb) {
    std::set<std::string> var_set;
    for (const auto& p : q.patterns) {
        for (const slrkb::Term* t : {&p.subject, &p.predicate, &p.object}) {
            if (t->kind == slrkb::Term::Kind::Variable) var_set.insert(t->name);
        }
    }
    std::vector<std::string> vars(var_set.begin(), var_set.end());

    std::set<slrkb::Value> universe_set;
    for (const auto& t : kb.triples()) {
        universe_set.insert(slrkb::Value::resource(t.subject));
        universe_set.insert(slrkb::Value::resource(t.predicate));
        universe_set.insert(t.object);
    }
    for (const auto& c : kb.schema().classes) universe_set.insert(slrkb::Value::resource(c));
    for (const auto& [name, _] : kb.schema().predicates) {
        universe_set.insert(slrkb::Value::resource(name));
    }
    universe_set.insert(slrkb::Value::resource(slrkb::kbnames::kType));
    std::vector<slrkb::Value> universe(universe_set.begin(), universe_set.end());

    std::set<std::vector<slrkb::Value>> rows;
    std::map<std::string, slrkb::Value> assignment;
    auto recurse = [&](auto&& self, std::size_t vi) -> void {
        if (vi == vars.size()) {
            for (const auto& p : q.patterns) {
                if (!oracle_holds(kb, term_to_value(p.subject, assignment),
                                  term_to_value(p.predicate, assignment),
                                  term_to_value(p.object, assignment))) {
                    return;
                }
            }
            for (const auto& f : q.filters) {
                const slrkb::Value lhs = term_to_value(f.lhs, assignment);
                const slrkb::Value rhs = term_to_value(f.rhs, assignment);
                if ((lhs == rhs) != f.equal) return;
            }
            std::vector<slrkb::Value> row;
            for (const auto& v : q.select_vars) row.push_back(assignment.at(v));
            rows.insert(std::move(row));
            return;
        }
        for (const auto& value : universe) {
            assignment[vars[vi]] = value;
            self(self, vi + 1);
        }
        assignment.erase(vars[vi]);
    };
    recurse(recurse, 0);

    slrkb::Bindings out;
    out.columns = q.select_vars;
    for (const auto& row : rows) out.rows.push_back(row);
    std::sort(out.rows.begin(), out.rows.end(),
              [](const std::vector<slrkb::Value>& a, const std::vector<slrkb::Value>& b) {
                  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                      const std::string ra = slrkb::render_cell(a[i]);
                      const std::string rb = slrkb::render_cell(b[i]);
                      if (ra != rb) return ra < rb;
                  }
                  return a.size() < b.size();
              });
    return out;
}

// Random schema-conforming KB: a few studies, shared concept individuals,
// conclusion nodes, literal fields. Always audit-clean.
inline slrkb::KnowledgeBase random_kb(std::mt19937& rng) {
    slrkb::KnowledgeBase kb;
    const std::vector<std::pair<std::string, std::string>> concept_pool = {
        {"regression", "Regression"},   {"neural_network", "NeuralNetwork"},
        {"analogy", "Analogy"},         {"bayesian", "Bayesian"},
        {"cocomo", "COCOMO"},           {"size", "Size"},
        {"effort", "Effort"},           {"mmre", "MMRE"},
        {"team_size", "TeamSize"},      {"duration", "Duration"},
    };
    auto pred_for = [&kb](const std::string& cls) -> std::string {
        if (kb.schema().is_subclass_of(cls, "Model")) return "hasModel";
        if (kb.schema().is_subclass_of(cls, "Metric")) return "hasMetric";
        return "hasSEFeature";
    };
    std::uniform_int_distribution<int> nstudies(1, 6);
    std::uniform_int_distribution<int> nconcepts(0, 4);
    std::uniform_int_distribution<int> nconclusions(0, 2);
    std::uniform_int_distribution<std::size_t> pick(0, concept_pool.size() - 1);
    std::uniform_int_distribution<int> year(1990, 2012);
    std::set<std::string> used_concepts;
    const int studies = nstudies(rng);
    for (int i = 0; i < studies; ++i) {
        const std::string sid = "r" + std::to_string(i);
        kb.insert_raw({sid, slrkb::kbnames::kType, slrkb::Value::resource("PrimaryStudy")});
        kb.insert_raw({sid, "hasTitle", slrkb::Value::text_literal("study " + std::to_string(i))});
        kb.insert_raw({sid, "hasYear", slrkb::Value::int_literal(year(rng))});
        const int k = nconcepts(rng);
        for (int c = 0; c < k; ++c) {
            const auto& [name, cls] = concept_pool[pick(rng)];
            if (used_concepts.insert(name).second) {
                kb.insert_raw({name, slrkb::kbnames::kType, slrkb::Value::resource(cls)});
            }
            kb.insert_raw({sid, pred_for(cls), slrkb::Value::resource(name)});
        }
        const int m = nconclusions(rng);
        for (int c = 0; c < m; ++c) {
            const std::string node = sid + "_c" + std::to_string(c);
            const auto& [subj, subj_cls] = concept_pool[pick(rng)];
            const auto& [obj, obj_cls] = concept_pool[pick(rng)];
            if (subj == obj) continue;
            for (const auto& [name, cls] : {std::make_pair(subj, subj_cls),
                                            std::make_pair(obj, obj_cls)}) {
                if (used_concepts.insert(name).second) {
                    kb.insert_raw({name, slrkb::kbnames::kType, slrkb::Value::resource(cls)});
                }
            }
            kb.insert_raw({node, slrkb::kbnames::kType, slrkb::Value::resource("SimpleConclusion")});
            kb.insert_raw({sid, "hasSimpleConclusion", slrkb::Value::resource(node)});
            kb.insert_raw({node, "hasSubject", slrkb::Value::resource(subj)});
            kb.insert_raw({node, "hasObject", slrkb::Value::resource(obj)});
            kb.insert_raw({node, "hasRelation", slrkb::Value::text_literal("Better")});
            kb.insert_raw({node, "hasEvidence", slrkb::Value::text_literal("evidence " + node)});
        }
    }
    kb.seal();
    return kb;
}

// Random connected conjunctive query over names that exist in the KB.
inline slrkb::Query random_query(std::mt19937& rng, const slrkb::KnowledgeBase& kb) {
    std::vector<slrkb::Triple> triples(kb.triples().begin(), kb.triples().end());
    const std::vector<std::string> var_names = {"a", "b", "c"};
    std::uniform_int_distribution<int> npatterns(1, 4);
    std::uniform_int_distribution<std::size_t> pick_triple(0, triples.size() - 1);
    std::uniform_int_distribution<int> coin(0, 99);

    slrkb::Query q;
    const int n = npatterns(rng);
    std::set<std::string> used_vars;
    for (int i = 0; i < n; ++i) {
        const slrkb::Triple& seed = triples[pick_triple(rng)];
        slrkb::TriplePattern p;
        auto choose = [&](const slrkb::Value& ground, bool allow_var) -> slrkb::Term {
            if (allow_var && coin(rng) < 55) {
                const std::string& v = var_names[static_cast<std::size_t>(coin(rng)) % var_names.size()];
                used_vars.insert(v);
                return slrkb::Term::variable(v);
            }
            if (ground.kind == slrkb::Value::Kind::Resource) {
                return slrkb::Term::resource(ground.text);
            }
            return slrkb::Term::literal_term(ground);
        };
        p.subject = choose(slrkb::Value::resource(seed.subject), true);
        p.predicate = choose(slrkb::Value::resource(seed.predicate), coin(rng) < 25);
        p.object = choose(seed.object, true);
        // occasionally aim a type pattern at an ancestor class
        if (p.predicate.kind == slrkb::Term::Kind::Resource &&
            p.predicate.name == slrkb::kbnames::kType &&
            p.object.kind == slrkb::Term::Kind::Resource && coin(rng) < 50) {
            const auto ancestors = kb.schema().ancestors_of(p.object.name);
            if (!ancestors.empty()) {
                p.object = slrkb::Term::resource(
                    ancestors[static_cast<std::size_t>(coin(rng)) % ancestors.size()]);
            }
        }
        q.patterns.push_back(std::move(p));
    }
    if (used_vars.empty()) {
        // force at least one variable so the query selects something
        q.patterns[0].subject = slrkb::Term::variable("a");
    }
    // reject-on-sight: a pattern of three distinct otherwise-unjoined
    // variables explodes the oracle and is invalid by construction
    for (auto& p : q.patterns) {
        if (p.subject.kind == slrkb::Term::Kind::Variable &&
            p.predicate.kind == slrkb::Term::Kind::Variable &&
            p.object.kind == slrkb::Term::Kind::Variable) {
            p.predicate = slrkb::Term::resource("hasTitle");
        }
    }
    // the fixups above may have dropped a variable; recollect from the
    // final patterns so select/filter vars are all genuinely bound
    used_vars.clear();
    for (const auto& p : q.patterns) {
        for (const slrkb::Term* t : {&p.subject, &p.predicate, &p.object}) {
            if (t->kind == slrkb::Term::Kind::Variable) used_vars.insert(t->name);
        }
    }
    q.select_vars.assign(used_vars.begin(), used_vars.end());
    if (coin(rng) < 25 && used_vars.size() >= 2) {
        auto it = used_vars.begin();
        const std::string v1 = *it++;
        const std::string v2 = *it;
        q.filters.push_back({slrkb::Term::variable(v1), coin(rng) < 50,
                             slrkb::Term::variable(v2)});
    }
    return q;
}

// ---------------------------------------------------------------------------
// Selection oracle: substring scan over the gold Method sentences with a
// fixed synonym table, independent of chunker/vocabulary/query code.

inline std::vector<std::string> substring_selection_oracle(const slrkb::Corpus& corpus,
                                                           const slrkb::GoldAnnotations& gold) {
    const std::vector<std::string> regression_names = {"regression"};
    const std::vector<std::string> nn_names = {"neural network", "multilayer perceptron",
                                               "artificial neural network", "ann", "mlp"};
    std::vector<std::string> out;
    for (const auto& study : corpus.studies) {
        auto git = gold.studies.find(study.id);
        if (git == gold.studies.end()) continue;
        const auto sentences = slrkb::split_sentences(study.abstract_text);
        std::string method_text;
        for (std::size_t i = 0; i < sentences.size() && i < git->second.labels.size(); ++i) {
            if (git->second.labels[i] == "Method") {
                method_text += " " + slrkb::to_lower(sentences[i].text);
            }
        }
        auto contains_any = [&](const std::vector<std::string>& names) {
            for (const auto& n : names) {
                if (method_text.find(n) != std::string::npos) return true;
            }
            return false;
        };
        if (contains_any(regression_names) && contains_any(nn_names)) out.push_back(study.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace testutil
