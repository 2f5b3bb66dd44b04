#pragma once

// Concept and simple-conclusion extraction over structured abstracts.
// Concepts come from Method sentences only; comparative claims from
// Conclusion sentences only. Background is never read.

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slrkb/chunker.hpp"
#include "slrkb/errors.hpp"
#include "slrkb/segmenter.hpp"
#include "slrkb/text_util.hpp"
#include "slrkb/vocabulary.hpp"

namespace slrkb {

struct ConceptInstance {
    std::string surface;    // chunk text as it appeared
    std::string canonical;  // vocabulary headword
    CategoryPath category;
    std::string study_id;
    std::size_t sentence_index = 0;

    bool operator==(const ConceptInstance&) const = default;
};

enum class Relation { Better, Worse, Equivalent, Unclear };

inline const char* relation_name(Relation r) {
    switch (r) {
        case Relation::Better: return "Better";
        case Relation::Worse: return "Worse";
        case Relation::Equivalent: return "Equivalent";
        case Relation::Unclear: return "Unclear";
    }
    return "Unclear";
}

inline std::optional<Relation> relation_from_name(std::string_view s) {
    if (s == "Better") return Relation::Better;
    if (s == "Worse") return Relation::Worse;
    if (s == "Equivalent") return Relation::Equivalent;
    if (s == "Unclear") return Relation::Unclear;
    return std::nullopt;
}

struct SimpleConclusion {
    std::string study_id;
    std::string subject;             // canonical concept
    Relation relation = Relation::Unclear;
    std::optional<std::string> object;  // absent for Unclear
    std::string evidence;            // the conclusion sentence
    std::size_t sentence_index = 0;

    bool operator==(const SimpleConclusion&) const = default;
};

struct UnmatchedPhrase {
    std::string surface;
    std::size_t sentence_index = 0;

    bool operator==(const UnmatchedPhrase&) const = default;
};

// Per-study extraction report payload.
struct StudyExtraction {
    std::string study_id;
    std::vector<ConceptInstance> concepts;
    std::vector<SimpleConclusion> conclusions;
    std::vector<UnmatchedPhrase> unmatched;
};

inline std::vector<ConceptInstance> extract_concepts(const StructuredAbstract& sa,
                                                     const Vocabulary& vocab,
                                                     std::vector<UnmatchedPhrase>* unmatched = nullptr) {
    std::vector<ConceptInstance> out;
    std::set<std::string> seen_canonical;
    std::set<std::vector<std::string>> seen_unmatched;
    for (const auto& ls : sa.labeled) {
        if (ls.label != SectionLabel::Method) continue;
        for (const auto& np : chunk_noun_phrases(ls.sentence.text)) {
            auto hit = categorize(np.surface, vocab);
            if (!hit) {
                if (unmatched && seen_unmatched.insert(normalize_phrase(np.surface)).second) {
                    unmatched->push_back({np.surface, ls.sentence.index});
                }
                continue;
            }
            if (!seen_canonical.insert(hit->first).second) continue;  // dedupe per study
            out.push_back({np.surface, hit->first, hit->second, sa.study_id, ls.sentence.index});
        }
    }
    return out;
}

namespace detail {

struct Mention {
    std::string canonical;
    std::size_t begin = 0;  // char offset in the sentence
};

struct ComparatorHit {
    Relation relation = Relation::Better;
    std::size_t begin = 0;      // char offset of the comparator
    bool args_around = true;    // subject before / object after, vs. first two
};

// Negation within a three-token window flips a comparative to Equivalent
// ("not better than", "no better than", "did not outperform").
inline bool negated_before(const std::string& lower, std::size_t pos) {
    static const std::set<std::string> negations = {"not", "no", "never", "neither",
                                                    "hardly", "without", "nor"};
    std::vector<std::string> tokens;
    std::size_t i = pos;
    while (i > 0 && tokens.size() < 3) {
        std::size_t end = i;
        while (end > 0 && ascii_space(lower[end - 1])) --end;
        std::size_t start = end;
        while (start > 0 && !ascii_space(lower[start - 1])) --start;
        if (start == end) break;
        std::string tok;
        for (std::size_t k = start; k < end; ++k) {
            if (ascii_alnum(lower[k])) tok.push_back(lower[k]);
        }
        if (!tok.empty()) tokens.push_back(tok);
        i = start;
    }
    for (const auto& t : tokens) {
        if (negations.count(t)) return true;
    }
    return false;
}

// "better"/"worse" must pair with a "than" within a few tokens so that
// plain intensifiers ("a better understanding of ...") do not fire.
inline bool paired_with_than(const std::string& lower, std::size_t word_end) {
    std::size_t limit = word_end;
    for (int tokens = 0; tokens < 5 && limit < lower.size(); ++tokens) {
        while (limit < lower.size() && ascii_space(lower[limit])) ++limit;
        std::size_t start = limit;
        while (limit < lower.size() && !ascii_space(lower[limit])) ++limit;
        std::string tok;
        for (std::size_t k = start; k < limit; ++k) {
            if (ascii_alnum(lower[k])) tok.push_back(lower[k]);
        }
        if (tok == "than") return true;
    }
    return false;
}

inline std::optional<ComparatorHit> find_comparator(const std::string& lower) {
    static const std::vector<std::string> equivalence_markers = {
        "no significant difference", "not significantly different",
        "no statistically significant difference", "no big difference",
        "comparable", "similar accuracy", "similar performance",
        "similar results", "as accurate as", "almost the same",
        "equally accurate", "no difference",
    };
    for (const auto& m : equivalence_markers) {
        std::size_t p = lower.find(m);
        if (p != std::string::npos) return ComparatorHit{Relation::Equivalent, p, false};
    }
    struct Pattern {
        const char* text;
        Relation relation;
        bool needs_than;
    };
    static const std::vector<Pattern> comparatives = {
        {"outperform", Relation::Better, false},
        {"superior to", Relation::Better, false},
        {"better", Relation::Better, true},
        {"inferior to", Relation::Worse, false},
        {"worse", Relation::Worse, true},
    };
    std::optional<ComparatorHit> best;
    for (const auto& pat : comparatives) {
        std::size_t p = lower.find(pat.text);
        while (p != std::string::npos) {
            bool ok = !pat.needs_than || paired_with_than(lower, p + std::string(pat.text).size());
            if (ok) {
                Relation rel = negated_before(lower, p) ? Relation::Equivalent : pat.relation;
                bool around = rel != Relation::Equivalent;
                if (!best || p < best->begin) best = ComparatorHit{rel, p, around};
                break;
            }
            p = lower.find(pat.text, p + 1);
        }
    }
    return best;
}

inline std::vector<Mention> sentence_mentions(const std::string& text, const Vocabulary& vocab) {
    std::vector<Mention> out;
    for (const auto& np : chunk_noun_phrases(text)) {
        if (auto hit = categorize(np.surface, vocab)) {
            out.push_back({hit->first, np.begin});
        }
    }
    return out;
}

}  // namespace detail

// One claim per Conclusion sentence at most. Comparatives need both
// arguments resolved; a sentence naming exactly one known concept with no
// comparator yields Unclear with subject only. Equivalent claims are
// order-normalized so the same sentence can never produce two variants.
inline std::vector<SimpleConclusion> extract_simple_conclusions(const StructuredAbstract& sa,
                                                                const Vocabulary& vocab) {
    std::vector<SimpleConclusion> out;
    for (const auto& ls : sa.labeled) {
        if (ls.label != SectionLabel::Conclusion) continue;
        const std::string& text = ls.sentence.text;
        const std::string lower = to_lower(text);
        const std::vector<detail::Mention> mentions = detail::sentence_mentions(text, vocab);
        std::vector<std::string> distinct;
        for (const auto& m : mentions) {
            if (std::find(distinct.begin(), distinct.end(), m.canonical) == distinct.end()) {
                distinct.push_back(m.canonical);
            }
        }
        const auto comparator = detail::find_comparator(lower);
        if (!comparator) {
            if (distinct.size() == 1) {
                out.push_back({sa.study_id, distinct[0], Relation::Unclear, std::nullopt, text,
                               ls.sentence.index});
            }
            continue;
        }
        std::optional<std::string> subject, object;
        if (comparator->args_around) {
            for (const auto& m : mentions) {
                if (m.begin < comparator->begin) subject = m.canonical;  // nearest before
            }
            for (const auto& m : mentions) {
                if (m.begin >= comparator->begin) {
                    object = m.canonical;  // first after
                    break;
                }
            }
        } else if (distinct.size() >= 2) {
            subject = distinct[0];
            object = distinct[1];
        }
        if (!subject || !object || *subject == *object) continue;
        if (comparator->relation == Relation::Equivalent && *object < *subject) {
            std::swap(*subject, *object);
        }
        out.push_back({sa.study_id, *subject, comparator->relation, object, text,
                       ls.sentence.index});
    }
    return out;
}

inline StudyExtraction extract_study(const StructuredAbstract& sa, const Vocabulary& vocab) {
    StudyExtraction out;
    out.study_id = sa.study_id;
    out.concepts = extract_concepts(sa, vocab, &out.unmatched);
    out.conclusions = extract_simple_conclusions(sa, vocab);
    return out;
}

// ---------------------------------------------------------------------------
// Stage artifact: extraction JSONL

inline void write_extractions_jsonl(std::ostream& os, const std::vector<StudyExtraction>& xs) {
    for (const auto& x : xs) {
        nlohmann::json concepts = nlohmann::json::array();
        for (const auto& c : x.concepts) {
            concepts.push_back({{"surface", c.surface},
                                {"canonical", c.canonical},
                                {"category", c.category.str()},
                                {"sentence_index", c.sentence_index}});
        }
        nlohmann::json conclusions = nlohmann::json::array();
        for (const auto& c : x.conclusions) {
            nlohmann::json rec{{"subject", c.subject},
                               {"relation", relation_name(c.relation)},
                               {"evidence", c.evidence},
                               {"sentence_index", c.sentence_index}};
            if (c.object) rec["object"] = *c.object;
            conclusions.push_back(std::move(rec));
        }
        nlohmann::json unmatched = nlohmann::json::array();
        for (const auto& u : x.unmatched) {
            unmatched.push_back({{"surface", u.surface}, {"sentence_index", u.sentence_index}});
        }
        nlohmann::json rec{{"id", x.study_id},
                           {"concepts", concepts},
                           {"simple_conclusions", conclusions},
                           {"unmatched_phrases", unmatched}};
        os << rec.dump() << '\n';
    }
}

inline std::vector<StudyExtraction> read_extractions_jsonl(std::istream& in) {
    std::vector<StudyExtraction> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("id")) {
            throw ParseError(lineno, "bad extraction record");
        }
        StudyExtraction x;
        x.study_id = rec["id"].get<std::string>();
        for (const auto& c : rec.value("concepts", nlohmann::json::array())) {
            ConceptInstance ci;
            ci.surface = c.at("surface").get<std::string>();
            ci.canonical = c.at("canonical").get<std::string>();
            ci.category = CategoryPath::parse(c.at("category").get<std::string>());
            ci.study_id = x.study_id;
            ci.sentence_index = c.at("sentence_index").get<std::size_t>();
            x.concepts.push_back(std::move(ci));
        }
        for (const auto& c : rec.value("simple_conclusions", nlohmann::json::array())) {
            SimpleConclusion sc;
            sc.study_id = x.study_id;
            sc.subject = c.at("subject").get<std::string>();
            auto rel = relation_from_name(c.at("relation").get<std::string>());
            if (!rel) throw ParseError(lineno, "bad relation name");
            sc.relation = *rel;
            if (c.contains("object")) sc.object = c["object"].get<std::string>();
            sc.evidence = c.at("evidence").get<std::string>();
            sc.sentence_index = c.at("sentence_index").get<std::size_t>();
            x.conclusions.push_back(std::move(sc));
        }
        for (const auto& u : rec.value("unmatched_phrases", nlohmann::json::array())) {
            x.unmatched.push_back(
                {u.at("surface").get<std::string>(), u.at("sentence_index").get<std::size_t>()});
        }
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace slrkb
