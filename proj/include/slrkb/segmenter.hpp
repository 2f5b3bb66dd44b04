#pragma once

// Section labeling for abstracts. Two routes:
//   1. explicit headings ("[Background]: ...", "METHODS: ...") mapped through
//      the three-section merge table, confidence 1.0;
//   2. otherwise an order-constrained dynamic program over cue-phrase and
//      positional-prior scores, picking the best Background* Method*
//      Conclusion* labeling.

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slrkb/errors.hpp"
#include "slrkb/sentences.hpp"
#include "slrkb/study.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

enum class SectionLabel { Background = 0, Method = 1, Conclusion = 2 };

inline const char* label_name(SectionLabel l) {
    switch (l) {
        case SectionLabel::Background: return "Background";
        case SectionLabel::Method: return "Method";
        case SectionLabel::Conclusion: return "Conclusion";
    }
    return "Background";
}

inline std::optional<SectionLabel> label_from_name(std::string_view s) {
    if (s == "Background") return SectionLabel::Background;
    if (s == "Method") return SectionLabel::Method;
    if (s == "Conclusion") return SectionLabel::Conclusion;
    return std::nullopt;
}

// Cue phrases (lowercase, '*' matches any gap) plus piecewise-constant
// positional priors over three position bands.
struct CueLexicons {
    std::vector<std::string> cues[3];         // indexed by SectionLabel
    std::array<double, 2> bands{0.25, 0.6};   // band edges over position_ratio
    std::array<std::array<double, 3>, 3> priors{{
        {1.0, 0.2, 0.0},   // Background
        {0.3, 1.0, 0.3},   // Method
        {0.0, 0.2, 1.0},   // Conclusion
    }};
    double cue_weight = 1.5;
    int max_hits = 2;
};

inline CueLexicons default_cue_lexicons() {
    CueLexicons lex;
    lex.cues[0] = {
        "has attracted", "have attracted", "in recent years", "is an important",
        "plays a * role", "researchers have", "has become", "have become", "are widely",
    };
    lex.cues[1] = {
        "we propose", "we present", "this paper", "our approach", "we develop",
        "is applied", "we conduct", "based on", "we evaluate", "we apply",
        "we compare", "we use", "we investigate", "we build", "we employ",
        "we introduce", "we assess", "we train", "we describe",
    };
    lex.cues[2] = {
        "results show", "we conclude", "our findings", "outperform",
        "significantly", "in conclusion", "experiments demonstrate",
        "better than", "worse than", "no significant difference",
        "comparable to", "promising", "we found",
    };
    return lex;
}

// Key/value cue-lexicon file. '#' starts a comment; recognized keys:
//   background.cue / method.cue / conclusion.cue = <phrase>
//   prior.bands = <edge1>, <edge2>
//   prior.background|method|conclusion = <v1>, <v2>, <v3>
//   cue.weight = <w>        cue.max_hits = <n>
// Any cue line for a section clears that section's defaults first.
inline CueLexicons parse_cue_lexicons(std::istream& in) {
    CueLexicons lex = default_cue_lexicons();
    bool cleared[3] = {false, false, false};
    std::string line;
    std::size_t lineno = 0;
    auto parse_numbers = [&](const std::string& value, std::size_t want) {
        std::vector<double> nums;
        for (const auto& part : split(value, ',')) {
            try {
                nums.push_back(std::stod(trim(part)));
            } catch (const std::exception&) {
                throw ConfigError("lexicon line " + std::to_string(lineno) +
                                  ": bad number '" + trim(part) + "'");
            }
        }
        if (nums.size() != want) {
            throw ConfigError("lexicon line " + std::to_string(lineno) + ": expected " +
                              std::to_string(want) + " comma-separated values");
        }
        return nums;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) continue;
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("lexicon line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = to_lower(trim(body.substr(0, eq)));
        std::string value = trim(body.substr(eq + 1));
        auto cue_for = [&](int section) {
            if (!cleared[section]) {
                lex.cues[section].clear();
                cleared[section] = true;
            }
            lex.cues[section].push_back(to_lower(value));
        };
        if (key == "background.cue") cue_for(0);
        else if (key == "method.cue") cue_for(1);
        else if (key == "conclusion.cue") cue_for(2);
        else if (key == "prior.bands") {
            auto nums = parse_numbers(value, 2);
            lex.bands = {nums[0], nums[1]};
        } else if (key == "prior.background") {
            auto nums = parse_numbers(value, 3);
            lex.priors[0] = {nums[0], nums[1], nums[2]};
        } else if (key == "prior.method") {
            auto nums = parse_numbers(value, 3);
            lex.priors[1] = {nums[0], nums[1], nums[2]};
        } else if (key == "prior.conclusion") {
            auto nums = parse_numbers(value, 3);
            lex.priors[2] = {nums[0], nums[1], nums[2]};
        } else if (key == "cue.weight") {
            lex.cue_weight = parse_numbers(value, 1)[0];
        } else if (key == "cue.max_hits") {
            lex.max_hits = static_cast<int>(parse_numbers(value, 1)[0]);
        } else {
            throw ConfigError("lexicon line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return lex;
}

inline CueLexicons load_cue_lexicons(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon file: " + path);
    return parse_cue_lexicons(in);
}

// ---------------------------------------------------------------------------
// Headings

struct Heading {
    std::string token;  // lowercased lexicon word
    std::size_t begin = 0;  // char span in the normalized abstract text
    std::size_t end = 0;
};

namespace detail {

inline bool heading_word(const std::string& lower) {
    static const std::vector<std::string> words = {
        "background", "objective", "object", "aim", "aims", "goal",
        "method", "methods", "approach", "result", "results",
        "finding", "findings", "conclusion", "conclusions",
        "context", "purpose",
    };
    for (const auto& w : words) {
        if (lower == w) return true;
    }
    return false;
}

}  // namespace detail

// Merge table: Object/Aim/Goal collapse into Method, Result/Finding into
// Conclusion, Context/Purpose into Background.
inline SectionLabel map_heading(std::string_view heading_token) {
    const std::string t = to_lower(heading_token);
    if (t == "background" || t == "context" || t == "purpose") return SectionLabel::Background;
    if (t == "objective" || t == "object" || t == "aim" || t == "aims" || t == "goal" ||
        t == "method" || t == "methods" || t == "approach") {
        return SectionLabel::Method;
    }
    if (t == "result" || t == "results" || t == "finding" || t == "findings" ||
        t == "conclusion" || t == "conclusions") {
        return SectionLabel::Conclusion;
    }
    throw UnknownHeadingError(std::string(heading_token));
}

// Finds bracketed ("[Background]:") and colon-delimited ("Results:")
// heading tokens, in textual order. Colon-form tokens must start with an
// uppercase letter so that running text ("the results: ...") is not
// mistaken for a heading. Absent unless at least two headings are found.
inline std::optional<std::vector<Heading>> detect_headings(std::string_view abstract_text) {
    const std::string text = normalize_ws(abstract_text);
    std::vector<Heading> found;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '[') {
            std::size_t j = i + 1;
            std::string word;
            while (j < text.size() && ascii_alpha(text[j])) word.push_back(text[j++]);
            if (j < text.size() && text[j] == ']' && detail::heading_word(to_lower(word))) {
                std::size_t end = j + 1;
                if (end < text.size() && text[end] == ':') ++end;
                found.push_back({to_lower(word), i, end});
                i = end - 1;
            }
        } else if (ascii_upper(c) && (i == 0 || !ascii_alnum(text[i - 1]))) {
            std::size_t j = i;
            std::string word;
            while (j < text.size() && ascii_alpha(text[j])) word.push_back(text[j++]);
            if (j < text.size() && text[j] == ':' && detail::heading_word(to_lower(word))) {
                found.push_back({to_lower(word), i, j + 1});
                i = j;
            }
        }
    }
    if (found.size() < 2) return std::nullopt;
    return found;
}

// ---------------------------------------------------------------------------
// Scoring

namespace detail {

// '*' in a cue matches any gap; the segments must appear in order.
inline bool cue_matches(const std::string& sentence_lower, const std::string& cue) {
    std::size_t star = cue.find('*');
    if (star == std::string::npos) return sentence_lower.find(cue) != std::string::npos;
    std::size_t pos = 0;
    std::size_t start = 0;
    while (start <= cue.size()) {
        std::size_t next = cue.find('*', start);
        std::string seg = trim(cue.substr(start, next == std::string::npos ? std::string::npos
                                                                           : next - start));
        if (!seg.empty()) {
            std::size_t hit = sentence_lower.find(seg, pos);
            if (hit == std::string::npos) return false;
            pos = hit + seg.size();
        }
        if (next == std::string::npos) break;
        start = next + 1;
    }
    return true;
}

inline int position_band(double ratio, const std::array<double, 2>& bands) {
    if (ratio < bands[0]) return 0;
    if (ratio < bands[1]) return 1;
    return 2;
}

}  // namespace detail

// Additive per-section scores: capped cue hits times cue weight, plus the
// positional prior for the sentence's band.
inline std::array<double, 3> score_sentence(const Sentence& sentence, const CueLexicons& lex) {
    const std::string lower = to_lower(sentence.text);
    const int band = detail::position_band(sentence.position_ratio, lex.bands);
    std::array<double, 3> scores{};
    for (int section = 0; section < 3; ++section) {
        int hits = 0;
        for (const auto& cue : lex.cues[section]) {
            if (detail::cue_matches(lower, cue)) {
                if (++hits >= lex.max_hits) break;
            }
        }
        scores[static_cast<std::size_t>(section)] =
            static_cast<double>(hits) * lex.cue_weight +
            lex.priors[static_cast<std::size_t>(section)][static_cast<std::size_t>(band)];
    }
    return scores;
}

// Maximizes the total score over all Background* Method* Conclusion*
// labelings (sections may be empty). Ties resolve to the labeling that is
// lexicographically earliest in section order, i.e. earlier sections win
// earlier sentences.
inline std::vector<SectionLabel> choose_monotone_labels(
    const std::vector<std::array<double, 3>>& scores) {
    const std::size_t n = scores.size();
    std::vector<SectionLabel> labels(n, SectionLabel::Background);
    if (n == 0) return labels;
    // best[i][s]: best total for sentences i.. with every label >= s
    std::vector<std::array<double, 3>> best(n + 1, {0.0, 0.0, 0.0});
    for (std::size_t i = n; i-- > 0;) {
        for (int s = 2; s >= 0; --s) {
            double v = scores[i][static_cast<std::size_t>(s)] + best[i + 1][static_cast<std::size_t>(s)];
            for (int t = s + 1; t < 3; ++t) {
                double cand = scores[i][static_cast<std::size_t>(t)] + best[i + 1][static_cast<std::size_t>(t)];
                if (cand > v) v = cand;
            }
            best[i][static_cast<std::size_t>(s)] = v;
        }
    }
    // Greedy reconstruction: the smallest section achieving the optimum at
    // each step yields the lexicographically earliest argmax.
    int current = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = current; s < 3; ++s) {
            double v = scores[i][static_cast<std::size_t>(s)] + best[i + 1][static_cast<std::size_t>(s)];
            if (v == best[i][static_cast<std::size_t>(current)]) {
                labels[i] = static_cast<SectionLabel>(s);
                current = s;
                break;
            }
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Structured abstracts

struct LabeledSentence {
    Sentence sentence;
    SectionLabel label = SectionLabel::Background;
    double confidence = 0.0;
};

struct StructuredAbstract {
    std::string study_id;
    std::vector<LabeledSentence> labeled;  // every sentence, in order
    bool explicit_headings = false;
};

inline bool labels_monotone(const std::vector<SectionLabel>& labels) {
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (static_cast<int>(labels[i]) < static_cast<int>(labels[i - 1])) return false;
    }
    return true;
}

namespace detail {

inline double label_confidence(const std::array<double, 3>& scores, SectionLabel win) {
    double lo = std::min({scores[0], scores[1], scores[2]});
    double shift = lo < 0.0 ? -lo : 0.0;
    double total = (scores[0] + shift) + (scores[1] + shift) + (scores[2] + shift);
    if (total <= 0.0) return 1.0 / 3.0;
    return (scores[static_cast<std::size_t>(win)] + shift) / total;
}

}  // namespace detail

inline StructuredAbstract segment_abstract(const PrimaryStudy& study, const CueLexicons& lex) {
    StructuredAbstract out;
    out.study_id = study.id;
    const std::string normalized = normalize_ws(study.abstract_text);
    std::vector<Sentence> sentences = split_sentences(normalized);

    // char offset of each sentence inside the normalized text
    std::vector<std::size_t> starts(sentences.size(), 0);
    for (std::size_t i = 1; i < sentences.size(); ++i) {
        starts[i] = starts[i - 1] + sentences[i - 1].text.size() + 1;
    }

    if (auto headings = detect_headings(normalized)) {
        std::vector<SectionLabel> labels(sentences.size());
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            // nearest heading at or before the sentence start; sentences
            // before the first heading inherit the first heading's section
            const Heading* applicable = &headings->front();
            for (const auto& h : *headings) {
                if (h.begin <= starts[i]) applicable = &h;
            }
            labels[i] = map_heading(applicable->token);
        }
        if (labels_monotone(labels)) {
            for (std::size_t i = 0; i < sentences.size(); ++i) {
                out.labeled.push_back({std::move(sentences[i]), labels[i], 1.0});
            }
            out.explicit_headings = true;
            return out;
        }
        // headings in nonstandard order are treated as unreliable; fall
        // through to the scored path so the monotone invariant holds
    }

    std::vector<std::array<double, 3>> scores;
    scores.reserve(sentences.size());
    for (const auto& s : sentences) scores.push_back(score_sentence(s, lex));
    std::vector<SectionLabel> labels = choose_monotone_labels(scores);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        double conf = detail::label_confidence(scores[i], labels[i]);
        out.labeled.push_back({std::move(sentences[i]), labels[i], conf});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stage artifact: segmentation JSONL

inline void write_segments_jsonl(std::ostream& os, const std::vector<StructuredAbstract>& sas) {
    for (const auto& sa : sas) {
        nlohmann::json sentences = nlohmann::json::array();
        for (const auto& ls : sa.labeled) {
            sentences.push_back({{"index", ls.sentence.index},
                                 {"text", ls.sentence.text},
                                 {"label", label_name(ls.label)},
                                 {"confidence", ls.confidence}});
        }
        nlohmann::json rec{{"id", sa.study_id},
                           {"explicit_headings", sa.explicit_headings},
                           {"sentences", sentences}};
        os << rec.dump() << '\n';
    }
}

inline std::vector<StructuredAbstract> read_segments_jsonl(std::istream& in) {
    std::vector<StructuredAbstract> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("id") ||
            !rec.contains("sentences")) {
            throw ParseError(lineno, "bad segmentation record");
        }
        StructuredAbstract sa;
        sa.study_id = rec["id"].get<std::string>();
        sa.explicit_headings = rec.value("explicit_headings", false);
        const std::size_t count = rec["sentences"].size();
        const double denom = static_cast<double>(count > 1 ? count - 1 : 1);
        for (const auto& s : rec["sentences"]) {
            LabeledSentence ls;
            ls.sentence.index = s.at("index").get<std::size_t>();
            ls.sentence.text = s.at("text").get<std::string>();
            ls.sentence.position_ratio = static_cast<double>(ls.sentence.index) / denom;
            auto label = label_from_name(s.at("label").get<std::string>());
            if (!label) throw ParseError(lineno, "bad section label");
            ls.label = *label;
            ls.confidence = s.value("confidence", 0.0);
            sa.labeled.push_back(std::move(ls));
        }
        out.push_back(std::move(sa));
    }
    return out;
}

}  // namespace slrkb
