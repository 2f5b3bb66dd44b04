#pragma once

// Controlled vocabulary: headword -> category path plus synonym patterns.
// Matching is longest-pattern containment after a light normalization
// (lowercase, hyphen folding, plural stripping), so "neural networks" and
// "artificial neural network approach" both land on the same headword.

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slrkb/errors.hpp"
#include "slrkb/ontology.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

namespace detail {

inline std::string strip_plural(std::string token) {
    if (token.size() > 4 && token.compare(token.size() - 3, 3, "ies") == 0) {
        token.replace(token.size() - 3, 3, "y");
    } else if (token.size() > 3 && token.back() == 's' &&
               token[token.size() - 2] != 's') {
        token.pop_back();
    }
    return token;
}

}  // namespace detail

// Normalized token sequence used for all vocabulary matching.
inline std::vector<std::string> normalize_phrase(std::string_view phrase) {
    std::string mapped;
    mapped.reserve(phrase.size());
    for (char c : phrase) {
        if (ascii_alnum(c)) mapped.push_back(ascii_lower_char(c));
        else mapped.push_back(' ');  // hyphens, parens etc. fold to spaces
    }
    std::vector<std::string> tokens;
    for (auto& t : split(normalize_ws(mapped), ' ')) {
        if (!t.empty()) tokens.push_back(detail::strip_plural(std::move(t)));
    }
    return tokens;
}

struct VocabEntry {
    std::string headword;  // lowercase, no underscores
    CategoryPath category;
    std::vector<std::string> synonyms;  // as written in the config
};

struct Vocabulary {
    std::vector<VocabEntry> entries;

    struct Pattern {
        std::vector<std::string> tokens;  // normalized
        std::size_t entry_index = 0;
    };
    std::vector<Pattern> patterns;  // headwords + synonyms, file order

    const VocabEntry* find_headword(std::string_view headword) const {
        for (const auto& e : entries) {
            if (e.headword == headword) return &e;
        }
        return nullptr;
    }
};

namespace detail {

inline bool contains_subsequence(const std::vector<std::string>& haystack,
                                 const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

inline std::size_t char_length(const std::vector<std::string>& tokens) {
    std::size_t n = 0;
    for (const auto& t : tokens) n += t.size();
    return n;
}

}  // namespace detail

// Rebuilds the pattern table and enforces the vocabulary invariants:
// unique patterns across headwords, schema-valid category paths, headwords
// that survive the slug round-trip.
inline void finalize_vocabulary(Vocabulary& vocab, const Schema& schema) {
    vocab.patterns.clear();
    std::map<std::vector<std::string>, std::string> owner;
    for (std::size_t i = 0; i < vocab.entries.size(); ++i) {
        VocabEntry& e = vocab.entries[i];
        if (e.headword.empty()) throw ConfigError("vocabulary entry with empty headword");
        if (e.headword.find('_') != std::string::npos) {
            throw ConfigError("headword may not contain '_': " + e.headword);
        }
        const std::string sl = slug(e.headword);
        if (!valid_resource_name(sl) || reserved_resource_name(sl)) {
            throw ConfigError("headword does not slug to a valid resource name: " + e.headword);
        }
        if (!e.category.valid_in(schema)) {
            throw ConfigError("category path not in schema: " + e.category.str() +
                              " (headword " + e.headword + ")");
        }
        std::vector<std::vector<std::string>> pats;
        pats.push_back(normalize_phrase(e.headword));
        for (const auto& syn : e.synonyms) pats.push_back(normalize_phrase(syn));
        for (auto& p : pats) {
            if (p.empty()) throw ConfigError("empty synonym pattern for headword " + e.headword);
            auto [it, inserted] = owner.emplace(p, e.headword);
            if (!inserted && it->second != e.headword) {
                throw ConfigError("pattern maps to two headwords: '" + it->second + "' and '" +
                                  e.headword + "'");
            }
            if (inserted) vocab.patterns.push_back({std::move(p), i});
        }
    }
}

inline Vocabulary default_vocabulary(const Schema& schema) {
    Vocabulary v;
    auto add = [&v](const std::string& head, const std::string& cat,
                    std::vector<std::string> syns) {
        v.entries.push_back({head, CategoryPath::parse(cat), std::move(syns)});
    };
    add("regression", "Model/Regression",
        {"linear regression", "stepwise regression", "ols", "regression model",
         "regression analysis", "logistic regression"});
    add("neural network", "Model/NeuralNetwork",
        {"ann", "artificial neural network", "multilayer perceptron", "mlp",
         "neural network model"});
    add("analogy", "Model/Analogy",
        {"case-based reasoning", "cbr", "estimation by analogy", "analogy-based estimation"});
    add("expert judgment", "Model/ExpertJudgment",
        {"expert estimation", "expert-based", "expert judgement"});
    add("bayesian", "Model/Bayesian", {"bayesian network", "bayesian model"});
    add("decision tree", "Model/DecisionTree", {"classification tree", "regression tree"});
    add("cocomo", "Model/COCOMO", {"cocomo ii", "constructive cost model"});
    add("function point analysis", "Model/FunctionPoints",
        {"function point model", "fpa"});
    add("size", "Metric/Size", {"loc", "lines of code", "function points", "software size"});
    add("uncertainty of effort", "Metric/UncertaintyOfEffort",
        {"effort uncertainty", "prediction interval"});
    add("mmre", "Metric/MMRE", {"mean magnitude of relative error"});
    add("pred25", "Metric/Pred25", {"pred(25)"});
    add("effort", "Metric/Effort", {"development effort", "effort estimate"});
    add("team size", "SE_feature/TeamSize", {});
    add("duration", "SE_feature/Duration", {"project duration", "schedule"});
    add("project domain", "SE_feature/ProjectDomain", {"application domain"});
    add("dataset", "SE_feature/DataSetUsed", {"data set", "isbsg", "industrial dataset"});
    finalize_vocabulary(v, schema);
    return v;
}

// Stanza format: a bare headword line, then "category: <path>" and optional
// "synonyms: a, b, c" lines; stanzas separated by blank lines, '#' comments.
inline Vocabulary parse_vocabulary(std::istream& in, const Schema& schema) {
    Vocabulary v;
    VocabEntry current;
    bool open = false;
    bool have_category = false;
    std::string line;
    std::size_t lineno = 0;
    auto close = [&]() {
        if (!open) return;
        if (!have_category) {
            throw ConfigError("vocabulary stanza for '" + current.headword + "' lacks category:");
        }
        v.entries.push_back(std::move(current));
        current = {};
        open = false;
        have_category = false;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string body = trim(line);
        if (body.empty()) {
            close();
            continue;
        }
        if (!open) {
            current.headword = to_lower(body);
            open = true;
            continue;
        }
        std::size_t colon = body.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("vocabulary line " + std::to_string(lineno) +
                              ": expected 'category:' or 'synonyms:'");
        }
        std::string key = to_lower(trim(body.substr(0, colon)));
        std::string value = trim(body.substr(colon + 1));
        if (key == "category") {
            current.category = CategoryPath::parse(value);
            have_category = true;
        } else if (key == "synonyms") {
            for (auto& part : split(value, ',')) {
                std::string syn = to_lower(trim(part));
                if (!syn.empty()) current.synonyms.push_back(std::move(syn));
            }
        } else {
            throw ConfigError("vocabulary line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        }
    }
    close();
    if (v.entries.empty()) throw ConfigError("vocabulary file has no entries");
    finalize_vocabulary(v, schema);
    return v;
}

inline Vocabulary load_vocabulary(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open vocabulary file: " + path);
    return parse_vocabulary(in, schema);
}

// Longest-pattern containment match; absent when nothing matches. Ties on
// token count fall to character length, then to file order.
inline std::optional<std::pair<std::string, CategoryPath>> categorize(std::string_view surface,
                                                                      const Vocabulary& vocab) {
    const std::vector<std::string> tokens = normalize_phrase(surface);
    if (tokens.empty()) return std::nullopt;
    const Vocabulary::Pattern* best = nullptr;
    for (const auto& pat : vocab.patterns) {
        if (!detail::contains_subsequence(tokens, pat.tokens)) continue;
        if (!best || pat.tokens.size() > best->tokens.size() ||
            (pat.tokens.size() == best->tokens.size() &&
             detail::char_length(pat.tokens) > detail::char_length(best->tokens))) {
            best = &pat;
        }
    }
    if (!best) return std::nullopt;
    const VocabEntry& e = vocab.entries[best->entry_index];
    return std::make_pair(e.headword, e.category);
}

}  // namespace slrkb
