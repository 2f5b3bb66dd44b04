#pragma once

// Rule-based noun phrase chunking, self-contained: closed-class stop lists
// decide what cannot be part of a noun run, verb-suffix heuristics knock out
// inflected verbs, everything left defaults to noun. Chunks are maximal
// Det? (Adj|Noun)* Noun runs; the determiner is stripped from the surface.

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrkb/text_util.hpp"

namespace slrkb {

struct NounPhrase {
    std::string surface;  // as it appeared, determiner stripped
    std::size_t begin = 0;  // char span in the input sentence
    std::size_t end = 0;
};

namespace pos {

inline const std::set<std::string>& determiners() {
    static const std::set<std::string> s = {
        "a", "an", "the", "this", "these", "those", "each", "every", "some",
        "any", "no", "all", "both", "our", "their", "its", "his", "her",
        "my", "your", "another", "either", "neither",
    };
    return s;
}

// Prepositions, conjunctions, pronouns, auxiliaries, common adverbs: none
// of these can continue a noun run.
inline const std::set<std::string>& closed_class() {
    static const std::set<std::string> s = {
        // prepositions
        "of", "in", "on", "with", "within", "without", "by", "for", "to",
        "from", "between", "among", "over", "under", "than", "as", "at",
        "during", "via", "through", "against", "across", "after", "before",
        "about", "into", "onto", "upon", "per", "toward", "towards", "like",
        "near", "versus",
        // conjunctions / relatives
        "and", "or", "but", "nor", "so", "yet", "while", "whereas",
        "although", "though", "because", "since", "if", "whether", "when",
        "where", "that", "which", "who", "whom", "whose", "how", "why",
        // pronouns
        "we", "it", "they", "i", "you", "he", "she", "them", "us", "him",
        "there", "itself", "themselves", "ourselves", "what", "such",
        // auxiliaries and modals
        "is", "are", "was", "were", "be", "been", "being", "am", "has",
        "have", "had", "having", "do", "does", "did", "done", "can",
        "could", "may", "might", "shall", "should", "will", "would", "must",
        "cannot",
        // adverbs and negation
        "not", "never", "also", "however", "thus", "therefore", "moreover",
        "furthermore", "hence", "often", "only", "very", "quite", "rather",
        "too", "then", "still", "well", "almost", "nearly", "respectively",
        "more", "most", "less", "least",
    };
    return s;
}

inline const std::set<std::string>& verb_stems() {
    static const std::set<std::string> s = {
        "propose", "present", "apply", "show", "demonstrate", "evaluate",
        "compare", "develop", "conduct", "perform", "outperform", "predict",
        "achieve", "prove", "improve", "suggest", "indicate", "reveal",
        "obtain", "employ", "investigate", "examine", "analyze", "analyse",
        "introduce", "describe", "report", "conclude", "provide", "remain",
        "fail", "validate", "assess", "observe", "yield", "argue", "contend",
        "claim", "believe", "confirm", "use", "find", "explore", "adopt",
        "build", "construct", "collect", "derive", "consider", "require",
        "enable", "allow", "involve", "include", "illustrate", "leverage",
        "combine", "produce", "reduce", "increase", "decrease", "lead",
        "tend", "seem", "appear", "discuss", "summarize", "implement",
        "utilize", "exceed", "surpass", "favor", "train", "learn", "deliver",
    };
    return s;
}

// Nouns that the adjective suffix heuristics would otherwise misclassify.
inline const std::set<std::string>& noun_exceptions() {
    static const std::set<std::string> s = {
        "interval", "goal", "proposal", "journal", "trial", "total",
        "signal", "level", "detail", "material", "potential", "panel",
        "personnel", "arrival", "approval", "removal",
    };
    return s;
}

inline const std::set<std::string>& adjective_words() {
    static const std::set<std::string> s = {
        "new", "novel", "recent", "large", "small", "good", "better",
        "best", "worse", "worst", "high", "low", "higher", "lower", "real",
        "simple", "complex", "several", "many", "few", "other", "various",
        "different", "same", "similar", "main", "key", "common", "popular",
        "stepwise", "fuzzy", "deep", "big", "raw", "overall",
    };
    return s;
}

inline bool has_suffix(std::string_view word, std::string_view suffix) {
    return word.size() > suffix.size() &&
           word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline bool verb_form(const std::string& lower) {
    const auto& stems = verb_stems();
    if (stems.count(lower)) return true;
    auto stem_known = [&](std::string_view suffix, bool restore_e) {
        if (!has_suffix(lower, suffix)) return false;
        std::string stem = lower.substr(0, lower.size() - suffix.size());
        if (stems.count(stem)) return true;
        if (restore_e && stems.count(stem + "e")) return true;
        // doubled final consonant ("planned" -> "plan")
        if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
            stems.count(stem.substr(0, stem.size() - 1))) {
            return true;
        }
        return false;
    };
    return stem_known("ing", true) || stem_known("ed", true) || stem_known("d", false) ||
           stem_known("es", false) || stem_known("s", false);
}

enum class TokenClass { Determiner, Break, Adjective, Noun };

inline TokenClass classify(const std::string& token) {
    const std::string lower = to_lower(token);
    if (determiners().count(lower)) return TokenClass::Determiner;
    if (closed_class().count(lower)) return TokenClass::Break;
    if (has_suffix(lower, "ly")) return TokenClass::Break;  // adverb
    if (noun_exceptions().count(lower)) return TokenClass::Noun;
    if (verb_form(lower)) return TokenClass::Break;
    if (adjective_words().count(lower)) return TokenClass::Adjective;
    if (has_suffix(lower, "al") || has_suffix(lower, "ive") || has_suffix(lower, "ous") ||
        has_suffix(lower, "ic") || has_suffix(lower, "ary") || has_suffix(lower, "able") ||
        has_suffix(lower, "ible") || has_suffix(lower, "ful") || has_suffix(lower, "less") ||
        has_suffix(lower, "based") || has_suffix(lower, "driven") ||
        has_suffix(lower, "oriented")) {
        return TokenClass::Adjective;
    }
    // unknown -ed participles read as modifiers ("structured abstracts");
    // unknown -ing forms are usually gerund heads ("case-based reasoning")
    if (has_suffix(lower, "ed")) return TokenClass::Adjective;
    return TokenClass::Noun;
}

}  // namespace pos

inline std::vector<NounPhrase> chunk_noun_phrases(std::string_view sentence_text) {
    const std::vector<TokenSpan> tokens = tokenize_spans(sentence_text);
    std::vector<pos::TokenClass> classes;
    classes.reserve(tokens.size());
    for (const auto& t : tokens) classes.push_back(pos::classify(t.text));

    std::vector<NounPhrase> out;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (classes[i] == pos::TokenClass::Break) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (classes[i] == pos::TokenClass::Determiner) ++i;
        std::size_t first_content = i;
        std::size_t last_noun = std::string::npos;
        while (i < tokens.size() && (classes[i] == pos::TokenClass::Adjective ||
                                     classes[i] == pos::TokenClass::Noun)) {
            if (classes[i] == pos::TokenClass::Noun) last_noun = i;
            ++i;
        }
        if (last_noun != std::string::npos && first_content <= last_noun) {
            const std::size_t b = tokens[first_content].begin;
            const std::size_t e = tokens[last_noun].end;
            out.push_back({std::string(sentence_text.substr(b, e - b)), b, e});
        }
        if (i == start) ++i;  // lone determiner, no progress otherwise
    }
    return out;
}

}  // namespace slrkb
