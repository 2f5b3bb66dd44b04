#pragma once

// Sentence splitting over whitespace-normalized abstract text. Joining the
// returned sentence texts with single spaces reproduces the normalized
// input exactly; downstream stages rely on that to recover char offsets.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "slrkb/text_util.hpp"

namespace slrkb {

struct Sentence {
    std::size_t index = 0;       // 0-based, contiguous
    std::string text;            // non-empty
    double position_ratio = 0.0; // index / max(1, count - 1)
};

namespace detail {

// Trailing-token stop list: a '.' that completes one of these is an
// abbreviation, not a sentence end.
inline const std::vector<std::string>& abbreviation_stops() {
    static const std::vector<std::string> stops = {
        "et al.", "e.g.", "i.e.", "vs.", "cf.", "fig.", "figs.", "no.",
        "eq.", "sec.", "ref.", "etc.", "resp.", "approx.", "vol.", "pp.",
        "dr.", "mr.", "ms.", "prof.", "st.",
    };
    return stops;
}

inline bool ends_with_abbreviation(std::string_view text, std::size_t dot_pos) {
    const std::string_view upto = text.substr(0, dot_pos + 1);
    const std::string lower = to_lower(upto.size() > 16 ? upto.substr(upto.size() - 16) : upto);
    for (const auto& stop : abbreviation_stops()) {
        if (lower.size() < stop.size()) continue;
        if (lower.compare(lower.size() - stop.size(), stop.size(), stop) != 0) continue;
        // must be token-initial ("Fig." yes, "config." no)
        std::size_t before = lower.size() - stop.size();
        if (before == 0 || !ascii_alnum(lower[before - 1])) return true;
    }
    return false;
}

}  // namespace detail

// Boundary rule: '.', '!' or '?' followed by a space and an uppercase
// letter, digit or '[' (bracketed section headings start sentences), unless
// the period completes a stop-listed abbreviation. Worst case the whole
// text is one sentence.
inline std::vector<Sentence> split_sentences(std::string_view abstract_text) {
    const std::string text = normalize_ws(abstract_text);
    std::vector<std::string> pieces;
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        // allow a closing quote/bracket between the terminator and the space
        std::size_t after = i + 1;
        while (after < text.size() && (text[after] == '"' || text[after] == ')' || text[after] == ']')) ++after;
        if (after >= text.size() || text[after] != ' ') continue;
        if (after + 1 >= text.size()) continue;
        char next = text[after + 1];
        if (!(ascii_upper(next) || ascii_digit(next) || next == '[')) continue;
        if (c == '.' && detail::ends_with_abbreviation(text, i)) continue;
        pieces.push_back(text.substr(start, after - start));
        start = after + 1;
    }
    if (start < text.size()) pieces.push_back(text.substr(start));
    if (pieces.empty() && !text.empty()) pieces.push_back(text);

    std::vector<Sentence> out;
    out.reserve(pieces.size());
    const double denom = static_cast<double>(pieces.size() > 1 ? pieces.size() - 1 : 1);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        out.push_back({i, std::move(pieces[i]), static_cast<double>(i) / denom});
    }
    return out;
}

}  // namespace slrkb
