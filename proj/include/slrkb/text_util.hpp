#pragma once

// Small string helpers shared by the ingest, segmentation and extraction
// stages. Everything here is pure and locale-independent (ASCII case folds
// only), which keeps the whole pipeline deterministic.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace slrkb {

inline bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool ascii_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

inline bool ascii_alpha(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

inline bool ascii_digit(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

inline bool ascii_upper(char c) {
    return std::isupper(static_cast<unsigned char>(c)) != 0;
}

inline char ascii_lower_char(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out.push_back(ascii_lower_char(c));
    return out;
}

// Collapse whitespace runs to single spaces and trim the ends.
inline std::string normalize_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (ascii_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && ascii_space(s[b])) ++b;
    while (e > b && ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Dedupe key for titles: lowercase, non-alphanumerics become spaces,
// whitespace collapsed. Catches case/punctuation reformatting duplicates.
inline std::string normalize_title(std::string_view title) {
    std::string mapped;
    mapped.reserve(title.size());
    for (char c : title) {
        mapped.push_back(ascii_alnum(c) ? ascii_lower_char(c) : ' ');
    }
    return normalize_ws(mapped);
}

// FNV-1a, 64-bit. Used to derive stable ids for records that ship without one.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// Resource names in the serialized KB are restricted to this alphabet.
inline bool valid_resource_char(char c) {
    return ascii_alnum(c) || c == '_' || c == '-' || c == '.' || c == '/';
}

inline bool valid_resource_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!valid_resource_char(c)) return false;
    }
    return true;
}

// "type", "subClassOf" etc. are structural names in the serialized KB and
// may not be used for studies or concepts.
inline bool reserved_resource_name(std::string_view s) {
    return s == "type" || s == "subClassOf" || s == "domain" || s == "range" ||
           s == "Class" || s == "Text" || s == "Int";
}

// Canonical vocabulary headword -> individual name ("neural network" ->
// "neural_network"). Reversible as long as headwords never contain '_',
// which the vocabulary loader enforces.
inline std::string slug(std::string_view phrase) {
    std::string out;
    out.reserve(phrase.size());
    for (char c : phrase) {
        if (c == ' ') {
            out.push_back('_');
        } else if (valid_resource_char(c)) {
            out.push_back(ascii_lower_char(c));
        }
    }
    return out;
}

inline std::string unslug(std::string_view name) {
    std::string out(name);
    for (char& c : out) {
        if (c == '_') c = ' ';
    }
    return out;
}

struct TokenSpan {
    std::string text;    // as it appeared, punctuation-trimmed
    std::size_t begin;   // offset of first kept char
    std::size_t end;     // one past last kept char
};

// Whitespace tokenizer that trims leading/trailing punctuation from each
// token (internal hyphens and digits survive: "case-based", "pred25").
inline std::vector<TokenSpan> tokenize_spans(std::string_view s) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && ascii_space(s[i])) ++i;
        std::size_t start = i;
        while (i < s.size() && !ascii_space(s[i])) ++i;
        std::size_t b = start, e = i;
        while (b < e && !ascii_alnum(s[b])) ++b;
        while (e > b && !ascii_alnum(s[e - 1])) --e;
        if (b < e) {
            out.push_back({std::string(s.substr(b, e - b)), b, e});
        }
    }
    return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(std::string(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline bool contains_ci(std::string_view haystack_lower, std::string_view needle_lower) {
    return haystack_lower.find(needle_lower) != std::string_view::npos;
}

}  // namespace slrkb
