#pragma once

#include <string>
#include <vector>

namespace slrkb {

// One bibliographic record. The abstract is the only part of a paper the
// pipeline reads; full text and references are out of scope.
struct PrimaryStudy {
    std::string id;           // stable, unique within a corpus
    std::string title;        // non-empty
    std::vector<std::string> authors;
    int year = 0;             // calendar year, 1950-2100
    std::string venue;        // may be empty
    std::string abstract_text;  // non-empty after whitespace normalization
    std::vector<std::string> keywords;

    bool operator==(const PrimaryStudy&) const = default;
};

struct Corpus {
    std::vector<PrimaryStudy> studies;  // input order preserved
    std::string source_description;
};

inline constexpr int kMinYear = 1950;
inline constexpr int kMaxYear = 2100;

}  // namespace slrkb
