#pragma once

// Corpus ingestion: JSON Lines (canonical) and a small braces-only BibTeX
// subset. Per-record problems are collected, not thrown; a run fails only
// when nothing valid parses at all.

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slrkb/errors.hpp"
#include "slrkb/study.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

enum class RecordFormat { JsonLines, BibTexSubset };

struct RecordIssue {
    std::size_t index = 0;   // 1-based line (JSONL) or entry (BibTeX) number
    std::string reason;
};

struct IngestResult {
    Corpus corpus;
    std::vector<RecordIssue> issues;  // skipped records, with reasons
};

inline std::string derive_study_id(std::string_view title, int year) {
    return to_hex(fnv1a64(normalize_title(title) + "|" + std::to_string(year)));
}

namespace detail {

struct RawRecord {
    std::string id;  // empty when the record carries none
    std::string title;
    std::vector<std::string> authors;
    bool has_year = false;
    int year = 0;
    std::string venue;
    std::string abstract_text;
    std::vector<std::string> keywords;
};

// Validates a raw record and either appends a PrimaryStudy or an issue.
inline void finish_record(RawRecord&& raw, std::size_t index,
                          std::set<std::string>& seen_ids,
                          IngestResult& out) {
    raw.title = normalize_ws(raw.title);
    raw.abstract_text = normalize_ws(raw.abstract_text);
    if (raw.title.empty()) {
        out.issues.push_back({index, "missing title"});
        return;
    }
    if (raw.abstract_text.empty()) {
        out.issues.push_back({index, "missing abstract"});
        return;
    }
    if (!raw.has_year) {
        out.issues.push_back({index, "missing year"});
        return;
    }
    if (raw.year < kMinYear || raw.year > kMaxYear) {
        out.issues.push_back({index, "year out of range: " + std::to_string(raw.year)});
        return;
    }
    std::string id = trim(raw.id);
    if (id.empty()) {
        id = derive_study_id(raw.title, raw.year);
    } else if (!valid_resource_name(id) || reserved_resource_name(id)) {
        out.issues.push_back({index, "invalid id: " + id});
        return;
    }
    if (!seen_ids.insert(id).second) {
        out.issues.push_back({index, "duplicate id: " + id});
        return;
    }
    PrimaryStudy study;
    study.id = std::move(id);
    study.title = std::move(raw.title);
    study.authors = std::move(raw.authors);
    study.year = raw.year;
    study.venue = normalize_ws(raw.venue);
    study.abstract_text = std::move(raw.abstract_text);
    study.keywords = std::move(raw.keywords);
    out.corpus.studies.push_back(std::move(study));
}

inline std::vector<std::string> string_list(const nlohmann::json& v) {
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
    } else if (v.is_array()) {
        for (const auto& e : v) {
            if (e.is_string()) out.push_back(e.get<std::string>());
        }
    }
    return out;
}

inline void parse_jsonl(std::istream& in, IngestResult& out) {
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            out.issues.push_back({lineno, "not a JSON object"});
            continue;
        }
        RawRecord raw;
        if (rec.contains("id") && rec["id"].is_string()) raw.id = rec["id"].get<std::string>();
        if (rec.contains("title") && rec["title"].is_string()) raw.title = rec["title"].get<std::string>();
        if (rec.contains("abstract") && rec["abstract"].is_string())
            raw.abstract_text = rec["abstract"].get<std::string>();
        if (rec.contains("venue") && rec["venue"].is_string()) raw.venue = rec["venue"].get<std::string>();
        if (rec.contains("authors")) raw.authors = string_list(rec["authors"]);
        if (rec.contains("keywords")) raw.keywords = string_list(rec["keywords"]);
        if (rec.contains("year")) {
            const auto& y = rec["year"];
            if (y.is_number_integer()) {
                raw.year = y.get<int>();
                raw.has_year = true;
            } else if (y.is_string()) {
                // tolerate bib exports that quote the year
                const std::string ys = trim(y.get<std::string>());
                if (!ys.empty() && std::all_of(ys.begin(), ys.end(), ascii_digit)) {
                    raw.year = std::stoi(ys);
                    raw.has_year = true;
                }
            }
        }
        finish_record(std::move(raw), lineno, seen_ids, out);
    }
}

// Reads a braces-only value: assumes *pos is just past '{', returns content
// up to the matching '}' (nested braces allowed, kept verbatim inside).
inline bool read_braced(const std::string& text, std::size_t& pos, std::string& value) {
    int depth = 1;
    std::string out;
    while (pos < text.size()) {
        char c = text[pos++];
        if (c == '{') {
            ++depth;
            out.push_back(c);
        } else if (c == '}') {
            --depth;
            if (depth == 0) {
                value = out;
                return true;
            }
            out.push_back(c);
        } else {
            out.push_back(c);
        }
    }
    return false;
}

inline std::vector<std::string> split_authors(const std::string& field) {
    std::vector<std::string> out;
    std::size_t start = 0;
    const std::string lower = to_lower(field);
    while (true) {
        std::size_t pos = lower.find(" and ", start);
        if (pos == std::string::npos) break;
        std::string part = normalize_ws(field.substr(start, pos - start));
        if (!part.empty()) out.push_back(part);
        start = pos + 5;
    }
    std::string last = normalize_ws(field.substr(start));
    if (!last.empty()) out.push_back(last);
    return out;
}

inline void parse_bibtex(std::istream& in, IngestResult& out) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::set<std::string> seen_ids;
    std::size_t pos = 0;
    std::size_t entry_index = 0;
    while (true) {
        pos = text.find('@', pos);
        if (pos == std::string::npos) break;
        ++entry_index;
        ++pos;
        std::size_t type_start = pos;
        while (pos < text.size() && ascii_alpha(text[pos])) ++pos;
        std::string entry_type = to_lower(text.substr(type_start, pos - type_start));
        while (pos < text.size() && ascii_space(text[pos])) ++pos;
        if (pos >= text.size() || text[pos] != '{') {
            out.issues.push_back({entry_index, "expected '{' after @" + entry_type});
            continue;
        }
        ++pos;
        // citation key
        std::size_t key_start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != '}') ++pos;
        std::string key = trim(text.substr(key_start, pos - key_start));
        if (pos < text.size() && text[pos] == ',') ++pos;

        RawRecord raw;
        raw.id = key;
        bool well_formed = true;
        // field = {value} pairs until the closing brace of the entry
        while (true) {
            while (pos < text.size() && (ascii_space(text[pos]) || text[pos] == ',')) ++pos;
            if (pos >= text.size()) {
                well_formed = false;
                break;
            }
            if (text[pos] == '}') {
                ++pos;
                break;
            }
            std::size_t name_start = pos;
            while (pos < text.size() && text[pos] != '=' && text[pos] != '}' && text[pos] != ',') ++pos;
            if (pos >= text.size() || text[pos] != '=') {
                well_formed = false;
                break;
            }
            std::string field = to_lower(trim(text.substr(name_start, pos - name_start)));
            ++pos;  // '='
            while (pos < text.size() && ascii_space(text[pos])) ++pos;
            if (pos >= text.size() || text[pos] != '{') {
                well_formed = false;  // quoted strings and macros are not accepted
                break;
            }
            ++pos;
            std::string value;
            if (!read_braced(text, pos, value)) {
                well_formed = false;
                break;
            }
            value = normalize_ws(value);
            if (field == "title") raw.title = value;
            else if (field == "abstract") raw.abstract_text = value;
            else if (field == "author") raw.authors = split_authors(value);
            else if (field == "booktitle" || field == "journal") raw.venue = value;
            else if (field == "keywords") {
                for (auto& k : split(value, ',')) {
                    std::string kw = normalize_ws(k);
                    if (!kw.empty()) raw.keywords.push_back(kw);
                }
            } else if (field == "year") {
                std::string ys = trim(value);
                if (!ys.empty() && std::all_of(ys.begin(), ys.end(), ascii_digit)) {
                    raw.year = std::stoi(ys);
                    raw.has_year = true;
                }
            }
            // unknown fields ignored
        }
        if (!well_formed) {
            out.issues.push_back({entry_index, "malformed entry @" + entry_type});
            continue;
        }
        if (entry_type != "article" && entry_type != "inproceedings") {
            out.issues.push_back({entry_index, "unsupported entry type @" + entry_type});
            continue;
        }
        finish_record(std::move(raw), entry_index, seen_ids, out);
    }
}

}  // namespace detail

// Parses the whole input. Skipped records are reported in `issues`; throws
// EmptyCorpusError only when zero records survive.
inline IngestResult parse_records(std::istream& in, RecordFormat format,
                                  std::string source_description = {}) {
    IngestResult out;
    out.corpus.source_description = std::move(source_description);
    if (format == RecordFormat::JsonLines) {
        detail::parse_jsonl(in, out);
    } else {
        detail::parse_bibtex(in, out);
    }
    if (out.corpus.studies.empty()) throw EmptyCorpusError();
    return out;
}

struct DedupeResult {
    Corpus corpus;
    std::vector<std::string> dropped_ids;
};

// Keeps the first occurrence of each normalized title, preserving order.
inline DedupeResult dedupe(const Corpus& corpus) {
    DedupeResult out;
    out.corpus.source_description = corpus.source_description;
    std::set<std::string> seen_titles;
    for (const auto& study : corpus.studies) {
        if (seen_titles.insert(normalize_title(study.title)).second) {
            out.corpus.studies.push_back(study);
        } else {
            out.dropped_ids.push_back(study.id);
        }
    }
    return out;
}

// Canonical corpus JSONL, one study per line. Stable field order via
// nlohmann's sorted keys; this is the on-disk stage artifact.
inline void write_corpus_jsonl(std::ostream& os, const Corpus& corpus) {
    for (const auto& s : corpus.studies) {
        nlohmann::json rec{
            {"id", s.id},       {"title", s.title},     {"authors", s.authors},
            {"year", s.year},   {"venue", s.venue},     {"abstract", s.abstract_text},
            {"keywords", s.keywords}};
        os << rec.dump() << '\n';
    }
}

inline Corpus read_corpus_jsonl(std::istream& in, std::string source_description = {}) {
    IngestResult r = parse_records(in, RecordFormat::JsonLines, std::move(source_description));
    return std::move(r.corpus);
}

}  // namespace slrkb
