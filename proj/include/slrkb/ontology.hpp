#pragma once

// The class hierarchy and predicate declarations for the SLR knowledge
// base. Two top branches (ReviewProtocol, PrimaryStudy) plus a small
// provenance root for concept mentions. The hierarchy is fixed at build
// time; nothing mutates it afterwards.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slrkb/errors.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

struct PredicateRange {
    enum class Kind { Class, Text, Int };
    Kind kind = Kind::Class;
    std::string class_name;  // set when kind == Class

    bool operator==(const PredicateRange&) const = default;
    bool operator<(const PredicateRange& o) const {
        if (kind != o.kind) return kind < o.kind;
        return class_name < o.class_name;
    }
};

struct PredicateDecl {
    std::string name;
    std::string domain;  // class name
    PredicateRange range;

    bool operator==(const PredicateDecl&) const = default;
};

struct Schema {
    std::set<std::string> classes;
    std::map<std::string, std::string> parent;  // child -> parent; roots absent
    std::map<std::string, PredicateDecl> predicates;

    bool operator==(const Schema&) const = default;

    bool has_class(std::string_view name) const {
        return classes.count(std::string(name)) != 0;
    }

    // reflexive-transitive subclass test
    bool is_subclass_of(std::string_view sub, std::string_view super) const {
        std::string cur(sub);
        if (!has_class(cur) || !has_class(std::string(super))) return false;
        while (true) {
            if (cur == super) return true;
            auto it = parent.find(cur);
            if (it == parent.end()) return false;
            cur = it->second;
        }
    }

    // class itself first, then parents up to the root
    std::vector<std::string> ancestors_of(std::string_view cls) const {
        std::vector<std::string> out;
        std::string cur(cls);
        if (!has_class(cur)) return out;
        while (true) {
            out.push_back(cur);
            auto it = parent.find(cur);
            if (it == parent.end()) return out;
            cur = it->second;
        }
    }

    // Acyclicity and referential integrity; throws on a broken hierarchy.
    void validate() const {
        for (const auto& [child, par] : parent) {
            if (!has_class(child) || !has_class(par)) {
                throw SchemaViolationError("subclass link references unknown class: " + child +
                                           " -> " + par);
            }
        }
        for (const auto& cls : classes) {
            std::set<std::string> seen;
            std::string cur = cls;
            while (true) {
                if (!seen.insert(cur).second) {
                    throw SchemaViolationError("subclass cycle through: " + cur);
                }
                auto it = parent.find(cur);
                if (it == parent.end()) break;
                cur = it->second;
            }
        }
        for (const auto& [name, pred] : predicates) {
            if (!has_class(pred.domain)) {
                throw SchemaViolationError("predicate " + name + " has unknown domain");
            }
            if (pred.range.kind == PredicateRange::Kind::Class && !has_class(pred.range.class_name)) {
                throw SchemaViolationError("predicate " + name + " has unknown range");
            }
        }
    }
};

// A path from one of the three concept roots down to a leaf class,
// e.g. Model/NeuralNetwork.
struct CategoryPath {
    std::vector<std::string> segments;

    bool operator==(const CategoryPath&) const = default;

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (i) out.push_back('/');
            out += segments[i];
        }
        return out;
    }

    const std::string& leaf() const { return segments.back(); }
    const std::string& root() const { return segments.front(); }

    static CategoryPath parse(std::string_view text) {
        CategoryPath path;
        for (auto& seg : split(text, '/')) {
            std::string s = trim(seg);
            if (s.empty()) throw ConfigError("empty segment in category path: " + std::string(text));
            path.segments.push_back(std::move(s));
        }
        if (path.segments.empty()) throw ConfigError("empty category path");
        return path;
    }

    // Root must be a concept branch and every edge must exist in the schema.
    bool valid_in(const Schema& schema) const {
        if (segments.empty()) return false;
        const std::string& r = segments.front();
        if (r != "Model" && r != "Metric" && r != "SE_feature") return false;
        if (!schema.has_class(r)) return false;
        for (std::size_t i = 1; i < segments.size(); ++i) {
            auto it = schema.parent.find(segments[i]);
            if (it == schema.parent.end() || it->second != segments[i - 1]) return false;
        }
        return true;
    }
};

namespace kbnames {

// built-in structural names in the serialized form
inline constexpr const char* kType = "type";
inline constexpr const char* kSubClassOf = "subClassOf";
inline constexpr const char* kDomain = "domain";
inline constexpr const char* kRange = "range";
inline constexpr const char* kClass = "Class";
inline constexpr const char* kText = "Text";
inline constexpr const char* kInt = "Int";

}  // namespace kbnames

inline Schema build_schema() {
    Schema s;
    auto cls = [&s](const std::string& name, const std::string& par = {}) {
        s.classes.insert(name);
        if (!par.empty()) s.parent[name] = par;
    };
    // review protocol branch
    cls("ReviewProtocol");
    // primary study branch
    cls("PrimaryStudy");
    cls("StructuredAbstract", "PrimaryStudy");
    cls("Background", "StructuredAbstract");
    cls("Method", "StructuredAbstract");
    cls("Conclusion", "StructuredAbstract");
    cls("SimpleConclusion", "Conclusion");
    cls("Model", "Method");
    cls("Metric", "Method");
    cls("SE_feature", "Method");
    cls("Regression", "Model");
    cls("NeuralNetwork", "Model");
    cls("Analogy", "Model");
    cls("ExpertJudgment", "Model");
    cls("Bayesian", "Model");
    cls("DecisionTree", "Model");
    cls("COCOMO", "Model");
    cls("FunctionPoints", "Model");
    cls("Size", "Metric");
    cls("UncertaintyOfEffort", "Metric");
    cls("MMRE", "Metric");
    cls("Pred25", "Metric");
    cls("Effort", "Metric");
    cls("TeamSize", "SE_feature");
    cls("Duration", "SE_feature");
    cls("ProjectDomain", "SE_feature");
    cls("DataSetUsed", "SE_feature");
    // provenance root for reified concept mentions
    cls("ConceptMention");

    auto pred = [&s](const std::string& name, const std::string& domain, PredicateRange range) {
        s.predicates[name] = PredicateDecl{name, domain, std::move(range)};
    };
    const PredicateRange text{PredicateRange::Kind::Text, {}};
    const PredicateRange integer{PredicateRange::Kind::Int, {}};
    auto of_class = [](const std::string& c) {
        return PredicateRange{PredicateRange::Kind::Class, c};
    };
    pred("hasTitle", "PrimaryStudy", text);
    pred("hasAuthor", "PrimaryStudy", text);
    pred("hasYear", "PrimaryStudy", integer);
    pred("hasVenue", "PrimaryStudy", text);
    pred("hasAbstract", "PrimaryStudy", text);
    pred("hasKeyword", "PrimaryStudy", text);
    pred("hasModel", "PrimaryStudy", of_class("Model"));
    pred("hasMetric", "PrimaryStudy", of_class("Metric"));
    pred("hasSEFeature", "PrimaryStudy", of_class("SE_feature"));
    pred("hasSimpleConclusion", "PrimaryStudy", of_class("SimpleConclusion"));
    pred("relatesTo", "PrimaryStudy", of_class("ReviewProtocol"));
    pred("hasSubject", "SimpleConclusion", of_class("Method"));
    pred("hasObject", "SimpleConclusion", of_class("Method"));
    pred("hasRelation", "SimpleConclusion", text);
    pred("hasEvidence", "SimpleConclusion", text);
    pred("hasMention", "PrimaryStudy", of_class("ConceptMention"));
    pred("mentionConcept", "ConceptMention", of_class("Method"));
    pred("mentionSurface", "ConceptMention", text);
    pred("mentionSentence", "ConceptMention", integer);
    pred("hasResearchQuestion", "ReviewProtocol", text);
    pred("hasSearchString", "ReviewProtocol", text);
    pred("hasSource", "ReviewProtocol", text);
    pred("hasInclusionCriterion", "ReviewProtocol", text);
    pred("hasExclusionCriterion", "ReviewProtocol", text);

    s.validate();
    return s;
}

}  // namespace slrkb
