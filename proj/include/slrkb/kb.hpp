#pragma once

// Typed triple store over the built-in schema. Instances carry exactly one
// direct `type` triple; ancestors are inferred on demand, never stored.
// Serialization is a sorted line-per-triple format, so equal KBs always
// produce byte-identical output.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slrkb/errors.hpp"
#include "slrkb/extractor.hpp"
#include "slrkb/ontology.hpp"
#include "slrkb/segmenter.hpp"
#include "slrkb/study.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

// Object position of a triple: resource reference or literal.
struct Value {
    enum class Kind { Resource, Text, Int };
    Kind kind = Kind::Resource;
    std::string text;       // resource name or text literal
    long long number = 0;   // int literal

    static Value resource(std::string name) { return {Kind::Resource, std::move(name), 0}; }
    static Value text_literal(std::string t) { return {Kind::Text, std::move(t), 0}; }
    static Value int_literal(long long n) { return {Kind::Int, {}, n}; }

    bool operator==(const Value&) const = default;
    bool operator<(const Value& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (kind == Kind::Int) return number < o.number;
        return text < o.text;
    }
};

struct Triple {
    std::string subject;
    std::string predicate;
    Value object;

    bool operator==(const Triple&) const = default;
    bool operator<(const Triple& o) const {
        if (subject != o.subject) return subject < o.subject;
        if (predicate != o.predicate) return predicate < o.predicate;
        return object < o.object;
    }
};

struct Violation {
    std::string rule;
    std::string detail;
};

struct ReviewProtocol {
    std::string id;
    std::string research_question;  // non-empty
    std::string search_string;
    std::vector<std::string> sources;
    std::vector<std::string> inclusion_criteria;
    std::vector<std::string> exclusion_criteria;
};

class KnowledgeBase {
public:
    KnowledgeBase() : schema_(build_schema()) {}
    explicit KnowledgeBase(Schema schema) : schema_(std::move(schema)) {}

    // The subject index holds pointers into the triple set, so the KB moves
    // but does not copy.
    KnowledgeBase(const KnowledgeBase&) = delete;
    KnowledgeBase& operator=(const KnowledgeBase&) = delete;
    KnowledgeBase(KnowledgeBase&&) = default;
    KnowledgeBase& operator=(KnowledgeBase&&) = default;

    const Schema& schema() const { return schema_; }
    const std::set<Triple>& triples() const { return triples_; }
    bool sealed() const { return sealed_; }

    bool operator==(const KnowledgeBase& o) const {
        return schema_ == o.schema_ && triples_ == o.triples_;
    }

    // Raw insertion without schema checks; used by the lax loader and by
    // tests that plant violations for audit to find.
    void insert_raw(Triple t) {
        if (sealed_) throw SchemaViolationError("knowledge base is sealed");
        auto [it, inserted] = triples_.insert(std::move(t));
        if (inserted) index_triple(*it);
    }

    bool has_resource(std::string_view name) const {
        return resources_.count(std::string(name)) != 0;
    }

    std::optional<std::string> direct_type(std::string_view resource) const {
        auto it = direct_types_.find(std::string(resource));
        if (it == direct_types_.end() || it->second.size() != 1) return std::nullopt;
        return it->second.front();
    }

    const std::vector<const Triple*>& by_subject(std::string_view subject) const {
        static const std::vector<const Triple*> empty;
        auto it = subject_index_.find(std::string(subject));
        return it == subject_index_.end() ? empty : it->second;
    }

    // (predicate, object) -> subjects; the shortcut queries use this route.
    std::vector<std::string> subjects_of(std::string_view predicate, const Value& object) const {
        auto it = pred_object_index_.find(std::make_pair(std::string(predicate), object));
        if (it == pred_object_index_.end()) return {};
        return {it->second.begin(), it->second.end()};
    }

    // ------------------------------------------------------------------
    // Assertions

    std::string assert_protocol(const ReviewProtocol& protocol) {
        if (protocol.research_question.empty()) {
            throw SchemaViolationError("review protocol needs a research question");
        }
        const std::string id = protocol.id.empty() ? "protocol" : protocol.id;
        if (direct_type(id)) throw DuplicateStudyError(id);
        add_checked({id, kbnames::kType, Value::resource("ReviewProtocol")});
        add_checked({id, "hasResearchQuestion", Value::text_literal(protocol.research_question)});
        if (!protocol.search_string.empty()) {
            add_checked({id, "hasSearchString", Value::text_literal(protocol.search_string)});
        }
        for (const auto& s : protocol.sources) {
            add_checked({id, "hasSource", Value::text_literal(s)});
        }
        for (const auto& c : protocol.inclusion_criteria) {
            add_checked({id, "hasInclusionCriterion", Value::text_literal(c)});
        }
        for (const auto& c : protocol.exclusion_criteria) {
            add_checked({id, "hasExclusionCriterion", Value::text_literal(c)});
        }
        return id;
    }

    // Adds one study with its extracted concepts and conclusions. Concept
    // individuals are global and shared across studies; per-study surface
    // forms live on reified mention nodes.
    void assert_study(const PrimaryStudy& study, const StructuredAbstract& sa,
                      const std::vector<ConceptInstance>& concepts,
                      const std::vector<SimpleConclusion>& conclusions,
                      const std::optional<std::string>& protocol_link = std::nullopt) {
        if (direct_type(study.id)) throw DuplicateStudyError(study.id);
        if (!valid_resource_name(study.id) || reserved_resource_name(study.id)) {
            throw SchemaViolationError("study id is not a valid resource name: " + study.id);
        }
        add_checked({study.id, kbnames::kType, Value::resource("PrimaryStudy")});
        add_checked({study.id, "hasTitle", Value::text_literal(study.title)});
        add_checked({study.id, "hasYear", Value::int_literal(study.year)});
        add_checked({study.id, "hasAbstract", Value::text_literal(study.abstract_text)});
        for (const auto& a : study.authors) {
            add_checked({study.id, "hasAuthor", Value::text_literal(a)});
        }
        if (!study.venue.empty()) {
            add_checked({study.id, "hasVenue", Value::text_literal(study.venue)});
        }
        for (const auto& k : study.keywords) {
            add_checked({study.id, "hasKeyword", Value::text_literal(k)});
        }

        std::size_t mention_counter = 0;
        for (const auto& inst : concepts) {
            if (inst.sentence_index >= sa.labeled.size() ||
                sa.labeled[inst.sentence_index].label != SectionLabel::Method) {
                throw SchemaViolationError("concept sourced from a non-Method sentence in " +
                                           study.id);
            }
            const std::string individual = ensure_concept_individual(inst);
            add_checked({study.id, link_predicate(inst.category), Value::resource(individual)});
            const std::string mention = study.id + "_m" + std::to_string(mention_counter++);
            add_checked({mention, kbnames::kType, Value::resource("ConceptMention")});
            add_checked({study.id, "hasMention", Value::resource(mention)});
            add_checked({mention, "mentionConcept", Value::resource(individual)});
            add_checked({mention, "mentionSurface", Value::text_literal(inst.surface)});
            add_checked({mention, "mentionSentence",
                         Value::int_literal(static_cast<long long>(inst.sentence_index))});
        }

        std::size_t conclusion_counter = 0;
        for (const auto& conclusion : conclusions) {
            if (conclusion.sentence_index >= sa.labeled.size() ||
                sa.labeled[conclusion.sentence_index].label != SectionLabel::Conclusion) {
                throw SchemaViolationError("conclusion sourced from a non-Conclusion sentence in " +
                                           study.id);
            }
            const std::string node = study.id + "_c" + std::to_string(conclusion_counter++);
            add_checked({node, kbnames::kType, Value::resource("SimpleConclusion")});
            add_checked({study.id, "hasSimpleConclusion", Value::resource(node)});
            add_checked({node, "hasSubject", Value::resource(concept_name(conclusion.subject))});
            if (conclusion.object) {
                add_checked({node, "hasObject", Value::resource(concept_name(*conclusion.object))});
            }
            add_checked({node, "hasRelation",
                         Value::text_literal(relation_name(conclusion.relation))});
            add_checked({node, "hasEvidence", Value::text_literal(conclusion.evidence)});
        }

        if (protocol_link) {
            add_checked({study.id, "relatesTo", Value::resource(*protocol_link)});
        }
    }

    // Query phase starts here; the KB must audit clean and becomes
    // immutable afterwards. `require_clean = false` is the best-effort mode
    // behind the CLI's --lax flag.
    void seal(bool require_clean = true) {
        if (require_clean) {
            auto violations = audit();
            if (!violations.empty()) {
                throw SchemaViolationError("cannot seal: " + violations.front().rule + ": " +
                                           violations.front().detail);
            }
        }
        sealed_ = true;
    }

    // ------------------------------------------------------------------
    // Audit

    std::vector<Violation> audit() const {
        std::vector<Violation> out;
        try {
            schema_.validate();
        } catch (const SchemaViolationError& e) {
            out.push_back({"schema", e.what()});
        }
        // collect direct types and all resources appearing in instance triples
        std::map<std::string, std::vector<std::string>> types;
        std::set<std::string> mentioned;
        for (const auto& t : triples_) {
            if (t.predicate == kbnames::kType) {
                if (t.object.kind != Value::Kind::Resource) {
                    out.push_back({"type-literal", format(t)});
                    continue;
                }
                if (!schema_.has_class(t.object.text)) {
                    out.push_back({"unknown-class", format(t)});
                }
                types[t.subject].push_back(t.object.text);
            } else {
                mentioned.insert(t.subject);
                if (t.object.kind == Value::Kind::Resource) mentioned.insert(t.object.text);
            }
        }
        for (const auto& [resource, direct] : types) {
            if (direct.size() != 1) {
                out.push_back({"multiple-direct-types",
                               resource + " has " + std::to_string(direct.size()) + " type triples"});
            }
        }
        for (const auto& resource : mentioned) {
            if (!types.count(resource)) {
                out.push_back({"untyped-resource", resource});
            }
        }
        auto class_of = [&](const std::string& resource) -> std::optional<std::string> {
            auto it = types.find(resource);
            if (it == types.end() || it->second.size() != 1) return std::nullopt;
            return it->second.front();
        };
        for (const auto& t : triples_) {
            if (t.predicate == kbnames::kType) continue;
            auto decl = schema_.predicates.find(t.predicate);
            if (decl == schema_.predicates.end()) {
                out.push_back({"undeclared-predicate", format(t)});
                continue;
            }
            if (auto cls = class_of(t.subject)) {
                if (!schema_.is_subclass_of(*cls, decl->second.domain)) {
                    out.push_back({"domain-violation", format(t)});
                }
            }
            const PredicateRange& range = decl->second.range;
            switch (range.kind) {
                case PredicateRange::Kind::Class:
                    if (t.object.kind != Value::Kind::Resource) {
                        out.push_back({"range-violation", format(t)});
                    } else if (auto cls = class_of(t.object.text)) {
                        if (!schema_.is_subclass_of(*cls, range.class_name)) {
                            out.push_back({"range-violation", format(t)});
                        }
                    }
                    break;
                case PredicateRange::Kind::Text:
                    if (t.object.kind != Value::Kind::Text) out.push_back({"range-violation", format(t)});
                    break;
                case PredicateRange::Kind::Int:
                    if (t.object.kind != Value::Kind::Int) out.push_back({"range-violation", format(t)});
                    break;
            }
        }
        audit_indexes(out);
        return out;
    }

    static std::string format(const Triple& t) {
        return t.subject + " " + t.predicate + " " +
               (t.object.kind == Value::Kind::Resource
                    ? t.object.text
                    : (t.object.kind == Value::Kind::Int ? std::to_string(t.object.number)
                                                         : "\"" + t.object.text + "\""));
    }

private:
    std::string concept_name(const std::string& canonical) const { return slug(canonical); }

    static std::string link_predicate(const CategoryPath& category) {
        const std::string& root = category.root();
        if (root == "Model") return "hasModel";
        if (root == "Metric") return "hasMetric";
        if (root == "SE_feature") return "hasSEFeature";
        throw SchemaViolationError("category path outside the concept branches: " + category.str());
    }

    std::string ensure_concept_individual(const ConceptInstance& inst) {
        if (!inst.category.valid_in(schema_)) {
            throw SchemaViolationError("category path not in schema: " + inst.category.str());
        }
        const std::string name = concept_name(inst.canonical);
        if (auto existing = direct_type(name)) {
            if (*existing != inst.category.leaf()) {
                throw SchemaViolationError("concept individual " + name +
                                           " already typed " + *existing);
            }
            return name;
        }
        add_checked({name, kbnames::kType, Value::resource(inst.category.leaf())});
        return name;
    }

    void add_checked(Triple t) {
        if (sealed_) throw SchemaViolationError("knowledge base is sealed");
        if (!valid_resource_name(t.subject)) {
            throw SchemaViolationError("bad subject name: " + t.subject);
        }
        if (t.predicate == kbnames::kType) {
            if (t.object.kind != Value::Kind::Resource || !schema_.has_class(t.object.text)) {
                throw SchemaViolationError("bad type triple: " + format(t));
            }
        } else {
            auto decl = schema_.predicates.find(t.predicate);
            if (decl == schema_.predicates.end()) {
                throw SchemaViolationError("undeclared predicate: " + t.predicate);
            }
            const PredicateRange& range = decl->second.range;
            if (range.kind == PredicateRange::Kind::Text && t.object.kind != Value::Kind::Text) {
                throw SchemaViolationError("range violation: " + format(t));
            }
            if (range.kind == PredicateRange::Kind::Int && t.object.kind != Value::Kind::Int) {
                throw SchemaViolationError("range violation: " + format(t));
            }
            if (range.kind == PredicateRange::Kind::Class &&
                t.object.kind != Value::Kind::Resource) {
                throw SchemaViolationError("range violation: " + format(t));
            }
        }
        auto [it, inserted] = triples_.insert(std::move(t));
        if (inserted) index_triple(*it);
    }

    void index_triple(const Triple& t) {
        subject_index_[t.subject].push_back(&t);
        pred_object_index_[{t.predicate, t.object}].insert(t.subject);
        resources_.insert(t.subject);
        if (t.object.kind == Value::Kind::Resource) resources_.insert(t.object.text);
        if (t.predicate == kbnames::kType && t.object.kind == Value::Kind::Resource) {
            direct_types_[t.subject].push_back(t.object.text);
        }
    }

    void audit_indexes(std::vector<Violation>& out) const {
        std::size_t indexed = 0;
        for (const auto& [subject, list] : subject_index_) {
            indexed += list.size();
            for (const Triple* t : list) {
                if (t->subject != subject || !triples_.count(*t)) {
                    out.push_back({"index-mismatch", "subject index entry for " + subject});
                }
            }
        }
        if (indexed != triples_.size()) {
            out.push_back({"index-mismatch", "subject index size " + std::to_string(indexed) +
                                                 " vs " + std::to_string(triples_.size())});
        }
        for (const auto& t : triples_) {
            auto it = pred_object_index_.find({t.predicate, t.object});
            if (it == pred_object_index_.end() || !it->second.count(t.subject)) {
                out.push_back({"index-mismatch", "missing pred/object entry: " + format(t)});
            }
        }
    }

    Schema schema_;
    std::set<Triple> triples_;
    std::map<std::string, std::vector<const Triple*>> subject_index_;
    std::map<std::pair<std::string, Value>, std::set<std::string>> pred_object_index_;
    std::map<std::string, std::vector<std::string>> direct_types_;
    std::set<std::string> resources_;
    bool sealed_ = false;
};

// ---------------------------------------------------------------------------
// Serialization: one triple per line, `<name>` resources, quoted text
// literals, bare integers; schema triples use the built-in predicates.
// Lines are sorted, so serialization is deterministic by construction.

namespace ntriples {

inline std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string render_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Resource: return "<" + v.text + ">";
        case Value::Kind::Text: return "\"" + escape(v.text) + "\"";
        case Value::Kind::Int: return std::to_string(v.number);
    }
    return {};
}

inline std::string render_line(const Triple& t) {
    return "<" + t.subject + "> <" + t.predicate + "> " + render_value(t.object) + " .";
}

}  // namespace ntriples

inline std::string serialize(const KnowledgeBase& kb) {
    {
        auto violations = kb.audit();
        if (!violations.empty()) {
            throw SchemaViolationError("refusing to serialize an inconsistent knowledge base: " +
                                       violations.front().rule + ": " + violations.front().detail);
        }
    }
    std::vector<std::string> lines;
    const Schema& schema = kb.schema();
    for (const auto& cls : schema.classes) {
        lines.push_back(ntriples::render_line({cls, kbnames::kType, Value::resource(kbnames::kClass)}));
    }
    for (const auto& [child, parent] : schema.parent) {
        lines.push_back(ntriples::render_line({child, kbnames::kSubClassOf, Value::resource(parent)}));
    }
    for (const auto& [name, pred] : schema.predicates) {
        lines.push_back(ntriples::render_line({name, kbnames::kDomain, Value::resource(pred.domain)}));
        std::string range;
        switch (pred.range.kind) {
            case PredicateRange::Kind::Class: range = pred.range.class_name; break;
            case PredicateRange::Kind::Text: range = kbnames::kText; break;
            case PredicateRange::Kind::Int: range = kbnames::kInt; break;
        }
        lines.push_back(ntriples::render_line({name, kbnames::kRange, Value::resource(range)}));
    }
    for (const auto& t : kb.triples()) {
        lines.push_back(ntriples::render_line(t));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out.push_back('\n');
    }
    return out;
}

namespace ntriples {

struct LineParser {
    std::string_view line;
    std::size_t pos = 0;
    std::size_t lineno = 0;

    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }

    std::string resource() {
        skip_ws();
        if (pos >= line.size() || line[pos] != '<') throw ParseError(lineno, "expected '<'");
        ++pos;
        std::string name;
        while (pos < line.size() && line[pos] != '>') name.push_back(line[pos++]);
        if (pos >= line.size()) throw ParseError(lineno, "unterminated resource name");
        ++pos;
        if (!valid_resource_name(name)) throw ParseError(lineno, "bad resource name: " + name);
        return name;
    }

    Value value() {
        skip_ws();
        if (pos >= line.size()) throw ParseError(lineno, "expected object");
        char c = line[pos];
        if (c == '<') return Value::resource(resource());
        if (c == '"') {
            ++pos;
            std::string text;
            while (pos < line.size() && line[pos] != '"') {
                char ch = line[pos++];
                if (ch == '\\') {
                    if (pos >= line.size()) throw ParseError(lineno, "dangling escape");
                    char esc = line[pos++];
                    switch (esc) {
                        case '\\': text.push_back('\\'); break;
                        case '"': text.push_back('"'); break;
                        case 'n': text.push_back('\n'); break;
                        case 'r': text.push_back('\r'); break;
                        case 't': text.push_back('\t'); break;
                        default: throw ParseError(lineno, "bad escape sequence");
                    }
                } else {
                    text.push_back(ch);
                }
            }
            if (pos >= line.size()) throw ParseError(lineno, "unterminated literal");
            ++pos;
            return Value::text_literal(text);
        }
        if (c == '-' || ascii_digit(c)) {
            std::size_t start = pos;
            if (c == '-') ++pos;
            while (pos < line.size() && ascii_digit(line[pos])) ++pos;
            if (pos == start + (c == '-' ? 1u : 0u)) throw ParseError(lineno, "bad integer literal");
            return Value::int_literal(std::stoll(std::string(line.substr(start, pos - start))));
        }
        throw ParseError(lineno, "expected resource, literal or integer");
    }

    void terminator() {
        skip_ws();
        if (pos >= line.size() || line[pos] != '.') throw ParseError(lineno, "expected '.'");
        ++pos;
        skip_ws();
        if (pos != line.size()) throw ParseError(lineno, "trailing content after '.'");
    }
};

}  // namespace ntriples

struct DeserializeResult {
    KnowledgeBase kb;
    std::vector<std::string> warnings;  // only populated in lax mode
};

// Rebuilds schema and instances from the serialized form. In strict mode
// any semantic problem (undeclared predicate, unknown class) is a
// ParseError; in lax mode those triples are accepted with a warning and
// left for audit to report.
inline DeserializeResult deserialize(std::string_view bytes, bool lax = false) {
    Schema schema;
    std::vector<std::pair<Triple, std::size_t>> instance_triples;  // triple + source line
    std::map<std::string, std::string> domains;
    std::map<std::string, std::string> ranges;

    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= bytes.size()) {
        std::size_t nl = bytes.find('\n', start);
        std::string_view line = bytes.substr(
            start, nl == std::string_view::npos ? bytes.size() - start : nl - start);
        start = nl == std::string_view::npos ? bytes.size() + 1 : nl + 1;
        ++lineno;
        if (trim(line).empty()) continue;
        ntriples::LineParser p{line, 0, lineno};
        std::string subject = p.resource();
        std::string predicate = p.resource();
        Value object = p.value();
        p.terminator();

        if (predicate == kbnames::kType && object.kind == Value::Kind::Resource &&
            object.text == kbnames::kClass) {
            schema.classes.insert(subject);
        } else if (predicate == kbnames::kSubClassOf) {
            if (object.kind != Value::Kind::Resource) throw ParseError(lineno, "subClassOf needs a class");
            schema.parent[subject] = object.text;
        } else if (predicate == kbnames::kDomain) {
            if (object.kind != Value::Kind::Resource) throw ParseError(lineno, "domain needs a class");
            domains[subject] = object.text;
        } else if (predicate == kbnames::kRange) {
            if (object.kind != Value::Kind::Resource) throw ParseError(lineno, "range needs a name");
            ranges[subject] = object.text;
        } else {
            instance_triples.emplace_back(
                Triple{std::move(subject), std::move(predicate), std::move(object)}, lineno);
        }
    }

    for (const auto& [name, domain] : domains) {
        auto rit = ranges.find(name);
        if (rit == ranges.end()) throw ParseError(0, "predicate " + name + " lacks a range line");
        PredicateRange range;
        if (rit->second == kbnames::kText) range = {PredicateRange::Kind::Text, {}};
        else if (rit->second == kbnames::kInt) range = {PredicateRange::Kind::Int, {}};
        else range = {PredicateRange::Kind::Class, rit->second};
        schema.predicates[name] = PredicateDecl{name, domain, range};
    }
    for (const auto& [name, _] : ranges) {
        if (!domains.count(name)) throw ParseError(0, "predicate " + name + " lacks a domain line");
    }
    schema.validate();

    DeserializeResult out{KnowledgeBase(schema), {}};
    for (auto& [t, at_line] : instance_triples) {
        const bool declared = t.predicate == kbnames::kType ||
                              schema.predicates.count(t.predicate) != 0;
        const bool known_class = t.predicate != kbnames::kType ||
                                 (t.object.kind == Value::Kind::Resource &&
                                  schema.has_class(t.object.text));
        if (!declared || !known_class) {
            if (!lax) {
                throw ParseError(at_line, (!declared ? "undeclared predicate: " + t.predicate
                                                     : "unknown class: " + t.object.text));
            }
            out.warnings.push_back("accepted " + KnowledgeBase::format(t));
        }
        out.kb.insert_raw(std::move(t));
    }
    return out;
}

}  // namespace slrkb
