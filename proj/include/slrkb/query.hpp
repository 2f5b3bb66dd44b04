#pragma once

// Conjunctive query subset: basic graph patterns with equality filters,
// evaluated by a nested-loop join over the sealed KB. `type` patterns match
// through the subclass hierarchy; every other predicate matches exactly.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slrkb/errors.hpp"
#include "slrkb/extractor.hpp"
#include "slrkb/kb.hpp"
#include "slrkb/text_util.hpp"

namespace slrkb {

struct Term {
    enum class Kind { Variable, Resource, Literal };
    Kind kind = Kind::Variable;
    std::string name;  // variable or resource name
    Value literal;     // when kind == Literal

    static Term variable(std::string n) { return {Kind::Variable, std::move(n), {}}; }
    static Term resource(std::string n) { return {Kind::Resource, std::move(n), {}}; }
    static Term literal_term(Value v) { return {Kind::Literal, {}, std::move(v)}; }

    bool operator==(const Term&) const = default;
};

struct TriplePattern {
    Term subject;
    Term predicate;
    Term object;
};

struct Filter {
    Term lhs;
    bool equal = true;  // false -> inequality
    Term rhs;
};

struct Query {
    std::vector<std::string> select_vars;
    std::vector<TriplePattern> patterns;
    std::vector<Filter> filters;
};

// ---------------------------------------------------------------------------
// Parsing

namespace querylang {

struct Token {
    enum class Kind { Keyword, Variable, Name, Text, Integer, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            if (ascii_space(src_[pos_])) {
                ++pos_;
            } else if (src_[pos_] == '#') {  // line comment
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
        if (pos_ >= src_.size()) {
            current_ = {Token::Kind::End, "", pos_};
            return;
        }
        const std::size_t start = pos_;
        char c = src_[pos_];
        if (c == '?') {
            ++pos_;
            std::string name;
            while (pos_ < src_.size() && (ascii_alnum(src_[pos_]) || src_[pos_] == '_')) {
                name.push_back(src_[pos_++]);
            }
            if (name.empty()) throw SyntaxError(start, "variable name after '?'");
            current_ = {Token::Kind::Variable, name, start};
            return;
        }
        if (c == '"') {
            ++pos_;
            std::string text;
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                    ++pos_;
                    char esc = src_[pos_++];
                    if (esc == 'n') text.push_back('\n');
                    else if (esc == 't') text.push_back('\t');
                    else text.push_back(esc);
                } else {
                    text.push_back(src_[pos_++]);
                }
            }
            if (pos_ >= src_.size()) throw SyntaxError(start, "closing '\"'");
            ++pos_;
            current_ = {Token::Kind::Text, text, start};
            return;
        }
        if (ascii_digit(c) || (c == '-' && pos_ + 1 < src_.size() && ascii_digit(src_[pos_ + 1]))) {
            std::string num(1, c);
            ++pos_;
            while (pos_ < src_.size() && ascii_digit(src_[pos_])) num.push_back(src_[pos_++]);
            current_ = {Token::Kind::Integer, num, start};
            return;
        }
        if (c == '<') {  // angle-bracketed names tolerated, e.g. FROM <corpus.nt>
            ++pos_;
            std::string name;
            while (pos_ < src_.size() && src_[pos_] != '>') name.push_back(src_[pos_++]);
            if (pos_ >= src_.size()) throw SyntaxError(start, "closing '>'");
            ++pos_;
            current_ = {Token::Kind::Name, name, start};
            return;
        }
        if (ascii_alnum(c) || c == '_') {
            std::string word;
            while (pos_ < src_.size() && valid_resource_char(src_[pos_])) {
                word.push_back(src_[pos_++]);
            }
            const std::string upper_check = to_lower(word);
            if (upper_check == "select" || upper_check == "where" || upper_check == "filter" ||
                upper_check == "from") {
                current_ = {Token::Kind::Keyword, upper_check, start};
            } else {
                current_ = {Token::Kind::Name, word, start};
            }
            return;
        }
        if (c == '{' || c == '}' || c == '.' || c == '(' || c == ')' || c == '=' || c == '!') {
            std::string punct(1, c);
            ++pos_;
            if (c == '!' && pos_ < src_.size() && src_[pos_] == '=') {
                punct = "!=";
                ++pos_;
            }
            current_ = {Token::Kind::Punct, punct, start};
            return;
        }
        throw SyntaxError(start, "a term or keyword");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_;
};

}  // namespace querylang

// Grammar: SELECT ?v (?vn)* (FROM name)? WHERE { pattern ( . pattern )*
// ( FILTER(expr) )* } with patterns of three terms and expr a binary
// =/!= over variables, names or literals. Keywords are case-insensitive;
// FROM is accepted and ignored (the KB arrives out of band).
inline Query parse_query(std::string_view text) {
    using querylang::Token;
    querylang::Lexer lex(text);
    Query q;

    auto expect_keyword = [&](const char* kw) {
        Token t = lex.take();
        if (t.kind != Token::Kind::Keyword || t.text != kw) throw SyntaxError(t.pos, kw);
    };
    auto expect_punct = [&](const char* p) {
        Token t = lex.take();
        if (t.kind != Token::Kind::Punct || t.text != p) throw SyntaxError(t.pos, p);
    };

    expect_keyword("select");
    while (lex.peek().kind == Token::Kind::Variable) {
        q.select_vars.push_back(lex.take().text);
    }
    if (q.select_vars.empty()) throw SyntaxError(lex.peek().pos, "at least one ?variable");

    if (lex.peek().kind == Token::Kind::Keyword && lex.peek().text == "from") {
        lex.take();
        Token src = lex.take();  // ignored
        if (src.kind != Token::Kind::Name && src.kind != Token::Kind::Variable &&
            src.kind != Token::Kind::Text) {
            throw SyntaxError(src.pos, "a source name after FROM");
        }
    }

    expect_keyword("where");
    expect_punct("{");

    auto term = [&]() -> Term {
        Token t = lex.take();
        switch (t.kind) {
            case Token::Kind::Variable: return Term::variable(t.text);
            case Token::Kind::Name: return Term::resource(t.text);
            case Token::Kind::Text: return Term::literal_term(Value::text_literal(t.text));
            case Token::Kind::Integer:
                return Term::literal_term(Value::int_literal(std::stoll(t.text)));
            default: throw SyntaxError(t.pos, "a term (?var, name or literal)");
        }
    };

    bool expect_pattern = true;
    while (expect_pattern) {
        if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == "}") break;
        if (lex.peek().kind == Token::Kind::Keyword && lex.peek().text == "filter") break;
        TriplePattern p;
        p.subject = term();
        p.predicate = term();
        p.object = term();
        q.patterns.push_back(std::move(p));
        if (lex.peek().kind == Token::Kind::Punct && lex.peek().text == ".") {
            lex.take();
            continue;  // optional trailing dot before '}' is fine
        }
        expect_pattern = false;
    }
    while (lex.peek().kind == Token::Kind::Keyword && lex.peek().text == "filter") {
        lex.take();
        expect_punct("(");
        Filter f;
        f.lhs = term();
        Token op = lex.take();
        if (op.kind != Token::Kind::Punct || (op.text != "=" && op.text != "!=")) {
            throw SyntaxError(op.pos, "'=' or '!='");
        }
        f.equal = op.text == "=";
        f.rhs = term();
        expect_punct(")");
        q.filters.push_back(std::move(f));
    }
    expect_punct("}");
    Token end = lex.take();
    if (end.kind != Token::Kind::End) throw SyntaxError(end.pos, "end of query");

    if (q.patterns.empty()) throw SyntaxError(0, "at least one triple pattern");

    // every selected/filtered variable must be bound by some pattern
    std::set<std::string> pattern_vars;
    for (const auto& p : q.patterns) {
        for (const Term* t : {&p.subject, &p.predicate, &p.object}) {
            if (t->kind == Term::Kind::Variable) pattern_vars.insert(t->name);
        }
    }
    for (const auto& v : q.select_vars) {
        if (!pattern_vars.count(v)) throw SyntaxError(0, "selected ?" + v + " to appear in a pattern");
    }
    for (const auto& f : q.filters) {
        bool has_var = false;
        for (const Term* t : {&f.lhs, &f.rhs}) {
            if (t->kind == Term::Kind::Variable) {
                has_var = true;
                if (!pattern_vars.count(t->name)) {
                    throw SyntaxError(0, "filter variable ?" + t->name + " to appear in a pattern");
                }
            }
        }
        if (!has_var) throw SyntaxError(0, "a variable in FILTER");
    }
    // reject a pattern of three distinct variables sharing none with the rest
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        const auto& p = q.patterns[i];
        if (p.subject.kind != Term::Kind::Variable || p.predicate.kind != Term::Kind::Variable ||
            p.object.kind != Term::Kind::Variable) {
            continue;
        }
        std::set<std::string> own{p.subject.name, p.predicate.name, p.object.name};
        if (own.size() != 3) continue;
        bool joined = false;
        for (std::size_t j = 0; j < q.patterns.size() && !joined; ++j) {
            if (j == i) continue;
            const auto& other = q.patterns[j];
            for (const Term* t : {&other.subject, &other.predicate, &other.object}) {
                if (t->kind == Term::Kind::Variable && own.count(t->name)) {
                    joined = true;
                    break;
                }
            }
        }
        if (!joined) throw SyntaxError(0, "pattern of unjoined variables to share a variable");
    }
    return q;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Bindings {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;  // deduplicated, sorted

    bool operator==(const Bindings&) const = default;
};

inline std::string render_cell(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Resource: return v.text;
        case Value::Kind::Text: return v.text;
        case Value::Kind::Int: return std::to_string(v.number);
    }
    return {};
}

namespace detail {

// The query semantics are defined over this virtual triple set: the stored
// instance triples plus one inferred `type` triple per instance per
// ancestor class of its direct type.
inline std::vector<Triple> virtual_triples(const KnowledgeBase& kb) {
    std::vector<Triple> out(kb.triples().begin(), kb.triples().end());
    for (const auto& t : kb.triples()) {
        if (t.predicate != kbnames::kType || t.object.kind != Value::Kind::Resource) continue;
        for (const auto& ancestor : kb.schema().ancestors_of(t.object.text)) {
            if (ancestor == t.object.text) continue;
            out.push_back({t.subject, kbnames::kType, Value::resource(ancestor)});
        }
    }
    return out;
}

using Assignment = std::map<std::string, Value>;

inline bool term_matches(const Term& term, const Value& value, Assignment& bound,
                         std::vector<std::string>& newly_bound) {
    switch (term.kind) {
        case Term::Kind::Resource:
            return value.kind == Value::Kind::Resource && value.text == term.name;
        case Term::Kind::Literal:
            return value == term.literal;
        case Term::Kind::Variable: {
            auto it = bound.find(term.name);
            if (it != bound.end()) return it->second == value;
            bound.emplace(term.name, value);
            newly_bound.push_back(term.name);
            return true;
        }
    }
    return false;
}

inline bool pattern_matches(const TriplePattern& p, const Triple& t, Assignment& bound,
                            std::vector<std::string>& newly_bound) {
    return term_matches(p.subject, Value::resource(t.subject), bound, newly_bound) &&
           term_matches(p.predicate, Value::resource(t.predicate), bound, newly_bound) &&
           term_matches(p.object, t.object, bound, newly_bound);
}

inline std::optional<Value> filter_side(const Term& t, const Assignment& bound) {
    switch (t.kind) {
        case Term::Kind::Resource: return Value::resource(t.name);
        case Term::Kind::Literal: return t.literal;
        case Term::Kind::Variable: {
            auto it = bound.find(t.name);
            if (it == bound.end()) return std::nullopt;
            return it->second;
        }
    }
    return std::nullopt;
}

inline void check_known_names(const Query& q, const KnowledgeBase& kb) {
    auto check_resource = [&kb](const std::string& name) {
        const bool known = kb.has_resource(name) || kb.schema().has_class(name);
        if (!known) throw UnknownNameError(name);
    };
    for (const auto& p : q.patterns) {
        if (p.predicate.kind == Term::Kind::Resource) {
            const std::string& name = p.predicate.name;
            if (name != kbnames::kType && !kb.schema().predicates.count(name)) {
                throw UnknownNameError(name);
            }
        }
        if (p.subject.kind == Term::Kind::Resource) check_resource(p.subject.name);
        if (p.object.kind == Term::Kind::Resource) check_resource(p.object.name);
    }
    for (const auto& f : q.filters) {
        for (const Term* t : {&f.lhs, &f.rhs}) {
            if (t->kind == Term::Kind::Resource) check_resource(t->name);
        }
    }
}

}  // namespace detail

// Brute-force-equivalent semantics: every assignment of the pattern
// variables such that each substituted pattern is in the virtual triple
// set and every filter holds. Most selective pattern joins first.
inline Bindings evaluate(const Query& q, const KnowledgeBase& kb) {
    if (!kb.sealed()) throw Error("knowledge base must be sealed before querying");
    detail::check_known_names(q, kb);

    const std::vector<Triple> universe = detail::virtual_triples(kb);

    // static selectivity: number of triples matching each pattern alone
    std::vector<std::size_t> order(q.patterns.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<std::size_t> selectivity(q.patterns.size(), 0);
    for (std::size_t i = 0; i < q.patterns.size(); ++i) {
        for (const auto& t : universe) {
            detail::Assignment probe;
            std::vector<std::string> added;
            if (detail::pattern_matches(q.patterns[i], t, probe, added)) ++selectivity[i];
        }
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return selectivity[a] < selectivity[b]; });

    std::set<std::vector<Value>> result_rows;
    detail::Assignment bound;

    auto emit = [&]() {
        for (const auto& f : q.filters) {
            auto lhs = detail::filter_side(f.lhs, bound);
            auto rhs = detail::filter_side(f.rhs, bound);
            if (!lhs || !rhs) return;  // unbound side: filter fails
            if ((*lhs == *rhs) != f.equal) return;
        }
        std::vector<Value> row;
        row.reserve(q.select_vars.size());
        for (const auto& v : q.select_vars) {
            auto it = bound.find(v);
            if (it == bound.end()) return;
            row.push_back(it->second);
        }
        result_rows.insert(std::move(row));
    };

    auto join = [&](auto&& self, std::size_t depth) -> void {
        if (depth == order.size()) {
            emit();
            return;
        }
        const TriplePattern& p = q.patterns[order[depth]];
        for (const auto& t : universe) {
            std::vector<std::string> added;
            if (detail::pattern_matches(p, t, bound, added)) {
                self(self, depth + 1);
            }
            for (const auto& name : added) bound.erase(name);
        }
    };
    join(join, 0);

    Bindings out;
    out.columns = q.select_vars;
    for (auto& row : result_rows) out.rows.push_back(row);
    std::sort(out.rows.begin(), out.rows.end(),
              [](const std::vector<Value>& a, const std::vector<Value>& b) {
                  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                      const std::string ra = render_cell(a[i]);
                      const std::string rb = render_cell(b[i]);
                      if (ra != rb) return ra < rb;
                  }
                  return a.size() < b.size();
              });
    return out;
}

// ---------------------------------------------------------------------------
// Shortcut queries

// Resolves a user-facing model name ("neural network" or "neural_network")
// to the concept individual, requiring it to exist and to be a Model.
inline std::string resolve_model_individual(const KnowledgeBase& kb, std::string_view name) {
    const std::string individual = slug(unslug(trim(name)));
    auto direct = kb.direct_type(individual);
    if (!direct || !kb.schema().is_subclass_of(*direct, "Model")) {
        throw UnknownNameError(std::string(trim(name)));
    }
    return individual;
}

// Studies carrying a hasModel link to every named model. Intersects the
// (predicate, object) index directly; tests hold this equal to the
// equivalent parsed query.
inline std::vector<std::string> studies_mentioning_all(const KnowledgeBase& kb,
                                                       const std::vector<std::string>& models) {
    std::vector<std::string> individuals;
    for (const auto& m : models) {
        std::string ind = resolve_model_individual(kb, m);
        if (std::find(individuals.begin(), individuals.end(), ind) == individuals.end()) {
            individuals.push_back(std::move(ind));  // duplicate names are idempotent
        }
    }
    std::optional<std::set<std::string>> acc;
    for (const auto& ind : individuals) {
        auto subjects = kb.subjects_of("hasModel", Value::resource(ind));
        std::set<std::string> s(subjects.begin(), subjects.end());
        if (!acc) {
            acc = std::move(s);
        } else {
            std::set<std::string> merged;
            std::set_intersection(acc->begin(), acc->end(), s.begin(), s.end(),
                                  std::inserter(merged, merged.begin()));
            *acc = std::move(merged);
        }
    }
    if (!acc) return {};
    return {acc->begin(), acc->end()};
}

// All simple conclusions linked from the given studies, study order
// preserved, fields materialized from the conclusion node's triples.
inline std::vector<SimpleConclusion> conclusions_for(const KnowledgeBase& kb,
                                                     const std::vector<std::string>& study_ids) {
    std::vector<SimpleConclusion> out;
    for (const auto& id : study_ids) {
        auto type = kb.direct_type(id);
        if (!type || *type != "PrimaryStudy") throw UnknownNameError(id);
        std::vector<std::string> nodes;
        for (const Triple* t : kb.by_subject(id)) {
            if (t->predicate == "hasSimpleConclusion" && t->object.kind == Value::Kind::Resource) {
                nodes.push_back(t->object.text);
            }
        }
        std::sort(nodes.begin(), nodes.end(), [](const std::string& a, const std::string& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        for (const auto& node : nodes) {
            SimpleConclusion sc;
            sc.study_id = id;
            for (const Triple* t : kb.by_subject(node)) {
                if (t->predicate == "hasSubject") sc.subject = unslug(t->object.text);
                else if (t->predicate == "hasObject") sc.object = unslug(t->object.text);
                else if (t->predicate == "hasEvidence") sc.evidence = t->object.text;
                else if (t->predicate == "hasRelation") {
                    if (auto rel = relation_from_name(t->object.text)) sc.relation = *rel;
                }
            }
            out.push_back(std::move(sc));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verdict aggregation

struct Verdict {
    enum class Winner { X, Y, Tie, Insufficient };
    int x_better = 0;
    int y_better = 0;
    int equivalent = 0;
    Winner winner = Winner::Insufficient;

    int comparisons() const { return x_better + y_better + equivalent; }
};

inline const char* winner_name(Verdict::Winner w) {
    switch (w) {
        case Verdict::Winner::X: return "X";
        case Verdict::Winner::Y: return "Y";
        case Verdict::Winner::Tie: return "Tie";
        case Verdict::Winner::Insufficient: return "Insufficient";
    }
    return "Insufficient";
}

// Counts conclusions involving exactly {x, y}. Worse(a, b) counts as
// Better(b, a); Unclear and other-pair conclusions are ignored.
inline Verdict verdict(const std::vector<SimpleConclusion>& conclusions, const std::string& x,
                       const std::string& y) {
    if (x == y) throw Error("verdict needs two distinct concepts");
    Verdict v;
    for (const auto& c : conclusions) {
        if (!c.object) continue;
        const std::string& a = c.subject;
        const std::string& b = *c.object;
        const bool pair_xy = (a == x && b == y) || (a == y && b == x);
        if (!pair_xy) continue;
        switch (c.relation) {
            case Relation::Better:
                (a == x ? v.x_better : v.y_better) += 1;
                break;
            case Relation::Worse:
                (a == x ? v.y_better : v.x_better) += 1;
                break;
            case Relation::Equivalent:
                v.equivalent += 1;
                break;
            case Relation::Unclear:
                break;
        }
    }
    if (v.comparisons() == 0) v.winner = Verdict::Winner::Insufficient;
    else if (v.x_better > v.y_better) v.winner = Verdict::Winner::X;
    else if (v.y_better > v.x_better) v.winner = Verdict::Winner::Y;
    else v.winner = Verdict::Winner::Tie;
    return v;
}

// ---------------------------------------------------------------------------
// Result rendering

inline std::string render_table(const Bindings& b) {
    std::vector<std::size_t> widths(b.columns.size());
    for (std::size_t i = 0; i < b.columns.size(); ++i) widths[i] = b.columns[i].size() + 1;
    for (const auto& row : b.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], render_cell(row[i]).size());
        }
    }
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out += cells[i];
            if (i + 1 < cells.size()) {
                out.append(widths[i] - cells[i].size() + 2, ' ');
            }
        }
        out.push_back('\n');
    };
    std::vector<std::string> header;
    for (const auto& c : b.columns) header.push_back("?" + c);
    emit_row(header);
    std::size_t total = 0;
    for (std::size_t w : widths) total += w + 2;
    out.append(total > 2 ? total - 2 : total, '-');
    out.push_back('\n');
    for (const auto& row : b.rows) {
        std::vector<std::string> cells;
        for (const auto& v : row) cells.push_back(render_cell(v));
        emit_row(cells);
    }
    return out;
}

inline nlohmann::json bindings_to_json(const Bindings& b) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : b.rows) {
        nlohmann::json obj;
        for (std::size_t i = 0; i < b.columns.size(); ++i) {
            const Value& v = row[i];
            if (v.kind == Value::Kind::Int) obj[b.columns[i]] = v.number;
            else obj[b.columns[i]] = v.text;
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

}  // namespace slrkb
