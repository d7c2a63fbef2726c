#pragma once

// Propositional-calculus engine: expression trees, a precedence-climbing
// parser, rendering, and exhaustive truth-table enumeration (entailment,
// satisfiability, tautology). Used to audit the propositional skeleton of the
// EPR completeness argument.
//
// Grammar (keywords are upper case):
//
//   expr    := unary (binop unary)*
//   unary   := "NOT" unary | "(" expr ")" | atom
//   atom    := IDENT [ "(" IDENT ("," IDENT)* ")" ]
//   binop   := "AND" | "OR" | "XOR" | "IMPLIES" | "IFF"
//
// Binding strength: NOT > AND > OR = XOR > IMPLIES > IFF. IMPLIES associates
// to the right, everything else to the left.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eprlab/errors.hpp"

namespace eprlab::logic {

/// A propositional atom such as QMT or PRNC(P,Q). Arguments are opaque tags;
/// two atoms are the same proposition iff their labels are equal.
struct PropositionId {
    std::string name;
    std::vector<std::string> arguments;

    std::string label() const
    {
        if (arguments.empty()) {
            return name;
        }
        std::string out = name + "(";
        for (std::size_t i = 0; i < arguments.size(); ++i) {
            out += (i ? "," : "") + arguments[i];
        }
        return out + ")";
    }

    friend bool operator==(const PropositionId& a, const PropositionId& b)
    {
        return a.label() == b.label();
    }
};

enum class Op { atom, negation, conjunction, disjunction, exclusive_or, implication, equivalence };

inline std::string_view keyword(Op op)
{
    switch (op) {
        case Op::negation: return "NOT";
        case Op::conjunction: return "AND";
        case Op::disjunction: return "OR";
        case Op::exclusive_or: return "XOR";
        case Op::implication: return "IMPLIES";
        case Op::equivalence: return "IFF";
        case Op::atom: break;
    }
    return "";
}

/// Immutable expression tree with value semantics.
class Expr {
public:
    static Expr atom(PropositionId id)
    {
        Expr e;
        e.op_ = Op::atom;
        e.id_ = std::move(id);
        return e;
    }
    static Expr atom(std::string name, std::vector<std::string> arguments = {})
    {
        return atom(PropositionId{std::move(name), std::move(arguments)});
    }
    static Expr unary(Op op, Expr operand)
    {
        if (op != Op::negation) {
            throw DomainError("only NOT is unary");
        }
        Expr e;
        e.op_ = op;
        e.operands_.push_back(std::move(operand));
        return e;
    }
    static Expr binary(Op op, Expr lhs, Expr rhs)
    {
        if (op == Op::atom || op == Op::negation) {
            throw DomainError("binary node needs a binary connective");
        }
        Expr e;
        e.op_ = op;
        e.operands_.push_back(std::move(lhs));
        e.operands_.push_back(std::move(rhs));
        return e;
    }

    Op op() const { return op_; }
    bool is_atom() const { return op_ == Op::atom; }
    /// Only meaningful for atoms.
    const PropositionId& proposition() const { return id_; }
    const std::vector<Expr>& operands() const { return operands_; }
    const Expr& lhs() const { return operands_.at(0); }
    const Expr& rhs() const { return operands_.at(1); }

    std::size_t depth() const
    {
        std::size_t d = 0;
        for (const Expr& c : operands_) {
            d = std::max(d, c.depth());
        }
        return d + 1;
    }

private:
    Expr() = default;

    Op op_ = Op::atom;
    PropositionId id_;
    std::vector<Expr> operands_;
};

inline bool operator==(const Expr& a, const Expr& b)
{
    if (a.op() != b.op()) {
        return false;
    }
    if (a.is_atom()) {
        return a.proposition() == b.proposition();
    }
    return a.operands() == b.operands();
}

inline Expr negation(Expr e) { return Expr::unary(Op::negation, std::move(e)); }
inline Expr conjunction(Expr a, Expr b) { return Expr::binary(Op::conjunction, std::move(a), std::move(b)); }
inline Expr disjunction(Expr a, Expr b) { return Expr::binary(Op::disjunction, std::move(a), std::move(b)); }
inline Expr exclusive_or(Expr a, Expr b) { return Expr::binary(Op::exclusive_or, std::move(a), std::move(b)); }
inline Expr implication(Expr a, Expr b) { return Expr::binary(Op::implication, std::move(a), std::move(b)); }
inline Expr equivalence(Expr a, Expr b) { return Expr::binary(Op::equivalence, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parsing and rendering

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}

    /// Zero-based byte offset into the input.
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

namespace detail {

inline int precedence(Op op)
{
    switch (op) {
        case Op::equivalence: return 1;
        case Op::implication: return 2;
        case Op::disjunction:
        case Op::exclusive_or: return 3;
        case Op::conjunction: return 4;
        case Op::negation: return 5;
        case Op::atom: return 6;
    }
    return 0;
}

inline bool right_associative(Op op) { return op == Op::implication; }

enum class Tok { ident, kw_not, binop, lparen, rparen, comma, end };

struct Token {
    Tok kind;
    std::string text;
    Op op = Op::atom;
    std::size_t pos = 0;
};

inline std::vector<Token> tokenize(std::string_view text)
{
    static const std::map<std::string, Op, std::less<>> binops = {
        {"AND", Op::conjunction}, {"OR", Op::disjunction},    {"XOR", Op::exclusive_or},
        {"IMPLIES", Op::implication}, {"IFF", Op::equivalence}};

    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == ',') {
            out.push_back({c == '(' ? Tok::lparen : c == ')' ? Tok::rparen : Tok::comma,
                           std::string(1, static_cast<char>(c)), Op::atom, i});
            ++i;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            const std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ++i;
            }
            std::string word(text.substr(start, i - start));
            if (word == "NOT") {
                out.push_back({Tok::kw_not, word, Op::negation, start});
            } else if (auto it = binops.find(word); it != binops.end()) {
                out.push_back({Tok::binop, word, it->second, start});
            } else {
                out.push_back({Tok::ident, word, Op::atom, start});
            }
            continue;
        }
        throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
    }
    out.push_back({Tok::end, "", Op::atom, text.size()});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    Expr parse_all()
    {
        if (peek().kind == Tok::end) {
            throw ParseError("empty expression", peek().pos);
        }
        Expr e = parse_expr(1);
        if (peek().kind != Tok::end) {
            throw ParseError("unexpected '" + peek().text + "'", peek().pos);
        }
        return e;
    }

private:
    const Token& peek() const { return tokens_[index_]; }
    Token take() { return tokens_[index_++]; }

    void expect(Tok kind, std::string_view what)
    {
        if (peek().kind != kind) {
            const std::string found = peek().kind == Tok::end ? "end of input" : "'" + peek().text + "'";
            throw ParseError("expected " + std::string(what) + ", found " + found, peek().pos);
        }
        ++index_;
    }

    Expr parse_expr(int min_prec)
    {
        Expr lhs = parse_unary();
        while (peek().kind == Tok::binop && precedence(peek().op) >= min_prec) {
            const Op op = take().op;
            const int next = right_associative(op) ? precedence(op) : precedence(op) + 1;
            Expr rhs = parse_expr(next);
            lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parse_unary()
    {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::kw_not:
                ++index_;
                return negation(parse_unary());
            case Tok::lparen: {
                ++index_;
                Expr inner = parse_expr(1);
                expect(Tok::rparen, "')'");
                return inner;
            }
            case Tok::ident:
                return parse_atom();
            case Tok::end:
                throw ParseError("unexpected end of input", t.pos);
            default:
                throw ParseError("unexpected '" + t.text + "'", t.pos);
        }
    }

    Expr parse_atom()
    {
        PropositionId id{take().text, {}};
        if (peek().kind != Tok::lparen) {
            return Expr::atom(std::move(id));
        }
        ++index_;
        for (;;) {
            if (peek().kind != Tok::ident) {
                throw ParseError("expected argument label", peek().pos);
            }
            id.arguments.push_back(take().text);
            if (peek().kind == Tok::comma) {
                ++index_;
                continue;
            }
            expect(Tok::rparen, "',' or ')'");
            break;
        }
        return Expr::atom(std::move(id));
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

}  // namespace detail

inline Expr parse_expr(std::string_view text)
{
    return detail::Parser(detail::tokenize(text)).parse_all();
}

/// Renders with the fewest parentheses that parse back to the same tree.
inline std::string render(const Expr& e)
{
    using detail::precedence;
    if (e.is_atom()) {
        return e.proposition().label();
    }
    if (e.op() == Op::negation) {
        const Expr& x = e.lhs();
        const bool wrap = !x.is_atom() && x.op() != Op::negation;
        return "NOT " + (wrap ? "(" + render(x) + ")" : render(x));
    }
    const int p = precedence(e.op());
    const bool right = detail::right_associative(e.op());
    const Expr& l = e.lhs();
    const Expr& r = e.rhs();
    const bool wrap_l = precedence(l.op()) < p || (precedence(l.op()) == p && right);
    const bool wrap_r = precedence(r.op()) < p || (precedence(r.op()) == p && !right);
    std::string out = wrap_l ? "(" + render(l) + ")" : render(l);
    out += " ";
    out += keyword(e.op());
    out += " ";
    out += wrap_r ? "(" + render(r) + ")" : render(r);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

using Assignment = std::map<std::string, bool>;

class MissingAssignment : public Error {
public:
    explicit MissingAssignment(std::string label)
        : Error("no truth value assigned to proposition " + label), label_(std::move(label)) {}
    const std::string& label() const { return label_; }

private:
    std::string label_;
};

inline bool eval(const Expr& e, const Assignment& assignment)
{
    switch (e.op()) {
        case Op::atom: {
            const std::string label = e.proposition().label();
            const auto it = assignment.find(label);
            if (it == assignment.end()) {
                throw MissingAssignment(label);
            }
            return it->second;
        }
        case Op::negation: return !eval(e.lhs(), assignment);
        case Op::conjunction: return eval(e.lhs(), assignment) && eval(e.rhs(), assignment);
        case Op::disjunction: return eval(e.lhs(), assignment) || eval(e.rhs(), assignment);
        case Op::exclusive_or: return eval(e.lhs(), assignment) != eval(e.rhs(), assignment);
        case Op::implication: return !eval(e.lhs(), assignment) || eval(e.rhs(), assignment);
        case Op::equivalence: return eval(e.lhs(), assignment) == eval(e.rhs(), assignment);
    }
    return false;
}

/// Proposition labels in order of first appearance (left to right).
inline void collect_propositions(const Expr& e, std::vector<std::string>& out)
{
    if (e.is_atom()) {
        std::string label = e.proposition().label();
        if (std::find(out.begin(), out.end(), label) == out.end()) {
            out.push_back(std::move(label));
        }
        return;
    }
    for (const Expr& c : e.operands()) {
        collect_propositions(c, out);
    }
}

inline std::vector<std::string> propositions(const std::vector<Expr>& exprs)
{
    std::vector<std::string> out;
    for (const Expr& e : exprs) {
        collect_propositions(e, out);
    }
    return out;
}

inline std::vector<std::string> propositions(const Expr& e) { return propositions(std::vector{e}); }

// ---------------------------------------------------------------------------
// Enumeration

inline constexpr std::size_t kMaxPropositions = 20;

class TooManyPropositions : public Error {
public:
    explicit TooManyPropositions(std::size_t n)
        : Error("enumeration over " + std::to_string(n) + " propositions exceeds the limit of " +
                std::to_string(kMaxPropositions)) {}
};

namespace detail {

// Postfix program over proposition indices; avoids map lookups per row.
class Compiled {
public:
    Compiled(const Expr& e, const std::vector<std::string>& order) { emit(e, order); }

    bool run(std::uint32_t row, std::size_t n) const
    {
        std::vector<char> stack;
        stack.reserve(code_.size());
        for (const auto& [op, index] : code_) {
            if (op == Op::atom) {
                stack.push_back(static_cast<char>((row >> (n - 1 - index)) & 1U));
                continue;
            }
            if (op == Op::negation) {
                stack.back() = static_cast<char>(!stack.back());
                continue;
            }
            const bool b = stack.back();
            stack.pop_back();
            const bool a = stack.back();
            bool v = false;
            switch (op) {
                case Op::conjunction: v = a && b; break;
                case Op::disjunction: v = a || b; break;
                case Op::exclusive_or: v = a != b; break;
                case Op::implication: v = !a || b; break;
                case Op::equivalence: v = a == b; break;
                default: break;
            }
            stack.back() = static_cast<char>(v);
        }
        return stack.back() != 0;
    }

private:
    void emit(const Expr& e, const std::vector<std::string>& order)
    {
        if (e.is_atom()) {
            const std::string label = e.proposition().label();
            const auto it = std::find(order.begin(), order.end(), label);
            if (it == order.end()) {
                throw MissingAssignment(label);
            }
            code_.emplace_back(Op::atom, static_cast<std::size_t>(it - order.begin()));
            return;
        }
        for (const Expr& c : e.operands()) {
            emit(c, order);
        }
        code_.emplace_back(e.op(), 0);
    }

    std::vector<std::pair<Op, std::size_t>> code_;
};

inline void check_guard(std::size_t n)
{
    if (n > kMaxPropositions) {
        throw TooManyPropositions(n);
    }
}

inline Assignment row_assignment(const std::vector<std::string>& order, std::uint32_t row)
{
    Assignment a;
    const std::size_t n = order.size();
    for (std::size_t i = 0; i < n; ++i) {
        a[order[i]] = ((row >> (n - 1 - i)) & 1U) != 0;
    }
    return a;
}

}  // namespace detail

/// Exhaustive table. Rows count in binary over the proposition order with the
/// first proposition as the most significant bit; row 0 is all-false.
class TruthTable {
public:
    TruthTable(std::vector<std::string> order, std::vector<bool> values)
        : order_(std::move(order)), values_(std::move(values)) {}

    const std::vector<std::string>& propositions() const { return order_; }
    std::size_t rows() const { return values_.size(); }
    bool value(std::size_t row) const { return values_.at(row); }
    Assignment assignment(std::size_t row) const
    {
        return detail::row_assignment(order_, static_cast<std::uint32_t>(row));
    }

    bool tautology() const
    {
        return std::all_of(values_.begin(), values_.end(), [](bool v) { return v; });
    }
    bool contradiction() const
    {
        return std::none_of(values_.begin(), values_.end(), [](bool v) { return v; });
    }
    std::size_t true_rows() const
    {
        return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), true));
    }

private:
    std::vector<std::string> order_;
    std::vector<bool> values_;
};

/// `order` may list extra propositions; it must cover every atom of `e`.
inline TruthTable truth_table(const Expr& e, std::vector<std::string> order)
{
    detail::check_guard(order.size());
    const detail::Compiled program(e, order);
    const std::uint32_t rows = std::uint32_t{1} << order.size();
    std::vector<bool> values(rows);
    for (std::uint32_t r = 0; r < rows; ++r) {
        values[r] = program.run(r, order.size());
    }
    return TruthTable(std::move(order), std::move(values));
}

inline TruthTable truth_table(const Expr& e) { return truth_table(e, propositions(e)); }

struct Verdict {
    bool holds = false;
    /// Counterexample when an entailment/tautology/unsatisfiability claim
    /// fails; satisfying assignment when a satisfiability claim holds.
    std::optional<Assignment> witness;
};

namespace detail {

// First row (canonical order) where every premise is true and `reject(row)`
// holds. Returns nullopt if there is none.
template <class Reject>
std::optional<Assignment> first_row(const std::vector<Expr>& premises,
                                    const std::vector<std::string>& order, Reject reject)
{
    check_guard(order.size());
    std::vector<Compiled> programs;
    programs.reserve(premises.size());
    for (const Expr& p : premises) {
        programs.emplace_back(p, order);
    }
    const std::uint32_t rows = std::uint32_t{1} << order.size();
    for (std::uint32_t r = 0; r < rows; ++r) {
        bool all = true;
        for (const Compiled& p : programs) {
            if (!p.run(r, order.size())) {
                all = false;
                break;
            }
        }
        if (all && reject(r)) {
            return row_assignment(order, r);
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// premises |= conclusion. On failure the witness is the first assignment (in
/// canonical row order) satisfying every premise but not the conclusion.
inline Verdict entails(const std::vector<Expr>& premises, const Expr& conclusion)
{
    std::vector<Expr> all = premises;
    all.push_back(conclusion);
    const std::vector<std::string> order = propositions(all);
    const detail::Compiled goal(conclusion, order);
    auto witness = detail::first_row(premises, order,
                                     [&](std::uint32_t r) { return !goal.run(r, order.size()); });
    return Verdict{!witness.has_value(), std::move(witness)};
}

/// holds iff some assignment satisfies every expression; the witness is the
/// first such assignment.
inline Verdict satisfiable(const std::vector<Expr>& exprs)
{
    const std::vector<std::string> order = propositions(exprs);
    auto witness = detail::first_row(exprs, order, [](std::uint32_t) { return true; });
    return Verdict{witness.has_value(), std::move(witness)};
}

/// holds iff no assignment satisfies every expression; the witness is a
/// satisfying assignment when it fails.
inline Verdict unsatisfiable(const std::vector<Expr>& exprs)
{
    Verdict v = satisfiable(exprs);
    v.holds = !v.holds;
    return v;
}

inline Verdict tautology(const Expr& e) { return entails({}, e); }

// ---------------------------------------------------------------------------
// EPR argument audit

/// Reading of the circled-plus connective in the EPR disjunction.
enum class OrSemantics { inclusive, exclusive };

inline std::string_view to_string(OrSemantics s)
{
    return s == OrSemantics::inclusive ? "inclusive" : "exclusive";
}

enum class Query { entailment, unsatisfiable, satisfiable, tautology };

inline std::string_view to_string(Query q)
{
    switch (q) {
        case Query::entailment: return "entailment";
        case Query::unsatisfiable: return "unsatisfiable";
        case Query::satisfiable: return "satisfiable";
        case Query::tautology: return "tautology";
    }
    return "";
}

struct ArgumentCheck {
    std::string name;
    std::string description;
    std::vector<Expr> premises;
    Query query;
    /// Conclusion for entailment, subject for tautology; unused otherwise.
    std::optional<Expr> target;
    Verdict verdict;
};

/// Re-derives a check's verdict from its stored premises and query.
inline Verdict evaluate(const std::vector<Expr>& premises, Query query,
                        const std::optional<Expr>& target)
{
    switch (query) {
        case Query::entailment: return entails(premises, target.value());
        case Query::unsatisfiable: return unsatisfiable(premises);
        case Query::satisfiable: return satisfiable(premises);
        case Query::tautology: return tautology(target.value());
    }
    return {};
}

inline Verdict recheck(const ArgumentCheck& c) { return evaluate(c.premises, c.query, c.target); }

struct ArgumentReport {
    OrSemantics semantics;
    std::vector<ArgumentCheck> checks;

    const ArgumentCheck& at(std::string_view name) const
    {
        for (const ArgumentCheck& c : checks) {
            if (c.name == name) {
                return c;
            }
        }
        throw DomainError("no check named " + std::string(name));
    }
    bool all_hold() const
    {
        return std::all_of(checks.begin(), checks.end(),
                           [](const ArgumentCheck& c) { return c.verdict.holds; });
    }
};

/// Atoms of the audit.
struct EprLabels {
    PropositionId reality{"PRNC", {"P", "Q"}};   // elements of reality for a non-commuting pair
    PropositionId complete{"QMTC", {"P", "Q"}};  // QM true and complete for that pair
};

inline ArgumentReport audit_epr(OrSemantics semantics, const EprLabels& labels = {})
{
    const Expr prnc = Expr::atom(labels.reality);
    const Expr qmtc = Expr::atom(labels.complete);
    auto circled_plus = [semantics](Expr a, Expr b) {
        return semantics == OrSemantics::inclusive ? disjunction(std::move(a), std::move(b))
                                                   : exclusive_or(std::move(a), std::move(b));
    };

    const Expr x = negation(prnc);
    const Expr y = negation(qmtc);
    const Expr joint = conjunction(prnc, qmtc);  // asserted TRUE
    const Expr either = circled_plus(x, y);      // asserted TRUE by EPR
    const Expr not_joint = negation(joint);
    const Expr alt1 = y;                         // [1] description not complete
    const Expr alt2 = implication(x, y);         // [2]

    ArgumentReport report{semantics, {}};
    auto add = [&report](std::string name, std::string description, std::vector<Expr> premises,
                         Query query, std::optional<Expr> target = std::nullopt) {
        Verdict v = evaluate(premises, query, target);
        report.checks.push_back(ArgumentCheck{std::move(name), std::move(description),
                                              std::move(premises), query, std::move(target),
                                              std::move(v)});
    };

    add("de_morgan_tautology", "NOT(A AND B) is equivalent to NOT A OR NOT B", {},
        Query::tautology, equivalence(negation(conjunction(prnc, qmtc)), disjunction(x, y)));
    add("de_morgan", "reality AND complete entails that NOT reality (+) NOT complete is false",
        {joint}, Query::entailment, negation(either));
    add("joint_unsat", "the conjunction asserted true and the EPR disjunction asserted true "
        "cannot both hold", {joint, either}, Query::unsatisfiable);
    add("epr_conclusion", "from NOT(reality AND complete) and reality, completeness fails",
        {not_joint, prnc}, Query::entailment, y);
    add("epr_inference", "X (+) Y with X false forces Y true (X = NOT reality, Y = NOT complete)",
        {either, negation(x)}, Query::entailment, y);
    add("coupling", "X IFF Y with X false forces Y false", {equivalence(x, y), negation(x)},
        Query::entailment, negation(y));
    add("coupling_contradicts_disjunction", "X IFF Y, X false and X (+) Y are jointly unsatisfiable",
        {equivalence(x, y), negation(x), either}, Query::unsatisfiable);
    add("collapse", "NOT complete alone entails [1] OR [2] with [1] = NOT complete and "
        "[2] = NOT reality IMPLIES NOT complete", {y}, Query::entailment,
        disjunction(alt1, alt2));
    if (semantics == OrSemantics::exclusive) {
        add("xor_excludes_both_true", "X XOR Y rules out X and Y both true",
            {either, x, y}, Query::unsatisfiable);
    } else {
        add("or_admits_both_true", "X OR Y admits X and Y both true", {either, x, y},
            Query::satisfiable);
    }
    return report;
}

}  // namespace eprlab::logic
