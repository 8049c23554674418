#include "linred/smt.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace linred::smt {

/* -------------------------------------------------------------------------- */
/* SExpr                                                                      */
/* -------------------------------------------------------------------------- */

SExpr SExpr::sym(std::string name)
{
    SExpr e;
    e.kind = Kind::Atom;
    e.atom = std::move(name);
    return e;
}

SExpr SExpr::num(Rational value, Sort sort)
{
    SExpr e;
    e.kind = Kind::Number;
    e.number = std::move(value);
    e.number_sort = sort;
    return e;
}

SExpr SExpr::list(std::vector<SExpr> items)
{
    SExpr e;
    e.kind = Kind::List;
    e.items = std::move(items);
    return e;
}

SExpr SExpr::app(std::string head, std::vector<SExpr> args)
{
    args.insert(args.begin(), sym(std::move(head)));
    return list(std::move(args));
}

/* -------------------------------------------------------------------------- */
/* Terms                                                                      */
/* -------------------------------------------------------------------------- */

Term constant(const Rational& value)
{
    Sort s = is_integer(value) ? Sort::Int : Sort::Real;
    return {SExpr::num(value, s), s};
}

Term symbol(std::string name, Sort sort)
{
    return {SExpr::sym(std::move(name)), sort};
}

Term coerce(Term t, Sort target)
{
    if (t.sort == target)
        return t;
    if (target != Sort::Real || t.sort != Sort::Int)
        throw std::logic_error("unsupported sort coercion");
    if (t.expr.kind == SExpr::Kind::Number) {
        t.expr.number_sort = Sort::Real;
        t.sort = Sort::Real;
        return t;
    }
    return {SExpr::app("to_real", {std::move(t.expr)}), Sort::Real};
}

namespace {

Sort join(const std::vector<Term>& ts)
{
    return std::any_of(ts.begin(), ts.end(), [](const Term& t) { return t.sort == Sort::Real; })
               ? Sort::Real
               : Sort::Int;
}

Term apply_op(std::string head, std::vector<Term> ts)
{
    Sort s = join(ts);
    std::vector<SExpr> args;
    for (auto& t : ts)
        args.push_back(coerce(std::move(t), s).expr);
    return {SExpr::app(std::move(head), std::move(args)), s};
}

} // namespace

Term add(std::vector<Term> terms)
{
    if (terms.empty())
        return constant(Rational(0));
    if (terms.size() == 1)
        return terms.front();
    return apply_op("+", std::move(terms));
}

Term negate(Term t)
{
    if (t.expr.kind == SExpr::Kind::Number) {
        t.expr.number = -t.expr.number;
        return t;
    }
    return {SExpr::app("-", {std::move(t.expr)}), t.sort};
}

Term subtract(Term a, Term b)
{
    return apply_op("-", {std::move(a), std::move(b)});
}

Term scale(const Rational& factor, Term t)
{
    if (factor == 1)
        return t;
    if (factor == 0)
        return constant(Rational(0));
    if (t.expr.kind == SExpr::Kind::Number) {
        Term c = constant(factor * t.expr.number);
        return t.sort == Sort::Real ? coerce(c, Sort::Real) : c;
    }
    return apply_op("*", {constant(factor), std::move(t)});
}

Term multiply(Term a, Term b)
{
    return apply_op("*", {std::move(a), std::move(b)});
}

Term ite(SExpr cond, Term a, Term b)
{
    Sort s = join({a, b});
    return {SExpr::app("ite", {std::move(cond), coerce(std::move(a), s).expr,
                               coerce(std::move(b), s).expr}),
            s};
}

SExpr compare(CmpOp op, Term a, Term b)
{
    Sort s = join({a, b});
    SExpr l = coerce(std::move(a), s).expr;
    SExpr r = coerce(std::move(b), s).expr;
    switch (op) {
    case CmpOp::Le: return SExpr::app("<=", {l, r});
    case CmpOp::Lt: return SExpr::app("<", {l, r});
    case CmpOp::Eq: return SExpr::app("=", {l, r});
    case CmpOp::Ne: return SExpr::app("not", {SExpr::app("=", {l, r})});
    case CmpOp::Ge: return SExpr::app(">=", {l, r});
    case CmpOp::Gt: return SExpr::app(">", {l, r});
    }
    throw std::logic_error("bad comparison");
}

SExpr conj(std::vector<SExpr> parts)
{
    if (parts.empty())
        return SExpr::sym("true");
    if (parts.size() == 1)
        return std::move(parts.front());
    return SExpr::app("and", std::move(parts));
}

SExpr disj(std::vector<SExpr> parts)
{
    if (parts.empty())
        return SExpr::sym("false");
    if (parts.size() == 1)
        return std::move(parts.front());
    return SExpr::app("or", std::move(parts));
}

SExpr negation(SExpr p)
{
    return SExpr::app("not", {std::move(p)});
}

/* -------------------------------------------------------------------------- */
/* Script                                                                     */
/* -------------------------------------------------------------------------- */

namespace {

void collect_symbols(const SExpr& e, std::set<std::string>& out, bool head)
{
    if (e.kind == SExpr::Kind::Atom && !head)
        out.insert(e.atom);
    for (std::size_t i = 0; i < e.items.size(); ++i)
        collect_symbols(e.items[i], out, i == 0 && e.items[i].kind == SExpr::Kind::Atom);
}

bool has_real_literal(const SExpr& e)
{
    if (e.kind == SExpr::Kind::Number)
        return e.number_sort == Sort::Real;
    if (e.kind == SExpr::Kind::List && !e.items.empty() && e.items[0].is_atom("to_real"))
        return true;
    return std::any_of(e.items.begin(), e.items.end(), has_real_literal);
}

} // namespace

void Script::declare(std::string name, Sort sort)
{
    for (const auto& d : d_decls)
        if (d.name == name)
            throw std::invalid_argument("symbol '" + name + "' declared twice");
    d_decls.push_back({std::move(name), sort});
}

void Script::add_assertion(SExpr assertion)
{
    static const std::set<std::string> builtins = {"true", "false"};
    std::set<std::string> used;
    collect_symbols(assertion, used, false);
    for (const auto& s : used) {
        if (builtins.count(s))
            continue;
        bool found = std::any_of(d_decls.begin(), d_decls.end(),
                                 [&](const Declaration& d) { return d.name == s; });
        if (!found)
            throw std::invalid_argument("assertion uses undeclared symbol '" + s + "'");
    }
    d_assertions.push_back(std::move(assertion));
}

bool has_nonlinear_product(const SExpr& e)
{
    if (e.kind != SExpr::Kind::List)
        return false;
    if (!e.items.empty() && e.items[0].is_atom("*")) {
        std::size_t symbolic = 0;
        for (std::size_t i = 1; i < e.items.size(); ++i)
            if (e.items[i].kind != SExpr::Kind::Number)
                ++symbolic;
        if (symbolic >= 2)
            return true;
    }
    return std::any_of(e.items.begin(), e.items.end(), has_nonlinear_product);
}

std::string derive_logic(const Script& script)
{
    bool ints = false, reals = false, nonlinear = false;
    for (const auto& d : script.declarations()) {
        ints = ints || d.sort == Sort::Int;
        reals = reals || d.sort == Sort::Real;
    }
    for (const auto& a : script.assertions()) {
        nonlinear = nonlinear || has_nonlinear_product(a);
        reals = reals || has_real_literal(a);
    }
    if (!ints && !reals)
        reals = true;
    return std::string("QF_") + (nonlinear ? "N" : "L") + (ints ? "I" : "") + (reals ? "R" : "") +
           "A";
}

std::string logic_of(const Script& script)
{
    return script.logic_override() ? *script.logic_override() : derive_logic(script);
}

namespace {

bool has_int_decl(const Script& script)
{
    const auto& ds = script.declarations();
    return std::any_of(ds.begin(), ds.end(), [](const Declaration& d) { return d.sort == Sort::Int; });
}

std::string render_natural(const mpz_class& n, bool real_suffix)
{
    return n.get_str() + (real_suffix ? ".0" : "");
}

std::string render_number(const Rational& v, Sort sort, bool mixed)
{
    bool suffix = sort == Sort::Real && mixed;
    Rational a = abs(v);
    std::string body;
    if (is_integer(a))
        body = render_natural(a.get_num(), suffix);
    else
        body = "(/ " + render_natural(a.get_num(), suffix) + " " +
               render_natural(a.get_den(), suffix) + ")";
    return v < 0 ? "(- " + body + ")" : body;
}

const char* sort_name(Sort s)
{
    switch (s) {
    case Sort::Bool: return "Bool";
    case Sort::Int: return "Int";
    case Sort::Real: return "Real";
    }
    return "?";
}

} // namespace

std::string render(const SExpr& e, bool mixed_logic)
{
    switch (e.kind) {
    case SExpr::Kind::Atom:
        return e.atom;
    case SExpr::Kind::Number:
        return render_number(e.number, e.number_sort, mixed_logic);
    case SExpr::Kind::List: {
        std::string out = "(";
        for (std::size_t i = 0; i < e.items.size(); ++i) {
            if (i)
                out += ' ';
            out += render(e.items[i], mixed_logic);
        }
        return out + ")";
    }
    }
    return {};
}

std::string serialize_query(const Script& script)
{
    bool mixed = has_int_decl(script);
    std::ostringstream os;
    if (script.want_model)
        os << "(set-option :produce-models true)\n";
    os << "(set-logic " << logic_of(script) << ")\n";
    for (const auto& d : script.declarations())
        os << "(declare-const " << d.name << ' ' << sort_name(d.sort) << ")\n";
    for (const auto& a : script.assertions())
        os << "(assert " << render(a, mixed) << ")\n";
    os << "(check-sat)\n";
    return os.str();
}

std::string serialize_model_request(const Script& script)
{
    if (!script.want_model || script.declarations().empty())
        return {};
    std::string out = "(get-value (";
    for (std::size_t i = 0; i < script.declarations().size(); ++i) {
        if (i)
            out += ' ';
        out += script.declarations()[i].name;
    }
    return out + "))\n";
}

std::string serialize(const Script& script)
{
    return serialize_query(script) + serialize_model_request(script);
}

/* -------------------------------------------------------------------------- */
/* Reading responses                                                          */
/* -------------------------------------------------------------------------- */

std::vector<SExpr> read_sexprs(std::string_view text)
{
    std::vector<std::vector<SExpr>> stack(1);
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n')
                ++i;
        } else if (c == '(') {
            stack.emplace_back();
            ++i;
        } else if (c == ')') {
            if (stack.size() < 2)
                throw SmtParseError("unbalanced ')' at offset " + std::to_string(i));
            auto items = std::move(stack.back());
            stack.pop_back();
            stack.back().push_back(SExpr::list(std::move(items)));
            ++i;
        } else if (c == '|' || c == '"') {
            std::size_t j = text.find(c, i + 1);
            if (j == std::string_view::npos)
                throw SmtParseError("unterminated quoted token");
            std::string_view body = text.substr(i + 1, j - i - 1);
            stack.back().push_back(SExpr::sym(std::string(c == '|' ? body : text.substr(i, j - i + 1))));
            i = j + 1;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')' && text[j] != ';')
                ++j;
            stack.back().push_back(SExpr::sym(std::string(text.substr(i, j - i))));
            i = j;
        }
    }
    if (stack.size() != 1)
        throw SmtParseError("unbalanced '(' in solver output");
    return std::move(stack.front());
}

Rational parse_model_value(const SExpr& value)
{
    if (value.kind == SExpr::Kind::Number)
        return value.number;
    if (value.kind == SExpr::Kind::Atom) {
        try {
            return parse_rational(value.atom);
        } catch (const std::invalid_argument&) {
            throw SmtParseError("not a rational literal: '" + value.atom + "'");
        }
    }
    const auto& it = value.items;
    if (it.size() == 2 && it[0].is_atom("-"))
        return -parse_model_value(it[1]);
    if (it.size() == 3 && it[0].is_atom("-"))
        return parse_model_value(it[1]) - parse_model_value(it[2]);
    if (it.size() == 3 && it[0].is_atom("/")) {
        Rational d = parse_model_value(it[2]);
        if (d == 0)
            throw SmtParseError("division by zero in model value");
        return parse_model_value(it[1]) / d;
    }
    if (it.size() == 2 && it[0].is_atom("to_real"))
        return parse_model_value(it[1]);
    throw SmtParseError("unsupported model value: " + render(value, false));
}

Rational parse_model_value(std::string_view text)
{
    auto items = read_sexprs(text);
    if (items.size() != 1)
        throw SmtParseError("expected exactly one value, got " + std::to_string(items.size()));
    return parse_model_value(items.front());
}

std::map<std::string, Rational> parse_get_value(std::string_view response)
{
    auto items = read_sexprs(response);
    if (items.size() != 1 || items[0].kind != SExpr::Kind::List)
        throw SmtParseError("malformed get-value response");
    const SExpr& top = items[0];
    if (!top.items.empty() && top.items[0].is_atom("error"))
        throw SmtParseError("solver error: " + render(top, false));
    std::map<std::string, Rational> out;
    for (const auto& pair : top.items) {
        if (pair.kind != SExpr::Kind::List || pair.items.size() != 2 ||
            pair.items[0].kind != SExpr::Kind::Atom)
            throw SmtParseError("malformed get-value entry");
        out[pair.items[0].atom] = parse_model_value(pair.items[1]);
    }
    return out;
}

std::string describe(const Verdict& v)
{
    struct {
        std::string operator()(const Sat&) const { return "sat"; }
        std::string operator()(const Unsat&) const { return "unsat"; }
        std::string operator()(const Unknown& u) const { return "unknown (" + u.reason + ")"; }
        std::string operator()(const SolverFailure& f) const { return "failure: " + f.diagnostic; }
    } visitor;
    return std::visit(visitor, v);
}

} // namespace linred::smt
