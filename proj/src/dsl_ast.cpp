#include "linred/dsl.hpp"

#include <algorithm>
#include <set>

namespace linred {

/* -------------------------------------------------------------------------- */
/* Domain                                                                     */
/* -------------------------------------------------------------------------- */

Domain Domain::real(Rational lo, Rational hi)
{
    return Domain{DomainKind::Real, std::move(lo), std::move(hi)};
}

Domain Domain::integer(Rational lo, Rational hi)
{
    return Domain{DomainKind::Int, std::move(lo), std::move(hi)};
}

Domain Domain::binary()
{
    return Domain{DomainKind::Binary, Rational(0), Rational(1)};
}

bool Domain::contains(const Rational& v) const
{
    if (v < lo || v > hi)
        return false;
    return kind == DomainKind::Real || is_integer(v);
}

DslError::DslError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      d_line(line),
      d_column(column),
      d_detail(message)
{
}

/* -------------------------------------------------------------------------- */
/* Construction                                                               */
/* -------------------------------------------------------------------------- */

bool Expr::is_bool() const
{
    switch (op) {
    case Op::BoolConst:
    case Op::Cmp:
    case Op::And:
    case Op::Or:
    case Op::Not:
    case Op::Implies:
    case Op::Iff:
        return true;
    default:
        return false;
    }
}

namespace ex {

namespace {
ExprPtr node(Op op, std::vector<ExprPtr> args)
{
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    return e;
}
} // namespace

ExprPtr constant(Rational v)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->value = std::move(v);
    return e;
}

ExprPtr boolean(bool b)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::BoolConst;
    e->truth = b;
    return e;
}

ExprPtr var(std::size_t index)
{
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->var = index;
    return e;
}

ExprPtr add(ExprPtr a, ExprPtr b) { return node(Op::Add, {std::move(a), std::move(b)}); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return node(Op::Sub, {std::move(a), std::move(b)}); }

ExprPtr neg(ExprPtr a)
{
    if (a->op == Op::Const)
        return constant(-a->value);
    return node(Op::Neg, {std::move(a)});
}

ExprPtr mul(ExprPtr a, ExprPtr b) { return node(Op::Mul, {std::move(a), std::move(b)}); }
ExprPtr max(std::vector<ExprPtr> args) { return node(Op::Max, std::move(args)); }
ExprPtr min(std::vector<ExprPtr> args) { return node(Op::Min, std::move(args)); }
ExprPtr abs(ExprPtr a) { return node(Op::Abs, {std::move(a)}); }

ExprPtr cmp(CmpOp op, ExprPtr a, ExprPtr b)
{
    auto e = node(Op::Cmp, {std::move(a), std::move(b)});
    std::const_pointer_cast<Expr>(e)->cmp = op;
    return e;
}

ExprPtr land(ExprPtr a, ExprPtr b) { return node(Op::And, {std::move(a), std::move(b)}); }
ExprPtr lor(ExprPtr a, ExprPtr b) { return node(Op::Or, {std::move(a), std::move(b)}); }
ExprPtr lnot(ExprPtr a) { return node(Op::Not, {std::move(a)}); }
ExprPtr implies(ExprPtr a, ExprPtr b) { return node(Op::Implies, {std::move(a), std::move(b)}); }
ExprPtr iff(ExprPtr a, ExprPtr b) { return node(Op::Iff, {std::move(a), std::move(b)}); }

} // namespace ex

bool same_structure(const Expr& a, const Expr& b)
{
    if (a.op != b.op || a.args.size() != b.args.size())
        return false;
    switch (a.op) {
    case Op::Const:
        if (a.value != b.value)
            return false;
        break;
    case Op::BoolConst:
        if (a.truth != b.truth)
            return false;
        break;
    case Op::Var:
        if (a.var != b.var)
            return false;
        break;
    case Op::Cmp:
        if (a.cmp != b.cmp)
            return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same_structure(*a.args[i], *b.args[i]))
            return false;
    return true;
}

namespace {
void collect_vars(const Expr& e, std::set<std::size_t>& out)
{
    if (e.op == Op::Var)
        out.insert(e.var);
    for (const auto& a : e.args)
        collect_vars(*a, out);
}
} // namespace

std::vector<std::size_t> free_vars(const Expr& e)
{
    std::set<std::size_t> s;
    collect_vars(e, s);
    return {s.begin(), s.end()};
}

ExprPtr remap_vars(const ExprPtr& e, const std::map<std::size_t, std::size_t>& mapping)
{
    if (e->op == Op::Var)
        return ex::var(mapping.at(e->var));
    if (e->args.empty())
        return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args)
        a = remap_vars(a, mapping);
    return copy;
}

bool has_var_product(const Expr& e)
{
    if (e.op == Op::Mul && !free_vars(*e.args[0]).empty() && !free_vars(*e.args[1]).empty())
        return true;
    return std::any_of(e.args.begin(), e.args.end(),
                       [](const ExprPtr& a) { return has_var_product(*a); });
}

/* -------------------------------------------------------------------------- */
/* Evaluation                                                                 */
/* -------------------------------------------------------------------------- */

Rational eval_arith(const Expr& e, std::span<const Rational> y)
{
    switch (e.op) {
    case Op::Const:
        return e.value;
    case Op::Var:
        return y[e.var];
    case Op::Add:
        return eval_arith(*e.args[0], y) + eval_arith(*e.args[1], y);
    case Op::Sub:
        return eval_arith(*e.args[0], y) - eval_arith(*e.args[1], y);
    case Op::Neg:
        return -eval_arith(*e.args[0], y);
    case Op::Mul:
        return eval_arith(*e.args[0], y) * eval_arith(*e.args[1], y);
    case Op::Max:
    case Op::Min: {
        Rational best = eval_arith(*e.args[0], y);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            Rational v = eval_arith(*e.args[i], y);
            if (e.op == Op::Max ? v > best : v < best)
                best = v;
        }
        return best;
    }
    case Op::Abs: {
        Rational v = eval_arith(*e.args[0], y);
        return v < 0 ? Rational(-v) : v;
    }
    default:
        throw std::logic_error("eval_arith on a Boolean node");
    }
}

bool eval_predicate(const Expr& phi, std::span<const Rational> y)
{
    switch (phi.op) {
    case Op::BoolConst:
        return phi.truth;
    case Op::Cmp: {
        Rational a = eval_arith(*phi.args[0], y);
        Rational b = eval_arith(*phi.args[1], y);
        switch (phi.cmp) {
        case CmpOp::Le: return a <= b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Ge: return a >= b;
        case CmpOp::Gt: return a > b;
        }
        return false;
    }
    case Op::And:
        return eval_predicate(*phi.args[0], y) && eval_predicate(*phi.args[1], y);
    case Op::Or:
        return eval_predicate(*phi.args[0], y) || eval_predicate(*phi.args[1], y);
    case Op::Not:
        return !eval_predicate(*phi.args[0], y);
    case Op::Implies:
        return !eval_predicate(*phi.args[0], y) || eval_predicate(*phi.args[1], y);
    case Op::Iff:
        return eval_predicate(*phi.args[0], y) == eval_predicate(*phi.args[1], y);
    default:
        throw std::logic_error("eval_predicate on an arithmetic node");
    }
}

void check_valuation(std::span<const VarDecl> decls, std::span<const Rational> y)
{
    if (decls.size() != y.size())
        throw std::invalid_argument("valuation has " + std::to_string(y.size()) +
                                    " components, expected " + std::to_string(decls.size()));
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!decls[i].domain.contains(y[i]))
            throw std::invalid_argument("value " + to_string(y[i]) + " outside the domain of " +
                                        decls[i].name);
}

/* -------------------------------------------------------------------------- */
/* Affine forms and intervals                                                 */
/* -------------------------------------------------------------------------- */

namespace {

void scale_into(Affine& acc, const Affine& term, const Rational& factor)
{
    for (const auto& [v, c] : term.coeffs) {
        Rational sum = acc.coeffs[v] + factor * c;
        if (sum == 0)
            acc.coeffs.erase(v);
        else
            acc.coeffs[v] = sum;
    }
    acc.constant += factor * term.constant;
}

} // namespace

std::optional<Affine> to_affine(const Expr& e)
{
    switch (e.op) {
    case Op::Const:
        return Affine{{}, e.value};
    case Op::Var:
        return Affine{{{e.var, Rational(1)}}, Rational(0)};
    case Op::Add:
    case Op::Sub: {
        auto a = to_affine(*e.args[0]);
        auto b = to_affine(*e.args[1]);
        if (!a || !b)
            return std::nullopt;
        scale_into(*a, *b, e.op == Op::Add ? Rational(1) : Rational(-1));
        return a;
    }
    case Op::Neg: {
        auto a = to_affine(*e.args[0]);
        if (!a)
            return std::nullopt;
        Affine out;
        scale_into(out, *a, Rational(-1));
        return out;
    }
    case Op::Mul: {
        auto a = to_affine(*e.args[0]);
        auto b = to_affine(*e.args[1]);
        if (!a || !b)
            return std::nullopt;
        if (!a->coeffs.empty() && !b->coeffs.empty())
            return std::nullopt;
        if (!a->coeffs.empty())
            std::swap(a, b);
        Affine out;
        scale_into(out, *b, a->constant);
        return out;
    }
    default:
        return std::nullopt;
    }
}

Interval interval_of(const Expr& e, std::span<const VarDecl> decls)
{
    switch (e.op) {
    case Op::Const:
        return {e.value, e.value};
    case Op::Var:
        return {decls[e.var].domain.lo, decls[e.var].domain.hi};
    case Op::Add: {
        auto a = interval_of(*e.args[0], decls);
        auto b = interval_of(*e.args[1], decls);
        return {a.lo + b.lo, a.hi + b.hi};
    }
    case Op::Sub: {
        auto a = interval_of(*e.args[0], decls);
        auto b = interval_of(*e.args[1], decls);
        return {a.lo - b.hi, a.hi - b.lo};
    }
    case Op::Neg: {
        auto a = interval_of(*e.args[0], decls);
        return {-a.hi, -a.lo};
    }
    case Op::Mul: {
        auto a = interval_of(*e.args[0], decls);
        auto b = interval_of(*e.args[1], decls);
        Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
    case Op::Max:
    case Op::Min: {
        Interval acc = interval_of(*e.args[0], decls);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            auto b = interval_of(*e.args[i], decls);
            if (e.op == Op::Max)
                acc = {std::max(acc.lo, b.lo), std::max(acc.hi, b.hi)};
            else
                acc = {std::min(acc.lo, b.lo), std::min(acc.hi, b.hi)};
        }
        return acc;
    }
    case Op::Abs: {
        auto a = interval_of(*e.args[0], decls);
        if (a.lo >= 0)
            return a;
        if (a.hi <= 0)
            return {-a.hi, -a.lo};
        return {Rational(0), std::max(Rational(-a.lo), a.hi)};
    }
    default:
        throw std::logic_error("interval_of on a Boolean node");
    }
}

} // namespace linred
