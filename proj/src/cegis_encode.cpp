#include "linred/cegis.hpp"

namespace linred {

using smt::SExpr;
using smt::Sort;
using smt::Term;

std::string coefficient_symbol(std::size_t row, std::size_t col)
{
    return "x_" + std::to_string(row) + "_" + std::to_string(col);
}

std::string predicate_symbol(const VarDecl& decl)
{
    return "y_" + decl.name;
}

std::vector<Term> predicate_symbols(std::span<const VarDecl> decls)
{
    std::vector<Term> out;
    for (const auto& d : decls)
        out.push_back(smt::symbol(predicate_symbol(d),
                                  d.domain.kind == DomainKind::Real ? Sort::Real : Sort::Int));
    return out;
}

/* -------------------------------------------------------------------------- */
/* Predicate translation                                                      */
/* -------------------------------------------------------------------------- */

namespace {

std::optional<Rational> constant_value(const Expr& e)
{
    auto aff = to_affine(e);
    if (aff && aff->coeffs.empty())
        return aff->constant;
    return std::nullopt;
}

bool is_binary_var(const Expr& e, std::span<const VarDecl> decls)
{
    return e.op == Op::Var && decls[e.var].domain.kind == DomainKind::Binary;
}

Term fold_extremum(bool is_max, std::vector<Term> args)
{
    Term acc = std::move(args.front());
    for (std::size_t i = 1; i < args.size(); ++i) {
        SExpr cond = smt::compare(is_max ? CmpOp::Ge : CmpOp::Le, acc, args[i]);
        acc = smt::ite(std::move(cond), acc, args[i]);
    }
    return acc;
}

} // namespace

Term translate_arith(const Expr& e, std::span<const Term> vars, std::span<const VarDecl> decls)
{
    switch (e.op) {
    case Op::Const:
        return smt::constant(e.value);
    case Op::Var:
        return vars[e.var];
    case Op::Add:
        return smt::add({translate_arith(*e.args[0], vars, decls),
                         translate_arith(*e.args[1], vars, decls)});
    case Op::Sub:
        return smt::subtract(translate_arith(*e.args[0], vars, decls),
                             translate_arith(*e.args[1], vars, decls));
    case Op::Neg:
        return smt::negate(translate_arith(*e.args[0], vars, decls));
    case Op::Mul: {
        const Expr& a = *e.args[0];
        const Expr& b = *e.args[1];
        if (auto c = constant_value(a))
            return smt::scale(*c, translate_arith(b, vars, decls));
        if (auto c = constant_value(b))
            return smt::scale(*c, translate_arith(a, vars, decls));
        // A binary factor selects between the other factor and zero.
        if (is_binary_var(a, decls) || is_binary_var(b, decls)) {
            const Expr& sel = is_binary_var(a, decls) ? a : b;
            const Expr& other = &sel == &a ? b : a;
            SExpr on = smt::compare(CmpOp::Eq, vars[sel.var], smt::constant(Rational(1)));
            return smt::ite(std::move(on), translate_arith(other, vars, decls),
                            smt::constant(Rational(0)));
        }
        return smt::multiply(translate_arith(a, vars, decls), translate_arith(b, vars, decls));
    }
    case Op::Max:
    case Op::Min: {
        std::vector<Term> args;
        for (const auto& a : e.args)
            args.push_back(translate_arith(*a, vars, decls));
        return fold_extremum(e.op == Op::Max, std::move(args));
    }
    case Op::Abs: {
        Term t = translate_arith(*e.args[0], vars, decls);
        SExpr nonneg = smt::compare(CmpOp::Ge, t, smt::constant(Rational(0)));
        return smt::ite(std::move(nonneg), t, smt::negate(t));
    }
    default:
        throw std::logic_error("translate_arith on a Boolean node");
    }
}

SExpr translate_predicate(const Expr& phi, std::span<const Term> vars, std::span<const VarDecl> decls)
{
    auto sub = [&](std::size_t i) { return translate_predicate(*phi.args[i], vars, decls); };
    switch (phi.op) {
    case Op::BoolConst:
        return SExpr::sym(phi.truth ? "true" : "false");
    case Op::Cmp:
        return smt::compare(phi.cmp, translate_arith(*phi.args[0], vars, decls),
                            translate_arith(*phi.args[1], vars, decls));
    case Op::And:
        return SExpr::app("and", {sub(0), sub(1)});
    case Op::Or:
        return SExpr::app("or", {sub(0), sub(1)});
    case Op::Not:
        return smt::negation(sub(0));
    case Op::Implies:
        return SExpr::app("=>", {sub(0), sub(1)});
    case Op::Iff:
        return SExpr::app("=", {sub(0), sub(1)});
    default:
        throw std::logic_error("translate_predicate on an arithmetic node");
    }
}

/* -------------------------------------------------------------------------- */
/* Finding query                                                              */
/* -------------------------------------------------------------------------- */

namespace {

// row_i . [y, u, 1] with y and u concrete, X symbolic.
Term finding_row(std::size_t i, std::size_t m, std::size_t k, std::span<const Rational> y,
                 std::uint64_t u, Sort sort)
{
    std::vector<Term> parts;
    for (std::size_t j = 0; j < m; ++j)
        if (y[j] != 0)
            parts.push_back(smt::scale(y[j], smt::symbol(coefficient_symbol(i, j), sort)));
    for (std::size_t t = 0; t < k; ++t)
        if (u >> t & 1u)
            parts.push_back(smt::symbol(coefficient_symbol(i, m + t), sort));
    parts.push_back(smt::symbol(coefficient_symbol(i, m + k), sort));
    return smt::add(std::move(parts));
}

SExpr rows_hold(std::size_t l, std::size_t m, std::size_t k, std::span<const Rational> y,
                std::uint64_t u, Sort sort)
{
    std::vector<SExpr> parts;
    for (std::size_t i = 0; i < l; ++i)
        parts.push_back(smt::compare(CmpOp::Le, finding_row(i, m, k, y, u, sort), smt::constant(0)));
    return smt::conj(std::move(parts));
}

SExpr some_row_fails(std::size_t l, std::size_t m, std::size_t k, std::span<const Rational> y,
                     std::uint64_t u, Sort sort)
{
    std::vector<SExpr> parts;
    for (std::size_t i = 0; i < l; ++i)
        parts.push_back(smt::compare(CmpOp::Gt, finding_row(i, m, k, y, u, sort), smt::constant(0)));
    return smt::disj(std::move(parts));
}

} // namespace

smt::Script encode_reduction_finding(const SampleSet& samples, std::size_t m, std::size_t l,
                                     std::size_t k, const FindingOptions& options)
{
    if (samples.empty())
        throw std::invalid_argument("reduction finding needs a non-empty sample set");
    if (l < 1)
        throw std::invalid_argument("reduction finding needs l >= 1");

    const Sort sort = options.integer_bound ? Sort::Int : Sort::Real;
    smt::Script script;
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < m + k + 1; ++j)
            script.declare(coefficient_symbol(i, j), sort);

    std::optional<Rational> bound = options.coeff_bound;
    if (options.integer_bound && (!bound || *options.integer_bound < *bound))
        bound = options.integer_bound;
    if (bound) {
        Term b = sort == Sort::Int ? smt::constant(Rational(floor_of(*bound)))
                                   : smt::coerce(smt::constant(*bound), Sort::Real);
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t j = 0; j < m + k + 1; ++j) {
                Term x = smt::symbol(coefficient_symbol(i, j), sort);
                script.add_assertion(smt::compare(CmpOp::Le, x, b));
                script.add_assertion(smt::compare(CmpOp::Ge, x, smt::negate(b)));
            }
    }

    if (options.break_symmetry) {
        // Any solution maps to one meeting these: sort rows by their first
        // column, then flip (u_t -> 1 - u_t) and permute the auxiliaries so
        // row 0's auxiliary coefficients are non-negative and ascending. The
        // flips and permutations leave the first column alone.
        auto x = [&](std::size_t i, std::size_t j) { return smt::symbol(coefficient_symbol(i, j), sort); };
        if (m > 0)
            for (std::size_t i = 0; i + 1 < l; ++i)
                script.add_assertion(smt::compare(CmpOp::Le, x(i, 0), x(i + 1, 0)));
        for (std::size_t t = 0; t < k; ++t) {
            script.add_assertion(smt::compare(CmpOp::Ge, x(0, m + t), smt::constant(0)));
            if (t + 1 < k)
                script.add_assertion(smt::compare(CmpOp::Le, x(0, m + t), x(0, m + t + 1)));
        }
    }

    const std::uint64_t combos = std::uint64_t{1} << k;
    for (const auto& s : samples.entries()) {
        if (s.point.size() != m)
            throw DimensionMismatch("sample dimension does not match m");
        std::vector<SExpr> per_u;
        for (std::uint64_t u = 0; u < combos; ++u) {
            if (s.phi)
                per_u.push_back(rows_hold(l, m, k, s.point, u, sort));
            else
                per_u.push_back(some_row_fails(l, m, k, s.point, u, sort));
        }
        // Positive samples need one accepting u. Negative samples need every u
        // rejected, except under the literal reading where one rejecting u suffices.
        bool any = s.phi || options.semantics == Semantics::Literal;
        script.add_assertion(any ? smt::disj(std::move(per_u)) : smt::conj(std::move(per_u)));
    }
    return script;
}

Reduction decode_reduction(const std::map<std::string, Rational>& model, std::size_t l,
                           std::size_t k, std::vector<std::string> variables)
{
    Reduction x = Reduction::zeros(l, k, std::move(variables));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < x.width(); ++j) {
            auto it = model.find(coefficient_symbol(i, j));
            if (it == model.end())
                throw std::runtime_error("model lacks " + coefficient_symbol(i, j));
            x.rows[i][j] = it->second;
        }
    return x;
}

/* -------------------------------------------------------------------------- */
/* Refutation query                                                           */
/* -------------------------------------------------------------------------- */

namespace {

// row . [y, u, 1] with X and u concrete, y symbolic.
Term refutation_row(const std::vector<Rational>& row, std::span<const Term> ys, std::size_t m,
                    std::size_t k, std::uint64_t u)
{
    std::vector<Term> parts;
    for (std::size_t j = 0; j < m; ++j)
        if (row[j] != 0)
            parts.push_back(smt::scale(row[j], ys[j]));
    Rational c = row[m + k];
    for (std::size_t t = 0; t < k; ++t)
        if (u >> t & 1u)
            c += row[m + t];
    if (c != 0 || parts.empty())
        parts.push_back(smt::constant(c));
    return smt::add(std::move(parts));
}

} // namespace

smt::Script encode_refutation(const PredicateSpec& spec, const Reduction& x, Semantics semantics,
                              std::optional<Rational> grid)
{
    if (grid && *grid <= 0)
        throw std::invalid_argument("grid step must be positive");
    x.validate();
    const auto& decls = spec.decls;
    if (x.m != decls.size())
        throw DimensionMismatch("reduction has m = " + std::to_string(x.m) + " but the predicate has " +
                                std::to_string(decls.size()) + " variables");

    smt::Script script;
    auto ys = predicate_symbols(decls);
    for (std::size_t j = 0; j < decls.size(); ++j) {
        script.declare(predicate_symbol(decls[j]), ys[j].sort);
        Term lo = smt::constant(decls[j].domain.lo);
        Term hi = smt::constant(decls[j].domain.hi);
        script.add_assertion(smt::conj({smt::compare(CmpOp::Le, lo, ys[j]),
                                        smt::compare(CmpOp::Le, ys[j], hi)}));
        if (grid && decls[j].domain.kind == DomainKind::Real) {
            std::string n = "n_" + decls[j].name;
            script.declare(n, smt::Sort::Int);
            Term snapped = smt::add({lo, smt::scale(*grid, smt::symbol(n, smt::Sort::Int))});
            script.add_assertion(smt::compare(CmpOp::Eq, ys[j], snapped));
        }
    }

    SExpr phi = translate_predicate(*spec.predicate, ys, decls);

    const std::uint64_t combos = std::uint64_t{1} << x.k;
    std::vector<SExpr> rejected_by_u, accepted_by_u;
    for (std::uint64_t u = 0; u < combos; ++u) {
        std::vector<SExpr> fails, holds;
        for (const auto& row : x.rows) {
            Term t = refutation_row(row, ys, x.m, x.k, u);
            fails.push_back(smt::compare(CmpOp::Gt, t, smt::constant(0)));
            holds.push_back(smt::compare(CmpOp::Le, t, smt::constant(0)));
        }
        rejected_by_u.push_back(smt::disj(std::move(fails)));
        accepted_by_u.push_back(smt::conj(std::move(holds)));
    }

    if (semantics == Semantics::Canonical) {
        // (Phi and no u accepts) or (not Phi and some u accepts)
        SExpr missed = smt::conj({phi, smt::conj(rejected_by_u)});
        SExpr spurious = smt::conj({smt::negation(phi), smt::disj(accepted_by_u)});
        script.add_assertion(smt::disj({std::move(missed), std::move(spurious)}));
    } else {
        std::vector<SExpr> per_u;
        for (std::uint64_t u = 0; u < combos; ++u)
            per_u.push_back(smt::disj({smt::conj({phi, rejected_by_u[u]}),
                                       smt::conj({smt::negation(phi), accepted_by_u[u]})}));
        script.add_assertion(smt::conj(std::move(per_u)));
    }
    return script;
}

Valuation decode_valuation(const std::map<std::string, Rational>& model,
                           std::span<const VarDecl> decls)
{
    Valuation y;
    for (const auto& d : decls) {
        auto it = model.find(predicate_symbol(d));
        if (it == model.end())
            throw std::runtime_error("model lacks " + predicate_symbol(d));
        y.push_back(it->second);
    }
    return y;
}

} // namespace linred
