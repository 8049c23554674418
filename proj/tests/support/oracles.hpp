#pragma once

// Independent reference implementations used as test oracles. They share the
// AST with the library but none of its evaluation or arithmetic code: values
// are Boost cpp_rational, converted through decimal strings.

#include "linred/cegis.hpp"
#include "linred/dsl.hpp"
#include "linred/reduction.hpp"
#include "linred/smt.hpp"
#include "linred/transform.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;
using linred::Expr;
using linred::Op;

inline Q big(const linred::Rational& r)
{
    return Q(r.get_str());
}

inline linred::Rational small(const Q& q)
{
    std::ostringstream os;
    os << q;
    linred::Rational r(os.str());
    r.canonicalize();
    return r;
}

inline std::vector<Q> big(const linred::Valuation& y)
{
    std::vector<Q> out;
    for (const auto& v : y)
        out.push_back(big(v));
    return out;
}

// Straight recursive definition of the expression semantics.
inline Q arith(const Expr& e, const std::vector<Q>& y)
{
    switch (e.op) {
    case Op::Const:
        return big(e.value);
    case Op::Var:
        return y.at(e.var);
    case Op::Add: {
        Q s = 0;
        for (const auto& a : e.args)
            s += arith(*a, y);
        return s;
    }
    case Op::Sub:
        return arith(*e.args[0], y) - arith(*e.args[1], y);
    case Op::Neg:
        return -arith(*e.args[0], y);
    case Op::Mul: {
        Q p = 1;
        for (const auto& a : e.args)
            p *= arith(*a, y);
        return p;
    }
    case Op::Max:
    case Op::Min: {
        Q best = arith(*e.args[0], y);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            Q v = arith(*e.args[i], y);
            if (e.op == Op::Max ? v > best : v < best)
                best = v;
        }
        return best;
    }
    case Op::Abs: {
        Q v = arith(*e.args[0], y);
        return v < 0 ? Q(-v) : v;
    }
    default:
        throw std::logic_error("not arithmetic");
    }
}

inline bool truth(const Expr& e, const std::vector<Q>& y)
{
    switch (e.op) {
    case Op::BoolConst:
        return e.truth;
    case Op::Cmp: {
        Q a = arith(*e.args[0], y), b = arith(*e.args[1], y);
        switch (e.cmp) {
        case linred::CmpOp::Le:
            return a <= b;
        case linred::CmpOp::Lt:
            return a < b;
        case linred::CmpOp::Eq:
            return a == b;
        case linred::CmpOp::Ne:
            return a != b;
        case linred::CmpOp::Ge:
            return a >= b;
        case linred::CmpOp::Gt:
            return a > b;
        }
        return false;
    }
    case Op::And:
        for (const auto& a : e.args)
            if (!truth(*a, y))
                return false;
        return true;
    case Op::Or:
        for (const auto& a : e.args)
            if (truth(*a, y))
                return true;
        return false;
    case Op::Not:
        return !truth(*e.args[0], y);
    case Op::Implies:
        return !truth(*e.args[0], y) || truth(*e.args[1], y);
    case Op::Iff:
        return truth(*e.args[0], y) == truth(*e.args[1], y);
    default:
        throw std::logic_error("not Boolean");
    }
}

// Phi(y) <=> exists u: X [y,u,1] <= 0, by enumeration.
inline bool encodes(const linred::Reduction& x, const Expr& phi, const linred::Valuation& yv)
{
    std::vector<Q> y = big(yv);
    bool accepted = false;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << x.k) && !accepted; ++u) {
        bool all = true;
        for (const auto& row : x.rows) {
            Q s = big(row[x.m + x.k]);
            for (std::size_t j = 0; j < x.m; ++j)
                s += big(row[j]) * y[j];
            for (std::size_t t = 0; t < x.k; ++t)
                if (u >> t & 1u)
                    s += big(row[x.m + t]);
            if (s > 0) {
                all = false;
                break;
            }
        }
        accepted = all;
    }
    return accepted == truth(phi, y);
}

/* -------------------------------------------------------------------------- */
/* Generators                                                                 */
/* -------------------------------------------------------------------------- */

inline linred::Rational random_rational(std::mt19937_64& rng, long max_den = 1'000'000,
                                        long max_num = 1'000'000'000)
{
    std::uniform_int_distribution<long> den(1, max_den), num(-max_num, max_num);
    linred::Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

inline linred::Rational random_in(const linred::Domain& d, std::mt19937_64& rng, long max_den = 1'000'000)
{
    if (d.kind != linred::DomainKind::Real) {
        long lo = d.lo.get_num().get_si(), hi = d.hi.get_num().get_si();
        return linred::Rational(std::uniform_int_distribution<long>(lo, hi)(rng));
    }
    std::uniform_int_distribution<long> den(1, max_den);
    long q = den(rng);
    std::uniform_int_distribution<long> p(0, q);
    linred::Rational t(p(rng), q);
    t.canonicalize();
    return d.lo + (d.hi - d.lo) * t;
}

inline linred::Valuation random_point(const std::vector<linred::VarDecl>& decls, std::mt19937_64& rng)
{
    linred::Valuation y;
    for (const auto& d : decls)
        y.push_back(random_in(d.domain, rng));
    return y;
}

// Random well-typed arithmetic expression over n variables.
inline linred::ExprPtr random_arith(std::mt19937_64& rng, std::size_t n, int depth)
{
    using namespace linred;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    auto small_const = [&] {
        Rational r(std::uniform_int_distribution<int>(-20, 20)(rng), std::uniform_int_distribution<int>(1, 6)(rng));
        r.canonicalize();
        return r;
    };
    switch (pick(rng)) {
    case 0:
        return ex::constant(small_const());
    case 1:
        return ex::var(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    case 2:
        return ex::add(random_arith(rng, n, depth - 1), random_arith(rng, n, depth - 1));
    case 3:
        return ex::sub(random_arith(rng, n, depth - 1), random_arith(rng, n, depth - 1));
    case 4:
        return ex::neg(random_arith(rng, n, depth - 1));
    case 5:
        return ex::mul(random_arith(rng, n, depth - 1), random_arith(rng, n, depth - 1));
    case 6:
        return ex::max({random_arith(rng, n, depth - 1), random_arith(rng, n, depth - 1),
                        random_arith(rng, n, depth - 1)});
    case 7:
        return ex::min({random_arith(rng, n, depth - 1), random_arith(rng, n, depth - 1)});
    default:
        return ex::abs(random_arith(rng, n, depth - 1));
    }
}

inline linred::ExprPtr random_bool(std::mt19937_64& rng, std::size_t n, int depth)
{
    using namespace linred;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 6);
    switch (pick(rng)) {
    case 0: {
        auto op = static_cast<CmpOp>(std::uniform_int_distribution<int>(0, 5)(rng));
        return ex::cmp(op, random_arith(rng, n, 2), random_arith(rng, n, 2));
    }
    case 1:
        return ex::land(random_bool(rng, n, depth - 1), random_bool(rng, n, depth - 1));
    case 2:
        return ex::lor(random_bool(rng, n, depth - 1), random_bool(rng, n, depth - 1));
    case 3:
        return ex::lnot(random_bool(rng, n, depth - 1));
    case 4:
        return ex::implies(random_bool(rng, n, depth - 1), random_bool(rng, n, depth - 1));
    case 5:
        return ex::iff(random_bool(rng, n, depth - 1), random_bool(rng, n, depth - 1));
    default:
        return ex::boolean(std::uniform_int_distribution<int>(0, 1)(rng) == 1);
    }
}

inline linred::Reduction random_reduction(std::mt19937_64& rng, std::size_t l, std::size_t k,
                                          std::vector<std::string> vars)
{
    auto x = linred::Reduction::zeros(l, k, std::move(vars));
    std::uniform_int_distribution<int> c(-6, 6);
    for (auto& row : x.rows)
        for (auto& v : row)
            v = c(rng);
    return x;
}

/* -------------------------------------------------------------------------- */
/* Grid enumeration                                                           */
/* -------------------------------------------------------------------------- */

inline std::vector<linred::Rational> axis(const linred::Domain& d, const linred::Rational& step)
{
    std::vector<linred::Rational> pts;
    linred::Rational inc = d.kind == linred::DomainKind::Real ? step : linred::Rational(1);
    for (linred::Rational v = d.lo; v <= d.hi; v += inc)
        pts.push_back(v);
    if (pts.back() != d.hi)
        pts.push_back(d.hi);
    return pts;
}

// Calls f(point) for every grid point, last coordinate fastest.
template <typename F>
void for_each_point(const std::vector<linred::Domain>& doms, const linred::Rational& step, F f)
{
    std::vector<std::vector<linred::Rational>> axes;
    for (const auto& d : doms)
        axes.push_back(axis(d, step));
    linred::Valuation y(doms.size());
    std::vector<std::size_t> idx(doms.size(), 0);
    for (;;) {
        for (std::size_t j = 0; j < doms.size(); ++j)
            y[j] = axes[j][idx[j]];
        f(y);
        std::size_t j = doms.size();
        for (; j-- > 0;) {
            if (++idx[j] < axes[j].size())
                break;
            idx[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1))
            return;
    }
}

struct Optimum {
    Q value;
    linred::Valuation point;
};

// Best objective over grid points satisfying every constraint.
inline std::optional<Optimum> grid_optimum(const linred::ModelSpec& model, const linred::Rational& step)
{
    std::vector<linred::Domain> doms;
    for (const auto& d : model.decls)
        doms.push_back(d.domain);
    std::optional<Optimum> best;
    for_each_point(doms, step, [&](const linred::Valuation& y) {
        auto yq = big(y);
        for (const auto& c : model.constraints)
            if (!truth(*c, yq))
                return;
        Q v = arith(*model.objective, yq);
        bool better = !best || (model.sense == linred::Sense::Minimize ? v < best->value : v > best->value);
        if (better)
            best = Optimum{v, y};
    });
    return best;
}

inline bool row_holds(const linred::LinearRow& r, const std::vector<Q>& v)
{
    Q s = big(r.constant);
    for (const auto& [i, c] : r.coeffs)
        s += big(c) * v.at(i);
    return s <= 0;
}

inline Q linear_objective(const linred::LinearModel& lm, const std::vector<Q>& v)
{
    Q s = big(lm.objective_constant);
    for (const auto& [i, c] : lm.objective)
        s += big(c) * v.at(i);
    return s;
}

inline std::optional<Optimum> grid_optimum(const linred::LinearModel& lm, const linred::Rational& step)
{
    std::vector<linred::Domain> doms;
    for (const auto& v : lm.vars)
        doms.push_back(v.domain);
    std::optional<Optimum> best;
    for_each_point(doms, step, [&](const linred::Valuation& y) {
        auto v = big(y);
        for (const auto& r : lm.rows)
            if (!row_holds(r, v))
                return;
        Q val = linear_objective(lm, v);
        bool better = !best || (lm.sense == linred::Sense::Minimize ? val < best->value : val > best->value);
        if (better)
            best = Optimum{val, y};
    });
    return best;
}

/* -------------------------------------------------------------------------- */
/* Run report replay                                                          */
/* -------------------------------------------------------------------------- */

// Re-checks the loop invariants from a run report alone. Returns one message
// per violation; empty means the run is consistent.
inline std::vector<std::string> replay_report(const nlohmann::json& report, const linred::PredicateSpec& spec)
{
    std::vector<std::string> bad;
    std::set<linred::Valuation> seen;
    std::vector<linred::Valuation> samples;
    for (const auto& s : report.at("initial_samples")) {
        auto y = linred::valuation_from_json(s.at("point"));
        if (s.at("phi").get<bool>() != truth(*spec.predicate, big(y)))
            bad.push_back("initial sample tagged wrongly");
        if (seen.insert(y).second)
            samples.push_back(y);
    }
    std::vector<std::string> names = report.at("variables");
    for (const auto& cell : report.at("cells")) {
        std::size_t l = cell.at("l"), k = cell.at("k");
        for (const auto& it : cell.at("iterations")) {
            if (it.at("candidate").is_null())
                continue;
            nlohmann::json rj = {{"l", l}, {"k", k}, {"m", names.size()}, {"variables", names},
                                 {"rows", it.at("candidate")}};
            auto x = linred::reduction_from_json(rj);
            for (const auto& y : samples)
                if (!encodes(x, *spec.predicate, y))
                    bad.push_back("candidate disagrees with a sample already in S");
            if (it.at("counterexample").is_null())
                continue;
            auto y = linred::valuation_from_json(it.at("counterexample"));
            if (encodes(x, *spec.predicate, y))
                bad.push_back("counterexample does not falsify its candidate");
            if (!seen.insert(y).second)
                bad.push_back("counterexample already in S");
            if (it.at("counterexample_phi").get<bool>() != truth(*spec.predicate, big(y)))
                bad.push_back("counterexample tagged wrongly");
            samples.push_back(y);
        }
    }
    return bad;
}

/* -------------------------------------------------------------------------- */
/* Environment                                                                */
/* -------------------------------------------------------------------------- */

inline std::string fixture_path(const std::string& name)
{
    return std::string(LINRED_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name)
{
    std::ifstream in(fixture_path(name));
    if (!in)
        throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline linred::smt::SolverConfig solver()
{
    linred::smt::SolverConfig c;
    c.argv = {LINRED_Z3, "-in"};
    c.timeout_s = 120;
    return c;
}

inline linred::CegisConfig cegis(std::size_t max_l, std::size_t max_k)
{
    linred::CegisConfig c;
    c.max_l = max_l;
    c.max_k = max_k;
    c.solver = solver();
    return c;
}

} // namespace oracle
