#include "linred/verifier.hpp"

#include <chrono>
#include <random>

namespace linred {

std::string verdict_name(const VerificationResult& r)
{
    if (std::holds_alternative<Valid>(r))
        return "valid";
    if (std::holds_alternative<Refuted>(r))
        return "refuted";
    return "unknown";
}

void check_reduction_fits(const PredicateSpec& spec, const Reduction& x)
{
    x.validate();
    if (x.m != spec.decls.size())
        throw DimensionMismatch("reduction has m = " + std::to_string(x.m) +
                                " but the predicate declares " + std::to_string(spec.decls.size()) +
                                " variables");
    for (std::size_t j = 0; j < x.m; ++j)
        if (x.variables[j] != spec.decls[j].name)
            throw DimensionMismatch("reduction column " + std::to_string(j) + " is '" +
                                    x.variables[j] + "' but the predicate declares '" +
                                    spec.decls[j].name + "' there");
}

VerificationResult verify_reduction(const PredicateSpec& spec, const Reduction& x,
                                    const smt::SolverConfig& solver, Semantics semantics)
{
    check_reduction_fits(spec, x);
    auto verdict = smt::run_solver(encode_refutation(spec, x, semantics), solver);
    if (std::holds_alternative<smt::Unsat>(verdict))
        return Valid{};
    if (!std::holds_alternative<smt::Sat>(verdict))
        return VerificationUnknown{smt::describe(verdict)};

    Valuation y;
    try {
        y = decode_valuation(std::get<smt::Sat>(verdict).model, spec.decls);
        check_valuation(spec.decls, y);
    } catch (const std::exception& e) {
        return VerificationUnknown{std::string("unusable solver witness: ") + e.what()};
    }
    if (semantics == Semantics::Canonical && encodes(x, *spec.predicate, y))
        return VerificationUnknown{"solver witness " + to_string(y) +
                                   " does not falsify the reduction under exact evaluation"};
    return Refuted{y, eval_predicate(*spec.predicate, y)};
}

/* -------------------------------------------------------------------------- */
/* Brute-force oracle                                                         */
/* -------------------------------------------------------------------------- */

namespace {

std::vector<Rational> axis_points(const Domain& d, const Rational& resolution)
{
    std::vector<Rational> pts;
    if (d.kind == DomainKind::Real) {
        for (Rational v = d.lo; v <= d.hi; v += resolution)
            pts.push_back(v);
        if (pts.back() != d.hi)
            pts.push_back(d.hi);
    } else {
        for (Rational v = d.lo; v <= d.hi; v += 1)
            pts.push_back(v);
    }
    return pts;
}

Rational random_point(const Domain& d, std::mt19937_64& rng)
{
    if (d.kind == DomainKind::Real) {
        std::uniform_int_distribution<long> dist(0, 1'000'000);
        Rational t(dist(rng), 1'000'000);
        t.canonicalize();
        return d.lo + (d.hi - d.lo) * t;
    }
    mpz_class span = d.hi.get_num() - d.lo.get_num();
    std::uint64_t limit = span.fits_ulong_p() ? span.get_ui() : ~std::uint64_t{0};
    std::uniform_int_distribution<std::uint64_t> dist(0, limit);
    return d.lo + Rational(mpz_class(std::to_string(dist(rng))));
}

} // namespace

OracleResult brute_force_verify(const PredicateSpec& spec, const Reduction& x,
                                const OracleOptions& options)
{
    check_reduction_fits(spec, x);
    if (options.resolution <= 0)
        throw std::invalid_argument("resolution must be positive");

    const auto& decls = spec.decls;
    OracleResult result;
    result.verdict = Valid{};
    result.exhaustive =
        std::all_of(decls.begin(), decls.end(), [](const VarDecl& d) { return d.domain.is_finite(); });

    // Size check before materializing any axis.
    mpz_class total = 1;
    for (const auto& d : decls) {
        Rational width = d.domain.hi - d.domain.lo;
        mpz_class n = d.domain.kind == DomainKind::Real ? mpz_class(floor_of(width / options.resolution) + 2)
                                                        : mpz_class(width.get_num() + 1);
        total *= n;
        if (total > options.point_cap)
            throw BudgetExceeded("enumeration exceeds the point cap of " +
                                 std::to_string(options.point_cap));
    }

    std::vector<std::vector<Rational>> axes;
    for (const auto& d : decls)
        axes.push_back(axis_points(d.domain, options.resolution));

    Valuation y(decls.size());
    std::vector<std::size_t> idx(decls.size(), 0);
    bool done = false;
    while (!done) {
        for (std::size_t j = 0; j < decls.size(); ++j)
            y[j] = axes[j][idx[j]];
        ++result.points_tested;
        if (!encodes(x, *spec.predicate, y)) {
            result.verdict = Refuted{y, eval_predicate(*spec.predicate, y)};
            return result;
        }
        // Odometer in lexicographic order, last variable fastest.
        done = true;
        for (std::size_t j = decls.size(); j-- > 0;) {
            if (++idx[j] < axes[j].size()) {
                done = false;
                break;
            }
            idx[j] = 0;
        }
    }

    if (result.exhaustive)
        return result;

    std::mt19937_64 rng(options.seed);
    for (std::size_t i = 0; i < options.random_count; ++i) {
        for (std::size_t j = 0; j < decls.size(); ++j)
            y[j] = random_point(decls[j].domain, rng);
        ++result.points_tested;
        if (!encodes(x, *spec.predicate, y)) {
            result.verdict = Refuted{y, eval_predicate(*spec.predicate, y)};
            return result;
        }
    }
    return result;
}

/* -------------------------------------------------------------------------- */
/* Cross check                                                                */
/* -------------------------------------------------------------------------- */

CrossCheckReport cross_check(const PredicateSpec& spec, const Reduction& x,
                             const smt::SolverConfig& solver, const OracleOptions& options)
{
    using Clock = std::chrono::steady_clock;
    CrossCheckReport report;

    auto t0 = Clock::now();
    report.smt = verify_reduction(spec, x, solver);
    report.smt_s = std::chrono::duration<double>(Clock::now() - t0).count();

    t0 = Clock::now();
    report.oracle = brute_force_verify(spec, x, options);
    report.oracle_s = std::chrono::duration<double>(Clock::now() - t0).count();

    bool smt_valid = std::holds_alternative<Valid>(report.smt);
    bool smt_refuted = std::holds_alternative<Refuted>(report.smt);
    bool oracle_valid = std::holds_alternative<Valid>(report.oracle.verdict);
    report.agree = verdict_name(report.smt) == verdict_name(report.oracle.verdict);
    report.hard_bug = smt_valid && !oracle_valid;
    report.oracle_incomplete = smt_refuted && oracle_valid;
    return report;
}

nlohmann::json verification_to_json(const VerificationResult& r, const PredicateSpec& spec)
{
    nlohmann::json j = {{"verdict", verdict_name(r)}};
    if (const auto* ref = std::get_if<Refuted>(&r)) {
        nlohmann::json w = nlohmann::json::object();
        for (std::size_t i = 0; i < spec.decls.size(); ++i)
            w[spec.decls[i].name] = to_string(ref->counterexample[i]);
        j["witness"] = w;
        j["witness_point"] = valuation_to_json(ref->counterexample);
        j["phi"] = ref->phi_value;
    } else if (const auto* u = std::get_if<VerificationUnknown>(&r)) {
        j["diagnostic"] = u->diagnostic;
    }
    return j;
}

nlohmann::json CrossCheckReport::to_json(const PredicateSpec& spec) const
{
    nlohmann::json oj = verification_to_json(oracle.verdict, spec);
    oj["points_tested"] = oracle.points_tested;
    oj["exhaustive"] = oracle.exhaustive;
    oj["wall_s"] = oracle_s;
    nlohmann::json sj = verification_to_json(smt, spec);
    sj["wall_s"] = smt_s;
    nlohmann::json j = {{"smt", sj},
                        {"oracle", oj},
                        {"agree", agree},
                        {"hard_bug", hard_bug},
                        {"oracle_incomplete", oracle_incomplete}};
    if (hard_bug)
        j["note"] = "hard bug: SMT reports valid but the oracle found a counterexample";
    else if (oracle_incomplete)
        j["note"] = "oracle incomplete: the SMT witness lies off the sampled points";
    return j;
}

} // namespace linred
