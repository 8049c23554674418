#pragma once

#include "linred/cegis.hpp"
#include "linred/dsl.hpp"
#include "linred/reduction.hpp"
#include "linred/smt.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace linred {

struct Valid {};

struct Refuted {
    Valuation counterexample;
    bool phi_value = false;
};

struct VerificationUnknown {
    std::string diagnostic;
};

using VerificationResult = std::variant<Valid, Refuted, VerificationUnknown>;

std::string verdict_name(const VerificationResult& r);

// Throws DimensionMismatch if the reduction does not fit the declarations.
void check_reduction_fits(const PredicateSpec& spec, const Reduction& x);

// Exact verification through the refutation query.
VerificationResult verify_reduction(const PredicateSpec& spec, const Reduction& x,
                                    const smt::SolverConfig& solver,
                                    Semantics semantics = Semantics::Canonical);

class BudgetExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    Rational resolution{1, 10};
    std::size_t random_count = 0;
    std::uint64_t seed = 1;
    std::uint64_t point_cap = 5'000'000;
};

struct OracleResult {
    VerificationResult verdict;
    std::uint64_t points_tested = 0;
    bool exhaustive = false; // every domain finite and fully enumerated
};

// Independent brute-force check of `encodes`. On finite domains this is an
// exact decision; on real domains Valid only means no witness was found on
// the grid and the random points. The first failing grid point in
// lexicographic order is reported.
OracleResult brute_force_verify(const PredicateSpec& spec, const Reduction& x,
                                const OracleOptions& options);

struct CrossCheckReport {
    VerificationResult smt;
    OracleResult oracle;
    bool agree = false;
    bool hard_bug = false;          // SMT Valid but the oracle found a witness
    bool oracle_incomplete = false; // SMT Refuted but the oracle missed it
    double smt_s = 0;
    double oracle_s = 0;

    nlohmann::json to_json(const PredicateSpec& spec) const;
};

CrossCheckReport cross_check(const PredicateSpec& spec, const Reduction& x,
                             const smt::SolverConfig& solver, const OracleOptions& options);

nlohmann::json verification_to_json(const VerificationResult& r, const PredicateSpec& spec);

} // namespace linred
