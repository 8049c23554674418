#pragma once

#include "linred/dsl.hpp"
#include "linred/reduction.hpp"
#include "linred/smt.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace linred {

enum class Schedule { MinSize, Diagonal };

// Canonical: Phi(y) <=> exists u. X[y,u,1] <= 0. Literal: a per-u
// biconditional; kept for study only, termination is not guaranteed.
enum class Semantics { Canonical, Literal };

struct CegisConfig {
    std::size_t max_l = 6;
    std::size_t max_k = 2;
    std::size_t initial_random = 4;
    std::uint64_t seed = 1;
    Schedule schedule = Schedule::MinSize;
    std::size_t iteration_cap = 200;
    std::optional<Rational> coeff_bound;
    Semantics semantics = Semantics::Canonical;
    // Counterexamples on real variables are looked for on these lattices
    // first, coarsest first, before the unrestricted query.
    std::vector<Rational> counterexample_grids{Rational(1), Rational(1, 4)};
    // Candidates are first sought among integer matrices with entries bounded by
    // this; the unrestricted query runs once that tier is unsat for the cell.
    std::optional<Rational> integer_tier = Rational(8);
    smt::SolverConfig solver;

    // Throws std::invalid_argument.
    void validate() const;
};

struct Cell {
    std::size_t l = 1;
    std::size_t k = 0;
    bool operator==(const Cell&) const = default;
};

std::optional<Cell> next_cell(Cell current, const CegisConfig& config);

std::string to_string(Schedule s);
Schedule schedule_from_string(const std::string& s);

/* -------------------------------------------------------------------------- */
/* Encodings                                                                  */
/* -------------------------------------------------------------------------- */

struct FindingOptions {
    std::optional<Rational> coeff_bound;
    // Integer coefficients with |x| <= bound. Unsat here proves nothing about the cell.
    std::optional<Rational> integer_bound;
    Semantics semantics = Semantics::Canonical;
    // Row order and auxiliary relabeling constraints; preserve satisfiability.
    bool break_symmetry = true;
};

// Matrix entry symbol names used by the finding script.
std::string coefficient_symbol(std::size_t row, std::size_t col);
std::string predicate_symbol(const VarDecl& decl);

// Binds each declared variable to its SMT symbol.
std::vector<smt::Term> predicate_symbols(std::span<const VarDecl> decls);

smt::Term translate_arith(const Expr& e, std::span<const smt::Term> vars,
                          std::span<const VarDecl> decls);
smt::SExpr translate_predicate(const Expr& phi, std::span<const smt::Term> vars,
                               std::span<const VarDecl> decls);

// Finding query: X consistent with every sample. Linear in X.
smt::Script encode_reduction_finding(const SampleSet& samples, std::size_t m, std::size_t l,
                                     std::size_t k, const FindingOptions& options = {});

Reduction decode_reduction(const std::map<std::string, Rational>& model, std::size_t l,
                           std::size_t k, std::vector<std::string> variables);

// Refutation query: y in the box on which X and Phi disagree. With `grid`, real
// variables are further restricted to lo + grid * n for integer n.
smt::Script encode_refutation(const PredicateSpec& spec, const Reduction& x,
                              Semantics semantics = Semantics::Canonical,
                              std::optional<Rational> grid = std::nullopt);

Valuation decode_valuation(const std::map<std::string, Rational>& model,
                           std::span<const VarDecl> decls);

/* -------------------------------------------------------------------------- */
/* Synthesis                                                                  */
/* -------------------------------------------------------------------------- */

SampleSet initial_samples(const PredicateSpec& spec, const CegisConfig& config);

struct Success {
    Reduction reduction;
    std::size_t iterations = 0;
    SampleSet samples;
};

struct ExhaustedLattice {
    std::size_t max_l = 0;
    std::size_t max_k = 0;
};

struct SolverUnknown {
    std::string phase;
    std::string diagnostic;
};

using SynthesisOutcome = std::variant<Success, ExhaustedLattice, SolverUnknown>;

struct IterationRecord {
    std::optional<Reduction> candidate;
    std::optional<Valuation> counterexample;
    bool counterexample_phi = false;
    double find_s = 0;
    double refute_s = 0;
};

struct CellRecord {
    Cell cell;
    std::string result; // "unsat", "success", "unknown", "iteration-cap"
    std::vector<IterationRecord> iterations;
};

struct RunReport {
    std::uint64_t seed = 0;
    std::string schedule;
    std::vector<std::string> variables;
    std::vector<Sample> initial_samples;
    std::vector<CellRecord> cells;
    std::string outcome;
    std::size_t solver_queries = 0;
    double wall_s = 0;

    // Timing fields all end in "_s".
    nlohmann::json to_json() const;
};

struct SynthesisRun {
    SynthesisOutcome outcome;
    RunReport report;
};

SynthesisRun cegis_synthesize(const PredicateSpec& spec, const CegisConfig& config);

} // namespace linred
