#pragma once

#include "linred/cegis.hpp"
#include "linred/dsl.hpp"
#include "linred/reduction.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace linred {

// Replaces a non-affine objective by a fresh variable z bounded by interval
// arithmetic, adding the constraint z = objective. z is an integer variable
// when the objective can only take integer values. Affine objectives pass
// through unchanged.
ModelSpec lift_objective(const ModelSpec& model);

enum class VarOrigin { User, Objective, Auxiliary };

struct LinearVar {
    std::string name;
    Domain domain;
    VarOrigin origin = VarOrigin::User;
};

// sum(coeffs[i] * var[i]) + constant <= 0
struct LinearRow {
    std::string name;
    std::map<std::size_t, Rational> coeffs;
    Rational constant;
};

struct ConstraintProvenance {
    std::size_t index = 0;
    std::string text;
    std::string kind; // "affine" or "reduction"
    std::vector<std::string> rows;
    std::vector<std::string> aux;
    std::optional<Reduction> reduction;
    std::vector<std::string> reduction_vars;
    bool cached = false;
    std::optional<RunReport> synthesis;
};

struct LinearModel {
    Sense sense = Sense::Minimize;
    std::map<std::size_t, Rational> objective;
    Rational objective_constant;
    std::vector<LinearVar> vars;
    std::vector<LinearRow> rows;
    std::vector<ConstraintProvenance> provenance;

    std::size_t find_var(const std::string& name) const; // npos if absent
    nlohmann::json report() const;
};

class SynthesisFailed : public std::runtime_error {
public:
    SynthesisFailed(std::size_t constraint, std::string text, SynthesisOutcome outcome,
                    RunReport report);
    std::size_t constraint() const { return d_constraint; }
    const std::string& constraint_text() const { return d_text; }
    const SynthesisOutcome& outcome() const { return d_outcome; }
    const RunReport& report() const { return d_report; }

private:
    std::size_t d_constraint;
    std::string d_text;
    SynthesisOutcome d_outcome;
    RunReport d_report;
};

// Synthesized reductions keyed by predicate shape and domain box.
class ReductionCache {
public:
    std::optional<Reduction> find(const std::string& key) const;
    void store(const std::string& key, const Reduction& x) { d_entries[key] = x; }
    std::size_t size() const { return d_entries.size(); }

private:
    std::map<std::string, Reduction> d_entries;
};

// Canonical key: the predicate over positional names plus the domain boxes.
std::string reduction_cache_key(const PredicateSpec& local);

// Precondition: the objective is affine (see lift_objective).
LinearModel linearize_model(const ModelSpec& model, const CegisConfig& config,
                            ReductionCache* cache = nullptr);

// CPLEX LP text.
std::string emit_lp(const LinearModel& model);

} // namespace linred
