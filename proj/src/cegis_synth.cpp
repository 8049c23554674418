#include "linred/cegis.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace linred {

void CegisConfig::validate() const
{
    if (max_l < 1)
        throw std::invalid_argument("max_l must be at least 1");
    if (max_k > 20)
        throw std::invalid_argument("max_k must be at most 20");
    if (iteration_cap < 1)
        throw std::invalid_argument("iteration_cap must be at least 1");
    for (const auto& g : counterexample_grids)
        if (g <= 0)
            throw std::invalid_argument("counterexample grid steps must be positive");
    if (integer_tier && *integer_tier < 1)
        throw std::invalid_argument("integer tier bound must be at least 1");
    if (coeff_bound && *coeff_bound <= 0)
        throw std::invalid_argument("coeff_bound must be positive");
    if (solver.argv.empty())
        throw std::invalid_argument("solver command is empty");
    if (!(solver.timeout_s > 0))
        throw std::invalid_argument("query timeout must be positive");
}

std::string to_string(Schedule s)
{
    return s == Schedule::MinSize ? "min-size" : "diagonal";
}

Schedule schedule_from_string(const std::string& s)
{
    if (s == "min-size")
        return Schedule::MinSize;
    if (s == "diagonal")
        return Schedule::Diagonal;
    throw std::invalid_argument("unknown schedule '" + s + "' (expected min-size or diagonal)");
}

std::optional<Cell> next_cell(Cell c, const CegisConfig& config)
{
    const std::size_t L = config.max_l, K = config.max_k;
    if (config.schedule == Schedule::Diagonal) {
        Cell n{c.l + 1, c.k + 1};
        if (n.l > L && n.k > K)
            return std::nullopt;
        n.l = std::min(n.l, L);
        n.k = std::min(n.k, K);
        return n;
    }

    // Cells ordered by l + k, ties broken by smaller k.
    std::size_t size = c.l + c.k;
    std::size_t k = c.k + 1;
    while (size <= L + K) {
        for (; k <= K && k < size; ++k) {
            std::size_t l = size - k;
            if (l >= 1 && l <= L)
                return Cell{l, k};
        }
        ++size;
        k = 0;
    }
    return std::nullopt;
}

/* -------------------------------------------------------------------------- */
/* Initial samples                                                            */
/* -------------------------------------------------------------------------- */

namespace {

Rational random_in(const Domain& d, std::mt19937_64& rng)
{
    if (d.lo == d.hi)
        return d.lo;
    if (d.kind == DomainKind::Real) {
        // Interior point lo + (hi - lo) * r / 1000 with r in [1, 999].
        std::uniform_int_distribution<int> dist(1, 999);
        Rational t(dist(rng), 1000);
        t.canonicalize();
        return d.lo + (d.hi - d.lo) * t;
    }
    mpz_class span = d.hi.get_num() - d.lo.get_num();
    std::uint64_t limit = span.fits_ulong_p() ? span.get_ui() : ~std::uint64_t{0};
    std::uniform_int_distribution<std::uint64_t> dist(0, limit);
    return d.lo + Rational(mpz_class(std::to_string(dist(rng))));
}

} // namespace

SampleSet initial_samples(const PredicateSpec& spec, const CegisConfig& config)
{
    const auto& decls = spec.decls;
    const std::size_t m = decls.size();
    SampleSet out;

    std::uint64_t corners = m >= 6 ? 64 : (std::uint64_t{1} << m);
    for (std::uint64_t mask = 0; mask < corners; ++mask) {
        Valuation y;
        for (std::size_t j = 0; j < m; ++j)
            y.push_back((mask >> j & 1u) ? decls[j].domain.hi : decls[j].domain.lo);
        bool phi = eval_predicate(*spec.predicate, y);
        out.insert(std::move(y), phi);
    }

    std::mt19937_64 rng(config.seed);
    for (std::size_t i = 0; i < config.initial_random; ++i) {
        Valuation y;
        for (const auto& d : decls)
            y.push_back(random_in(d.domain, rng));
        bool phi = eval_predicate(*spec.predicate, y);
        out.insert(std::move(y), phi);
    }
    return out;
}

/* -------------------------------------------------------------------------- */
/* CEGIS loop                                                                 */
/* -------------------------------------------------------------------------- */

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> names_of(const std::vector<VarDecl>& decls)
{
    std::vector<std::string> out;
    for (const auto& d : decls)
        out.push_back(d.name);
    return out;
}

} // namespace

SynthesisRun cegis_synthesize(const PredicateSpec& spec, const CegisConfig& config)
{
    config.validate();
    const auto t_start = Clock::now();
    const std::size_t m = spec.decls.size();
    const auto names = names_of(spec.decls);

    SynthesisRun run;
    RunReport& report = run.report;
    report.seed = config.seed;
    report.schedule = to_string(config.schedule);
    report.variables = names;

    SampleSet samples = initial_samples(spec, config);
    report.initial_samples = samples.entries();

    FindingOptions finding{config.coeff_bound, std::nullopt, config.semantics};
    const bool has_real = std::any_of(spec.decls.begin(), spec.decls.end(), [](const VarDecl& d) {
        return d.domain.kind == DomainKind::Real;
    });
    std::size_t total_iterations = 0;

    auto finish = [&](SynthesisOutcome outcome, std::string label) {
        report.outcome = std::move(label);
        report.wall_s = seconds_since(t_start);
        run.outcome = std::move(outcome);
        return std::move(run);
    };

    std::optional<Cell> cell = Cell{1, 0};
    if (cell->l > config.max_l || cell->k > config.max_k)
        cell = next_cell(*cell, config);

    while (cell) {
        report.cells.push_back(CellRecord{*cell, "", {}});
        CellRecord& record = report.cells.back();

        bool advance = false;
        bool integer_tier_open = config.integer_tier.has_value();
        while (!advance) {
            if (record.iterations.size() >= config.iteration_cap) {
                record.result = "iteration-cap";
                return finish(SolverUnknown{"iteration-cap",
                                            "cell (" + std::to_string(cell->l) + "," +
                                                std::to_string(cell->k) + ") exceeded " +
                                                std::to_string(config.iteration_cap) +
                                                " iterations"},
                              "solver-unknown");
            }

            IterationRecord it;
            auto t0 = Clock::now();
            smt::Verdict f1 = smt::Unsat{};
            if (integer_tier_open) {
                FindingOptions tier = finding;
                tier.integer_bound = config.integer_tier;
                f1 = smt::run_solver(encode_reduction_finding(samples, m, cell->l, cell->k, tier),
                                     config.solver);
                ++report.solver_queries;
                // S only grows, so the tier stays unsat for the rest of the cell.
                integer_tier_open = std::holds_alternative<smt::Sat>(f1);
            }
            if (!std::holds_alternative<smt::Sat>(f1)) {
                f1 = smt::run_solver(encode_reduction_finding(samples, m, cell->l, cell->k, finding),
                                     config.solver);
                ++report.solver_queries;
            }
            it.find_s = seconds_since(t0);

            if (std::holds_alternative<smt::Unsat>(f1)) {
                // No (l,k) reduction agrees with S, hence none agrees with the full box.
                record.iterations.push_back(std::move(it));
                record.result = "unsat";
                advance = true;
                continue;
            }
            if (!std::holds_alternative<smt::Sat>(f1)) {
                record.iterations.push_back(std::move(it));
                record.result = "unknown";
                return finish(SolverUnknown{"reduction-finding", smt::describe(f1)},
                              "solver-unknown");
            }

            Reduction x = normalize_rows(
                decode_reduction(std::get<smt::Sat>(f1).model, cell->l, cell->k, names));
            it.candidate = x;

            if (config.semantics == Semantics::Canonical) {
                for (const auto& s : samples.entries()) {
                    if (!encodes(x, *spec.predicate, s.point)) {
                        record.iterations.push_back(std::move(it));
                        record.result = "unknown";
                        return finish(SolverUnknown{"reduction-finding",
                                                    "candidate disagrees with sample " +
                                                        to_string(s.point)},
                                      "solver-unknown");
                    }
                }
            }

            t0 = Clock::now();
            smt::Verdict f2 = smt::Unsat{};
            if (has_real) {
                // Lattice counterexamples first: keeps S on a finite set while candidates are
                // wrong at coarse points, instead of chasing ever closer real boundaries.
                for (const auto& step : config.counterexample_grids) {
                    f2 = smt::run_solver(encode_refutation(spec, x, config.semantics, step),
                                         config.solver);
                    ++report.solver_queries;
                    if (std::holds_alternative<smt::Sat>(f2))
                        break;
                }
            }
            if (!std::holds_alternative<smt::Sat>(f2)) {
                f2 = smt::run_solver(encode_refutation(spec, x, config.semantics), config.solver);
                ++report.solver_queries;
            }
            it.refute_s = seconds_since(t0);
            ++total_iterations;

            if (std::holds_alternative<smt::Unsat>(f2)) {
                record.iterations.push_back(std::move(it));
                record.result = "success";
                return finish(Success{std::move(x), total_iterations, std::move(samples)}, "success");
            }
            if (!std::holds_alternative<smt::Sat>(f2)) {
                record.iterations.push_back(std::move(it));
                record.result = "unknown";
                return finish(SolverUnknown{"refutation", smt::describe(f2)}, "solver-unknown");
            }

            Valuation y = decode_valuation(std::get<smt::Sat>(f2).model, spec.decls);
            bool phi = eval_predicate(*spec.predicate, y);
            it.counterexample = y;
            it.counterexample_phi = phi;
            record.iterations.push_back(std::move(it));

            if (config.semantics == Semantics::Canonical && encodes(x, *spec.predicate, y)) {
                record.result = "unknown";
                return finish(SolverUnknown{"refutation", "solver witness " + to_string(y) +
                                                              " does not refute the candidate"},
                              "solver-unknown");
            }
            if (!samples.insert(y, phi)) {
                record.result = "unknown";
                return finish(SolverUnknown{"refutation", "counterexample " + to_string(y) +
                                                              " is already in the sample set"},
                              "solver-unknown");
            }
        }
        cell = next_cell(*cell, config);
    }
    return finish(ExhaustedLattice{config.max_l, config.max_k}, "exhausted");
}

/* -------------------------------------------------------------------------- */
/* Report                                                                     */
/* -------------------------------------------------------------------------- */

nlohmann::json RunReport::to_json() const
{
    using nlohmann::json;
    json samples = json::array();
    for (const auto& s : initial_samples)
        samples.push_back({{"point", valuation_to_json(s.point)}, {"phi", s.phi}});

    json cell_list = json::array();
    std::size_t iterations = 0;
    for (const auto& c : cells) {
        json its = json::array();
        for (const auto& it : c.iterations) {
            json j = {{"find_s", it.find_s}, {"refute_s", it.refute_s}};
            j["candidate"] = it.candidate ? reduction_to_json(*it.candidate)["rows"] : json(nullptr);
            if (it.counterexample) {
                j["counterexample"] = valuation_to_json(*it.counterexample);
                j["counterexample_phi"] = it.counterexample_phi;
            } else {
                j["counterexample"] = nullptr;
            }
            its.push_back(std::move(j));
            if (it.candidate)
                ++iterations;
        }
        cell_list.push_back({{"l", c.cell.l}, {"k", c.cell.k}, {"result", c.result},
                             {"iterations", std::move(its)}});
    }

    return {
        {"seed", seed},
        {"schedule", schedule},
        {"variables", variables},
        {"initial_samples", std::move(samples)},
        {"cells", std::move(cell_list)},
        {"outcome", outcome},
        {"iterations", iterations},
        {"solver_queries", solver_queries},
        {"wall_s", wall_s},
    };
}

} // namespace linred
