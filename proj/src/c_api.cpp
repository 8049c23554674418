#include "linred/linred.h"

#include "linred/cegis.hpp"
#include "linred/dsl.hpp"
#include "linred/transform.hpp"
#include "linred/verifier.hpp"

#include "json.hpp"

#include <chrono>
#include <sstream>
#include <string>

using namespace linred;
using nlohmann::json;

struct linred_config {
    CegisConfig cegis;
    OracleOptions oracle{Rational(1, 10), 1000, 1, 5'000'000};
    std::string json_text;
};

struct linred_result {
    int status = LINRED_OK;
    std::string json;
    std::string report;
    std::string lp;
    std::string message;
};

namespace {

thread_local std::string last_error;

int fail(const std::string& msg)
{
    last_error = msg;
    return LINRED_USAGE;
}

std::uint64_t parse_count(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    long long n = -1;
    try {
        n = std::stoll(v, &pos);
    } catch (const std::exception&) {
    }
    if (n < 0 || pos != v.size())
        throw std::invalid_argument(key + " expects a non-negative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(n);
}

double parse_seconds(const std::string& v)
{
    std::size_t pos = 0;
    double d = 0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || !(d > 0))
        throw std::invalid_argument("query_timeout_s expects a positive number, got '" + v + "'");
    return d;
}

std::vector<std::string> parse_command(const std::string& v)
{
    std::vector<std::string> argv;
    if (!v.empty() && v.front() == '[') {
        json j = json::parse(v);
        for (const auto& a : j)
            argv.push_back(a.get<std::string>());
    } else {
        std::istringstream is(v);
        for (std::string w; is >> w;)
            argv.push_back(w);
    }
    if (argv.empty())
        throw std::invalid_argument("solver_cmd is empty");
    return argv;
}

void apply(linred_config& cfg, const std::string& key, const std::string& v)
{
    CegisConfig& c = cfg.cegis;
    if (key == "solver_cmd")
        c.solver.argv = parse_command(v);
    else if (key == "query_timeout_s" || key == "timeout")
        c.solver.timeout_s = parse_seconds(v);
    else if (key == "logic_override")
        c.solver.logic_override = v.empty() ? std::nullopt : std::optional<std::string>(v);
    else if (key == "max_l")
        c.max_l = parse_count(key, v);
    else if (key == "max_k")
        c.max_k = parse_count(key, v);
    else if (key == "schedule")
        c.schedule = schedule_from_string(v);
    else if (key == "seed") {
        c.seed = parse_count(key, v);
        cfg.oracle.seed = c.seed;
    } else if (key == "samples")
        c.initial_random = parse_count(key, v);
    else if (key == "iteration_cap")
        c.iteration_cap = parse_count(key, v);
    else if (key == "coeff_bound")
        c.coeff_bound = (v.empty() || v == "off") ? std::nullopt : std::optional(parse_rational(v));
    else if (key == "semantics") {
        if (v == "canonical")
            c.semantics = Semantics::Canonical;
        else if (v == "literal")
            c.semantics = Semantics::Literal;
        else
            throw std::invalid_argument("semantics must be canonical or literal");
    } else if (key == "integer_tier")
        c.integer_tier = (v.empty() || v == "off") ? std::nullopt : std::optional(parse_rational(v));
    else if (key == "counterexample_grids") {
        std::vector<Rational> grids;
        std::string item;
        std::istringstream is(v);
        while (std::getline(is, item, ','))
            if (!item.empty() && item != "off")
                grids.push_back(parse_rational(item));
        c.counterexample_grids = std::move(grids);
    } else if (key == "resolution")
        cfg.oracle.resolution = parse_rational(v);
    else if (key == "random_points")
        cfg.oracle.random_count = parse_count(key, v);
    else if (key == "point_cap")
        cfg.oracle.point_cap = parse_count(key, v);
    else
        throw std::invalid_argument("unknown configuration key '" + key + "'");
}

json config_json(const linred_config& cfg)
{
    const CegisConfig& c = cfg.cegis;
    json grids = json::array();
    for (const auto& g : c.counterexample_grids)
        grids.push_back(to_string(g));
    return {
        {"solver_cmd", c.solver.argv},
        {"query_timeout_s", c.solver.timeout_s},
        {"logic_override", c.solver.logic_override ? json(*c.solver.logic_override) : json(nullptr)},
        {"max_l", c.max_l},
        {"max_k", c.max_k},
        {"schedule", to_string(c.schedule)},
        {"seed", c.seed},
        {"samples", c.initial_random},
        {"iteration_cap", c.iteration_cap},
        {"coeff_bound", c.coeff_bound ? json(to_string(*c.coeff_bound)) : json(nullptr)},
        {"semantics", c.semantics == Semantics::Canonical ? "canonical" : "literal"},
        {"integer_tier", c.integer_tier ? json(to_string(*c.integer_tier)) : json(nullptr)},
        {"counterexample_grids", grids},
        {"resolution", to_string(cfg.oracle.resolution)},
        {"random_points", cfg.oracle.random_count},
        {"point_cap", cfg.oracle.point_cap},
    };
}

std::string dsl_message(const DslError& e)
{
    return std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.detail();
}

int finish(linred_result* res, linred_result** out)
{
    int status = res->status;
    if (status != LINRED_OK)
        last_error = res->message;
    if (out)
        *out = res;
    else
        delete res;
    return status;
}

// Runs `body`, turning exceptions into a usage result.
template <typename F>
int guarded(linred_result** out, F body)
{
    last_error.clear();
    auto* res = new linred_result;
    try {
        body(*res);
    } catch (const DslError& e) {
        res->status = LINRED_USAGE;
        res->message = dsl_message(e);
    } catch (const std::exception& e) {
        res->status = LINRED_USAGE;
        res->message = e.what();
    }
    return finish(res, out);
}

int synthesis_status(const SynthesisOutcome& o)
{
    if (std::holds_alternative<Success>(o))
        return LINRED_OK;
    if (std::holds_alternative<ExhaustedLattice>(o))
        return LINRED_EXHAUSTED;
    return LINRED_UNKNOWN;
}

int verdict_status(const VerificationResult& v)
{
    if (std::holds_alternative<Valid>(v))
        return LINRED_OK;
    if (std::holds_alternative<Refuted>(v))
        return LINRED_REFUTED;
    return LINRED_UNKNOWN;
}

} // namespace

extern "C" {

const char* linred_version(void)
{
    return "0.1.0";
}

const char* linred_last_error(void)
{
    return last_error.c_str();
}

linred_config* linred_config_new(void)
{
    return new linred_config;
}

void linred_config_free(linred_config* cfg)
{
    delete cfg;
}

int linred_config_set(linred_config* cfg, const char* key, const char* value)
{
    if (!cfg || !key || !value)
        return fail("null argument");
    try {
        linred_config next = *cfg;
        apply(next, key, value);
        *cfg = std::move(next);
    } catch (const std::exception& e) {
        return fail(std::string(key) + ": " + e.what());
    }
    return LINRED_OK;
}

int linred_config_load_json(linred_config* cfg, const char* json_text)
{
    if (!cfg || !json_text)
        return fail("null argument");
    try {
        json j = json::parse(json_text);
        if (!j.is_object())
            return fail("configuration must be a JSON object");
        linred_config next = *cfg;
        for (const auto& [key, v] : j.items()) {
            if (v.is_null())
                continue;
            std::string text;
            if (v.is_string())
                text = v.get<std::string>();
            else if (v.is_array() && key == "counterexample_grids") {
                for (const auto& g : v)
                    text += (text.empty() ? "" : ",") + (g.is_string() ? g.get<std::string>() : g.dump());
            } else
                text = v.dump();
            apply(next, key, text);
        }
        *cfg = std::move(next);
    } catch (const std::exception& e) {
        return fail(std::string("configuration: ") + e.what());
    }
    return LINRED_OK;
}

const char* linred_config_json(linred_config* cfg)
{
    if (!cfg)
        return "";
    cfg->json_text = config_json(*cfg).dump();
    return cfg->json_text.c_str();
}

int linred_synth(const linred_config* cfg, const char* predicate_text, linred_result** out)
{
    return guarded(out, [&](linred_result& res) {
        if (!cfg || !predicate_text)
            throw std::invalid_argument("null argument");
        PredicateSpec spec = parse_spec(predicate_text);
        SynthesisRun run = cegis_synthesize(spec, cfg->cegis);
        res.status = synthesis_status(run.outcome);
        res.report = run.report.to_json().dump(2);
        if (const auto* s = std::get_if<Success>(&run.outcome)) {
            res.json = reduction_to_json(s->reduction).dump(2);
            res.message = "reduction found at (" + std::to_string(s->reduction.l) + "," +
                          std::to_string(s->reduction.k) + ") after " + std::to_string(s->iterations) +
                          " iterations";
        } else if (const auto* e = std::get_if<ExhaustedLattice>(&run.outcome)) {
            res.message = "no reduction up to (" + std::to_string(e->max_l) + "," +
                          std::to_string(e->max_k) + ")";
        } else {
            const auto& u = std::get<SolverUnknown>(run.outcome);
            res.message = "solver unknown during " + u.phase + ": " + u.diagnostic;
        }
    });
}

int linred_verify(const linred_config* cfg, const char* predicate_text, const char* reduction_json,
                  int cross, linred_result** out)
{
    return guarded(out, [&](linred_result& res) {
        if (!cfg || !predicate_text || !reduction_json)
            throw std::invalid_argument("null argument");
        PredicateSpec spec = parse_spec(predicate_text);
        json rj;
        try {
            rj = json::parse(reduction_json);
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("reduction JSON: ") + e.what());
        }
        Reduction x = reduction_from_json(rj);
        check_reduction_fits(spec, x);

        VerificationResult verdict;
        json j;
        if (cross) {
            CrossCheckReport report = cross_check(spec, x, cfg->cegis.solver, cfg->oracle);
            j = report.to_json(spec);
            verdict = report.smt;
            if (report.hard_bug)
                verdict = report.oracle.verdict;
        } else {
            auto t0 = std::chrono::steady_clock::now();
            verdict = verify_reduction(spec, x, cfg->cegis.solver, cfg->cegis.semantics);
            j = verification_to_json(verdict, spec);
            j["wall_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        res.status = verdict_status(verdict);
        res.json = j.dump(2);
        if (const auto* r = std::get_if<Refuted>(&verdict))
            res.message = "refuted at " + to_string(r->counterexample) +
                          (r->phi_value ? " (predicate holds, system rejects)"
                                        : " (predicate fails, system accepts)");
        else if (const auto* u = std::get_if<VerificationUnknown>(&verdict))
            res.message = "unknown: " + u->diagnostic;
        else
            res.message = "valid";
    });
}

int linred_linearize(const linred_config* cfg, const char* model_text, linred_result** out)
{
    return guarded(out, [&](linred_result& res) {
        if (!cfg || !model_text)
            throw std::invalid_argument("null argument");
        ModelSpec model = lift_objective(parse_model(model_text));
        try {
            LinearModel lm = linearize_model(model, cfg->cegis);
            res.json = lm.report().dump(2);
            res.lp = emit_lp(lm);
            res.message = std::to_string(lm.rows.size()) + " rows, " + std::to_string(lm.vars.size()) +
                          " variables";
        } catch (const SynthesisFailed& e) {
            res.status = synthesis_status(e.outcome());
            if (res.status == LINRED_OK)
                res.status = LINRED_UNKNOWN;
            res.message = e.what();
            res.report = e.report().to_json().dump(2);
            res.json = json{{"failed_constraint", e.constraint()}, {"text", e.constraint_text()},
                            {"message", e.what()}}
                           .dump(2);
        }
    });
}

int linred_result_status(const linred_result* res)
{
    return res ? res->status : LINRED_USAGE;
}

const char* linred_result_json(const linred_result* res)
{
    return res ? res->json.c_str() : "";
}

const char* linred_result_report(const linred_result* res)
{
    return res ? res->report.c_str() : "";
}

const char* linred_result_lp(const linred_result* res)
{
    return res ? res->lp.c_str() : "";
}

const char* linred_result_message(const linred_result* res)
{
    return res ? res->message.c_str() : "";
}

void linred_result_free(linred_result* res)
{
    delete res;
}

} // extern "C"
