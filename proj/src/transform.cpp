#include "linred/transform.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace linred {

namespace {

bool name_taken(const std::vector<VarDecl>& decls, const std::string& name)
{
    for (const auto& d : decls)
        if (d.name == name)
            return true;
    return false;
}

std::string fresh_name(const std::vector<VarDecl>& decls, const std::string& base)
{
    if (!name_taken(decls, base))
        return base;
    for (std::size_t i = 1;; ++i) {
        std::string n = base + "_" + std::to_string(i);
        if (!name_taken(decls, n))
            return n;
    }
}

// True when e takes only integer values on the declared boxes: integer
// constants and integer-domain variables under + - * neg max min abs.
bool integral_valued(const Expr& e, const std::vector<VarDecl>& decls)
{
    if (e.op == Op::Const)
        return is_integer(e.value);
    if (e.op == Op::Var)
        return decls[e.var].domain.kind != DomainKind::Real;
    for (const auto& a : e.args)
        if (!integral_valued(*a, decls))
            return false;
    return true;
}

const char* kind_name(DomainKind k)
{
    switch (k) {
    case DomainKind::Real:
        return "real";
    case DomainKind::Int:
        return "int";
    case DomainKind::Binary:
        return "binary";
    }
    return "?";
}

const char* origin_name(VarOrigin o)
{
    switch (o) {
    case VarOrigin::User:
        return "user";
    case VarOrigin::Objective:
        return "objective";
    case VarOrigin::Auxiliary:
        return "auxiliary";
    }
    return "?";
}

std::string describe_outcome(const SynthesisOutcome& o)
{
    if (const auto* e = std::get_if<ExhaustedLattice>(&o))
        return "no reduction up to (" + std::to_string(e->max_l) + "," + std::to_string(e->max_k) + ")";
    if (const auto* u = std::get_if<SolverUnknown>(&o))
        return "solver unknown in " + u->phase + ": " + u->diagnostic;
    return "success";
}

void flatten_and(const ExprPtr& e, std::vector<ExprPtr>& out)
{
    if (e->op == Op::And) {
        for (const auto& a : e->args)
            flatten_and(a, out);
    } else {
        out.push_back(e);
    }
}

// lhs - rhs as an affine form, or nullopt.
std::optional<Affine> difference(const Expr& cmp)
{
    auto a = to_affine(*cmp.args[0]);
    auto b = to_affine(*cmp.args[1]);
    if (!a || !b)
        return std::nullopt;
    for (const auto& [v, c] : b->coeffs) {
        a->coeffs[v] -= c;
        if (a->coeffs[v] == 0)
            a->coeffs.erase(v);
    }
    a->constant -= b->constant;
    return a;
}

// Rows (<= 0 form) for a conjunction of non-strict affine comparisons.
std::optional<std::vector<Affine>> affine_rows(const ExprPtr& constraint)
{
    std::vector<ExprPtr> parts;
    flatten_and(constraint, parts);
    std::vector<Affine> rows;
    for (const auto& p : parts) {
        if (p->op == Op::BoolConst && p->truth)
            continue;
        if (p->op != Op::Cmp)
            return std::nullopt;
        if (p->cmp != CmpOp::Le && p->cmp != CmpOp::Ge && p->cmp != CmpOp::Eq)
            return std::nullopt;
        auto d = difference(*p);
        if (!d)
            return std::nullopt;
        Affine neg;
        for (const auto& [v, c] : d->coeffs)
            neg.coeffs[v] = -c;
        neg.constant = -d->constant;
        if (p->cmp == CmpOp::Le || p->cmp == CmpOp::Eq)
            rows.push_back(*d);
        if (p->cmp == CmpOp::Ge || p->cmp == CmpOp::Eq)
            rows.push_back(neg);
    }
    return rows;
}

} // namespace

/* -------------------------------------------------------------------------- */
/* Objective lifting                                                          */
/* -------------------------------------------------------------------------- */

ModelSpec lift_objective(const ModelSpec& model)
{
    if (to_affine(*model.objective))
        return model;

    ModelSpec out = model;
    Interval iv = interval_of(*model.objective, model.decls);
    std::size_t z = out.decls.size();
    // An integral objective gets an integer z; its interval bounds are then integers too.
    Domain zdom = integral_valued(*model.objective, model.decls) ? Domain::integer(iv.lo, iv.hi)
                                                                 : Domain::real(iv.lo, iv.hi);
    out.decls.push_back(VarDecl{fresh_name(model.decls, "z"), zdom});
    out.constraints.push_back(ex::cmp(CmpOp::Eq, ex::var(z), model.objective));
    out.objective = ex::var(z);
    out.lifted_objective = z;
    return out;
}

/* -------------------------------------------------------------------------- */
/* Linearization                                                              */
/* -------------------------------------------------------------------------- */

SynthesisFailed::SynthesisFailed(std::size_t constraint, std::string text, SynthesisOutcome outcome,
                                 RunReport report)
    : std::runtime_error("constraint " + std::to_string(constraint) + " (" + text +
                         "): " + describe_outcome(outcome)),
      d_constraint(constraint),
      d_text(std::move(text)),
      d_outcome(std::move(outcome)),
      d_report(std::move(report))
{
}

std::optional<Reduction> ReductionCache::find(const std::string& key) const
{
    auto it = d_entries.find(key);
    if (it == d_entries.end())
        return std::nullopt;
    return it->second;
}

std::string reduction_cache_key(const PredicateSpec& local)
{
    PredicateSpec positional = local;
    for (std::size_t i = 0; i < positional.decls.size(); ++i)
        positional.decls[i].name = "v" + std::to_string(i);
    return print_spec(positional);
}

std::size_t LinearModel::find_var(const std::string& name) const
{
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name)
            return i;
    return std::string::npos;
}

LinearModel linearize_model(const ModelSpec& model, const CegisConfig& config, ReductionCache* cache)
{
    auto objective = to_affine(*model.objective);
    if (!objective)
        throw std::invalid_argument("objective is not affine; lift it first");

    LinearModel out;
    out.sense = model.sense;
    out.objective = objective->coeffs;
    out.objective_constant = objective->constant;
    for (std::size_t i = 0; i < model.decls.size(); ++i) {
        VarOrigin origin = model.lifted_objective == i ? VarOrigin::Objective : VarOrigin::User;
        out.vars.push_back(LinearVar{model.decls[i].name, model.decls[i].domain, origin});
    }

    ReductionCache local_cache;
    if (!cache)
        cache = &local_cache;

    for (std::size_t ci = 0; ci < model.constraints.size(); ++ci) {
        const ExprPtr& c = model.constraints[ci];
        ConstraintProvenance prov;
        prov.index = ci;
        prov.text = print_expr(*c, model.decls);
        const std::string prefix = "c" + std::to_string(ci);

        if (auto rows = affine_rows(c)) {
            prov.kind = "affine";
            for (std::size_t r = 0; r < rows->size(); ++r) {
                LinearRow row{prefix + "_" + std::to_string(r), (*rows)[r].coeffs, (*rows)[r].constant};
                prov.rows.push_back(row.name);
                out.rows.push_back(std::move(row));
            }
            out.provenance.push_back(std::move(prov));
            continue;
        }

        // Nonlinear: synthesize over the variables it mentions.
        prov.kind = "reduction";
        std::vector<std::size_t> fv = free_vars(*c);
        std::map<std::size_t, std::size_t> mapping;
        PredicateSpec local;
        for (std::size_t j = 0; j < fv.size(); ++j) {
            mapping[fv[j]] = j;
            local.decls.push_back(model.decls[fv[j]]);
        }
        local.predicate = remap_vars(c, mapping);

        std::string key = reduction_cache_key(local);
        std::optional<Reduction> x = cache->find(key);
        if (x) {
            prov.cached = true;
        } else {
            SynthesisRun run = cegis_synthesize(local, config);
            if (!std::holds_alternative<Success>(run.outcome))
                throw SynthesisFailed(ci, prov.text, std::move(run.outcome), std::move(run.report));
            x = std::get<Success>(run.outcome).reduction;
            cache->store(key, *x);
            prov.synthesis = std::move(run.report);
        }
        for (std::size_t j = 0; j < fv.size(); ++j)
            x->variables[j] = model.decls[fv[j]].name;

        std::vector<std::size_t> aux;
        for (std::size_t t = 0; t < x->k; ++t) {
            std::string name = prefix + "_u" + std::to_string(t + 1);
            while (out.find_var(name) != std::string::npos ||
                   std::any_of(model.decls.begin(), model.decls.end(),
                               [&](const VarDecl& d) { return d.name == name; }))
                name += "_";
            aux.push_back(out.vars.size());
            out.vars.push_back(LinearVar{name, Domain::binary(), VarOrigin::Auxiliary});
            prov.aux.push_back(name);
        }
        for (std::size_t r = 0; r < x->l; ++r) {
            const auto& xr = x->rows[r];
            LinearRow row{prefix + "_r" + std::to_string(r), {}, xr[x->m + x->k]};
            for (std::size_t j = 0; j < x->m; ++j)
                if (xr[j] != 0)
                    row.coeffs[fv[j]] += xr[j];
            for (std::size_t t = 0; t < x->k; ++t)
                if (xr[x->m + t] != 0)
                    row.coeffs[aux[t]] += xr[x->m + t];
            prov.rows.push_back(row.name);
            out.rows.push_back(std::move(row));
        }
        prov.reduction_vars = x->variables;
        prov.reduction = std::move(x);
        out.provenance.push_back(std::move(prov));
    }
    return out;
}

nlohmann::json LinearModel::report() const
{
    using nlohmann::json;
    auto by_name = [&](const std::map<std::size_t, Rational>& coeffs) {
        json j = json::object();
        for (const auto& [v, c] : coeffs)
            j[vars[v].name] = to_string(c);
        return j;
    };

    json jv = json::array();
    for (const auto& v : vars)
        jv.push_back({{"name", v.name},
                      {"domain", kind_name(v.domain.kind)},
                      {"lo", to_string(v.domain.lo)},
                      {"hi", to_string(v.domain.hi)},
                      {"origin", origin_name(v.origin)}});
    json jr = json::array();
    for (const auto& r : rows)
        jr.push_back({{"name", r.name}, {"coeffs", by_name(r.coeffs)}, {"constant", to_string(r.constant)}});
    json jp = json::array();
    for (const auto& p : provenance) {
        json e = {{"index", p.index}, {"text", p.text}, {"kind", p.kind}, {"rows", p.rows}};
        if (p.kind == "reduction") {
            e["aux"] = p.aux;
            e["reduction"] = reduction_to_json(*p.reduction);
            e["cached"] = p.cached;
            e["synthesis"] = p.synthesis ? p.synthesis->to_json() : json(nullptr);
        }
        jp.push_back(std::move(e));
    }
    return {{"sense", sense == Sense::Minimize ? "min" : "max"},
            {"objective", by_name(objective)},
            {"objective_constant", to_string(objective_constant)},
            {"variables", std::move(jv)},
            {"rows", std::move(jr)},
            {"constraints", std::move(jp)}};
}

/* -------------------------------------------------------------------------- */
/* LP output                                                                  */
/* -------------------------------------------------------------------------- */

namespace {

// Renders "c1 x1 + c2 x2 ..." with decimal coefficients.
std::string lp_terms(const std::vector<std::pair<std::string, Rational>>& terms)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [name, c] : terms) {
        if (c == 0)
            continue;
        Rational a = abs(c);
        if (first)
            os << (c < 0 ? "- " : "");
        else
            os << (c < 0 ? " - " : " + ");
        if (a != 1)
            os << to_decimal(a) << ' ';
        os << name;
        first = false;
    }
    if (first && !terms.empty())
        os << "0 " << terms.front().first;
    return os.str();
}

struct ScaledTerms {
    std::vector<std::pair<std::string, Rational>> terms;
    Rational rhs;
    mpz_class scale = 1;
};

// Scales to integers when some value lacks an exact decimal form.
ScaledTerms scaled(std::vector<std::pair<std::string, Rational>> terms, Rational rhs)
{
    ScaledTerms out{std::move(terms), std::move(rhs), 1};
    bool exact = has_exact_decimal(out.rhs);
    std::vector<Rational> values{out.rhs};
    for (const auto& t : out.terms) {
        exact = exact && has_exact_decimal(t.second);
        values.push_back(t.second);
    }
    if (exact)
        return out;
    out.scale = denominator_lcm(values);
    Rational f(out.scale);
    for (auto& t : out.terms)
        t.second *= f;
    out.rhs *= f;
    return out;
}

} // namespace

std::string emit_lp(const LinearModel& model)
{
    std::ostringstream os;
    auto terms_of = [&](const std::map<std::size_t, Rational>& coeffs) {
        std::vector<std::pair<std::string, Rational>> t;
        for (const auto& [v, c] : coeffs)
            if (c != 0)
                t.emplace_back(model.vars.at(v).name, c);
        return t;
    };

    os << (model.sense == Sense::Minimize ? "Minimize" : "Maximize") << '\n';
    {
        auto t = terms_of(model.objective);
        if (t.empty() && !model.vars.empty())
            t.emplace_back(model.vars.front().name, 0);
        ScaledTerms s = scaled(std::move(t), model.objective_constant);
        if (s.scale != 1)
            os << "\\ objective scaled by " << s.scale.get_str() << '\n';
        if (model.objective_constant != 0)
            os << "\\ objective constant " << to_string(model.objective_constant) << " omitted\n";
        os << " obj: " << lp_terms(s.terms) << '\n';
    }

    os << "Subject To\n";
    auto emit_row = [&](const std::string& name, std::vector<std::pair<std::string, Rational>> t,
                        const Rational& constant) {
        if (t.empty()) {
            if (constant <= 0)
                return;
            // Infeasible constant row; keep it visible to the solver.
            t.emplace_back(model.vars.front().name, 0);
        }
        ScaledTerms s = scaled(std::move(t), -constant);
        if (s.scale != 1)
            os << "\\ " << name << " scaled by " << s.scale.get_str() << '\n';
        os << ' ' << name << ": " << lp_terms(s.terms) << " <= "
           << (s.rhs == 0 ? std::string("0") : to_decimal(s.rhs)) << '\n';
    };
    for (const auto& r : model.rows)
        emit_row(r.name, terms_of(r.coeffs), r.constant);

    // Bounds without an exact decimal form become rows.
    std::vector<std::string> bound_lines;
    for (const auto& v : model.vars) {
        if (v.domain.kind == DomainKind::Binary)
            continue;
        const Rational& lo = v.domain.lo;
        const Rational& hi = v.domain.hi;
        if (has_exact_decimal(lo) && has_exact_decimal(hi)) {
            bound_lines.push_back(" " + to_decimal(lo) + " <= " + v.name + " <= " + to_decimal(hi));
            continue;
        }
        emit_row(v.name + "_lo", {{v.name, Rational(-1)}}, lo);
        emit_row(v.name + "_hi", {{v.name, Rational(1)}}, -hi);
        bound_lines.push_back(" " + v.name + " free");
    }

    os << "Bounds\n";
    for (const auto& b : bound_lines)
        os << b << '\n';

    std::vector<std::string> binaries, generals;
    for (const auto& v : model.vars) {
        if (v.domain.kind == DomainKind::Binary)
            binaries.push_back(v.name);
        else if (v.domain.kind == DomainKind::Int)
            generals.push_back(v.name);
    }
    if (!binaries.empty()) {
        os << "Binary\n";
        for (const auto& b : binaries)
            os << ' ' << b << '\n';
    }
    if (!generals.empty()) {
        os << "General\n";
        for (const auto& g : generals)
            os << ' ' << g << '\n';
    }
    os << "End\n";
    return os.str();
}

} // namespace linred
