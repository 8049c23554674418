#include "support/oracles.hpp"
#include "linred/transform.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace linred;

namespace {

LinearModel linearize(const std::string& text, std::size_t max_l = 6, std::size_t max_k = 2,
                      ReductionCache* cache = nullptr)
{
    return linearize_model(lift_objective(parse_model(text)), oracle::cegis(max_l, max_k), cache);
}

struct LpRow {
    std::map<std::string, Rational> coeffs;
    Rational rhs;
};

// Reads the "name: terms <= rhs" lines of the Subject To section.
std::map<std::string, LpRow> lp_rows(const std::string& lp)
{
    std::map<std::string, LpRow> out;
    std::istringstream in(lp);
    std::string line;
    bool in_rows = false;
    while (std::getline(in, line)) {
        if (line == "Subject To") {
            in_rows = true;
            continue;
        }
        if (line == "Bounds")
            break;
        if (!in_rows || line.empty() || line[0] == '\\')
            continue;
        auto colon = line.find(':');
        std::string name = line.substr(1, colon - 1);
        std::istringstream ts(line.substr(colon + 1));
        LpRow row;
        std::string tok;
        Rational sign = 1, coef = 1;
        bool have_coef = false;
        while (ts >> tok) {
            if (tok == "<=") {
                ts >> tok;
                row.rhs = smt::parse_model_value(tok);
                break;
            }
            if (tok == "-" || tok == "+") {
                sign = tok == "-" ? -1 : 1;
            } else if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
                coef = smt::parse_model_value(tok);
                have_coef = true;
            } else {
                row.coeffs[tok] += sign * (have_coef ? coef : Rational(1));
                sign = 1;
                have_coef = false;
            }
        }
        out[name] = row;
    }
    return out;
}

// Feasible points of the model projected onto its first n variables.
std::set<Valuation> projected(const LinearModel& lm, std::size_t n)
{
    std::vector<Domain> doms;
    for (const auto& v : lm.vars)
        doms.push_back(v.domain);
    std::set<Valuation> out;
    oracle::for_each_point(doms, Rational(1), [&](const Valuation& y) {
        auto v = oracle::big(y);
        for (const auto& r : lm.rows)
            if (!oracle::row_holds(r, v))
                return;
        out.insert(Valuation(y.begin(), y.begin() + n));
    });
    return out;
}

std::set<Valuation> feasible(const ModelSpec& m)
{
    std::vector<Domain> doms;
    for (const auto& d : m.decls)
        doms.push_back(d.domain);
    std::set<Valuation> out;
    oracle::for_each_point(doms, Rational(1), [&](const Valuation& y) {
        for (const auto& c : m.constraints)
            if (!oracle::truth(*c, oracle::big(y)))
                return;
        out.insert(y);
    });
    return out;
}

} // namespace

/* Lifting ------------------------------------------------------------------- */

TEST(Lift, MaxObjective)
{
    auto m = parse_model(oracle::read_fixture("minimax.opt"));
    auto l = lift_objective(m);
    ASSERT_EQ(l.decls.size(), 3u);
    EXPECT_EQ(l.decls[2].name, "z");
    EXPECT_EQ(l.decls[2].domain, Domain::real(0, 5));
    EXPECT_EQ(l.objective->op, Op::Var);
    EXPECT_EQ(l.objective->var, 2u);
    ASSERT_EQ(l.constraints.size(), 2u);
    EXPECT_EQ(print_expr(*l.constraints[1], l.decls), "(z = max(a, b))");
    EXPECT_EQ(l.lifted_objective, 2u);
}

TEST(Lift, AffineIsIdentity)
{
    auto m = parse_model("var a, b: real in [0, 5];\nmin 2*a + 3*b;");
    auto l = lift_objective(m);
    EXPECT_EQ(print_model(l), print_model(m));
    EXPECT_FALSE(l.lifted_objective);
}

TEST(Lift, ProductWithBinary)
{
    auto m = parse_model("var a: real in [-1, 3]; var d: binary; var z: real in [0, 1];\nmax a*d;");
    auto l = lift_objective(m);
    EXPECT_EQ(l.sense, Sense::Maximize);
    ASSERT_EQ(l.decls.size(), 4u);
    EXPECT_NE(l.decls[3].name, "z");
    EXPECT_EQ(l.decls[3].domain, Domain::real(-1, 3));
}

TEST(Lift, IntegralObjectiveGetsIntegerZ)
{
    auto l = lift_objective(parse_model("var a, b: int in [-1, 2]; var p: binary;\nmin max(a, 2*b) - p;"));
    EXPECT_EQ(l.decls.back().domain, Domain::integer(-2, 4));
    auto r = lift_objective(parse_model("var a, b: int in [-1, 2];\nmin max(a, b/2);"));
    EXPECT_EQ(r.decls.back().domain.kind, DomainKind::Real);
}

TEST(Property, LiftPreservesGridOptimum)
{
    for (const char* text : {"var a, b: real in [0, 5];\nmin max(a, b) s.t. a + b >= 4;",
                             "var a: real in [-1, 3]; var d: binary;\nmax a*d - d;",
                             "var a, b: int in [-2, 2];\nmin abs(a - b) + min(a, b) s.t. a + b >= 1;"}) {
        auto m = parse_model(text);
        auto a = oracle::grid_optimum(m, Rational(1, 4));
        auto b = oracle::grid_optimum(lift_objective(m), Rational(1, 4));
        ASSERT_TRUE(a && b) << text;
        EXPECT_EQ(a->value, b->value) << text;
    }
}

/* Linearization ------------------------------------------------------------- */

TEST(Linearize, AffinePassThrough)
{
    auto lm = linearize("var a, b: real in [0, 5];\nmin a s.t. a + b >= 4; a - b = 1;");
    EXPECT_EQ(lm.vars.size(), 2u);
    ASSERT_EQ(lm.rows.size(), 3u);
    // -a - b + 4 <= 0
    EXPECT_EQ(lm.rows[0].coeffs.at(0), -1);
    EXPECT_EQ(lm.rows[0].coeffs.at(1), -1);
    EXPECT_EQ(lm.rows[0].constant, 4);
    for (const auto& p : lm.provenance) {
        EXPECT_EQ(p.kind, "affine");
        EXPECT_TRUE(p.aux.empty());
    }
    EXPECT_EQ(lm.provenance[1].rows.size(), 2u);
}

TEST(Linearize, Minimax)
{
    auto lm = linearize(oracle::read_fixture("minimax.opt"));
    ASSERT_EQ(lm.provenance.size(), 2u);
    EXPECT_EQ(lm.provenance[1].kind, "reduction");
    ASSERT_TRUE(lm.provenance[1].reduction);
    EXPECT_EQ(lm.vars[lm.find_var("z")].origin, VarOrigin::Objective);
    auto lin = oracle::grid_optimum(lm, Rational(1, 4));
    ASSERT_TRUE(lin);
    EXPECT_EQ(lin->value, 2);
    EXPECT_EQ(lin->point[0], 2);
    EXPECT_EQ(lin->point[1], 2);

    auto j = lm.report();
    EXPECT_EQ(j["sense"], "min");
    EXPECT_EQ(j["constraints"][1]["kind"], "reduction");
    EXPECT_TRUE(j["constraints"][1].contains("synthesis"));
}

TEST(Linearize, FailureNamesConstraint)
{
    try {
        linearize("var w: real in [0, 1]; var y: int in [-1, 1];\nmin w s.t. w >= 0; y != 0;", 1, 0);
        FAIL() << "expected SynthesisFailed";
    } catch (const SynthesisFailed& e) {
        EXPECT_EQ(e.constraint(), 1u);
        EXPECT_NE(e.constraint_text().find("!="), std::string::npos);
        EXPECT_TRUE(std::holds_alternative<ExhaustedLattice>(e.outcome()));
        EXPECT_NE(std::string(e.what()).find("constraint 1"), std::string::npos);
    }
}

TEST(Linearize, CacheReusesShape)
{
    ReductionCache cache;
    auto lm = linearize("var a, b, c, d: int in [0, 2];\nmin c + d s.t. c = max(a, b); d = max(a, b);", 6, 2,
                        &cache);
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_FALSE(lm.provenance[0].cached);
    EXPECT_TRUE(lm.provenance[1].cached);
    std::set<std::string> aux(lm.provenance[0].aux.begin(), lm.provenance[0].aux.end());
    for (const auto& a : lm.provenance[1].aux)
        EXPECT_FALSE(aux.count(a)) << a;
}

TEST(Property, AuxFreshness)
{
    auto lm = linearize("var z, c1_u1, c1_u2: binary; var a, b, c: int in [0, 2];\n"
                        "min max(a, b) s.t. c1_u1 + c1_u2 + z <= 2; c = max(a, b);");
    std::set<std::string> names;
    for (const auto& v : lm.vars)
        EXPECT_TRUE(names.insert(v.name).second) << v.name;
    std::set<std::string> rows;
    for (const auto& r : lm.rows)
        EXPECT_TRUE(rows.insert(r.name).second) << r.name;
    EXPECT_EQ(lm.vars[0].name, "z");
    EXPECT_EQ(lm.vars[0].origin, VarOrigin::User);
    EXPECT_EQ(lm.vars[lm.find_var("z_1")].origin, VarOrigin::Objective);
    EXPECT_EQ(lm.vars[lm.find_var("c1_u1_")].origin, VarOrigin::Auxiliary);
}

TEST(Property, TransformSoundOnFiniteDomains)
{
    for (const char* text : {"var a, b, c: int in [0, 2];\nmin a s.t. c = max(a, b);",
                             "var a, b: int in [-1, 2]; var p: binary;\nmax a s.t. a + b <= 2; b = a * p;",
                             "var y: int in [-1, 1]; var w: int in [0, 1];\nmin w s.t. y != 0;"}) {
        auto m = parse_model(text);
        auto lm = linearize_model(m, oracle::cegis(6, 2));
        EXPECT_EQ(projected(lm, m.decls.size()), feasible(m)) << text;
    }
}

/* LP output ----------------------------------------------------------------- */

TEST(Lp, OneVariable)
{
    auto lm = linearize("var x: real in [0, 1];\nmin x;");
    auto lp = emit_lp(lm);
    EXPECT_NE(lp.find("Minimize\n obj: x\n"), std::string::npos) << lp;
    EXPECT_NE(lp.find("Bounds\n 0 <= x <= 1\n"), std::string::npos) << lp;
    EXPECT_EQ(lp.substr(lp.size() - 4), "End\n");
}

TEST(Lp, BinaryAndGeneral)
{
    auto lm = linearize("var u1: binary; var n: int in [0, 4];\nmax u1 + n;");
    auto lp = emit_lp(lm);
    EXPECT_NE(lp.find("Maximize\n obj: u1 + n\n"), std::string::npos) << lp;
    EXPECT_NE(lp.find("Binary\n u1\n"), std::string::npos) << lp;
    EXPECT_NE(lp.find("General\n n\n"), std::string::npos) << lp;
}

TEST(Lp, ScaledRow)
{
    LinearModel lm;
    lm.vars = {{"x", Domain::real(0, 1)}, {"y", Domain::real(0, 1)}};
    lm.objective = {{0, Rational(1)}};
    lm.rows.push_back({"r", {{0, Rational(1, 3)}, {1, Rational(-1, 2)}}, Rational(0)});
    auto lp = emit_lp(lm);
    EXPECT_NE(lp.find("\\ r scaled by 6\n r: 2 x - 3 y <= 0\n"), std::string::npos) << lp;
    lm.rows[0] = {"h", {{0, Rational(1, 2)}, {1, Rational(-1, 4)}}, Rational(-3, 2)};
    EXPECT_NE(emit_lp(lm).find(" h: 0.5 x - 0.25 y <= 1.5\n"), std::string::npos) << emit_lp(lm);
}

TEST(Lp, MinimaxFixture)
{
    auto lp = emit_lp(linearize(oracle::read_fixture("minimax.opt")));
    EXPECT_NE(lp.find(" c0_0: - a - b <= -4\n"), std::string::npos) << lp;
    EXPECT_NE(lp.find("Binary\n"), std::string::npos) << lp;
}

TEST(Property, RowScalingPreservesFeasibility)
{
    std::mt19937_64 rng(71);
    std::vector<VarDecl> decls{{"x", Domain::real(-3, 3)}, {"y", Domain::real(-3, 3)}, {"w", Domain::binary()}};
    for (int t = 0; t < 100; ++t) {
        LinearModel lm;
        lm.vars = {{"x", Domain::real(-3, 3)}, {"y", Domain::real(-3, 3)}, {"w", Domain::binary()}};
        lm.objective = {{0, Rational(1)}};
        for (int r = 0; r < 3; ++r)
            lm.rows.push_back({"r" + std::to_string(r),
                               {{0, oracle::random_rational(rng, 12, 5)},
                                {1, oracle::random_rational(rng, 12, 5)},
                                {2, oracle::random_rational(rng, 12, 5)}},
                               oracle::random_rational(rng, 12, 5)});
        auto parsed = lp_rows(emit_lp(lm));
        for (int i = 0; i < 30; ++i) {
            auto y = oracle::random_point(decls, rng);
            auto v = oracle::big(y);
            for (const auto& row : lm.rows) {
                auto it = parsed.find(row.name);
                bool holds = oracle::row_holds(row, v);
                if (it == parsed.end()) {
                    // Dropped only when every coefficient is zero and the row is trivially true.
                    ASSERT_TRUE(holds);
                    continue;
                }
                oracle::Q lhs = 0;
                for (const auto& [name, c] : it->second.coeffs)
                    lhs += oracle::big(c) * v.at(lm.find_var(name));
                ASSERT_EQ(holds, lhs <= oracle::big(it->second.rhs)) << emit_lp(lm);
            }
        }
    }
}
