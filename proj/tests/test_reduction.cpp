#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace linred;

namespace {

Reduction matrix(std::size_t k, std::vector<std::string> vars, std::vector<std::vector<Rational>> rows)
{
    Reduction x;
    x.k = k;
    x.m = vars.size();
    x.l = rows.size();
    x.variables = std::move(vars);
    x.rows = std::move(rows);
    return x;
}

PredicateSpec le0()
{
    return parse_spec(oracle::read_fixture("le0.pred"));
}

} // namespace

TEST(Reduction, SatisfiedExamples)
{
    auto x = matrix(0, {"y"}, {{1, 0}});
    EXPECT_TRUE(reduction_satisfied(x, Valuation{0}, std::uint64_t{0}));
    EXPECT_FALSE(reduction_satisfied(x, Valuation{1}, std::uint64_t{0}));
    auto z = matrix(2, {"y"}, {{0, 0, 0, 0}});
    for (std::uint64_t u = 0; u < 4; ++u)
        EXPECT_TRUE(reduction_satisfied(z, Valuation{Rational(-9, 7)}, u));
    std::vector<int> bits{1, 0};
    EXPECT_TRUE(reduction_satisfied(z, Valuation{3}, bits));
}

TEST(Reduction, DimensionMismatch)
{
    auto x = matrix(0, {"y"}, {{1, 0}});
    EXPECT_THROW(reduction_satisfied(x, Valuation{0, 1}, std::uint64_t{0}), DimensionMismatch);
    std::vector<int> bits{1};
    EXPECT_THROW(reduction_satisfied(x, Valuation{0}, bits), DimensionMismatch);
    auto bad = matrix(1, {"y"}, {{1, 0}});
    EXPECT_THROW(bad.validate(), DimensionMismatch);
    auto ragged = matrix(0, {"y"}, {{1, 0}, {1}});
    EXPECT_THROW(ragged.validate(), DimensionMismatch);
}

TEST(Reduction, EncodesExamples)
{
    auto spec = le0();
    auto x = matrix(0, {"y"}, {{1, 0}});
    EXPECT_TRUE(encodes(x, *spec.predicate, Valuation{-1}));
    EXPECT_TRUE(encodes(x, *spec.predicate, Valuation{1}));
    auto zero = matrix(0, {"y"}, {{0, 0}});
    EXPECT_FALSE(encodes(zero, *spec.predicate, Valuation{1}));
}

TEST(Reduction, JsonRoundTrip)
{
    auto x = matrix(1, {"a", "b"}, {{Rational(-1, 3), 2, 0, Rational(5, 7)}, {0, 0, 1, -1}});
    auto j = reduction_to_json(x);
    EXPECT_EQ(j["rows"][0][0], "-1/3");
    auto back = reduction_from_json(j);
    EXPECT_EQ(back.rows, x.rows);
    EXPECT_EQ(back.variables, x.variables);
    EXPECT_EQ(back.l, 2u);

    j["rows"][0][0] = "0.5";
    EXPECT_THROW(reduction_from_json(j), std::invalid_argument);
    auto j2 = reduction_to_json(x);
    j2["l"] = 3;
    EXPECT_THROW(reduction_from_json(j2), std::invalid_argument);
    auto j3 = reduction_to_json(x);
    j3.erase("rows");
    EXPECT_THROW(reduction_from_json(j3), std::invalid_argument);
}

TEST(Reduction, NormalizeGivesCoprimeIntegers)
{
    auto x = matrix(0, {"a", "b"}, {{Rational(1, 3), Rational(-1, 2), 0}, {4, 6, -10}});
    auto n = normalize_rows(x);
    EXPECT_EQ(n.rows[0], (std::vector<Rational>{2, -3, 0}));
    EXPECT_EQ(n.rows[1], (std::vector<Rational>{2, 3, -5}));
}

TEST(Reduction, PaddingShapes)
{
    auto x = matrix(1, {"a"}, {{1, 2, 3}});
    auto p = pad_duplicate_row(x);
    EXPECT_EQ(p.l, 2u);
    EXPECT_EQ(p.rows[1], x.rows[0]);
    auto e = extend_zero_column(x);
    EXPECT_EQ(e.k, 2u);
    EXPECT_EQ(e.rows[0], (std::vector<Rational>{1, 2, 0, 3}));
    EXPECT_NO_THROW(e.validate());
}

TEST(SampleSet, Dedup)
{
    SampleSet s;
    EXPECT_TRUE(s.insert(Valuation{1, 2}, true));
    EXPECT_FALSE(s.insert(Valuation{1, 2}, true));
    EXPECT_TRUE(s.contains(Valuation{1, 2}));
    EXPECT_EQ(s.size(), 1u);
}

/* Properties ---------------------------------------------------------------- */

TEST(Property, EncodesMatchesOracle)
{
    std::mt19937_64 rng(31);
    auto spec = parse_spec(oracle::read_fixture("max_real.pred"));
    for (int t = 0; t < 200; ++t) {
        auto x = oracle::random_reduction(rng, 1 + t % 4, t % 3, {"a", "b", "z"});
        for (int i = 0; i < 10; ++i) {
            auto y = oracle::random_point(spec.decls, rng);
            ASSERT_EQ(encodes(x, *spec.predicate, y), oracle::encodes(x, *spec.predicate, y));
        }
    }
}

TEST(Property, NormalizationPreservesSolutions)
{
    std::mt19937_64 rng(32);
    std::vector<VarDecl> decls{{"a", Domain::real(-2, 2)}, {"b", Domain::real(-2, 2)}};
    for (int t = 0; t < 200; ++t) {
        auto x = Reduction::zeros(2, 1, {"a", "b"});
        for (auto& row : x.rows)
            for (auto& v : row)
                v = oracle::random_rational(rng, 50, 50);
        auto n = normalize_rows(x);
        for (const auto& row : n.rows)
            for (const auto& v : row)
                ASSERT_TRUE(is_integer(v));
        for (int i = 0; i < 20; ++i) {
            auto y = oracle::random_point(decls, rng);
            for (std::uint64_t u = 0; u < 2; ++u)
                ASSERT_EQ(reduction_satisfied(x, y, u), reduction_satisfied(n, y, u));
        }
    }
}

TEST(Property, PaddingPreservesAcceptance)
{
    std::mt19937_64 rng(33);
    std::vector<VarDecl> decls{{"a", Domain::real(-2, 2)}, {"b", Domain::integer(-2, 2)}};
    for (int t = 0; t < 200; ++t) {
        auto x = oracle::random_reduction(rng, 1 + t % 3, t % 3, {"a", "b"});
        auto p = pad_duplicate_row(x);
        auto e = extend_zero_column(x);
        for (int i = 0; i < 20; ++i) {
            auto y = oracle::random_point(decls, rng);
            bool acc = accepting_assignment(x, y).has_value();
            ASSERT_EQ(acc, accepting_assignment(p, y).has_value());
            ASSERT_EQ(acc, accepting_assignment(e, y).has_value());
        }
    }
}

TEST(Property, JsonRoundTripRandom)
{
    std::mt19937_64 rng(34);
    for (int t = 0; t < 200; ++t) {
        auto x = Reduction::zeros(1 + t % 4, t % 3, {"p", "q"});
        for (auto& row : x.rows)
            for (auto& v : row)
                v = oracle::random_rational(rng);
        auto back = reduction_from_json(nlohmann::json::parse(reduction_to_json(x).dump()));
        ASSERT_EQ(back.rows, x.rows);
        Valuation y{oracle::random_rational(rng), oracle::random_rational(rng)};
        ASSERT_EQ(valuation_from_json(nlohmann::json::parse(valuation_to_json(y).dump())), y);
    }
}
