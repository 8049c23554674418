#include "linred/reduction.hpp"

namespace linred {

void Reduction::validate() const
{
    if (l < 1)
        throw DimensionMismatch("reduction needs at least one row");
    if (k > 20)
        throw DimensionMismatch("too many auxiliary variables (k > 20)");
    if (variables.size() != m)
        throw DimensionMismatch("reduction names " + std::to_string(variables.size()) +
                                " variables but m = " + std::to_string(m));
    if (rows.size() != l)
        throw DimensionMismatch("reduction has " + std::to_string(rows.size()) +
                                " rows but l = " + std::to_string(l));
    for (const auto& r : rows)
        if (r.size() != width())
            throw DimensionMismatch("row of length " + std::to_string(r.size()) +
                                    ", expected m + k + 1 = " + std::to_string(width()));
}

Reduction Reduction::zeros(std::size_t l, std::size_t k, std::vector<std::string> variables)
{
    Reduction x;
    x.l = l;
    x.k = k;
    x.m = variables.size();
    x.variables = std::move(variables);
    x.rows.assign(l, std::vector<Rational>(x.width(), Rational(0)));
    return x;
}

namespace {

void check_point(const Reduction& x, std::span<const Rational> y)
{
    if (y.size() != x.m)
        throw DimensionMismatch("valuation has " + std::to_string(y.size()) +
                                " components, reduction expects " + std::to_string(x.m));
}

} // namespace

bool reduction_satisfied(const Reduction& x, std::span<const Rational> y, std::uint64_t u_mask)
{
    check_point(x, y);
    Rational dot;
    for (const auto& row : x.rows) {
        if (row.size() != x.width())
            throw DimensionMismatch("ragged reduction row");
        dot = row.back();
        for (std::size_t j = 0; j < x.m; ++j)
            dot += row[j] * y[j];
        for (std::size_t t = 0; t < x.k; ++t)
            if (u_mask >> t & 1u)
                dot += row[x.m + t];
        if (dot > 0)
            return false;
    }
    return true;
}

bool reduction_satisfied(const Reduction& x, std::span<const Rational> y, std::span<const int> u)
{
    if (u.size() != x.k)
        throw DimensionMismatch("u has " + std::to_string(u.size()) + " components, expected k = " +
                                std::to_string(x.k));
    std::uint64_t mask = 0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        if (u[t] != 0 && u[t] != 1)
            throw std::invalid_argument("auxiliary values must be 0 or 1");
        mask |= static_cast<std::uint64_t>(u[t]) << t;
    }
    return reduction_satisfied(x, y, mask);
}

std::optional<std::uint64_t> accepting_assignment(const Reduction& x, std::span<const Rational> y)
{
    if (x.k > 20)
        throw DimensionMismatch("too many auxiliary variables (k > 20)");
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << x.k); ++u)
        if (reduction_satisfied(x, y, u))
            return u;
    return std::nullopt;
}

bool encodes(const Reduction& x, const Expr& phi, std::span<const Rational> y)
{
    return eval_predicate(phi, y) == accepting_assignment(x, y).has_value();
}

Reduction normalize_rows(Reduction x)
{
    for (auto& row : x.rows) {
        Rational factor(denominator_lcm(row));
        mpz_class g = 0;
        for (auto& c : row) {
            c *= factor;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
        }
        // Then divide out the common factor; still a positive scaling.
        if (g > 1)
            for (auto& c : row)
                c /= g;
    }
    return x;
}

Reduction pad_duplicate_row(const Reduction& x)
{
    Reduction out = x;
    out.rows.push_back(x.rows.back());
    out.l += 1;
    return out;
}

Reduction extend_zero_column(const Reduction& x)
{
    Reduction out = x;
    for (auto& row : out.rows)
        row.insert(row.begin() + static_cast<std::ptrdiff_t>(x.m + x.k), Rational(0));
    out.k += 1;
    return out;
}

nlohmann::json reduction_to_json(const Reduction& x)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : x.rows) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& c : r)
            row.push_back(to_string(c));
        rows.push_back(std::move(row));
    }
    return {{"l", x.l}, {"k", x.k}, {"m", x.m}, {"variables", x.variables}, {"rows", rows}};
}

Reduction reduction_from_json(const nlohmann::json& j)
{
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.is_object() || !j.contains(key))
            throw std::invalid_argument(std::string("reduction JSON lacks '") + key + "'");
        return j.at(key);
    };
    auto count = [&](const char* key) {
        const auto& v = need(key);
        if (!v.is_number_unsigned())
            throw std::invalid_argument(std::string("'") + key + "' must be a non-negative integer");
        return v.get<std::size_t>();
    };

    Reduction x;
    x.l = count("l");
    x.k = count("k");
    x.m = count("m");
    const auto& vars = need("variables");
    if (!vars.is_array())
        throw std::invalid_argument("'variables' must be an array of names");
    for (const auto& v : vars) {
        if (!v.is_string())
            throw std::invalid_argument("'variables' must be an array of names");
        x.variables.push_back(v.get<std::string>());
    }
    const auto& rows = need("rows");
    if (!rows.is_array())
        throw std::invalid_argument("'rows' must be an array");
    for (const auto& r : rows) {
        if (!r.is_array())
            throw std::invalid_argument("each row must be an array");
        std::vector<Rational> row;
        for (const auto& c : r) {
            if (!c.is_string())
                throw std::invalid_argument("coefficients must be strings like \"p/q\"");
            row.push_back(parse_fraction(c.get<std::string>()));
        }
        x.rows.push_back(std::move(row));
    }
    x.validate();
    return x;
}

nlohmann::json valuation_to_json(const Valuation& y)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : y)
        out.push_back(to_string(v));
    return out;
}

Valuation valuation_from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw std::invalid_argument("valuation must be an array");
    Valuation y;
    for (const auto& v : j) {
        if (!v.is_string())
            throw std::invalid_argument("valuation entries must be strings");
        y.push_back(parse_fraction(v.get<std::string>()));
    }
    return y;
}

bool SampleSet::insert(Valuation point, bool phi)
{
    if (!d_index.insert(point).second)
        return false;
    d_entries.push_back({std::move(point), phi});
    return true;
}

} // namespace linred
