#pragma once

#include "linred/dsl.hpp"
#include "linred/rational.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace linred {

class DimensionMismatch : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Matrix X of shape l x (m + k + 1). Column order is (y_1..y_m, u_1..u_k, 1);
// a point y is accepted when some u in {0,1}^k makes every row's dot product
// with [y, u, 1] non-positive.
struct Reduction {
    std::size_t l = 0;
    std::size_t k = 0;
    std::size_t m = 0;
    std::vector<std::string> variables;
    std::vector<std::vector<Rational>> rows;

    std::size_t width() const { return m + k + 1; }

    // Throws DimensionMismatch when the shape fields and the matrix disagree.
    void validate() const;

    static Reduction zeros(std::size_t l, std::size_t k, std::vector<std::string> variables);
};

bool reduction_satisfied(const Reduction& x, std::span<const Rational> y, std::span<const int> u);

// Bit t of `u_mask` is the value of u_{t+1}.
bool reduction_satisfied(const Reduction& x, std::span<const Rational> y, std::uint64_t u_mask);

// First u (as a bit mask) that satisfies every row, if any.
std::optional<std::uint64_t> accepting_assignment(const Reduction& x, std::span<const Rational> y);

// Phi(y) <=> exists u. X [y, u, 1]^T <= 0
bool encodes(const Reduction& x, const Expr& phi, std::span<const Rational> y);

// Multiplies each row by the LCM of its denominators, then divides by the
// gcd of the resulting integers.
Reduction normalize_rows(Reduction x);

// (l+1, k): last row repeated.
Reduction pad_duplicate_row(const Reduction& x);

// (l, k+1): an all-zero column for the new auxiliary, placed just before the constant column.
Reduction extend_zero_column(const Reduction& x);

nlohmann::json reduction_to_json(const Reduction& x);

// Throws std::invalid_argument on malformed input.
Reduction reduction_from_json(const nlohmann::json& j);

nlohmann::json valuation_to_json(const Valuation& y);
Valuation valuation_from_json(const nlohmann::json& j);

/* -------------------------------------------------------------------------- */
/* Sample set                                                                 */
/* -------------------------------------------------------------------------- */

struct Sample {
    Valuation point;
    bool phi = false;
};

class SampleSet {
public:
    // Returns false (and leaves the set unchanged) if the point is present.
    bool insert(Valuation point, bool phi);
    bool contains(const Valuation& point) const { return d_index.count(point) != 0; }

    std::size_t size() const { return d_entries.size(); }
    bool empty() const { return d_entries.empty(); }
    const std::vector<Sample>& entries() const { return d_entries; }

private:
    std::vector<Sample> d_entries;
    std::set<Valuation> d_index;
};

} // namespace linred
