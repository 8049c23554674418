#include "linred/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace linred {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

Rational parse_impl(std::string_view text, bool allow_decimal)
{
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    Rational result;
    auto slash = body.find('/');
    auto dot = body.find('.');
    if (slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        mpz_class d(std::string(den), 10);
        if (d == 0)
            throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        result = Rational(mpz_class(std::string(num), 10), d);
        result.canonicalize();
    } else if (dot != std::string_view::npos) {
        if (!allow_decimal)
            throw std::invalid_argument("decimal not allowed here: '" + std::string(text) + "'");
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
            (!frac.empty() && !all_digits(frac)))
            throw std::invalid_argument("malformed decimal '" + std::string(text) + "'");
        std::string digits = std::string(whole) + std::string(frac);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        result = Rational(mpz_class(digits.empty() ? "0" : digits, 10), scale);
        result.canonicalize();
    } else {
        if (!all_digits(body))
            throw std::invalid_argument("malformed number '" + std::string(text) + "'");
        result = Rational(mpz_class(std::string(body), 10));
    }
    return negative ? Rational(-result) : result;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    return parse_impl(text, true);
}

Rational parse_fraction(std::string_view text)
{
    return parse_impl(text, false);
}

std::string to_string(const Rational& value)
{
    return value.get_str(10);
}

bool is_integer(const Rational& value)
{
    return value.get_den() == 1;
}

mpz_class floor_of(const Rational& value)
{
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

mpz_class ceil_of(const Rational& value)
{
    mpz_class out;
    mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

bool has_exact_decimal(const Rational& value)
{
    mpz_class d = value.get_den();
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2))
        d /= 2;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5))
        d /= 5;
    return d == 1;
}

std::string to_decimal(const Rational& value)
{
    if (!has_exact_decimal(value))
        throw std::invalid_argument("no exact decimal for " + to_string(value));
    if (is_integer(value))
        return value.get_num().get_str();

    // Scale by 10^digits until the value becomes integral.
    std::size_t digits = 0;
    mpz_class scale = 1;
    Rational scaled = value;
    while (!is_integer(scaled)) {
        ++digits;
        scale *= 10;
        scaled = value * scale;
        scaled.canonicalize();
    }
    mpz_class n = abs(scaled.get_num());
    std::string s = n.get_str();
    if (s.size() <= digits)
        s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
    return (value < 0 ? "-" : "") + s;
}

mpz_class denominator_lcm(const std::vector<Rational>& values)
{
    mpz_class acc = 1;
    for (const auto& v : values)
        mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), v.get_den_mpz_t());
    return acc;
}

std::string to_string(const Valuation& point)
{
    std::string out = "(";
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i)
            out += ", ";
        out += to_string(point[i]);
    }
    return out + ")";
}

} // namespace linred
