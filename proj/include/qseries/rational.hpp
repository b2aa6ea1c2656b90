#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace qseries {

using Int = mpz_class;
using Rat = mpq_class;

// Exponent on the x = q^(1/24) grid: the value e stands for q^(e/24).
// The 1/24 grid is fine enough for every fractional power this engine
// meets (eta prefactors, theta exponents, half-integer shifts).
using Exponent24 = long long;

inline constexpr Exponent24 grid = 24;

struct precision_error : std::runtime_error {
    Exponent24 required{0};
    Exponent24 available{0};
    precision_error(const std::string& what, Exponent24 req, Exponent24 avail)
        : std::runtime_error(what), required(req), available(avail) {}
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

struct support_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Canonicalized fraction; the two-argument mpq_class constructor alone
/// does not remove common factors, which breaks mpq comparisons.
inline Rat make_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rat& r) { return mpq_sgn(r.get_mpq_t()) == 0; }

inline bool is_integer(const Rat& r) {
    return mpz_cmp_ui(mpq_denref(r.get_mpq_t()), 1) == 0;
}

/// 3-adic valuation; nullopt encodes +infinity (the valuation of 0).
inline std::optional<long> val3(const Int& n) {
    if (mpz_sgn(n.get_mpz_t()) == 0) return std::nullopt;
    static const Int three{3};
    Int reduced;
    const auto v = mpz_remove(reduced.get_mpz_t(), n.get_mpz_t(), three.get_mpz_t());
    return static_cast<long>(v);
}

inline std::optional<long> val3(const Rat& r) {
    if (!is_integer(r)) throw domain_error("3-adic valuation of a non-integer");
    return val3(Int(r.get_num()));
}

// Division rounding toward -infinity / +infinity for possibly negative operands.
inline long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

/// Always "numerator/denominator", even for integers.
inline std::string rat_to_fraction_string(const Rat& r) {
    return Int(r.get_num()).get_str() + "/" + Int(r.get_den()).get_str();
}

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (s.empty() || r.set_str(s, 10) != 0)
        throw std::invalid_argument("malformed rational literal: '" + s + "'");
    r.canonicalize();
    return r;
}

} // namespace qseries
