#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qseries/series.hpp"

namespace qseries {

// Symbolic eta-quotients and the classical building blocks that expand into
// them: q-Pochhammer products, theta series, and the named quotients the
// rest of the engine is built from.
//
// Conventions:
//   eta(t)  = q^(t/24) prod_{n>=1} (1 - q^(tn)),   written eta_t below;
//   an EtaQuotient is scalar * q^(qshift/24) * prod_t eta_t^{r_t}.
// The intrinsic leading exponent on the x = q^(1/24) grid is
// qshift + sum_t t*r_t, and the leading coefficient equals the scalar.

struct EtaQuotient {
    Rat scalar{1};
    Exponent24 qshift{0};                  // explicit x-power beyond the eta leads
    std::map<long long, long long> levels; // level t -> exponent r_t

    EtaQuotient() = default;
    EtaQuotient(Rat s, Exponent24 shift, std::map<long long, long long> lv)
        : scalar(std::move(s)), qshift(shift), levels(std::move(lv)) {
        normalize();
    }

    void normalize() {
        for (auto it = levels.begin(); it != levels.end();) {
            if (it->first <= 0) throw domain_error("eta level must be positive");
            it = (it->second == 0) ? levels.erase(it) : std::next(it);
        }
    }

    Exponent24 leading_exponent() const {
        Exponent24 e = qshift;
        for (const auto& [t, r] : levels) e += t * r;
        return e;
    }

    EtaQuotient pow(long long k) const {
        EtaQuotient out;
        if (k == 0) return out;
        mpz_pow_ui(out.scalar.get_num_mpz_t(), scalar.get_num().get_mpz_t(),
                   static_cast<unsigned long>(k < 0 ? -k : k));
        mpz_pow_ui(out.scalar.get_den_mpz_t(), scalar.get_den().get_mpz_t(),
                   static_cast<unsigned long>(k < 0 ? -k : k));
        if (k < 0) {
            if (is_zero(scalar)) throw domain_error("inverting an eta-quotient with zero scalar");
            out.scalar = Rat(1) / out.scalar;
        }
        out.scalar.canonicalize();
        out.qshift = qshift * k;
        for (const auto& [t, r] : levels) out.levels[t] = r * k;
        out.normalize();
        return out;
    }

    EtaQuotient times(const EtaQuotient& other) const {
        EtaQuotient out = *this;
        out.scalar *= other.scalar;
        out.qshift += other.qshift;
        for (const auto& [t, r] : other.levels) out.levels[t] += r;
        out.normalize();
        return out;
    }

    bool same_levels(const EtaQuotient& other) const { return levels == other.levels; }
};

/// Formal finite sum of eta-quotients; the empty sum is zero.
struct EtaExpression {
    std::vector<EtaQuotient> terms;

    EtaExpression() = default;
    explicit EtaExpression(EtaQuotient q) { terms.push_back(std::move(q)); }
    EtaExpression(std::initializer_list<EtaQuotient> qs) : terms(qs) {}

    Exponent24 leading_exponent() const {
        if (terms.empty()) throw domain_error("leading exponent of an empty expression");
        Exponent24 e = terms.front().leading_exponent();
        for (const auto& t : terms) e = std::min(e, t.leading_exponent());
        return e;
    }
};

/// theta_{m,a} = sum_{n in Z} q^((2mn+a)^2 / 4m).  The exponent lands on the
/// 1/24 grid for every n exactly when m divides 6a^2.
struct ThetaIndex {
    long long m{1};
    long long a{0};

    bool on_grid() const { return m >= 1 && (6 * a * a) % m == 0; }
};

/// (sign * q^(a/24); q^(b/24))_infinity ^ exponent with a, b > 0.
struct PochhammerFactor {
    int sign{1};
    Exponent24 a{24};
    Exponent24 b{24};
    long long exponent{1};
};

namespace detail {

/// Exponents and signs of (q;q)_inf = sum_k (-1)^k q^(k(3k-1)/2), ascending,
/// restricted to exponents < limit (in q-units).
inline std::vector<std::pair<long long, int>> pentagonal_terms(long long limit) {
    std::vector<std::pair<long long, int>> out;
    out.emplace_back(0, 1);
    for (long long j = 1;; ++j) {
        const long long e1 = j * (3 * j - 1) / 2;
        const long long e2 = j * (3 * j + 1) / 2;
        const int s = (j % 2 == 0) ? 1 : -1;
        if (e1 >= limit) break;
        out.emplace_back(e1, s);
        if (e2 < limit) out.emplace_back(e2, s);
    }
    return out;
}

// Dense coefficient vectors over one fixed exponent step.  Multiplication
// and division by a sparse unit series (constant term 1) run in place:
// descending for multiplication, ascending for long division.  Cost is
// O(len * nnz) with a cheap zero skip.

inline void mul_sparse_unit(std::vector<Rat>& c, const std::vector<std::pair<long long, int>>& f) {
    const long long len = static_cast<long long>(c.size());
    mpq_t tmp;
    mpq_init(tmp);
    for (long long n = len - 1; n >= 0; --n) {
        mpq_ptr acc = c[static_cast<std::size_t>(n)].get_mpq_t();
        for (std::size_t j = 1; j < f.size(); ++j) {
            const long long e = f[j].first;
            if (e > n) break;
            const Rat& src = c[static_cast<std::size_t>(n - e)];
            if (is_zero(src)) continue;
            if (f[j].second > 0)
                mpq_add(acc, acc, src.get_mpq_t());
            else
                mpq_sub(acc, acc, src.get_mpq_t());
        }
    }
    mpq_clear(tmp);
}

inline void div_sparse_unit(std::vector<Rat>& c, const std::vector<std::pair<long long, int>>& f) {
    const long long len = static_cast<long long>(c.size());
    for (long long n = 0; n < len; ++n) {
        mpq_ptr acc = c[static_cast<std::size_t>(n)].get_mpq_t();
        for (std::size_t j = 1; j < f.size(); ++j) {
            const long long e = f[j].first;
            if (e > n) break;
            const Rat& src = c[static_cast<std::size_t>(n - e)];
            if (is_zero(src)) continue;
            if (f[j].second > 0)
                mpq_sub(acc, acc, src.get_mpq_t());
            else
                mpq_add(acc, acc, src.get_mpq_t());
        }
    }
}

/// In-place product with prod_{n >= 0, a+bn < len} (1 - sign*X^(a+bn)).
inline void pochhammer_into(std::vector<Rat>& c, long long a, long long b, int sign) {
    const long long len = static_cast<long long>(c.size());
    for (long long m = a; m < len; m += b) {
        for (long long n = len - 1; n >= m; --n) {
            const Rat& src = c[static_cast<std::size_t>(n - m)];
            if (is_zero(src)) continue;
            mpq_ptr acc = c[static_cast<std::size_t>(n)].get_mpq_t();
            if (sign > 0)
                mpq_sub(acc, acc, src.get_mpq_t());
            else
                mpq_add(acc, acc, src.get_mpq_t());
        }
    }
}

/// Long division by the same product, ascending in place.
inline void pochhammer_divide(std::vector<Rat>& c, long long a, long long b, int sign) {
    const long long len = static_cast<long long>(c.size());
    for (long long m = a; m < len; m += b) {
        for (long long n = m; n < len; ++n) {
            const Rat& src = c[static_cast<std::size_t>(n - m)];
            if (is_zero(src)) continue;
            mpq_ptr acc = c[static_cast<std::size_t>(n)].get_mpq_t();
            if (sign > 0)
                mpq_add(acc, acc, src.get_mpq_t());
            else
                mpq_sub(acc, acc, src.get_mpq_t());
        }
    }
}

} // namespace detail

/// eta(t) as a Series: offset t on the x grid, pentagonal-number support.
inline Series eta_series(long long t, Exponent24 trunc) {
    if (t < 1) throw domain_error("eta level must be positive");
    if (trunc <= t)
        throw precision_error("window too small for eta leading term", t + 1, trunc);
    std::vector<Rat> out(static_cast<std::size_t>(trunc - t));
    for (const auto& [e, s] : detail::pentagonal_terms(ceil_div(trunc - t, 24 * t))) {
        const Exponent24 x = 24 * t * e;
        if (x >= trunc - t) continue;
        out[static_cast<std::size_t>(x)] = s;
    }
    return Series(t, std::move(out), trunc);
}

/// (q^t; q^t)_inf as a Series with offset 0 (no eta prefactor).
inline Series pentagonal_series(long long t, Exponent24 trunc) {
    return shift(eta_series(t, trunc + t), -t).clipped(trunc);
}

/// Truncated product for a q-Pochhammer factor, exact on the gcd(a,b) grid.
inline Series pochhammer_series(const PochhammerFactor& p, Exponent24 trunc) {
    if (p.a <= 0 || p.b <= 0) throw domain_error("Pochhammer steps must be positive");
    if (trunc <= 0) throw precision_error("Pochhammer window must be positive", 1, trunc);
    const long long g = std::gcd(p.a, p.b);
    const long long len = ceil_div(trunc, g);
    std::vector<Rat> c(static_cast<std::size_t>(len));
    c[0] = 1;
    const long long reps = p.exponent < 0 ? -p.exponent : p.exponent;
    for (long long r = 0; r < reps; ++r) {
        if (p.exponent > 0)
            detail::pochhammer_into(c, p.a / g, p.b / g, p.sign);
        else
            detail::pochhammer_divide(c, p.a / g, p.b / g, p.sign);
    }
    return Series::from_strided(0, g, c, g * len);
}

/// Exact expansion of a single eta-quotient.  All the work happens on the
/// integer grid of the pentagonal products; the eta prefactors only move
/// the window start.
inline Series expand(const EtaQuotient& q, Exponent24 trunc) {
    const Exponent24 lead = q.leading_exponent();
    if (trunc <= lead)
        throw precision_error("insufficient precision: leading exponent " + std::to_string(lead) +
                                  " is at or beyond the requested window " + std::to_string(trunc),
                              lead + 1, trunc);
    if (is_zero(q.scalar)) return Series::zero_on_window(trunc);
    const long long len = ceil_div(trunc - lead, 24);
    std::vector<Rat> c(static_cast<std::size_t>(len));
    c[0] = q.scalar;
    for (const auto& [t, r] : q.levels) {
        const auto terms = detail::pentagonal_terms(ceil_div(len, t));
        std::vector<std::pair<long long, int>> scaled;
        scaled.reserve(terms.size());
        for (const auto& [e, s] : terms)
            if (t * e < len) scaled.emplace_back(t * e, s);
        const long long reps = r < 0 ? -r : r;
        for (long long k = 0; k < reps; ++k) {
            if (r > 0)
                detail::mul_sparse_unit(c, scaled);
            else
                detail::div_sparse_unit(c, scaled);
        }
    }
    return Series::from_strided(lead, 24, c, lead + 24 * len);
}

/// Expansion of a formal sum; the result window is the tightest one every
/// term can justify, clipped back to the request for determinism.
inline Series expand(const EtaExpression& e, Exponent24 trunc) {
    Series acc = Series::zero_on_window(trunc);
    for (const auto& term : e.terms) acc = acc + expand(term, trunc);
    return acc.clipped(trunc);
}

/// Lattice sum for theta_{m,a}; the summation range is solved exactly from
/// the quadratic exponent against the window bound.
inline Series theta_series(const ThetaIndex& idx, Exponent24 trunc) {
    if (idx.m < 1) throw domain_error("theta index m must be positive");
    if (!idx.on_grid())
        throw support_error("theta exponent not on the 1/24 grid (m does not divide 6a^2)");
    if (trunc <= 0) throw precision_error("theta window must be positive", 1, trunc);
    // x-exponent of the n-th term: 6*(2mn+a)^2 / m.
    std::map<Exponent24, long long> acc;
    const double bound = std::sqrt(static_cast<double>(idx.m) * static_cast<double>(trunc) / 6.0);
    const long long n_hi = static_cast<long long>((bound - static_cast<double>(idx.a)) /
                                                  (2.0 * static_cast<double>(idx.m))) +
                           2;
    const long long n_lo = static_cast<long long>((-bound - static_cast<double>(idx.a)) /
                                                  (2.0 * static_cast<double>(idx.m))) -
                           2;
    for (long long n = n_lo; n <= n_hi; ++n) {
        const long long u = 2 * idx.m * n + idx.a;
        const Exponent24 e = 6 * u * u / idx.m;
        if (e < trunc) acc[e] += 1;
    }
    if (acc.empty()) return Series::zero_on_window(trunc);
    const Exponent24 off = acc.begin()->first;
    std::vector<Rat> out(static_cast<std::size_t>(trunc - off));
    for (const auto& [e, c] : acc) out[static_cast<std::size_t>(e - off)] = static_cast<long>(c);
    return Series(off, std::move(out), trunc);
}

enum class ThetaKind { phi, psi };

/// phi(q) = (-q;q^2)^2 (q^2;q^2)  and  psi(q) = (-q;q^2) (q^4;q^4),
/// expanded factor by factor on the integer q grid.
inline Series phi_psi_series(ThetaKind kind, Exponent24 trunc) {
    if (trunc <= 0) throw precision_error("window must be positive", 1, trunc);
    const long long len = ceil_div(trunc, 24);
    std::vector<Rat> c(static_cast<std::size_t>(len));
    c[0] = 1;
    if (kind == ThetaKind::phi) {
        detail::pochhammer_into(c, 1, 2, -1);
        detail::pochhammer_into(c, 1, 2, -1);
        detail::pochhammer_into(c, 2, 2, +1);
    } else {
        detail::pochhammer_into(c, 1, 2, -1);
        detail::pochhammer_into(c, 4, 4, +1);
    }
    return Series::from_strided(0, 24, c, 24 * len);
}

/// Registry of the named eta-quotients and prefactors used throughout the
/// engine, stored exactly as displayed (no simplification).
inline EtaExpression named_constant(const std::string& name) {
    using L = std::map<long long, long long>;
    const auto quot = [](Rat s, Exponent24 shift, L lv) {
        return EtaQuotient(std::move(s), shift, std::move(lv));
    };
    if (name == "A")
        return EtaExpression{quot(1, 0, L{{9, 9}, {4, 2}, {2, 5}, {36, -2}, {18, -5}, {1, -9}})};
    if (name == "B") return EtaExpression{quot(1, 0, L{{9, 1}, {2, 2}, {18, -2}, {1, -1}})};
    if (name == "L0")
        return EtaExpression{
            quot(1, 0, L{{12, 5}, {3, 1}, {2, 8}, {24, -2}, {8, -2}, {6, -4}, {4, -3}, {1, -3}}),
            quot(24, 0, L{}),
            quot(4, 0, L{{24, 2}, {8, 2}, {3, 1}, {2, 10}, {12, -1}, {6, -2}, {4, -9}, {1, -3}})};
    if (name == "t") return EtaExpression{quot(1, 0, L{{12, 4}, {2, 2}, {6, -2}, {4, -4}})};
    if (name == "y") return EtaExpression{quot(1, 0, L{{4, 3}, {3, 1}, {12, -1}, {1, -3}})};
    if (name == "p0")
        return EtaExpression{quot(1, 0, L{{12, 4}, {3, 12}, {2, 8}, {6, -8}, {4, -12}, {1, -4}})};
    if (name == "p1")
        return EtaExpression{quot(1, 0, L{{12, 2}, {3, 6}, {2, 4}, {6, -4}, {4, -6}, {1, -2}})};
    if (name == "Atilde")
        return EtaExpression{quot(1, 0, L{{2, 11}, {9, 11}, {36, 2}, {1, -11}, {4, -2}, {18, -11}})};
    if (name == "Btilde") return EtaExpression{quot(1, 0, L{{2, 2}, {9, 1}, {1, -1}, {18, -2}})};
    if (name == "ttilde")
        return EtaExpression{quot(1, 0, L{{1, 4}, {4, 4}, {6, 10}, {2, -10}, {3, -4}, {12, -4}})};
    if (name == "ytilde")
        return EtaExpression{
            quot(Rat(-1, 2), 0, L{{12, 1}, {3, 2}, {2, 9}, {6, -3}, {4, -3}, {1, -6}})};
    if (name == "p0tilde")
        return EtaExpression{quot(16, 0, L{{6, 4}, {4, 12}, {3, 8}, {1, 8}, {12, -4}, {2, -28}})};
    if (name == "p1tilde")
        return EtaExpression{quot(4, 0, L{{6, 2}, {4, 6}, {3, 4}, {1, 4}, {12, -2}, {2, -14}})};
    if (name == "cpsi60")
        return EtaExpression{
            quot(8, -12, L{{4, 11}, {12, 5}, {2, -5}, {1, -6}, {6, -2}, {8, -2}, {24, -2}}),
            quot(4, -12, L{{2, 9}, {8, 2}, {12, 5}, {1, -10}, {4, -3}, {6, -2}, {24, -2}}),
            quot(32, -12, L{{4, 5}, {8, 2}, {24, 2}, {1, -6}, {2, -3}, {12, -1}}),
            quot(4, -12, L{{4, 3}, {2, 7}, {24, 2}, {1, -10}, {8, -2}, {12, -1}}),
            quot(8, -12, L{{2, 11}, {6, 2}, {1, -11}, {4, -2}, {3, -1}})};
    if (name == "Ltilde0_prefactor")
        return EtaExpression{quot(2, 12, L{{3, 1}, {1, 11}, {4, 2}, {6, -2}, {2, -11}})};
    if (name == "progression_prefactor_odd")
        return EtaExpression{quot(2, 12, L{{1, 1}, {3, 11}, {12, 2}, {2, -2}, {6, -11}})};
    if (name == "progression_prefactor_even")
        return EtaExpression{quot(2, 12, L{{1, 11}, {4, 2}, {3, 1}, {2, -11}, {6, -2}})};
    throw domain_error("unknown named constant: " + name);
}

inline const std::vector<std::string>& named_constant_list() {
    static const std::vector<std::string> names = {
        "A",       "B",       "L0",      "t",
        "y",       "p0",      "p1",      "Atilde",
        "Btilde",  "ttilde",  "ytilde",  "p0tilde",
        "p1tilde", "cpsi60",  "Ltilde0_prefactor",
        "progression_prefactor_odd", "progression_prefactor_even"};
    return names;
}

} // namespace qseries
