#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qseries/rational.hpp"

namespace qseries {

// Truncated Laurent series with exact rational coefficients on the
// x = q^(1/24) exponent grid.
//
// A Series knows its coefficients on the window [offset, trunc):
//   * below offset every coefficient is exactly zero,
//   * at offset + i the coefficient is coeffs[i],
//   * at trunc and above nothing is known (not zero -- unknown).
//
// The representation is normalized: the stored leading coefficient is
// nonzero unless the series vanishes on its whole window, in which case
// the coefficient vector is empty and offset == trunc.  Truncation is
// tracked pessimistically through every operation; no operation ever
// fabricates a coefficient beyond the window its inputs justify.
class Series {
  public:
    Series() = default;

    Series(Exponent24 offset, std::vector<Rat> coeffs, Exponent24 trunc)
        : offset_(offset), trunc_(trunc), coeffs_(std::move(coeffs)) {
        if (trunc_ - offset_ != static_cast<Exponent24>(coeffs_.size()))
            throw std::logic_error("series window does not match coefficient count");
        normalize();
    }

    /// The zero series, known to vanish at every exponent below trunc.
    static Series zero_on_window(Exponent24 trunc) { return Series(trunc, {}, trunc); }

    static Series monomial(Rat c, Exponent24 exp, Exponent24 trunc) {
        if (trunc <= exp) throw precision_error("window too small for monomial", exp + 1, trunc);
        std::vector<Rat> v(static_cast<std::size_t>(trunc - exp));
        v[0] = std::move(c);
        return Series(exp, std::move(v), trunc);
    }

    static Series one(Exponent24 trunc) { return monomial(Rat(1), 0, trunc); }

    /// Coefficients given on the arithmetic progression offset + stride*i.
    static Series from_strided(Exponent24 offset, Exponent24 stride, const std::vector<Rat>& coeffs,
                               Exponent24 trunc) {
        if (coeffs.empty()) return zero_on_window(trunc);
        const Exponent24 lo = std::min(offset, trunc);
        std::vector<Rat> dense(static_cast<std::size_t>(std::max<Exponent24>(trunc - lo, 0)));
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const Exponent24 e = offset + stride * static_cast<Exponent24>(i);
            if (e >= trunc) break;
            dense[static_cast<std::size_t>(e - lo)] = coeffs[i];
        }
        return Series(lo, std::move(dense), trunc);
    }

    Exponent24 offset() const { return offset_; }
    Exponent24 trunc() const { return trunc_; }
    Exponent24 length() const { return trunc_ - offset_; }
    bool empty() const { return coeffs_.empty(); }

    const std::vector<Rat>& coeffs() const { return coeffs_; }

    /// Coefficient of x^e; exact zero below the window, error at or above trunc.
    const Rat& at(Exponent24 e) const {
        static const Rat zero{0};
        if (e >= trunc_)
            throw precision_error("coefficient beyond truncation window", e + 1, trunc_);
        if (e < offset_) return zero;
        return coeffs_[static_cast<std::size_t>(e - offset_)];
    }

    /// Coefficient of q^n (= x^(24n)).
    const Rat& at_q(long long n) const { return at(24 * n); }

    /// Largest m such that all coefficients of q^n, n < m, are known.
    long long q_terms() const { return ceil_div(trunc_, 24); }

    const Rat& leading_coefficient() const {
        if (empty()) throw domain_error("leading coefficient of a zero window");
        return coeffs_.front();
    }

    bool integer_q_support() const {
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            if (!is_zero(coeffs_[i]) && (offset_ + static_cast<Exponent24>(i)) % 24 != 0)
                return false;
        return true;
    }

    /// Drop knowledge at exponents >= new_trunc (never extends the window).
    Series clipped(Exponent24 new_trunc) const {
        if (new_trunc >= trunc_) return *this;
        if (new_trunc <= offset_) return zero_on_window(new_trunc);
        std::vector<Rat> v(coeffs_.begin(), coeffs_.begin() + static_cast<std::size_t>(new_trunc - offset_));
        return Series(offset_, std::move(v), new_trunc);
    }

    std::string to_string(std::size_t max_terms = 16) const;

  private:
    void normalize() {
        std::size_t lead = 0;
        while (lead < coeffs_.size() && is_zero(coeffs_[lead])) ++lead;
        if (lead == coeffs_.size()) {
            coeffs_.clear();
            offset_ = trunc_;
        } else if (lead > 0) {
            coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
            offset_ += static_cast<Exponent24>(lead);
        }
    }

    Exponent24 offset_{0};
    Exponent24 trunc_{0};
    std::vector<Rat> coeffs_;
};

namespace detail {

inline std::vector<std::pair<std::size_t, const Rat*>> nonzeros(const Series& s) {
    std::vector<std::pair<std::size_t, const Rat*>> nz;
    const auto& c = s.coeffs();
    nz.reserve(c.size() / 4 + 1);
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!is_zero(c[i])) nz.emplace_back(i, &c[i]);
    return nz;
}

} // namespace detail

inline Series operator+(const Series& a, const Series& b) {
    const Exponent24 tr = std::min(a.trunc(), b.trunc());
    const Exponent24 lo = std::min({a.offset(), b.offset(), tr});
    std::vector<Rat> out(static_cast<std::size_t>(tr - lo));
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        const Exponent24 e = a.offset() + static_cast<Exponent24>(i);
        if (e >= tr) break;
        out[static_cast<std::size_t>(e - lo)] = a.coeffs()[i];
    }
    for (std::size_t i = 0; i < b.coeffs().size(); ++i) {
        const Exponent24 e = b.offset() + static_cast<Exponent24>(i);
        if (e >= tr) break;
        out[static_cast<std::size_t>(e - lo)] += b.coeffs()[i];
    }
    return Series(lo, std::move(out), tr);
}

inline Series operator-(const Series& s) {
    std::vector<Rat> out(s.coeffs());
    for (auto& c : out) c = -c;
    return Series(s.offset(), std::move(out), s.trunc());
}

inline Series operator-(const Series& a, const Series& b) { return a + (-b); }

inline Series operator*(const Rat& c, const Series& s) {
    if (is_zero(c)) return Series::zero_on_window(s.trunc());
    std::vector<Rat> out(s.coeffs());
    for (auto& x : out) x *= c;
    return Series(s.offset(), std::move(out), s.trunc());
}

inline Series operator*(const Series& a, const Series& b) {
    const Exponent24 off = a.offset() + b.offset();
    const Exponent24 tr = std::min(a.trunc() + b.offset(), b.trunc() + a.offset());
    if (a.empty() || b.empty()) return Series::zero_on_window(tr);
    if (tr <= off)
        throw precision_error("insufficient precision: empty product window", off + 1, tr);
    const std::size_t len = static_cast<std::size_t>(tr - off);
    auto nza = detail::nonzeros(a);
    auto nzb = detail::nonzeros(b);
    if (nza.size() > nzb.size()) std::swap(nza, nzb);
    std::vector<Rat> out(len);
    mpq_t prod;
    mpq_init(prod);
    for (const auto& [i, pa] : nza) {
        for (const auto& [j, pb] : nzb) {
            const std::size_t k = i + j;
            if (k >= len) break;
            mpq_mul(prod, pa->get_mpq_t(), pb->get_mpq_t());
            mpq_add(out[k].get_mpq_t(), out[k].get_mpq_t(), prod);
        }
    }
    mpq_clear(prod);
    return Series(off, std::move(out), tr);
}

/// Power-series long division.  The quotient window is the shorter of the
/// two relative windows; the divisor must have a nonzero leading coefficient
/// (guaranteed by normalization once it is nonempty).
inline Series divide(const Series& num, const Series& den) {
    if (den.empty()) throw domain_error("division by a series that vanishes on its window");
    if (num.empty()) return Series::zero_on_window(num.trunc() - den.offset());
    const Exponent24 off = num.offset() - den.offset();
    const Exponent24 ell = std::min(num.length(), den.length());
    std::vector<Rat> out(static_cast<std::size_t>(ell));
    std::vector<std::pair<std::size_t, const Rat*>> tail;
    for (std::size_t j = 1; j < den.coeffs().size(); ++j)
        if (!is_zero(den.coeffs()[j])) tail.emplace_back(j, &den.coeffs()[j]);
    const Rat& d0 = den.coeffs().front();
    mpq_t acc, prod;
    mpq_init(acc);
    mpq_init(prod);
    for (std::size_t k = 0; k < out.size(); ++k) {
        mpq_set(acc, num.coeffs()[k].get_mpq_t());
        for (const auto& [j, dj] : tail) {
            if (j > k) break;
            const Rat& qk = out[k - j];
            if (is_zero(qk)) continue;
            mpq_mul(prod, dj->get_mpq_t(), qk.get_mpq_t());
            mpq_sub(acc, acc, prod);
        }
        mpq_div(out[k].get_mpq_t(), acc, d0.get_mpq_t());
    }
    mpq_clear(acc);
    mpq_clear(prod);
    return Series(off, std::move(out), off + ell);
}

/// Multiplicative inverse: invert(f).offset == -f.offset and
/// f * invert(f) == 1 on the justified window.
inline Series invert(const Series& f) {
    if (f.empty()) throw domain_error("inversion of a series that vanishes on its window");
    return divide(Series::one(f.length()), f);
}

inline Series pow_int(const Series& f, long long k) {
    if (k == 0) return Series::one(std::max<Exponent24>(f.length(), 1));
    if (k < 0) return pow_int(invert(f), -k);
    Series acc = Series::one(std::max<Exponent24>(f.length(), 1));
    Series base = f;
    bool started = false;
    for (long long bits = k; bits > 0; bits >>= 1) {
        if (bits & 1) {
            acc = started ? acc * base : base;
            started = true;
        }
        if (bits > 1) base = base * base;
    }
    return acc;
}

/// Substitution q -> q^k (exponent dilation by k on the x grid).
inline Series dilate(const Series& f, long long k) {
    if (k < 1) throw domain_error("dilation factor must be positive");
    if (k == 1) return f;
    const Exponent24 tr = k * (f.trunc() - 1) + 1;
    if (f.empty()) return Series::zero_on_window(tr);
    std::vector<Rat> out(static_cast<std::size_t>(tr - k * f.offset()));
    for (std::size_t i = 0; i < f.coeffs().size(); ++i)
        out[static_cast<std::size_t>(k * static_cast<Exponent24>(i))] = f.coeffs()[i];
    return Series(k * f.offset(), std::move(out), tr);
}

/// Multiply by x^d (shift every exponent by d/24 in q-powers).
inline Series shift(const Series& f, Exponent24 d) {
    return Series(f.offset() + d, f.coeffs(), f.trunc() + d);
}

namespace detail {

inline void require_integer_q_support(const Series& f, const char* op) {
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
        const Exponent24 e = f.offset() + static_cast<Exponent24>(i);
        if (!is_zero(f.coeffs()[i]) && e % 24 != 0)
            throw support_error(std::string(op) + " undefined on fractional support (x^" +
                                std::to_string(e) + " = q^(" + std::to_string(e) + "/24))");
    }
}

} // namespace detail

/// U_m: picks every m-th q-coefficient, U_m(sum a_n q^n) = sum a_{mn} q^n.
/// Requires integer q-support; the output q-window is floor(trunc / 24m).
inline Series u_operator(const Series& f, long long m) {
    if (m < 1) throw domain_error("U_m requires m >= 1");
    detail::require_integer_q_support(f, "U_m");
    const long long out_q_trunc = floor_div(f.trunc(), 24 * m);
    const long long n_lo = ceil_div(f.offset(), 24 * m);
    if (out_q_trunc <= n_lo) return Series::zero_on_window(24 * out_q_trunc);
    std::vector<Rat> out(static_cast<std::size_t>(24 * (out_q_trunc - n_lo)));
    for (long long n = n_lo; n < out_q_trunc; ++n) {
        const Exponent24 src = 24 * m * n;
        if (src < f.offset()) continue;
        out[static_cast<std::size_t>(24 * (n - n_lo))] = f.at(src);
    }
    return Series(24 * n_lo, std::move(out), 24 * out_q_trunc);
}

/// q -> -q on integer-supported series: negates every odd-q coefficient.
inline Series negate_q(const Series& f) {
    detail::require_integer_q_support(f, "q -> -q");
    std::vector<Rat> out(f.coeffs());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Exponent24 e = f.offset() + static_cast<Exponent24>(i);
        if (e % 24 == 0 && floor_div(e, 24) % 2 != 0) out[i] = -out[i];
    }
    return Series(f.offset(), std::move(out), f.trunc());
}

/// Arithmetic-progression extraction: output coefficient of q^n is the
/// input coefficient of q^(mn + r).
inline Series extract_progression(const Series& f, long long m, long long r) {
    if (m < 1) throw domain_error("progression modulus must be positive");
    detail::require_integer_q_support(f, "progression extraction");
    const long long in_q_trunc = ceil_div(f.trunc(), 24);
    const long long out_q_trunc = ceil_div(in_q_trunc - r, m);
    const long long n_lo = ceil_div(ceil_div(f.offset(), 24) - r, m);
    if (out_q_trunc <= n_lo) return Series::zero_on_window(24 * out_q_trunc);
    std::vector<Rat> out(static_cast<std::size_t>(24 * (out_q_trunc - n_lo)));
    for (long long n = n_lo; n < out_q_trunc; ++n) {
        const Exponent24 src = 24 * (m * n + r);
        if (src < f.offset()) continue;
        out[static_cast<std::size_t>(24 * (n - n_lo))] = f.at(src);
    }
    return Series(24 * n_lo, std::move(out), 24 * out_q_trunc);
}

/// Minimum 3-adic valuation over the window [lo, hi); nullopt is +infinity
/// (every coefficient in the window is zero).
inline std::optional<long> val3_min(const Series& f, Exponent24 lo, Exponent24 hi) {
    if (hi > f.trunc())
        throw precision_error("3-adic scan window exceeds truncation", hi, f.trunc());
    std::optional<long> best;
    for (Exponent24 e = std::max(lo, f.offset()); e < hi; ++e) {
        const Rat& c = f.at(e);
        if (is_zero(c)) continue;
        if (!is_integer(c))
            throw domain_error("non-integral coefficient at x^" + std::to_string(e) + " (= q^" +
                               std::to_string(e) + "/24)");
        const auto v = val3(Int(c.get_num()));
        if (v && (!best || *v < *best)) best = *v;
    }
    return best;
}

struct AgreeReport {
    bool agree{true};
    Exponent24 first_mismatch{0};
    Rat lhs, rhs;
};

/// Compares coefficients at every exponent below bound; both windows must
/// reach the bound.
inline AgreeReport agree_up_to(const Series& f, const Series& g, Exponent24 bound) {
    const Exponent24 have = std::min(f.trunc(), g.trunc());
    if (have < bound)
        throw precision_error("insufficient precision: comparison needs truncation >= " +
                                  std::to_string(bound) + ", have " + std::to_string(have),
                              bound, have);
    const Exponent24 lo = std::min({f.offset(), g.offset(), bound});
    for (Exponent24 e = lo; e < bound; ++e) {
        const Rat& a = f.at(e);
        const Rat& b = g.at(e);
        if (a != b) return AgreeReport{false, e, a, b};
    }
    return AgreeReport{};
}

inline bool equal_on_overlap(const Series& f, const Series& g) {
    return agree_up_to(f, g, std::min(f.trunc(), g.trunc())).agree;
}

inline std::string Series::to_string(std::size_t max_terms) const {
    std::ostringstream os;
    if (empty()) {
        os << "0 + O(x^" << trunc_ << ")";
        return os.str();
    }
    std::size_t printed = 0;
    for (std::size_t i = 0; i < coeffs_.size() && printed < max_terms; ++i) {
        if (is_zero(coeffs_[i])) continue;
        const Exponent24 e = offset_ + static_cast<Exponent24>(i);
        if (printed > 0) os << " + ";
        os << coeffs_[i].get_str();
        if (e != 0) {
            if (e % 24 == 0)
                os << "*q^" << e / 24;
            else
                os << "*q^(" << e << "/24)";
        }
        ++printed;
    }
    os << " + O(q^(" << trunc_ << "/24))";
    return os.str();
}

} // namespace qseries
