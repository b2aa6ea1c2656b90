#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qseries/genfun.hpp"

namespace qseries {

// The U_3-generated sequences
//
//   L_0 as registered, L_{2a-1} = U_3(A * L_{2a-2}), L_{2a} = U_3(B * L_{2a-1})
//
// and the parallel tilde chain built from Atilde/Btilde on top of
// Ltilde_0 = prefactor * CPsi_{6,0}.  On top of the chains sit the t-basis
// decomposition and the congruence scan harness.

enum class Side { plain, tilde };

struct LEntry {
    int alpha{0};
    Series series;
    long long q_precision{0}; // guaranteed number of known q-coefficients
};

struct LSequenceState {
    Side side{Side::plain};
    std::vector<LEntry> entries;
    bool complete{true};
    std::string stop_reason;

    const Series& at(int alpha) const { return entries.at(static_cast<std::size_t>(alpha)).series; }
};

/// One U-step: U_3 applied to (multiplier * f).  The multiplier expansion
/// window is chosen so no precision beyond f's own window is wasted.
inline Series u_step(const Series& f, const EtaExpression& multiplier) {
    const Exponent24 lead = multiplier.leading_exponent();
    const Series m = expand(multiplier, f.trunc() + lead - f.offset());
    return u_operator(m * f, 3);
}

namespace detail {

inline const EtaExpression& step_multiplier(Side side, int alpha) {
    static const EtaExpression a = named_constant("A");
    static const EtaExpression b = named_constant("B");
    static const EtaExpression at = named_constant("Atilde");
    static const EtaExpression bt = named_constant("Btilde");
    if (side == Side::plain) return (alpha % 2 == 1) ? a : b;
    return (alpha % 2 == 1) ? at : bt;
}

/// q-order lost to the multiplier's pole at each step.
inline long long step_drop(Side side, int alpha) {
    return -floor_div(step_multiplier(side, alpha).leading_exponent(), 24);
}

} // namespace detail

/// Initial q-window needed so that entry alpha_max still has at least
/// `terms` guaranteed q-coefficients.  Walks the chain backwards, charging
/// each U_3 a division by 3 plus the multiplier's pole order exactly.
inline long long initial_q_window(Side side, int alpha_max, long long terms) {
    long long need = terms;
    for (int alpha = alpha_max; alpha >= 1; --alpha)
        need = 3 * need + detail::step_drop(side, alpha);
    return need;
}

/// Builds the L (or Ltilde) chain up to alpha_max with at least `terms`
/// guaranteed q-coefficients at the top entry.  Precision exhaustion midway
/// yields a partial state with an explicit stop reason.
inline LSequenceState build_L(Side side, int alpha_max, long long terms = 20) {
    if (alpha_max < 0) throw domain_error("alpha_max must be nonnegative");
    if (terms < 1) throw domain_error("need at least one guaranteed term");
    const Exponent24 t0 = 24 * initial_q_window(side, alpha_max, terms);

    LSequenceState state;
    state.side = side;
    Series current = (side == Side::plain)
                         ? expand(named_constant("L0"), t0)
                         : expand(named_constant("Ltilde0_prefactor"), t0) * cpsi60_eta(t0);
    state.entries.push_back({0, current, floor_div(current.trunc(), 24)});
    for (int alpha = 1; alpha <= alpha_max; ++alpha) {
        try {
            current = u_step(current, detail::step_multiplier(side, alpha));
        } catch (const precision_error& e) {
            state.complete = false;
            state.stop_reason = "precision exhausted at alpha = " + std::to_string(alpha) + ": " +
                                e.what();
            return state;
        }
        state.entries.push_back({alpha, current, floor_div(current.trunc(), 24)});
    }
    return state;
}

/// lambda_alpha = (3^alpha - 1) / 2: the least nonnegative residue with
/// 2*lambda = -1 (mod 3^alpha).
inline long long lambda_alpha(int alpha) {
    if (alpha < 1 || alpha > 36) throw domain_error("alpha out of range");
    long long p = 1;
    for (int i = 0; i < alpha; ++i) p *= 3;
    return (p - 1) / 2;
}

struct DivisibilityRow {
    int alpha{0};
    std::optional<long> min_val3;    // nullopt: every coefficient in window is 0
    std::optional<long> required;    // nullopt for alpha = 0 (no requirement)
    bool pass{true};
};

/// Per-entry minimum 3-adic valuation against the required floor(alpha/2)+2.
/// Non-integral coefficients signal a construction bug and raise hard.
inline std::vector<DivisibilityRow> check_divisibility(const LSequenceState& state) {
    std::vector<DivisibilityRow> rows;
    for (const auto& entry : state.entries) {
        DivisibilityRow row;
        row.alpha = entry.alpha;
        row.min_val3 = val3_min(entry.series, entry.series.offset(), entry.series.trunc());
        if (entry.alpha >= 1) {
            row.required = entry.alpha / 2 + 2;
            row.pass = !row.min_val3 || *row.min_val3 >= *row.required;
        }
        rows.push_back(row);
    }
    return rows;
}

struct DecompositionResult {
    long long n0{0};
    std::vector<Rat> d;        // d[n - n0], trailing zeros trimmed
    bool residual_ok{false};
    long long extracted_upto{0}; // largest basis power the window supported
};

namespace detail {

inline void trim_trailing_zeros(std::vector<Rat>& d) {
    while (!d.empty() && is_zero(d.back())) d.pop_back();
}

/// Greedy triangular extraction for a basis with t = (+-1) q + O(q^2):
/// the coefficient of q^m pins d_{n0+m} once lower terms are subtracted.
inline DecompositionResult decompose_triangular(const Series& g, const Series& t, long long n0) {
    DecompositionResult out;
    out.n0 = n0;
    Series r = (n0 == 0) ? g : g * pow_int(t, -n0);
    if (!r.empty() && r.offset() < 0)
        throw domain_error("decomposition order violation: series has q-order below n0");
    Series t_pow = Series::one(t.length());
    long long m = 0;
    while (24 * m < r.trunc() && 24 * m < t_pow.trunc()) {
        const Rat dm = r.at_q(m) / t_pow.at_q(m);
        out.d.push_back(dm);
        if (!is_zero(dm)) r = r - dm * t_pow;
        t_pow = t_pow * t;
        ++m;
    }
    out.extracted_upto = n0 + m - 1;
    out.residual_ok = r.clipped(std::min<Exponent24>(24 * m, r.trunc())).empty();
    trim_trailing_zeros(out.d);
    return out;
}

/// Generalized binomial coefficient C(n, k) for integer n (possibly
/// negative) and k >= 0.
inline Rat binom(long long n, long long k) {
    Rat out = 1;
    for (long long i = 0; i < k; ++i) {
        out *= Rat(static_cast<long>(n - i));
        out /= Rat(static_cast<long>(i + 1));
    }
    return out;
}

/// Exact Gaussian elimination solve; the caller guarantees the matrix is
/// square and nonsingular (binomial evaluation matrices always are).
inline std::vector<Rat> solve_linear(std::vector<std::vector<Rat>> m, std::vector<Rat> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && is_zero(m[piv][col])) ++piv;
        if (piv == n) throw domain_error("singular decomposition system");
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            if (is_zero(m[row][col])) continue;
            const Rat f = m[row][col] / m[col][col];
            for (std::size_t k = col; k < n; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    std::vector<Rat> x(n);
    for (std::size_t row = n; row-- > 0;) {
        Rat acc = rhs[row];
        for (std::size_t k = row + 1; k < n; ++k) acc -= m[row][k] * x[k];
        x[row] = acc / m[row][row];
    }
    return x;
}

/// Decomposition against a basis with constant term 1 (the tilde chain's
/// t).  Powers of such a basis all open at q^0, so the greedy q-order
/// argument fails; instead write t = 1 + u with ord(u) >= 1, extract the
/// shifted coefficients e_k of g = sum_k e_k u^k greedily, and recover the
/// finitely many d_n from e_k = sum_n d_n C(n, k) by an exact solve.  The
/// unused e-rows and a full series reconstruction validate the answer.
inline DecompositionResult decompose_shifted(const Series& g, const Series& t, long long n0,
                                             long long window_cap_q = 140) {
    DecompositionResult out;
    out.n0 = n0;
    const Exponent24 cap = std::min<Exponent24>(std::min(g.trunc(), t.trunc()), 24 * window_cap_q);
    const Series gc = g.clipped(cap);
    const Series u = t.clipped(cap) - Series::one(cap);
    if (u.empty() || u.offset() < 24)
        throw domain_error("shifted basis must have t - 1 of positive q-order");
    if (gc.offset() < 0)
        throw domain_error("decomposition order violation: series has q-order below 0");

    std::vector<Rat> e;
    Series r = gc;
    while (r.trunc() > 0) {
        e.push_back(r.empty() || r.offset() > 0 ? Rat(0) : r.at_q(0));
        const Series num = is_zero(e.back()) ? r : r - Series::monomial(e.back(), 0, r.trunc());
        r = divide(num, u); // an empty numerator divides to a known-zero window
    }
    const long long k_have = static_cast<long long>(e.size());
    out.extracted_upto = n0 + k_have - 1;

    // Keep several shifted coefficients out of every solve; a candidate must
    // predict them all, which rules out fits that merely exhaust the window.
    const long long margin = 8;
    for (long long n_hi = n0; n_hi - n0 + 1 <= std::max<long long>(1, k_have - margin); ++n_hi) {
        const long long m = n_hi - n0 + 1; // number of unknowns
        if (m > k_have) break;
        std::vector<std::vector<Rat>> mat(static_cast<std::size_t>(m));
        std::vector<Rat> rhs(static_cast<std::size_t>(m));
        for (long long k = 0; k < m; ++k) {
            auto& row = mat[static_cast<std::size_t>(k)];
            row.resize(static_cast<std::size_t>(m));
            for (long long jj = 0; jj < m; ++jj) row[static_cast<std::size_t>(jj)] = binom(n0 + jj, k);
            rhs[static_cast<std::size_t>(k)] = e[static_cast<std::size_t>(k)];
        }
        std::vector<Rat> d = solve_linear(std::move(mat), std::move(rhs));
        bool consistent = true;
        for (long long k = m; k < k_have && consistent; ++k) {
            Rat acc = 0;
            for (long long jj = 0; jj < m; ++jj)
                acc += d[static_cast<std::size_t>(jj)] * binom(n0 + jj, k);
            consistent = (acc == e[static_cast<std::size_t>(k)]);
        }
        if (!consistent) continue;

        // reconstruct and compare on the full clipped window
        Series recon = Series::zero_on_window(cap);
        Series t_pow = pow_int(t.clipped(cap), n0);
        const Series t1 = t.clipped(cap);
        for (long long jj = 0; jj < m; ++jj) {
            if (!is_zero(d[static_cast<std::size_t>(jj)]))
                recon = recon + d[static_cast<std::size_t>(jj)] * t_pow;
            if (jj + 1 < m) t_pow = t_pow * t1;
        }
        const Exponent24 bound = std::min(recon.trunc(), gc.trunc());
        if (agree_up_to(recon, gc, bound).agree) {
            out.d = std::move(d);
            trim_trailing_zeros(out.d);
            out.residual_ok = true;
            return out;
        }
    }
    out.residual_ok = false;
    return out;
}

} // namespace detail

/// Writes f as p * y^ypow * sum_{n >= n0} d_n t^n and returns the d_n.
/// Bases opening at q^1 with a unit coefficient are solved greedily; bases
/// with constant term 1 go through the shifted solve above.
inline DecompositionResult t_basis_decompose(const Series& f, const Series& p, const Series& y,
                                             long long ypow, const Series& t, long long n0) {
    if (t.empty()) throw domain_error("decomposition basis vanishes on its window");
    const Series denom = p * pow_int(y, ypow);
    const Series g = divide(f, denom);
    if (t.offset() == 24 && (t.leading_coefficient() == 1 || t.leading_coefficient() == -1))
        return detail::decompose_triangular(g, t, n0);
    if (t.offset() == 0 && t.leading_coefficient() == 1)
        return detail::decompose_shifted(g, t, n0);
    throw domain_error("basis series must open at q^1 with a unit coefficient, or at q^0 with "
                       "constant term 1");
}

struct ProgressionFormulaReport {
    int alpha{0};
    long long terms_checked{0};
    bool pass{false};
    Exponent24 first_mismatch{0};
};

/// Checks the product formula for Ltilde_alpha: an explicit eta-free
/// prefactor times the generating function of cpsi_{6,0} on the arithmetic
/// progression 3^alpha n + lambda_alpha.
inline ProgressionFormulaReport verify_progression_formula(int alpha, long long min_terms) {
    if (alpha < 1) throw domain_error("alpha must be >= 1");
    ProgressionFormulaReport report;
    report.alpha = alpha;

    const LSequenceState state = build_L(Side::tilde, alpha, min_terms);
    if (!state.complete) throw precision_error("tilde chain: " + state.stop_reason);
    const Series& lhs = state.at(alpha);

    long long modulus = 1;
    for (int i = 0; i < alpha; ++i) modulus *= 3;
    const long long lam = lambda_alpha(alpha);
    const long long have_q = floor_div(lhs.trunc(), 24);
    const Series cpsi = cpsi60_eta(24 * (modulus * have_q + lam + 1));
    const Series sub = extract_progression(cpsi, modulus, lam);
    const Series prefactor = expand(named_constant(alpha % 2 == 1 ? "progression_prefactor_odd"
                                                                  : "progression_prefactor_even"),
                                    24 * have_q);
    const Series rhs = prefactor * sub;

    const Exponent24 bound = std::min(lhs.trunc(), rhs.trunc());
    const auto rep = agree_up_to(lhs, rhs, bound);
    report.terms_checked = floor_div(bound, 24);
    report.pass = rep.agree;
    report.first_mismatch = rep.first_mismatch;
    return report;
}

struct CongruenceRow {
    int alpha{0};
    long long tested{0};
    std::optional<long> min_val3; // nullopt: all tested coefficients were 0
    long required{0};
    bool pass{true};
};

struct CongruenceViolation {
    long long n{0};
    int alpha{0};
    long required{0};
    long actual{0};
};

struct CongruenceReport {
    std::string family; // "1.1" (cphi6) or "1.2" (cpsi60)
    long long n_max{0};
    std::vector<CongruenceRow> rows;
    std::vector<CongruenceViolation> violations;
    bool pass() const { return violations.empty(); }
};

/// Scans a generating function for the mod-3-power congruence family:
/// family 1.1 requires 4n = 1 (mod 3^alpha) on cphi6, family 1.2 requires
/// 2n = -1 (mod 3^alpha) on cpsi60; in both cases the claim is
/// val3(coefficient) >= floor(alpha/2) + 2 at the maximal alpha.
inline CongruenceReport verify_theorem(const std::string& family, long long n_max) {
    const bool is_phi = (family == "1.1");
    if (!is_phi && family != "1.2") throw domain_error("unknown congruence family: " + family);
    CongruenceReport report;
    report.family = family;
    report.n_max = n_max;

    const Series gen = is_phi ? cphi6_theta(24 * (n_max + 1)) : cpsi60_eta(24 * (n_max + 1));
    std::map<int, CongruenceRow> rows;
    for (long long n = 1; n <= n_max; ++n) {
        const long long witness = is_phi ? 4 * n - 1 : 2 * n + 1;
        int alpha = 0;
        for (long long w = witness; w % 3 == 0; w /= 3) ++alpha;
        if (alpha < 1) continue;
        const long required = alpha / 2 + 2;
        const Rat& c = gen.at_q(n);
        if (!is_integer(c))
            throw domain_error("non-integral coefficient at q^" + std::to_string(n));
        const auto v = val3(Int(c.get_num()));
        auto& row = rows[alpha];
        row.alpha = alpha;
        row.required = required;
        row.tested += 1;
        if (v && (!row.min_val3 || *v < *row.min_val3)) row.min_val3 = *v;
        if (v && *v < required) {
            row.pass = false;
            report.violations.push_back({n, alpha, required, *v});
        }
    }
    for (auto& [alpha, row] : rows) report.rows.push_back(row);
    return report;
}

} // namespace qseries
