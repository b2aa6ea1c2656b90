#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qseries/etaq.hpp"

namespace qseries {

// Certification of eta-quotient identities on Gamma_0(N): Ligozat
// invariance conditions, cusp orders, and a conservative coefficient bound
// from the valence formula.  A certificate records everything needed to
// audit the claim: the invariance report per term, the per-cusp order
// table, the bound, and the verified agreement.

/// Cusp a/c of Gamma_0(N) with c | N and gcd(a, c) = 1; the class of the
/// infinite cusp is c = N.  Width is N / (c * gcd(c, N/c)).
struct Cusp {
    long long numerator{1};
    long long denominator{1};
    long long width{1};
    bool is_infinity{false};
};

/// One representative per Gamma_0(N)-class: phi(gcd(c, N/c)) choices of
/// numerator for each divisor c.
inline std::vector<Cusp> cusp_set(long long N) {
    if (N < 1) throw domain_error("level must be positive");
    std::vector<Cusp> out;
    for (long long c = 1; c <= N; ++c) {
        if (N % c != 0) continue;
        const long long g = std::gcd(c, N / c);
        for (long long rho = 1; rho <= g; ++rho) {
            if (std::gcd(rho, g) != 1) continue;
            long long a = rho;
            while (std::gcd(a, c) != 1) a += g;
            out.push_back(Cusp{a, c, N / (c * g), c == N});
        }
    }
    return out;
}

/// Ligozat order of eta(delta tau) at the cusp a/c of Gamma_0(N), in units
/// of the local variable there.  At the infinite cusp (c = N) this equals
/// the q-order delta/24 of the expansion, which anchors the normalization.
inline Rat eta_order_at_cusp(long long delta, long long c, long long N) {
    if (N < 1 || delta < 1 || c < 1 || N % delta != 0 || N % c != 0)
        throw domain_error("eta order needs delta | N and c | N");
    const long long g = std::gcd(c, N / c);
    const long long gcd_cd = std::gcd(c, delta);
    Rat order(static_cast<long>(N) * static_cast<long>(gcd_cd) * static_cast<long>(gcd_cd),
              static_cast<long>(24) * static_cast<long>(g) * static_cast<long>(c) *
                  static_cast<long>(delta));
    order.canonicalize();
    return order;
}

/// Order of a full quotient at a cusp: the eta orders add linearly with
/// the exponents.  Certification requires qshift == 0 (a bare q-power is
/// not Gamma_0(N)-invariant), which holders of combined terms guarantee.
inline Rat quotient_order_at_cusp(const EtaQuotient& q, const Cusp& cusp, long long N) {
    if (q.qshift != 0)
        throw domain_error("cusp orders are defined only for quotients without a q-shift");
    Rat order = 0;
    for (const auto& [t, r] : q.levels)
        order += Rat(static_cast<long>(r)) * eta_order_at_cusp(t, cusp.denominator, N);
    return order;
}

struct InvarianceReport {
    Rat weight{0};             // half the exponent sum
    bool weight_zero{false};
    long long residue_delta{0};   // sum delta * r_delta mod 24
    long long residue_ndelta{0};  // sum (N/delta) * r_delta mod 24
    bool cond_delta{false};
    bool cond_ndelta{false};
    bool square_condition{false}; // prod delta^{r_delta} is a rational square
    bool levels_divide{false};
    bool shift_zero{false};
    bool pass() const {
        return weight_zero && cond_delta && cond_ndelta && square_condition && levels_divide &&
               shift_zero;
    }
};

/// Ligozat conditions for a weight-0 modular function on Gamma_0(N).
inline InvarianceReport check_invariance(const EtaQuotient& q, long long N) {
    InvarianceReport rep;
    rep.shift_zero = (q.qshift == 0);
    rep.levels_divide = true;
    long long weight2 = 0, s_delta = 0, s_ndelta = 0;
    std::map<long long, long long> prime_parity;
    for (const auto& [t, r] : q.levels) {
        if (t < 1 || N % t != 0) rep.levels_divide = false;
        weight2 += r;
        s_delta += t * r;
        if (rep.levels_divide) s_ndelta += (N / t) * r;
        long long m = t;
        for (long long p = 2; p * p <= m; ++p)
            while (m % p == 0) {
                prime_parity[p] += r;
                m /= p;
            }
        if (m > 1) prime_parity[m] += r;
    }
    rep.weight = make_rat(static_cast<long>(weight2), 2);
    rep.weight_zero = (weight2 == 0);
    rep.residue_delta = ((s_delta % 24) + 24) % 24;
    rep.residue_ndelta = ((s_ndelta % 24) + 24) % 24;
    rep.cond_delta = (rep.residue_delta == 0);
    rep.cond_ndelta = (rep.residue_ndelta == 0);
    rep.square_condition = true;
    for (const auto& [p, e] : prime_parity)
        if (e % 2 != 0) rep.square_condition = false;
    return rep;
}

struct CuspOrderRow {
    Cusp cusp;
    Rat lhs_order{0}; // per-side lower bounds: min over terms
    Rat rhs_order{0};
};

struct Certificate {
    long long level{1};
    std::vector<InvarianceReport> lhs_invariance, rhs_invariance;
    std::vector<CuspOrderRow> orders;
    long long bound_q{0};   // agreement verified at every q-exponent <= bound_q
    bool verified{false};
    std::optional<Exponent24> mismatch_exponent;
    std::string note;
};

namespace detail {

inline Rat expression_order_bound(const EtaExpression& e, const Cusp& cusp, long long N) {
    bool first = true;
    Rat best = 0;
    for (const auto& term : e.terms) {
        const Rat o = quotient_order_at_cusp(term, cusp, N);
        if (first || o < best) best = o;
        first = false;
    }
    return best;
}

inline long long ceil_to_int(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q.get_si();
}

} // namespace detail

/// Certifies lhs == rhs as weight-0 modular functions on Gamma_0(N).
/// Precondition: every term on both sides passes the invariance check.
/// The bound is one more than the total possible pole order of the
/// difference away from infinity, so agreement below it forces equality.
inline Certificate certify_identity(const EtaExpression& lhs, const EtaExpression& rhs,
                                    long long N) {
    Certificate cert;
    cert.level = N;
    if (lhs.terms.empty() || rhs.terms.empty())
        throw domain_error("certification needs nonempty expressions");
    bool invariance_ok = true;
    for (const auto& term : lhs.terms) {
        cert.lhs_invariance.push_back(check_invariance(term, N));
        invariance_ok = invariance_ok && cert.lhs_invariance.back().pass();
    }
    for (const auto& term : rhs.terms) {
        cert.rhs_invariance.push_back(check_invariance(term, N));
        invariance_ok = invariance_ok && cert.rhs_invariance.back().pass();
    }
    if (!invariance_ok) {
        cert.note = "invariance failure: a term is not a weight-0 modular function on this level";
        return cert;
    }

    Rat pole_sum = 0;
    for (const Cusp& cusp : cusp_set(N)) {
        CuspOrderRow row;
        row.cusp = cusp;
        row.lhs_order = detail::expression_order_bound(lhs, cusp, N);
        row.rhs_order = detail::expression_order_bound(rhs, cusp, N);
        cert.orders.push_back(row);
        if (!cusp.is_infinity) {
            const Rat worst = std::min(row.lhs_order, row.rhs_order);
            if (worst < 0) pole_sum += -worst;
        }
    }
    cert.bound_q = 1 + detail::ceil_to_int(pole_sum);

    const Exponent24 window = 24 * (cert.bound_q + 1);
    const Series ls = expand(lhs, window);
    const Series rs = expand(rhs, window);
    const auto rep = agree_up_to(ls, rs, std::min(ls.trunc(), rs.trunc()));
    cert.verified = rep.agree;
    if (!rep.agree) {
        cert.mismatch_exponent = rep.first_mismatch;
        cert.note = "expansion disagreement at x^" + std::to_string(rep.first_mismatch);
    }
    return cert;
}

/// Certifies a theta lattice sum against an eta quotient.  The eta side
/// must be holomorphic at every cusp and satisfy the 24-divisibility
/// conditions at its (half-integral) weight; the theta side is holomorphic
/// by positivity of its exponents and classically modular of the same
/// weight, which the certificate assumes rather than re-derives.  The
/// agreement bound is the group index scaled by the weight, as in the
/// valence formula for holomorphic forms.
inline Certificate certify_theta_identity(const ThetaIndex& lhs_theta, const Rat& lhs_scalar,
                                          const EtaQuotient& rhs, long long N) {
    Certificate cert;
    cert.level = N;
    cert.note = "theta side: classical weight-1/2 form; modularity assumed, not re-derived";
    const InvarianceReport inv = check_invariance(rhs, N);
    cert.rhs_invariance.push_back(inv);
    // Half-integral weight forms carry a multiplier, so only the structural
    // conditions gate here; the 24-divisibility residues stay in the report.
    if (!inv.levels_divide || !inv.shift_zero || inv.weight != Rat(1, 2)) {
        cert.note += "; eta side fails the half-integral invariance data";
        return cert;
    }

    long long index = N; // [SL2(Z) : Gamma_0(N)] = N prod (1 + 1/p)
    long long m = N;
    for (long long p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            index = index / p * (p + 1);
            while (m % p == 0) m /= p;
        }
    if (m > 1) index = index / m * (m + 1);

    bool holomorphic = true;
    for (const Cusp& cusp : cusp_set(N)) {
        CuspOrderRow row;
        row.cusp = cusp;
        row.rhs_order = quotient_order_at_cusp(rhs, cusp, N);
        cert.orders.push_back(row);
        if (row.rhs_order < 0) holomorphic = false;
    }
    if (!holomorphic) {
        cert.note += "; eta side has a cusp pole, the holomorphic bound does not apply";
        return cert;
    }

    // weight k = 1/2: a holomorphic form vanishing past k * index / 12 at
    // infinity vanishes identically.
    cert.bound_q = detail::ceil_to_int(make_rat(index, 24)) + 1;
    const Exponent24 window = 24 * (cert.bound_q + 2);
    const Series ls = lhs_scalar * theta_series(lhs_theta, window);
    const Series rs = expand(rhs, window);
    const auto rep = agree_up_to(ls, rs, std::min(ls.trunc(), rs.trunc()));
    cert.verified = rep.agree;
    if (!rep.agree) {
        cert.mismatch_exponent = rep.first_mismatch;
        cert.note += "; expansion disagreement at x^" + std::to_string(rep.first_mismatch);
    }
    return cert;
}

} // namespace qseries
