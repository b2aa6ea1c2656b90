#pragma once

#include <map>
#include <string>

#include "qseries/etaq.hpp"

namespace qseries {

// Three independent constructions of the generating functions for the
// 6-colored Frobenius partition counts cpsi_{6,0}(n) and cphi_6(n):
//
//   * cpsi60_eta     -- a five-term eta-quotient formula,
//   * cpsi60_theta   -- a theta-building-block formula (h-pyramid),
//   * cphi6_theta    -- a phi/psi product formula,
//   * f6_zeta_oracle -- the two-variable theta oracle whose zeta^a slices
//                       reproduce both, used for triangulation.

namespace detail {

inline Series theta(long long m, long long a, Exponent24 trunc) {
    return theta_series(ThetaIndex{m, a}, trunc);
}

inline Series h20(Exponent24 trunc) {
    return theta(1, 1, trunc) * theta(1, 1, trunc) * theta(2, 0, trunc) +
           theta(1, 0, trunc) * theta(1, 0, trunc) * theta(2, 2, trunc);
}

inline Series h21(Exponent24 trunc) {
    return Rat(2) * (theta(1, 0, trunc) * theta(1, 1, trunc) * theta(2, 1, trunc));
}

inline Series h22(Exponent24 trunc) {
    return theta(1, 1, trunc) * theta(1, 1, trunc) * theta(2, 2, trunc) +
           theta(1, 0, trunc) * theta(1, 0, trunc) * theta(2, 0, trunc);
}

inline Series h30(Exponent24 trunc) {
    return theta(1, 1, trunc) * theta(6, 0, trunc) * h20(trunc) +
           Rat(2) * (theta(1, 0, trunc) * theta(6, 3, trunc) * h21(trunc)) +
           theta(1, 1, trunc) * theta(6, 6, trunc) * h22(trunc);
}

inline void require_integer_support(const Series& s, const char* what) {
    if (!s.integer_q_support())
        throw domain_error(std::string(what) + ": expansion left the integer q grid");
}

} // namespace detail

/// Generating function of cpsi_{6,0} from the five-term eta-quotient
/// formula; the coefficient of q^n is cpsi_{6,0}(n).
inline Series cpsi60_eta(Exponent24 trunc) {
    if (trunc < 24) throw precision_error("cpsi60 window must cover q^0", 24, trunc);
    Series s = expand(named_constant("cpsi60"), trunc);
    detail::require_integer_support(s, "cpsi60_eta");
    return s;
}

/// Same generating function assembled from theta building blocks.
inline Series cpsi60_theta(Exponent24 trunc) {
    if (trunc < 24) throw precision_error("cpsi60 window must cover q^0", 24, trunc);
    const Exponent24 work = trunc + 24;
    Series s = detail::h30(work);
    const Series eta1 = eta_series(1, work);
    for (int i = 0; i < 6; ++i) s = divide(s, eta1);
    s = shift(s, -12).clipped(trunc);
    detail::require_integer_support(s, "cpsi60_theta");
    return s;
}

/// Generating function of cphi_6 = cpsi_{6,3} from the phi/psi product
/// formula over (q;q)^6.
inline Series cphi6_theta(Exponent24 trunc) {
    if (trunc < 24) throw precision_error("cphi6 window must cover q^0", 24, trunc);
    const Exponent24 work = trunc + 72;
    const Series phi1 = phi_psi_series(ThetaKind::phi, work);
    const Series phi2 = dilate(phi_psi_series(ThetaKind::phi, ceil_div(work, 2) + 24), 2).clipped(work);
    const Series phi6 = dilate(phi_psi_series(ThetaKind::phi, ceil_div(work, 6) + 24), 6).clipped(work);
    const Series psi1 = phi_psi_series(ThetaKind::psi, work);
    const Series psi2 = dilate(phi_psi_series(ThetaKind::psi, ceil_div(work, 2) + 24), 2).clipped(work);
    const Series psi3 = dilate(phi_psi_series(ThetaKind::psi, ceil_div(work, 3) + 24), 3).clipped(work);
    const Series psi4 = dilate(phi_psi_series(ThetaKind::psi, ceil_div(work, 4) + 24), 4).clipped(work);
    const Series psi12 =
        dilate(phi_psi_series(ThetaKind::psi, ceil_div(work, 12) + 24), 12).clipped(work);

    const Series phi1_cubed = (phi1 * phi1) * phi1;
    Series numerator = phi1_cubed * phi2 * phi6 +
                       Rat(24) * shift(((psi1 * psi1) * psi1) * psi2 * psi3, 24) +
                       Rat(4) * shift(phi1_cubed * psi4 * psi12, 48);
    const Series pent = pentagonal_series(1, work);
    for (int i = 0; i < 6; ++i) numerator = divide(numerator, pent);
    Series s = numerator.clipped(trunc);
    detail::require_integer_support(s, "cphi6_theta");
    return s;
}

/// Coefficient of q^n with an explicit window check.
inline Rat coefficient(const Series& f, long long n) { return f.at_q(n); }

/// A Laurent object in zeta whose coefficients are q-series; slice(a) is
/// the coefficient series of zeta^a.  All slices share one truncation.
struct ZetaLaurentSeries {
    std::map<long long, Series> slices;
    long long zeta_range{0};
    Exponent24 trunc{0};

    const Series& slice(long long a) const {
        const auto it = slices.find(a);
        if (it == slices.end())
            throw domain_error("zeta exponent " + std::to_string(a) + " outside stored range " +
                               std::to_string(zeta_range));
        return it->second;
    }
};

namespace detail {

// Slices of the two-variable theta factor and its powers, indexed by
// doubled zeta-exponents so the half-integer lattice stays integral.
using ZetaSlices = std::map<long long, Series>;

inline ZetaSlices zeta_mul(const ZetaSlices& lhs, const ZetaSlices& rhs, Exponent24 work) {
    ZetaSlices out;
    for (const auto& [m1, s1] : lhs) {
        for (const auto& [m2, s2] : rhs) {
            if (s1.offset() + s2.offset() >= work) continue; // entirely beyond the window
            const Series prod = (s1 * s2).clipped(work);
            auto it = out.find(m1 + m2);
            if (it == out.end())
                out.emplace(m1 + m2, prod);
            else
                it->second = it->second + prod;
        }
    }
    return out;
}

} // namespace detail

/// Expands F_6(tau, z): the sixth power of the two-variable theta factor
/// divided by q^(1/2) eta^6, returned as all zeta^a slices with |a| <= j.
///
/// The overall constant is calibrated against cphi6_theta at n = 0, 1:
/// only a real 24th root of unity can keep the slices rational, so +1 and
/// -1 are tried and anything else is reported as a convention failure.
inline ZetaLaurentSeries f6_zeta_oracle(Exponent24 trunc, long long j) {
    if (j < 6) throw domain_error("zeta range must cover |a| <= 6");
    if (trunc < 48)
        throw precision_error("oracle window must cover q^0 and q^1 for calibration", 48, trunc);
    const Exponent24 work = trunc + 24 + 18;

    // Base factor: sum over nu in Z + 1/2 of q^(nu^2/2) zeta^nu, stored by
    // mu = 2 nu; the x-exponent of a term is 3 mu^2.
    detail::ZetaSlices base;
    for (long long mu = 1; 3 * mu * mu < work; mu += 2) {
        base.emplace(mu, Series::monomial(Rat(1), 3 * mu * mu, work));
        base.emplace(-mu, Series::monomial(Rat(1), 3 * mu * mu, work));
    }
    const auto sq = detail::zeta_mul(base, base, work);
    const auto cube = detail::zeta_mul(sq, base, work);
    const auto sixth = detail::zeta_mul(cube, cube, work);

    const Series pent = pentagonal_series(1, work);
    ZetaLaurentSeries out;
    out.zeta_range = j;
    Exponent24 common = work;
    for (long long a = -j; a <= j; ++a) {
        const auto it = sixth.find(2 * a);
        Series s = (it == sixth.end()) ? Series::zero_on_window(work) : it->second;
        for (int i = 0; i < 6; ++i) s = divide(s, pent);
        s = shift(s, -18);
        common = std::min(common, s.trunc());
        out.slices.emplace(a, std::move(s));
    }
    for (auto& [a, s] : out.slices) s = s.clipped(std::min(common, trunc));
    out.trunc = std::min(common, trunc);

    // Calibrate the root-of-unity convention on the zeta^3 slice.
    const Series reference = cphi6_theta(std::min<Exponent24>(out.trunc, 24 * 4));
    const Rat c0 = out.slices.at(3).at_q(0);
    const Rat c1 = out.slices.at(3).at_q(1);
    if (c0 == reference.at_q(0) && c1 == reference.at_q(1)) return out;
    if (-c0 == reference.at_q(0) && -c1 == reference.at_q(1)) {
        for (auto& [a, s] : out.slices) s = Rat(-1) * s;
        return out;
    }
    throw domain_error(
        "theta convention calibration failed: no 24th root of unity makes the zeta^3 slice "
        "match the phi/psi construction (non-real roots cannot produce rational slices)");
}

} // namespace qseries
