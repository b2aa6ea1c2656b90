// Acceptance suite: runs every top-level claim the engine is built to
// support, one PASS/FAIL line each, nonzero exit if anything fails.
//
//  1. the two cpsi60 constructions agree for n <= 1000 (<= 60 s)
//  2. zeta-oracle triangulation of both generating functions, n <= 100
//  3. mod-3-power scan of cpsi60 up to n = 20000 (<= 300 s), reaching
//     progressions of level 3^9
//  4. the same scan for cphi6 up to n = 20000
//  5. identity certificates (including a refuted negative control)
//  6. the Atkin-Lehner transformation table, verified to 200 q-terms
//  7. L-chain divisibility floors through alpha = 4 on both sides
//  8. d-coefficient transfer between the plain and tilde decompositions
//  9. the arithmetic-progression product formula at alpha = 1 and 2
// 10. integrality of 2*ytilde alongside a genuine denominator 2 in ytilde

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qseries/certify.hpp"
#include "qseries/genfun.hpp"
#include "qseries/involution.hpp"
#include "qseries/usequence.hpp"

using namespace qseries;

namespace {

int failures = 0;

double run_timed(const std::function<bool(std::string&)>& body, int number, const char* title) {
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, title,
                seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
    return seconds;
}

EtaExpression t_polynomial(const std::string& symbol) {
    const EtaQuotient t = named_constant(symbol).terms.at(0);
    EtaExpression e;
    e.terms.push_back(t.pow(-1));
    EtaQuotient c27;
    c27.scalar = 27;
    e.terms.push_back(c27);
    EtaQuotient t1 = t;
    t1.scalar = 3;
    e.terms.push_back(t1);
    EtaQuotient t2 = t.pow(2);
    t2.scalar = 9;
    e.terms.push_back(t2);
    return e;
}

EtaExpression binomial_power_expression(const EtaQuotient& base, int power) {
    EtaExpression e;
    for (int k = 0; k <= power; ++k) {
        EtaQuotient term = base.pow(k);
        long long c = 1;
        for (int i = 0; i < k; ++i) c = c * (power - i) / (i + 1);
        term.scalar *= static_cast<long>(c);
        e.terms.push_back(term);
    }
    return e;
}

} // namespace

int main() {
    // 1: dual construction of the cpsi60 generating function
    run_timed(
        [](std::string& detail) {
            const auto t0 = std::chrono::steady_clock::now();
            const Exponent24 T = 24 * 1001;
            const Series via_eta = cpsi60_eta(T);
            const Series via_theta = cpsi60_theta(T);
            const auto rep = agree_up_to(via_eta, via_theta, T);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (!rep.agree) {
                detail = "mismatch at x^" + std::to_string(rep.first_mismatch);
                return false;
            }
            if (via_eta.at_q(0) != 20) {
                detail = "constant term is not 20";
                return false;
            }
            if (secs > 60.0) {
                detail = "runtime " + std::to_string(secs) + "s exceeds 60s";
                return false;
            }
            return true;
        },
        1, "dual cpsi60 formulas agree through n = 1000");

    // 2: oracle triangulation
    run_timed(
        [](std::string& detail) {
            const Exponent24 T = 24 * 101;
            const ZetaLaurentSeries oracle = f6_zeta_oracle(T, 6);
            const Series phi = cphi6_theta(T);
            const Series psi = cpsi60_eta(T);
            for (long long n = 0; n <= 100; ++n) {
                if (oracle.slice(3).at_q(n) != phi.at_q(n)) {
                    detail = "zeta^3 slice differs at n = " + std::to_string(n);
                    return false;
                }
                if (oracle.slice(0).at_q(n) != psi.at_q(n)) {
                    detail = "zeta^0 slice differs at n = " + std::to_string(n);
                    return false;
                }
            }
            if (phi.at_q(1) != 36) {
                detail = "cphi6(1) is not 36";
                return false;
            }
            return true;
        },
        2, "zeta oracle reproduces both generating functions, n <= 100");

    // 3: cpsi60 congruence scan to 20000
    run_timed(
        [](std::string& detail) {
            const auto t0 = std::chrono::steady_clock::now();
            const CongruenceReport report = verify_theorem("1.2", 20000);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            int max_alpha = 0;
            for (const auto& row : report.rows) max_alpha = std::max(max_alpha, row.alpha);
            if (!report.pass()) {
                detail = std::to_string(report.violations.size()) + " violations";
                return false;
            }
            if (max_alpha < 9) {
                detail = "largest progression level is 3^" + std::to_string(max_alpha);
                return false;
            }
            if (secs > 300.0) {
                detail = "runtime " + std::to_string(secs) + "s exceeds 300s";
                return false;
            }
            detail = "alpha up to " + std::to_string(max_alpha) + ", zero violations";
            return true;
        },
        3, "cpsi60 3-adic scan, n <= 20000");

    // 4: cphi6 congruence scan to 20000
    run_timed(
        [](std::string& detail) {
            const CongruenceReport report = verify_theorem("1.1", 20000);
            if (!report.pass()) {
                detail = std::to_string(report.violations.size()) + " violations";
                return false;
            }
            int max_alpha = 0;
            for (const auto& row : report.rows) max_alpha = std::max(max_alpha, row.alpha);
            detail = "alpha up to " + std::to_string(max_alpha) + ", zero violations";
            return true;
        },
        4, "cphi6 3-adic scan, n <= 20000");

    // 5: identity certificates
    run_timed(
        [](std::string& detail) {
            struct Item {
                const char* name;
                bool expect_verified;
                std::function<Certificate()> run;
            };
            const std::vector<Item> items = {
                {"L0-t", true,
                 [] { return certify_identity(named_constant("L0"), t_polynomial("t"), 24); }},
                {"jtp-theta-1-0", true,
                 [] {
                     return certify_theta_identity(
                         {1, 0}, 1, EtaQuotient(1, 0, {{2, 5}, {1, -2}, {4, -2}}), 16);
                 }},
                {"jtp-theta-1-1", true,
                 [] {
                     return certify_theta_identity({1, 1}, 1, EtaQuotient(2, 0, {{4, 2}, {2, -1}}),
                                                   16);
                 }},
                {"jtp-theta-2-1", true,
                 [] {
                     return certify_theta_identity({2, 1}, 1, EtaQuotient(1, 0, {{2, 2}, {1, -1}}),
                                                   16);
                 }},
                {"p0-t", true,
                 [] {
                     return certify_identity(
                         named_constant("p0"),
                         binomial_power_expression(named_constant("t").terms.at(0), 4), 24);
                 }},
                {"p1-t", true,
                 [] {
                     return certify_identity(
                         named_constant("p1"),
                         binomial_power_expression(named_constant("t").terms.at(0), 2), 24);
                 }},
                {"p0tilde-t", true,
                 [] {
                     return certify_identity(
                         named_constant("p0tilde"),
                         binomial_power_expression(named_constant("ttilde").terms.at(0), 4), 12);
                 }},
                {"p1tilde-t", true,
                 [] {
                     return certify_identity(
                         named_constant("p1tilde"),
                         binomial_power_expression(named_constant("ttilde").terms.at(0), 2), 12);
                 }},
                {"Ltilde0-cpsi", true,
                 [] {
                     EtaExpression rhs;
                     const EtaQuotient pre = named_constant("Ltilde0_prefactor").terms.at(0);
                     for (const auto& term : named_constant("cpsi60").terms)
                         rhs.terms.push_back(pre.times(term));
                     return certify_identity(t_polynomial("ttilde"), rhs, 24);
                 }},
                {"negative-control", false,
                 [] {
                     EtaExpression bad = t_polynomial("t");
                     bad.terms.push_back(named_constant("t").terms.at(0).pow(5));
                     return certify_identity(named_constant("L0"), bad, 24);
                 }},
            };
            for (const auto& item : items) {
                const Certificate cert = item.run();
                if (cert.verified != item.expect_verified) {
                    detail = std::string(item.name) + ": " + cert.note;
                    return false;
                }
            }
            detail = std::to_string(items.size() - 1) + " verified, negative control refuted";
            return true;
        },
        5, "valence-formula certificates");

    // 6: transformation table
    run_timed(
        [](std::string& detail) {
            const TransformTableReport report = verify_transform_table(200);
            if (!report.matrix_check || !report.gamma_check) {
                detail = "matrix composition check failed";
                return false;
            }
            for (const auto& row : report.rows) {
                if (!row.verified) {
                    detail = row.symbol + ": " + row.note;
                    return false;
                }
            }
            return true;
        },
        6, "Atkin-Lehner transformation table, 200 q-terms");

    // 7 and 8 share the chains
    LSequenceState plain, tilde;
    run_timed(
        [&](std::string& detail) {
            plain = build_L(Side::plain, 4, 20);
            tilde = build_L(Side::tilde, 4, 20);
            if (!plain.complete || !tilde.complete) {
                detail = plain.complete ? tilde.stop_reason : plain.stop_reason;
                return false;
            }
            if (plain.entries.back().q_precision < 20 || tilde.entries.back().q_precision < 20) {
                detail = "fewer than 20 guaranteed terms at the top entry";
                return false;
            }
            for (const LSequenceState* st : {&plain, &tilde}) {
                for (const auto& row : check_divisibility(*st)) {
                    if (!row.pass) {
                        detail = "alpha " + std::to_string(row.alpha) + " below the floor";
                        return false;
                    }
                }
            }
            return true;
        },
        7, "L-chain 3-adic floors, both sides, alpha <= 4");

    run_timed(
        [&](std::string& detail) {
            if (!plain.complete || !tilde.complete) {
                detail = "chains unavailable";
                return false;
            }
            for (const int alpha : {1, 2}) {
                const bool odd = alpha % 2 == 1;
                long long pw3 = 1;
                for (int i = 0; i <= alpha; ++i) pw3 *= 3;
                const long long ypow = odd ? pw3 - 1 : pw3 - 3;
                const long long n0 = odd ? -1 : 0;

                const Exponent24 Tp = plain.at(alpha).trunc();
                const auto dp = t_basis_decompose(
                    plain.at(alpha), expand(named_constant(odd ? "p0" : "p1"), Tp),
                    expand(named_constant("y"), Tp), ypow, expand(named_constant("t"), Tp), n0);
                const Exponent24 Tt = tilde.at(alpha).trunc();
                const auto dt = t_basis_decompose(
                    tilde.at(alpha), expand(named_constant(odd ? "p0tilde" : "p1tilde"), Tt),
                    expand(named_constant("ytilde"), Tt), ypow,
                    expand(named_constant("ttilde"), Tt), n0);
                if (!dp.residual_ok || !dt.residual_ok) {
                    detail = "alpha " + std::to_string(alpha) + ": residual not clean";
                    return false;
                }
                if (dp.d.size() != dt.d.size()) {
                    detail = "alpha " + std::to_string(alpha) + ": list lengths differ (" +
                             std::to_string(dp.d.size()) + " vs " + std::to_string(dt.d.size()) +
                             ")";
                    return false;
                }
                for (std::size_t i = 0; i < dp.d.size(); ++i) {
                    if (dp.d[i] != dt.d[i]) {
                        detail = "alpha " + std::to_string(alpha) + ": entry " +
                                 std::to_string(i) + " differs";
                        return false;
                    }
                }
            }
            detail = "identical coefficient lists at alpha = 1 and 2";
            return true;
        },
        8, "d-coefficients transfer between the chains");

    // 9: progression product formula
    run_timed(
        [](std::string& detail) {
            const auto r1 = verify_progression_formula(1, 100);
            if (!r1.pass) {
                detail = "alpha 1 mismatch at x^" + std::to_string(r1.first_mismatch);
                return false;
            }
            const auto r2 = verify_progression_formula(2, 30);
            if (!r2.pass) {
                detail = "alpha 2 mismatch at x^" + std::to_string(r2.first_mismatch);
                return false;
            }
            detail = "alpha 1 on " + std::to_string(r1.terms_checked) + " terms, alpha 2 on " +
                     std::to_string(r2.terms_checked);
            return true;
        },
        9, "progression product formula, alpha = 1 and 2");

    // 10: the half-integral scalar of ytilde
    run_timed(
        [](std::string& detail) {
            const Series yt = expand(named_constant("ytilde"), 24 * 501);
            bool saw_denominator_2 = false;
            for (long long n = 0; n < 500; ++n) {
                const Rat& c = yt.at_q(n);
                if (!is_integer(Rat(2) * c)) {
                    detail = "2*ytilde not integral at n = " + std::to_string(n);
                    return false;
                }
                if (!is_integer(c)) saw_denominator_2 = true;
            }
            if (!saw_denominator_2) {
                detail = "no coefficient with denominator 2 found";
                return false;
            }
            return true;
        },
        10, "2*ytilde is integral, ytilde itself is not");

    std::printf("%s: %d of 10 criteria passed\n", failures == 0 ? "SUCCESS" : "FAILURE",
                10 - failures);
    return failures == 0 ? 0 : 1;
}
