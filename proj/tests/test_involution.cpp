#include <catch2/catch_amalgamated.hpp>

#include "qseries/involution.hpp"

using namespace qseries;

namespace {
using L = std::map<long long, long long>;
}

TEST_CASE("W_e construction enforces exact divisibility") {
    CHECK_NOTHROW(ALInvolution::w4());
    // 4 does not exactly divide 72 (gcd(4, 18) = 2)
    CHECK_THROWS_AS(ALInvolution(4, 72, {{{28, 3}, {72, 4}}}), domain_error);
    CHECK_THROWS_AS(ALInvolution(4, 36, {{{28, 3}, {36, 5}}}), domain_error);
}

TEST_CASE("w_levels moves levels by e*t/gcd(e,t)^2") {
    const ALInvolution w = ALInvolution::w4();
    const L in{{1, 1}, {2, 1}, {4, 1}, {9, 1}, {18, 1}, {36, 1}};
    const L out = w_levels(in, w);
    CHECK(out == L{{4, 1}, {2, 1}, {1, 1}, {36, 1}, {18, 1}, {9, 1}});

    // e = 1 is the identity
    const ALInvolution id(1, 36, {{{1, 0}, {0, 1}}});
    CHECK(w_levels(in, id) == in);

    // applying the same involution twice returns the original map
    CHECK(w_levels(out, w) == in);

    CHECK_THROWS_AS(w_levels(L{{5, 1}}, w), domain_error);
}

TEST_CASE("q -> -q rewrite on single levels") {
    EtaQuotient e1(1, 0, L{{1, 1}});
    CHECK(qneg_rewrite(e1).levels == L{{2, 3}, {1, -1}, {4, -1}});

    EtaQuotient e2(1, 0, L{{2, 1}});
    CHECK(qneg_rewrite(e2).levels == L{{2, 1}});

    // double application restores the level multiset
    EtaQuotient mixed(1, 0, L{{1, 2}, {3, -1}, {4, 5}});
    CHECK(qneg_rewrite(qneg_rewrite(mixed)).levels == mixed.levels);
}

TEST_CASE("q -> -q rewrite matches the series-level substitution") {
    // eta_1-prefix: (q;q)_inf transforms to (q^2)^3 / ((q)(q^4)) up to sign
    const Exponent24 T = 24 * 200;
    const Series lhs = negate_q(pentagonal_series(1, T));
    const EtaQuotient image = qneg_rewrite(EtaQuotient(1, 0, L{{1, 1}}));
    // strip the intrinsic eta prefactor q^(sum t r / 24) = q^(1/24):
    // the image has lead exponent 1, the pochhammer side has lead 0.
    const Series rhs = shift(expand(image, T + 1), -1).clipped(T);
    CHECK(agree_up_to(lhs, rhs, std::min(lhs.trunc(), rhs.trunc())).agree);
}

TEST_CASE("chain reproduces the printed tilde level data") {
    const ALInvolution w = ALInvolution::w4();
    const EtaQuotient a_img = chain_transform(named_constant("A").terms.at(0), w);
    CHECK(a_img.levels == named_constant("Atilde").terms.at(0).levels);

    const EtaQuotient b_img = chain_transform(named_constant("B").terms.at(0), w);
    CHECK(b_img.levels == named_constant("Btilde").terms.at(0).levels);

    const EtaQuotient t_img = chain_transform(named_constant("t").terms.at(0), w);
    CHECK(t_img.levels == named_constant("ttilde").terms.at(0).levels);
}

TEST_CASE("chain preserves the total eta weight") {
    const ALInvolution w = ALInvolution::w4();
    for (const char* name : {"A", "B", "t", "y", "p0", "p1"}) {
        const EtaQuotient src = named_constant(name).terms.at(0);
        long long before = 0, after = 0;
        for (const auto& [t, r] : src.levels) before += r;
        for (const auto& [t, r] : chain_transform(src, w).levels) after += r;
        CHECK(before == after);
    }
}

TEST_CASE("calibration fixes the scalar by series matching") {
    const ALInvolution w = ALInvolution::w4();
    const Exponent24 bound = 24 * 200;

    const CalibratedQuotient a = calibrate(chain_transform(named_constant("A").terms.at(0), w),
                                           named_constant("Atilde").terms.at(0), bound);
    CHECK(a.scalar == 1);
    CHECK(a.qshift == 0);
    CHECK(a.verified_to >= bound - 48);

    const CalibratedQuotient y = calibrate(chain_transform(named_constant("y").terms.at(0), w),
                                           named_constant("ytilde").terms.at(0), bound);
    CHECK(y.scalar == Rat(-1, 2));

    // self-calibration
    const EtaQuotient t = named_constant("t").terms.at(0);
    const CalibratedQuotient self = calibrate(t, t, 24 * 60);
    CHECK(self.scalar == 1);
    CHECK(self.qshift == 0);

    // level mismatch is an error
    CHECK_THROWS_AS(calibrate(t, named_constant("y").terms.at(0), 24 * 60), domain_error);
}

TEST_CASE("transformation table verifies end to end") {
    const auto report = verify_transform_table(80);
    CHECK(report.matrix_check);
    CHECK(report.gamma_check);
    for (const auto& row : report.rows) {
        INFO(row.symbol << ": " << row.note);
        CHECK(row.verified);
    }
    CHECK(report.all_verified());
    CHECK(!report.notes.empty()); // the level-map derivation is logged
}

TEST_CASE("gamma element validation") {
    CHECK_NOTHROW(GammaElement(23, 14, 18, 11, 18));
    CHECK_THROWS_AS(GammaElement(23, 14, 18, 11, 36), domain_error); // 36 does not divide 18
    CHECK_THROWS_AS(GammaElement(2, 0, 0, 1, 1), domain_error);      // determinant 2
}
