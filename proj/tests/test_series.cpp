#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qseries/etaq.hpp"
#include "qseries/series.hpp"

using namespace qseries;

namespace {

Series q_poly(std::initializer_list<int> qcoeffs, long long extra_q_window = 0) {
    std::vector<Rat> v;
    for (int c : qcoeffs) {
        v.emplace_back(c);
        for (int i = 0; i < 23; ++i) v.emplace_back(0);
    }
    for (long long i = 0; i < 24 * extra_q_window; ++i) v.emplace_back(0);
    const Exponent24 tr = static_cast<Exponent24>(v.size());
    return Series(0, std::move(v), tr);
}

Series random_series(std::mt19937_64& rng, bool invertible = false) {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> len(8, 30);
    std::uniform_int_distribution<int> off(-6, 6);
    const int n = len(rng);
    std::vector<Rat> v(static_cast<std::size_t>(n));
    for (auto& c : v) c = make_rat(num(rng), den(rng));
    if (invertible && is_zero(v[0])) v[0] = 1;
    const Exponent24 o = off(rng);
    return Series(o, std::move(v), o + n);
}

// Independent term-by-term long division, kept deliberately naive: solves
// g from f*g = 1 one coefficient at a time with plain Rat arithmetic.
std::vector<Rat> naive_inverse(const std::vector<Rat>& f) {
    std::vector<Rat> g(f.size());
    g[0] = Rat(1) / f[0];
    for (std::size_t n = 1; n < f.size(); ++n) {
        Rat acc = 0;
        for (std::size_t k = 1; k <= n; ++k) acc += f[k] * g[n - k];
        g[n] = -acc / f[0];
    }
    return g;
}

} // namespace

TEST_CASE("ring operations: difference of squares") {
    const Series a = q_poly({1, 1}, 2);
    const Series b = q_poly({1, -1}, 2);
    const Series p = a * b;
    CHECK(p.at_q(0) == 1);
    CHECK(p.at_q(1) == 0);
    CHECK(p.at_q(2) == -1);
}

TEST_CASE("ring operations: additive inverse gives the zero window") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Series f = random_series(rng);
        const Series z = f + (-f);
        CHECK(z.empty());
        CHECK(z.trunc() == f.trunc());
    }
}

TEST_CASE("multiply against an independent long-division inverse") {
    // (q;q)-prefix times its naive inverse must be 1 + O(q^T).
    const long long T = 40;
    const Series pent = pentagonal_series(1, 24 * T);
    std::vector<Rat> dense(static_cast<std::size_t>(T));
    for (long long n = 0; n < T; ++n) dense[static_cast<std::size_t>(n)] = pent.at_q(n);
    const auto inv = naive_inverse(dense);
    const Series inv_series = Series::from_strided(0, 24, inv, 24 * T);
    const Series prod = pent * inv_series;
    CHECK(prod.at_q(0) == 1);
    for (long long n = 1; n < prod.q_terms(); ++n) CHECK(prod.at_q(n) == 0);
}

TEST_CASE("ring laws on random series") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const Series a = random_series(rng);
        const Series b = random_series(rng);
        const Series c = random_series(rng);
        CHECK(equal_on_overlap(a + b, b + a));
        CHECK(equal_on_overlap((a + b) + c, a + (b + c)));
        CHECK(equal_on_overlap(a * b, b * a));
        CHECK(equal_on_overlap((a * b) * c, a * (b * c)));
        CHECK(equal_on_overlap(a * (b + c), a * b + a * c));
    }
}

TEST_CASE("invert: geometric series") {
    const Series f = q_poly({1, -1}, 6);
    const Series g = invert(f);
    for (long long n = 0; n < g.q_terms(); ++n) CHECK(g.at_q(n) == 1);
}

TEST_CASE("invert: monomial") {
    const Series m = Series::monomial(Rat(3), -48, 48);
    const Series g = invert(m);
    CHECK(g.offset() == 48);
    CHECK(g.at(48) == Rat(1, 3));
}

TEST_CASE("invert round-trips on random invertible series") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const Series f = random_series(rng, /*invertible=*/true);
        const Series g = invert(f);
        CHECK(g.offset() == -f.offset());
        const Series prod = f * g;
        CHECK(prod.offset() == 0);
        CHECK(prod.leading_coefficient() == 1);
        for (Exponent24 e = 1; e < prod.trunc(); ++e) CHECK(is_zero(prod.at(e)));
    }
}

TEST_CASE("invert of the eta prefix counts partitions") {
    // Partition-number oracle: p(n) from the pentagonal recurrence,
    // independent of the series engine.
    const long long T = 50;
    std::vector<long long> p(static_cast<std::size_t>(T), 0);
    p[0] = 1;
    for (long long n = 1; n < T; ++n) {
        for (long long k = 1;; ++k) {
            const long long g1 = k * (3 * k - 1) / 2;
            const long long g2 = k * (3 * k + 1) / 2;
            if (g1 > n) break;
            const long long sgn = (k % 2 == 1) ? 1 : -1;
            p[n] += sgn * p[n - g1];
            if (g2 <= n) p[n] += sgn * p[n - g2];
        }
    }
    const Series inv = invert(eta_series(1, 24 * T + 1));
    REQUIRE(inv.offset() == -1);
    for (long long n = 0; n < T; ++n)
        CHECK(inv.at(24 * n - 1) == static_cast<long>(p[static_cast<std::size_t>(n)]));
}

TEST_CASE("pow_int basics and square-of-square property") {
    const Series one = pow_int(q_poly({3, 1, 4}), 0);
    CHECK(one.at(0) == 1);

    const Series sq = pow_int(q_poly({1, 1}, 2), 2);
    CHECK(sq.at_q(0) == 1);
    CHECK(sq.at_q(1) == 2);
    CHECK(sq.at_q(2) == 1);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        const Series f = random_series(rng);
        const Series lhs = pow_int(f, 4);
        const Series rhs = pow_int(pow_int(f, 2), 2);
        const Series naive = ((f * f) * f) * f;
        CHECK(equal_on_overlap(lhs, rhs));
        CHECK(equal_on_overlap(lhs, naive));
    }
}

TEST_CASE("U_m by definition") {
    const Series f = q_poly({5, 1, 0, 1, 0, 0, 7}, 2);
    const Series u = u_operator(f, 3);
    CHECK(u.at_q(0) == 5);
    CHECK(u.at_q(1) == 1);
    CHECK(u.at_q(2) == 7);

    CHECK(equal_on_overlap(u_operator(f, 1), f));
}

TEST_CASE("U_m rejects fractional support") {
    const Series theta = theta_series({1, 1}, 200);
    CHECK_THROWS_AS(u_operator(theta, 3), support_error);
    CHECK_THROWS_AS(negate_q(theta), support_error);
    CHECK_THROWS_AS(extract_progression(theta, 2, 0), support_error);
}

TEST_CASE("U_m linearity and the pull-out law") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 25; ++i) {
        // random integer-q-grid series
        auto draw = [&rng]() {
            std::uniform_int_distribution<int> num(-5, 5);
            std::uniform_int_distribution<int> len(4, 10);
            std::vector<Rat> v;
            const int n = len(rng);
            for (int k = 0; k < n; ++k) v.emplace_back(num(rng));
            return Series::from_strided(0, 24, v, 24 * n);
        };
        const Series f = draw();
        const Series g = draw();
        const Rat a(3, 2), b(-2, 1);
        CHECK(equal_on_overlap(u_operator(a * f + b * g, 3),
                               a * u_operator(f, 3) + b * u_operator(g, 3)));
        // U_3(g(q^3) f) = g(q) U_3(f)
        const Series lhs = u_operator(dilate(g, 3) * f, 3);
        const Series rhs = g * u_operator(f, 3);
        CHECK(equal_on_overlap(lhs, rhs));
    }
}

TEST_CASE("negate_q flips odd coefficients and is an involution") {
    const Series f = q_poly({0, 1, -3, 1}, 2);
    const Series n = negate_q(f);
    CHECK(n.at_q(1) == -1);
    CHECK(n.at_q(2) == -3);
    CHECK(n.at_q(3) == -1);
    CHECK(equal_on_overlap(negate_q(n), f));
    // fixes even-q-support series
    const Series even = dilate(q_poly({2, 5, -1}), 2);
    CHECK(equal_on_overlap(negate_q(even), even));
}

TEST_CASE("extract_progression by definition") {
    const Series f = q_poly({1, 2, 3, 4});
    const Series g = extract_progression(f, 2, 1);
    CHECK(g.at_q(0) == 2);
    CHECK(g.at_q(1) == 4);
    CHECK(equal_on_overlap(extract_progression(f, 1, 0), f));
}

TEST_CASE("val3_min") {
    const Series f = q_poly({9, 27, 18});
    CHECK(val3_min(f, 0, f.trunc()) == 2);

    const Series z = Series::zero_on_window(100);
    CHECK(!val3_min(z, 0, 100).has_value());

    Series frac = Series::monomial(Rat(1, 2), 24, 100);
    CHECK_THROWS_AS(val3_min(frac, 0, 100), domain_error);
    CHECK_THROWS_AS(val3_min(f, 0, f.trunc() + 1), precision_error);
}

TEST_CASE("agree_up_to reports the first mismatch") {
    const Series a = q_poly({1, 1}, 5);
    Series b = a + Series::monomial(Rat(1), 24 * 5, a.trunc());
    CHECK(agree_up_to(a, a, a.trunc()).agree);
    CHECK(agree_up_to(a, b, 24 * 3).agree);
    const auto rep = agree_up_to(a, b, 24 * 6);
    CHECK(!rep.agree);
    CHECK(rep.first_mismatch == 24 * 5);
    CHECK(rep.lhs == 0);
    CHECK(rep.rhs == 1);
    CHECK_THROWS_AS(agree_up_to(a, b, a.trunc() + 24), precision_error);
}

TEST_CASE("truncation soundness: higher precision never changes coefficients") {
    auto pipeline = [](Exponent24 trunc) {
        const Series t = expand(named_constant("t"), trunc);
        return invert(t) + Rat(9) * pow_int(t, 2) + Rat(3) * t;
    };
    const Series small = pipeline(24 * 30);
    const Series big = pipeline(24 * 90);
    CHECK(agree_up_to(small, big, std::min(small.trunc(), big.trunc())).agree);
}

TEST_CASE("zero representation keeps an explicit truncation") {
    const Series z = Series::zero_on_window(240);
    CHECK(z.empty());
    CHECK(z.trunc() == 240);
    CHECK_THROWS_AS(invert(z), domain_error);
    const Series prod = z * q_poly({1, 2});
    CHECK(prod.empty());
}
