#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "phidim/measures.hpp"

using namespace phidim;

namespace {

Pt P(const char* q) { return Pt::from_rational(parse_rational(q)); }

DiscreteMeasureSpec poly_poly(const char* beta, const char* lambda, const char* p0) {
    DiscreteMeasureSpec s;
    s.position = SeqKind::Polynomial;
    s.weight = SeqKind::Polynomial;
    s.beta = parse_rational(beta);
    s.lambda = parse_rational(lambda);
    s.p0 = parse_rational(p0);
    return s;
}

DiscreteMeasureSpec exp_exp(const char* beta, const char* lambda, const char* p0) {
    DiscreteMeasureSpec s = poly_poly(beta, lambda, p0);
    s.position = SeqKind::Exponential;
    s.weight = SeqKind::Exponential;
    return s;
}

CascadeMeasureSpec stationary(int base, std::vector<Rational> ratios, int depth) {
    CascadeMeasureSpec s;
    s.base = base;
    s.ratios = std::move(ratios);
    s.depth = depth;
    return s;
}

}  // namespace

TEST_CASE("measures: ball oracle examples") {
    LebesgueUnit leb;
    auto e = ball_measure(leb, P("1/2"), P("1/4"));
    CHECK(e.lo() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.hi() == doctest::Approx(0.5).epsilon(1e-15));

    // atoms at 1 and 1/2 lie inside the open ball (0.4, 1.6)
    DiscreteMeasure pp(poly_poly("2", "1", "0"));
    auto b = ball_measure(pp, P("1"), P("3/5"));
    CHECK(b.contains(1.25));
    CHECK(b.rel_width() < 1e-12);

    // sum_{n>k} 2^-n = 2^-k: atoms at 3^-n with n >= k+1, the atom at 3^-k sits on the boundary
    DiscreteMeasure ee(exp_exp("2", "3", "0"));
    for (int k = 1; k <= 12; ++k) {
        auto t = ball_measure(ee, P("0"), Pt::inv_pow(3, k));
        INFO("k=" << k);
        CHECK(t.contains(std::ldexp(1.0, -k)));
        CHECK(t.rel_width() < 1e-9);
    }

    SSCMeasure cantor(cantor_spec(), 30);
    auto c = ball_measure(cantor, P("0"), P("1/9"));
    CHECK(c.contains(0.25));
    CHECK(c.rel_width() < 1e-9);
}

TEST_CASE("measures: empty ball is an error") {
    SSCMeasure cantor(cantor_spec(), 20);
    CHECK_THROWS_AS(ball_measure(cantor, P("1/2"), P("1/10")), EmptyBallError);
    DiscreteMeasure ee(exp_exp("2", "3", "0"));
    CHECK_THROWS_AS(ball_measure(ee, P("2"), P("1/2")), EmptyBallError);
}

TEST_CASE("measures: cascade and cylinder masses") {
    CascadeMeasure ft(stationary(2, {Rational(2, 3), Rational(1, 3)}, 20));
    CHECK(ft.interval_measure({0, 1}) == Rational(2, 9));
    CascadeMeasure tri(stationary(3, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, 20));
    CHECK(tri.interval_measure({2, 0, 1, 1, 2}) == Rational(1, 243));

    SelfSimilarSpec s{{Rational(1, 3), Rational(1, 3)}, {Rational(0), Rational(2, 3)}, {Rational(3, 4), Rational(1, 4)}};
    auto cyl = ssc_cylinder_measure(s, {0, 1});
    CHECK(cyl.mass == Rational(3, 16));
    auto geo = ssc_cylinder_measure(cantor_spec(), {1, 0});
    CHECK(geo.left == Rational(2, 3));
    CHECK(geo.right == Rational(7, 9));
    CHECK(ssc_cylinder_measure(cantor_spec(), {1, 1, 0, 1}).mass == Rational(1, 16));
}

TEST_CASE("measures: middle-child schedule") {
    CascadeMeasureSpec s;
    s.base = 3;
    s.middle_child = true;
    s.n_levels = CascadeMeasureSpec::default_schedule(30);
    s.p = {Rational(1, 4)};
    s.depth = 30;
    CHECK(s.n_levels.size() >= 3);
    CHECK(s.n_levels[0] == 1);
    for (std::size_t k = 1; k < s.n_levels.size(); ++k) CHECK(s.n_levels[k] == 9 * s.n_levels[k - 1]);
    CascadeMeasure m(s);
    // M_{n_j} = [3^-n_j, 2 * 3^-n_j] is the word 0...01; its middle children
    // carry p_j for n_j + 1 steps, then the ratio returns to 1/3
    const long long n2 = s.n_levels[1];
    std::vector<int> w(static_cast<std::size_t>(n2 - 1), 0);
    w.push_back(1);
    CHECK(m.interval_measure(w) == Rational(1, boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(n2))));
    for (long long k = 0; k <= n2; ++k) {
        const Rational before = m.interval_measure(w);
        w.push_back(1);
        CHECK(m.interval_measure(w) == before * Rational(1, 4));
    }
    const Rational before = m.interval_measure(w);
    w.push_back(1);
    CHECK(m.interval_measure(w) == before * Rational(1, 3));
    // left and right children of M_{n_j} split the remaining 3/4
    std::vector<int> left(static_cast<std::size_t>(n2 - 1), 0);
    left.push_back(1);
    const Rational parent = m.interval_measure(left);
    left.push_back(0);
    CHECK(m.interval_measure(left) == parent * Rational(3, 8));
    left.back() = 2;
    CHECK(m.interval_measure(left) == parent * Rational(3, 8));
}

TEST_CASE("measures: support nets") {
    SSCMeasure cantor(cantor_spec(), 30);
    for (int n = 1; n <= 6; ++n) {
        const double rho = std::pow(3.0, -n);
        auto net = cantor.support_net(rho);
        INFO("n=" << n);
        CHECK(net.size() == static_cast<std::size_t>(2 << n));
        for (const Pt& z : net) CHECK(ball_measure(cantor, z, Pt::inv_pow(3, 25)).hi() > 0);
    }
    DiscreteMeasureSpec spec = poly_poly("2", "1", "1/10");
    spec.N = 50;
    DiscreteMeasure pp(spec);
    auto net = pp.support_net(0.01);
    CHECK(net.size() >= 51);
    CHECK(std::any_of(net.begin(), net.end(), [](const Pt& z) { return z.v == 0.0; }));
}

TEST_CASE("measures: local dimensions") {
    LebesgueUnit leb;
    auto l = local_dimension_estimate(leb, P("3/10"), 2, 3, 30);
    CHECK(l.regression == doctest::Approx(1.0).epsilon(0.02));
    CHECK(l.lower == doctest::Approx(1.0).epsilon(0.02));
    CHECK(l.upper == doctest::Approx(1.0).epsilon(0.02));

    SSCMeasure cantor(cantor_spec(), 40);
    auto c = local_dimension_estimate(cantor, P("0"), 3, 1, 30);
    CHECK(c.regression == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.02));

    // s = (beta - 1)/lambda = 1/2 at the accumulation point
    DiscreteMeasure pp(poly_poly("3/2", "1", "0"));
    auto d = local_dimension_estimate(pp, P("0"), 2, 4, 40);
    CHECK(d.regression == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("measures property: nesting, total mass and atom floor") {
    gen::Rng rng(21);
    std::vector<MeasurePtr> ms = {
        std::make_shared<LebesgueUnit>(),
        std::make_shared<SSCMeasure>(cantor_spec(), 30),
        std::make_shared<CascadeMeasure>(stationary(2, {Rational(2, 3), Rational(1, 3)}, 60)),
        std::make_shared<DiscreteMeasure>(poly_poly("3/2", "1", "1/10")),
        std::make_shared<DiscreteMeasure>(exp_exp("2", "3", "0")),
    };
    for (const auto& mu : ms) {
        const auto net = mu->support_net(1e-3);
        const Enclosure total = mu->total_mass();
        auto all = ball_measure(*mu, P("1/2"), Pt::from_double(mu->diam() + 1));
        INFO(mu->kind());
        CHECK(all.lo() <= total.hi() * (1 + 1e-12));
        CHECK(all.hi() >= total.lo() * (1 - 1e-12));
        CHECK(all.rel_width() < 1e-9);
        for (int trial = 0; trial < 150; ++trial) {
            const Pt z = gen::pick(rng, net);
            const double r1 = std::exp(gen::uniform(rng, std::log(1e-6), 0));
            const double r2 = r1 * std::exp(gen::uniform(rng, 0, 5));
            const auto a = ball_measure(*mu, z, Pt::from_double(r1));
            const auto b = ball_measure(*mu, z, Pt::from_double(r2));
            CHECK(a.valid());
            CHECK(a.lo() <= b.hi());
        }
    }
    DiscreteMeasure pp(poly_poly("3/2", "1", "0"));
    for (int trial = 0; trial < 200; ++trial) {
        const long long k = gen::uniform_int(rng, 1, 500);
        const double r = std::exp(gen::uniform(rng, std::log(1e-9), 0));
        CHECK(ball_measure(pp, pp.position_pt(k), Pt::from_double(r)).log_lo >= pp.log_weight(k) - 1e-12);
    }
}

TEST_CASE("measures property: cascade conservation") {
    gen::Rng rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const int base = gen::uniform_int(rng, 2, 5);
        auto ratios = gen::simplex(rng, base, gen::uniform_int(rng, base, 40), true);
        CascadeMeasure m(stationary(base, ratios, 20));
        std::vector<int> w;
        const int len = gen::uniform_int(rng, 0, 8);
        for (int k = 0; k < len; ++k) w.push_back(gen::uniform_int(rng, 0, base - 1));
        Rational sum = 0;
        for (int d = 0; d < base; ++d) {
            auto c = w;
            c.push_back(d);
            sum += m.interval_measure(c);
        }
        CHECK(sum == m.interval_measure(w));
    }
}

TEST_CASE("measures property: Lebesgue doubling") {
    LebesgueUnit leb;
    gen::Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const Pt z = Pt::from_double(gen::uniform(rng, 0, 1));
        const Pt R = Pt::from_double(gen::uniform(rng, 1e-6, 0.5));
        const Pt R2 = Pt::from_double(2 * R.v);
        CHECK(ball_measure(leb, z, R2).hi() <= 4 * ball_measure(leb, z, R).lo());
    }
}

TEST_CASE("measures property: polynomial weight sums enclose the direct sum") {
    gen::Rng rng(24);
    for (int trial = 0; trial < 60; ++trial) {
        const Rational beta(gen::uniform_int(rng, 11, 50), 10);
        DiscreteMeasure pp(poly_poly(to_string(beta).c_str(), "1", "0"));
        const long long a = gen::uniform_int(rng, 1, 3000);
        const long long b = a + gen::uniform_int(rng, 0, 20000);
        long double direct = 0;
        for (long long n = b; n >= a; --n) direct += std::pow(static_cast<long double>(n), -static_cast<long double>(to_double(beta)));
        const Enclosure e = pp.weight_sum(a, b);
        INFO("beta=" << to_string(beta) << " a=" << a << " b=" << b);
        CHECK(e.lo() <= static_cast<double>(direct) * (1 + 1e-13));
        CHECK(e.hi() >= static_cast<double>(direct) * (1 - 1e-13));
        CHECK(e.rel_width() < 1e-10);
    }
}
