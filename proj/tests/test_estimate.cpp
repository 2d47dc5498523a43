#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "phidim/estimate.hpp"

using namespace phidim;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

EstimationConfig cfg(int base, int n_max) {
    EstimationConfig c;
    c.base = base;
    c.n_max = n_max;
    return c;
}

DiscreteMeasureSpec discrete(SeqKind pos, SeqKind w, Rational beta, Rational lambda, Rational p0) {
    DiscreteMeasureSpec s;
    s.position = pos;
    s.weight = w;
    s.beta = std::move(beta);
    s.lambda = std::move(lambda);
    s.p0 = std::move(p0);
    return s;
}

// Least number of open radius-r balls covering pts, by dynamic programming
// over which point starts each ball (any optimal cover can be shifted so).
long long cover_dp(const std::vector<double>& pts, double r) {
    const std::size_t n = pts.size();
    std::vector<long long> best(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        std::size_t j = i;
        while (j < n && pts[j] < pts[i] + 2 * r) ++j;
        best[i] = 1 + best[j];
    }
    return n ? best[0] : 0;
}

}  // namespace

TEST_CASE("estimate: admissible pairs") {
    // Phi = 1, R = 2^-4: r <= R^2 = 2^-8
    const auto one = DimensionFunction::constant(1);
    const Pt R = Pt::inv_pow(2, 4);
    CHECK_FALSE(admissible(one, R, Pt::inv_pow(2, 7), 0, kInf));
    for (int j = 8; j <= 20; ++j) CHECK(admissible(one, R, Pt::inv_pow(2, j), 0, kInf));
    // Phi = 0 with lambda_min = 3: j > i + 3/log 2
    const auto zero = DimensionFunction::constant(0);
    CHECK_FALSE(admissible(zero, Pt::inv_pow(2, 2), Pt::inv_pow(2, 6), 3, kInf));
    CHECK(admissible(zero, Pt::inv_pow(2, 2), Pt::inv_pow(2, 7), 3, kInf));
    CHECK_FALSE(admissible(zero, Pt::inv_pow(2, 1), Pt::inv_pow(2, 10), 3, 0.25));  // above the cap
    // abs-log at R = 2^-4: r <= R^{1 + 4 log 2}, i.e. j >= 4 (1 + 4 log 2) = 15.09
    const auto al = DimensionFunction::abs_log();
    CHECK_FALSE(admissible(al, R, Pt::inv_pow(2, 15), 0, kInf));
    CHECK(admissible(al, R, Pt::inv_pow(2, 16), 0, kInf));
    EstimationConfig c = cfg(2, 40);
    c.lambda_min = 0;
    c.R_cap = 1.0 / 16;
    CHECK(first_admissible_depth(al, c, 1.0 / 16) == 16);
}

TEST_CASE("estimate: depth below the first admissible pair is a config error") {
    SSCMeasure cantor(cantor_spec(), 20);
    EstimationConfig c = cfg(3, 3);
    try {
        estimate_upper_phi_dim(cantor, DimensionFunction::constant(0), c);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("first admissible depth is 4") != std::string::npos);
    }
}

TEST_CASE("estimate: config validation") {
    EstimationConfig c;
    c.n_max = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = EstimationConfig{};
    c.base = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = EstimationConfig{};
    c.lambda_min = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);  // geometric grids need lambda_min > 0
    c.R_grid = {Pt::ratio(1, 2)};
    c.r_grid = {Pt::ratio(1, 8)};
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("estimate: reference measures") {
    PointMass pm(Rational(1, 3));
    auto p = estimate_upper_phi_dim(pm, DimensionFunction::constant(0), cfg(2, 10));
    CHECK(p.value == doctest::Approx(0.0).epsilon(1e-12));

    SSCMeasure cantor(cantor_spec(), 30);
    const double d = std::log(2.0) / std::log(3.0);
    auto up = estimate_upper_phi_dim(cantor, DimensionFunction::constant(0), cfg(3, 14));
    auto lo = estimate_lower_phi_dim(cantor, DimensionFunction::constant(0), cfg(3, 14));
    CHECK(up.value == doctest::Approx(d).epsilon(0.05));
    CHECK(lo.value == doctest::Approx(d).epsilon(0.05));
    CHECK(lo.value <= up.value + 1e-12);
    CHECK(up.witness.valid);
    CHECK_FALSE(up.diverging);

    // atoms force the lower dimensions to 0
    DiscreteMeasure pp(discrete(SeqKind::Polynomial, SeqKind::Polynomial, Rational(3, 2), 1, 0));
    CHECK(estimate_lower_phi_dim(pp, DimensionFunction::constant(0), cfg(2, 12)).value <= 0.05);
    DiscreteMeasure ee(discrete(SeqKind::Exponential, SeqKind::Exponential, 2, 3, Rational(1, 10)));
    CHECK(estimate_lower_phi_dim(ee, DimensionFunction::constant(1), cfg(2, 12)).value <= 0.05);
}

TEST_CASE("estimate: Lebesgue lower dimension needs a wide log-ratio floor") {
    // boundary centers see mu(B(z,R))/mu(B(z,r)) = (R + z)/(2r), so the
    // deficit is about log 2 / log(R/r); lambda_min = 14 caps it near 0.05
    LebesgueUnit leb;
    EstimationConfig c = cfg(4, 12);
    c.lambda_min = 14;
    auto lo = estimate_lower_phi_dim(leb, DimensionFunction::constant(0), c);
    CHECK(lo.value == doctest::Approx(1.0).epsilon(0.05));
    auto up = estimate_upper_phi_dim(leb, DimensionFunction::constant(0), cfg(2, 12));
    CHECK(up.value == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("estimate: spectrum") {
    LebesgueUnit leb;
    auto s = estimate_spectrum(leb, {0.25, 0.5, 0.75}, cfg(2, 12));
    REQUIRE(s.rows.size() == 4);
    CHECK(s.rows[0].theta == 0);
    for (const auto& row : s.rows) CHECK(row.upper.value == doctest::Approx(1.0).epsilon(0.01));

    CascadeMeasureSpec cs;
    cs.base = 2;
    cs.ratios = {Rational(2, 3), Rational(1, 3)};
    cs.depth = 30;
    CascadeMeasure ft(cs);
    auto f = estimate_spectrum(ft, {0.3, 0.5, 0.7}, cfg(2, 20));
    CHECK(f.upper_nondecreasing_in_theta);
    for (std::size_t k = 2; k < f.rows.size(); ++k) CHECK(f.rows[k].upper.value >= f.rows[k - 1].upper.value - 1e-12);
    CHECK(f.rows[0].upper.value >= f.rows.back().upper.value - 1e-12);
}

TEST_CASE("estimate: Minkowski and Frostman dimensions") {
    LebesgueUnit leb;
    auto l = estimate_minkowski_frostman(leb, cfg(2, 16));
    CHECK(l.dim_M == doctest::Approx(1.0).epsilon(0.02));
    CHECK(l.dim_F == doctest::Approx(1.0).epsilon(0.1));
    SSCMeasure cantor(cantor_spec(), 30);
    auto c = estimate_minkowski_frostman(cantor, cfg(3, 14));
    CHECK(c.dim_M == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.02));
    CHECK(c.dim_F == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.02));
    SelfSimilarSpec b{{Rational(1, 3), Rational(1, 3)}, {Rational(0), Rational(2, 3)}, {Rational(3, 4), Rational(1, 4)}};
    SSCMeasure biased(b, 30);
    auto m = estimate_minkowski_frostman(biased, cfg(3, 14));
    CHECK(m.dim_M == doctest::Approx(std::log(4.0) / std::log(3.0)).epsilon(0.05));
    CHECK(m.dim_F == doctest::Approx(std::log(4.0 / 3.0) / std::log(3.0)).epsilon(0.05));
    CHECK(m.dim_F <= m.dim_M);
}

TEST_CASE("estimate: covering numbers") {
    CHECK(covering_number({0, 0.5, 1}, 0, 1, 0.3) == 2);
    CHECK(covering_number({0.25}, 0, 1, 1e-6) == 1);
    CHECK(covering_number({}, 0, 1, 0.1) == 0);
    SSCMeasure cantor(cantor_spec(), 20);
    std::vector<double> pts;
    for (const Pt& z : cantor.support_net(std::pow(3.0, -8))) pts.push_back(z.v);
    CHECK(pts.size() == 512);
    CHECK(covering_number(pts, 0, 1, std::pow(3.0, -8)) == 256);
}

TEST_CASE("estimate property: greedy covering is optimal") {
    gen::Rng rng(51);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> pts;
        const int n = gen::uniform_int(rng, 0, 40);
        for (int k = 0; k < n; ++k) pts.push_back(gen::uniform(rng, 0, 1));
        std::sort(pts.begin(), pts.end());
        const double a = gen::uniform(rng, -0.2, 0.6), b = a + gen::uniform(rng, 0, 0.8);
        const double r = gen::uniform(rng, 1e-3, 0.3);
        std::vector<double> in;
        for (double x : pts)
            if (x >= a && x <= b) in.push_back(x);
        CHECK(covering_number(pts, a, b, r) == cover_dp(in, r));
    }
}

TEST_CASE("estimate: set dimensions") {
    SSCMeasure cantor(cantor_spec(), 30);
    const double d = std::log(2.0) / std::log(3.0);
    for (const auto& f : {DimensionFunction::constant(0), DimensionFunction::constant(0.5), DimensionFunction::constant(1)}) {
        INFO(f.describe());
        CHECK(estimate_set_phi_dim(cantor, f, cfg(3, 14), Direction::Upper).value == doctest::Approx(d).epsilon(0.06));
    }
    // E = {1/n}: min(1, 1/((1 + lambda)(1 - theta))) = 1 at theta = 1/2, lambda = 1
    DiscreteMeasureSpec s = discrete(SeqKind::Polynomial, SeqKind::Polynomial, 2, 1, 0);
    s.N = 4096;
    DiscreteMeasure inv(s);
    CHECK(estimate_set_phi_dim(inv, DimensionFunction::theta_spectrum(0.5), cfg(2, 20), Direction::Upper).value ==
          doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("estimate: E = {3^-n} with the abs-log function decays slowly") {
    // N_r(B(0,R)) ~ log(R/r)/log 3, so alpha ~ log(L / log 3) / L with L = log(R/r)
    DiscreteMeasure e(discrete(SeqKind::Exponential, SeqKind::Exponential, 2, 3, 0));
    const double a40 = estimate_set_phi_dim(e, DimensionFunction::abs_log(), cfg(2, 40), Direction::Upper).value;
    const double a100 = estimate_set_phi_dim(e, DimensionFunction::abs_log(), cfg(2, 100), Direction::Upper).value;
    CHECK(a100 < a40);
    CHECK(a100 <= 0.1);
}

TEST_CASE("estimate: brute force examples") {
    AtomicMeasure one({{Rational(1, 2), Rational(1)}});
    auto o = brute_force_reference(one, DimensionFunction::constant(0), {Pt::ratio(1, 2), Pt::ratio(1, 4)},
                                   {Pt::ratio(1, 8), Pt::ratio(1, 16)});
    // log-ratio rounding may leave a denormal
    CHECK(std::fabs(o.upper) < 1e-12);
    CHECK(std::fabs(o.lower) < 1e-12);

    // z = 0: R = 1/2 gives ratio 1; R = 2 gives ratio 2 at R/r = 8, so alpha = 1/3
    AtomicMeasure two({{Rational(0), Rational(1, 2)}, {Rational(1), Rational(1, 2)}});
    auto t = brute_force_reference(two, DimensionFunction::constant(0), {Pt::ratio(1, 2), Pt::ratio(2, 1)}, {Pt::ratio(1, 4)});
    CHECK(t.upper == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(std::fabs(t.lower) < 1e-12);
    CHECK(t.upper_witness.R.v == 2.0);
    CHECK(t.upper_witness.r.v == 0.25);
    CHECK(t.triples == 4);
}

TEST_CASE("estimate property: full scan equals brute force on random atomic measures") {
    gen::Rng rng(52);
    const std::vector<Pt> Rg = {Pt::ratio(1, 2), Pt::ratio(1, 4), Pt::ratio(1, 8)};
    const std::vector<Pt> rg = {Pt::ratio(1, 16), Pt::ratio(1, 32), Pt::ratio(1, 64), Pt::ratio(1, 256), Pt::ratio(1, 1024)};
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<AtomicMeasure::Atom> atoms;
        const int n = gen::uniform_int(rng, 1, 8);
        const auto w = gen::simplex(rng, n, 97, true);
        for (int k = 0; k < n; ++k) atoms.push_back({gen::unit_rational(rng, 64), w[static_cast<std::size_t>(k)]});
        std::sort(atoms.begin(), atoms.end(), [](auto& a, auto& b) { return a.pos < b.pos; });
        atoms.erase(std::unique(atoms.begin(), atoms.end(), [](auto& a, auto& b) { return a.pos == b.pos; }), atoms.end());
        AtomicMeasure mu(atoms);
        const auto f = gen::coin(rng) ? DimensionFunction::constant(gen::pick(rng, std::vector<double>{0, 0.5, 1}))
                                      : DimensionFunction::inverse_log(1);
        EstimationConfig c;
        c.R_grid = Rg;
        c.r_grid = rg;
        c.lambda_min = 0;
        c.R_cap = kInf;
        const auto bf = brute_force_reference(mu, f, Rg, rg, 0, kInf);
        INFO("atoms " << atoms.size() << " " << f.describe());
        CHECK(estimate_upper_phi_dim(mu, f, c).value == bf.upper);
        CHECK(estimate_lower_phi_dim(mu, f, c).value == bf.lower);
    }
}

TEST_CASE("estimate property: results do not depend on the thread count") {
    CascadeMeasureSpec cs;
    cs.base = 2;
    cs.ratios = {Rational(3, 5), Rational(2, 5)};
    cs.depth = 40;
    CascadeMeasure mu(cs);
    std::vector<PhiRequest> reqs = {{DimensionFunction::constant(0)}, {DimensionFunction::constant(1)}, {DimensionFunction::abs_log()}};
    EstimationConfig c = cfg(2, 14);
    const auto a = estimate_many(mu, reqs, c);
    c.threads = 3;
    const auto b = estimate_many(mu, reqs, c);
    for (std::size_t k = 0; k < reqs.size(); ++k) {
        CHECK(a.upper[k].value == b.upper[k].value);
        CHECK(a.lower[k].value == b.lower[k].value);
        REQUIRE(a.upper[k].curve.size() == b.upper[k].curve.size());
        for (std::size_t j = 0; j < a.upper[k].curve.size(); ++j) {
            const double x = a.upper[k].curve[j], y = b.upper[k].curve[j];
            CHECK(((std::isnan(x) && std::isnan(y)) || x == y));
        }
    }
}

TEST_CASE("estimate property: record stream respects admissibility and enclosure sides") {
    SSCMeasure cantor(cantor_spec(), 30);
    const auto f = DimensionFunction::constant(0.5);
    EstimationConfig c = cfg(3, 10);
    const double cap = cantor.diam() / 2;
    std::size_t n = 0;
    scan_admissible_pairs(cantor, f, c, [&](const PairRecord& rec) {
        ++n;
        CHECK(admissible(f, rec.R, rec.r, c.lambda_min, cap));
        CHECK(rec.log_x_lo() <= rec.log_x_hi());
        CHECK(rec.big.valid());
        CHECK(rec.small.valid());
    });
    CHECK(n > 0);
}
