#include <doctest.h>

#include <cmath>
#include <random>

#include "phidim/dimfunc.hpp"
#include "gen.hpp"

using namespace phidim;

TEST_CASE("dimfunc: evaluation of built-in kinds") {
    CHECK(eval_phi(DimensionFunction::constant(0.5), 0.1) == 0.5);
    CHECK(eval_phi(DimensionFunction::inverse_log(2), std::exp(-4.0)) == doctest::Approx(0.5).epsilon(1e-15));
    // log|log x| / |log x| at |log x| = e^2
    const double psi = eval_phi(DimensionFunction::psi(), std::exp(-std::exp(2.0)));
    CHECK(psi == doctest::Approx(0.2706705664732254).epsilon(1e-13));
    CHECK(eval_phi(DimensionFunction::abs_log(), 0.25) == doctest::Approx(std::log(4.0)));
    CHECK(eval_phi(DimensionFunction::theta_spectrum(0.5), 0.01) == doctest::Approx(1.0));  // 1/theta - 1
    // Psi clamp on (1/e, 1)
    CHECK(eval_phi(DimensionFunction::psi(), 0.5) == 0.0);
}

TEST_CASE("dimfunc: kind names round-trip") {
    for (PhiKind k : {PhiKind::Constant, PhiKind::InverseLog, PhiKind::Psi, PhiKind::AbsLog, PhiKind::Theta, PhiKind::Table})
        CHECK(phi_kind_from_string(to_string(k)) == k);
    CHECK_FALSE(phi_kind_from_string("bogus").has_value());
}

TEST_CASE("dimfunc: validation") {
    const auto grid = geometric_grid(2, 1, 60);
    CHECK(validate_dimension_function(DimensionFunction::constant(1), grid).pass);
    auto neg = validate_dimension_function(DimensionFunction::constant(-0.5), grid);
    CHECK_FALSE(neg.pass);
    CHECK_FALSE(neg.violation.empty());
    // (1/2)^5 < (1/4)^1: x^{1+Phi(x)} is not decreasing
    auto tab = DimensionFunction::table({{0.5, 4.0}, {0.25, 0.0}});
    CHECK_FALSE(validate_dimension_function(tab, geometric_grid(2, 1, 10)).pass);
}

TEST_CASE("dimfunc: every built-in kind is valid on base-2 and base-3 grids") {
    for (double b : {2.0, 3.0}) {
        const auto grid = geometric_grid(b, 1, 60);
        for (const auto& f : {DimensionFunction::constant(0), DimensionFunction::constant(2), DimensionFunction::inverse_log(1),
                              DimensionFunction::inverse_log(5), DimensionFunction::psi(), DimensionFunction::abs_log(),
                              DimensionFunction::theta_spectrum(0.3), DimensionFunction::theta_spectrum(0.9)}) {
            INFO(f.describe() << " base " << b);
            CHECK(validate_dimension_function(f, grid).pass);
        }
    }
}

TEST_CASE("dimfunc: L and doubling metadata") {
    CHECK(limsup_inv_L(DimensionFunction::constant(0.25)).L == 4);
    CHECK(limsup_inv_L(DimensionFunction::abs_log()).L == 0);
    CHECK(std::isinf(limsup_inv_L(DimensionFunction::inverse_log(1)).L));
    CHECK(std::isinf(limsup_inv_L(DimensionFunction::constant(0)).L));

    const auto grid = geometric_grid(2, 1, 60);
    auto c = is_doubling_function(DimensionFunction::constant(0.7), grid);
    CHECK(c.doubling);
    CHECK(c.c == doctest::Approx(1.0));
    auto a = is_doubling_function(DimensionFunction::abs_log(), grid);
    CHECK(a.doubling);
    CHECK(a.c <= 1.0 + 1e-12);

    // Psi(x)/Psi(x/2) maximized on a grid below e^{-e}, computed directly
    std::vector<double> deep;
    for (double x : grid)
        if (x <= std::exp(-std::exp(1.0))) deep.push_back(x);
    double oracle = 0;
    for (double x : deep) {
        auto ps = [](double y) { return std::log(-std::log(y)) / -std::log(y); };
        oracle = std::max(oracle, ps(x) / ps(x / 2));
    }
    auto p = is_doubling_function(DimensionFunction::psi(), deep);
    CHECK(p.doubling);
    CHECK(p.c <= 2.0);
    CHECK(p.c == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("dimfunc: phi_of_n") {
    CHECK(phi_of_n(DimensionFunction::constant(1), 5, 1.0 / 3) == doctest::Approx(5.0));
    for (int n : {1, 4, 17, 40})
        CHECK(phi_of_n(DimensionFunction::inverse_log(2.5), n, 1.0 / 3) == doctest::Approx(2.5 / std::log(3.0)).epsilon(1e-13));
    CHECK(phi_of_n(DimensionFunction::psi(), 10, 1.0 / 3) == doctest::Approx(std::log(10 * std::log(3.0)) / std::log(3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(phi_of_n(DimensionFunction::constant(1), 0, 0.5), DomainError);
    CHECK_THROWS_AS(phi_of_n(DimensionFunction::constant(1), 3, 1.0), DomainError);
}

TEST_CASE("dimfunc property: phi_of_n is n * Phi(r^n) bit for bit") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const DimensionFunction f = gen::builtin_phi(rng);
        // keep r^n above the 2^-64 domain floor
        const double r = gen::uniform(rng, 0.05, 0.9);
        const int n = gen::uniform_int(rng, 1, static_cast<int>(std::floor(-40 / std::log2(r))));
        INFO(f.describe() << " n=" << n << " r=" << r);
        CHECK(phi_of_n(f, n, r) == n * eval_phi(f, std::pow(r, n)));
    }
}

TEST_CASE("dimfunc property: constant L times delta is one") {
    gen::Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const double d = gen::uniform(rng, 1e-3, 50);
        CHECK(limsup_inv_L(DimensionFunction::constant(d)).L * d == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("dimfunc property: x^{1+Phi(x)} decreases along random geometric grids") {
    gen::Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const DimensionFunction f = gen::builtin_phi(rng);
        const double b = gen::uniform(rng, 1.5, 5);
        INFO(f.describe() << " b=" << b);
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 200; ++i) {
            // log of x^{1+Phi(x)} at x = b^-i, in the |log x| form
            const double t = i * std::log(b);
            const double v = -(1 + f.eval_abs_log(t)) * t;
            CHECK(v <= prev);
            prev = v;
        }
    }
}
