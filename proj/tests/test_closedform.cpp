#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "phidim/closedform.hpp"

using namespace phidim;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

DiscreteMeasureSpec spec(SeqKind pos, SeqKind w, double beta, double lambda, bool atom) {
    DiscreteMeasureSpec s;
    s.position = pos;
    s.weight = w;
    s.beta = rational_from_double(beta);
    s.lambda = rational_from_double(lambda);
    s.p0 = atom ? Rational(1, 10) : Rational(0);
    return s;
}

// poly-poly upper dimension, written out from the four-case table
double poly_poly_oracle(double beta, double lambda, double L, bool atom) {
    const double s = (beta - 1) / lambda, t = beta / (lambda + 1);
    if (!atom) return L >= lambda ? std::max(1.0, s) : std::max(t + L * (t - s), s);
    return L >= lambda ? s * L + std::max(1.0, s) : (1 + L) * std::max(s, t);
}

}  // namespace

TEST_CASE("closedform: SSC interval") {
    auto a = ssc_dimension_interval({1.0 / 3, 1.0 / 3}, {0.5, 0.5});
    CHECK(a.lo == doctest::Approx(std::log(2.0) / std::log(3.0)));
    CHECK(a.hi == doctest::Approx(std::log(2.0) / std::log(3.0)));
    auto b = ssc_dimension_interval({0.5, 0.25}, {0.5, 0.5});
    CHECK(b.lo == doctest::Approx(0.5));
    CHECK(b.hi == doctest::Approx(1.0));
    auto c = ssc_dimension_interval({1.0 / 3, 1.0 / 3}, {0.75, 0.25});
    CHECK(c.lo == doctest::Approx(0.2618595071429148));
    CHECK(c.hi == doctest::Approx(1.2618595071429148));
    CHECK_THROWS_AS(ssc_dimension_interval({0.5, 0.5}, {1.0, 0.0}), DomainError);
}

TEST_CASE("closedform: discrete measures") {
    PhiData half;
    half.L = 0.5;
    auto pp = discrete_phi_dimension(spec(SeqKind::Polynomial, SeqKind::Polynomial, 1.5, 1, false), half);
    CHECK(pp.value() == doctest::Approx(0.875));
    for (const auto& f : {DimensionFunction::constant(0), DimensionFunction::constant(1), DimensionFunction::abs_log()}) {
        auto ee = discrete_phi_dimension(spec(SeqKind::Exponential, SeqKind::Exponential, 2, 3, false), f);
        CHECK(ee.value() == doctest::Approx(std::log(2.0) / std::log(3.0)));
    }
    auto ee1 = discrete_phi_dimension(spec(SeqKind::Exponential, SeqKind::Exponential, 2, 3, true), DimensionFunction::constant(1));
    CHECK(ee1.value() == doctest::Approx(2 * std::log(2.0) / std::log(3.0)));
    // exp weights on polynomial positions: p_n = beta^-n, a_n = n^-lambda
    auto ep = discrete_phi_dimension(spec(SeqKind::Polynomial, SeqKind::Exponential, 2, 1, false), DimensionFunction::constant(1));
    CHECK(std::isinf(ep.value()));
    auto pe = discrete_phi_dimension(spec(SeqKind::Exponential, SeqKind::Polynomial, 2, 2, true), DimensionFunction::psi());
    CHECK(pe.value() == doctest::Approx(2.0));
    auto pe0 = discrete_phi_dimension(spec(SeqKind::Exponential, SeqKind::Polynomial, 2, 2, false), DimensionFunction::constant(1));
    CHECK(pe0.value() == doctest::Approx(0.0));
    auto pez = discrete_phi_dimension(spec(SeqKind::Exponential, SeqKind::Polynomial, 2, 2, false), DimensionFunction::constant(0));
    CHECK(std::isinf(pez.value()));
}

TEST_CASE("closedform property: poly-poly matches the case table and is continuous at L = lambda") {
    gen::Rng rng(41);
    for (int trial = 0; trial < 400; ++trial) {
        const double beta = gen::pick(rng, std::vector<double>{1.25, 1.5, 2, 2.5, 3, 4});
        const double lambda = gen::pick(rng, std::vector<double>{0.5, 1, 1.5, 2, 3});
        const bool atom = gen::coin(rng);
        const double L = gen::coin(rng) ? lambda : gen::uniform(rng, 0, 6);
        PhiData d;
        d.L = L;
        const auto r = discrete_phi_dimension(spec(SeqKind::Polynomial, SeqKind::Polynomial, beta, lambda, atom), d);
        INFO("beta=" << beta << " lambda=" << lambda << " L=" << L << " atom=" << atom);
        CHECK(r.value() == doctest::Approx(poly_poly_oracle(beta, lambda, L, atom)).epsilon(1e-12));
        // both branches at L = lambda
        const double s = (beta - 1) / lambda, t = beta / (lambda + 1);
        if (!atom) CHECK(std::max(1.0, s) == doctest::Approx(std::max(t + lambda * (t - s), s)));
        else if (s <= 1 && s <= t) CHECK(s * lambda + 1 == doctest::Approx((1 + lambda) * t));
    }
}

TEST_CASE("closedform: box and Frostman sandwich") {
    auto b = box_frostman_bounds(1, 0.5, 1);
    CHECK(b.upper_lo == 1);
    CHECK(b.upper_hi == 1.5);
    CHECK(b.lower_lo == 0);
    CHECK(b.lower_hi == 0.5);
    auto z = box_frostman_bounds(0.8, 0.3, 0);
    CHECK(z.upper_lo == z.upper_hi);
    CHECK(z.upper_lo == 0.8);
    CHECK(z.lower_lo == z.lower_hi);
    CHECK(z.lower_lo == 0.3);
    auto neg = box_frostman_bounds(1, 0.2, 2);
    CHECK(neg.lower_lo == doctest::Approx(-1.4));  // not clamped
    CHECK_THROWS_AS(box_frostman_bounds(0.5, 0.6, 1), DomainError);
    for (double th : {0.1, 0.5, 0.9}) {
        const double M = 1.3, F = 0.4;
        CHECK(theta_form_upper(M, F, th) == doctest::Approx((M - th * F) / (1 - th)));
        CHECK(box_frostman_bounds(M, F, th / (1 - th)).upper_hi == doctest::Approx((M - th * F) / (1 - th)));
    }
}

TEST_CASE("closedform: comparison transfer") {
    auto t = comparison_transfer_bounds(0.5, 1.2, 0.4, 2);
    CHECK(t.psi_upper_at_least == doctest::Approx(0.6));
    CHECK(t.psi_lower_at_most == doctest::Approx(1.4));
    auto near1 = comparison_transfer_bounds(1 - 1e-12, 1.2, 0.4, 2);
    CHECK(near1.psi_upper_at_least == doctest::Approx(1.2));
    CHECK(near1.psi_lower_at_most == doctest::Approx(0.4));
    CHECK(std::isinf(comparison_transfer_bounds(0.5, 1.2, 0.4, kInf).psi_lower_at_most));
    CHECK_THROWS_AS(comparison_transfer_bounds(1.5, 1, 1, 1), DomainError);
}

TEST_CASE("closedform: named reference values") {
    CHECK(example_reference_values("ftnotqa", {{"theta", 1.0}}).value() == doctest::Approx(2.584962500721156));
    const double rho = (std::sqrt(5.0) - 1) / 2;
    CHECK(example_reference_values("bc_lower", {{"p", 0.7}, {"delta", 0.2}, {"rho", rho}}).value() ==
          doctest::Approx(std::log(7.0 / 3.0) / (0.4 * std::fabs(std::log(rho)))));
    CHECK(example_reference_values("bc_lower", {{"p", 0.7}, {"delta", 0.2}}).value() == doctest::Approx(4.402).epsilon(1e-3));
    CHECK(example_reference_values("cascade_phi1", {{"liminf_p", 0.25}}).value() == doctest::Approx(std::log(4.0) / std::log(3.0)));
    CHECK_THROWS_AS(example_reference_values("nope", {}), DomainError);
}

TEST_CASE("closedform property: SSC interval symmetries") {
    gen::Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = gen::uniform_int(rng, 2, 6);
        std::vector<double> r, p;
        double sum = 0;
        for (int k = 0; k < m; ++k) {
            r.push_back(gen::uniform(rng, 0.01, 0.99));
            p.push_back(gen::uniform(rng, 0.05, 1));
            sum += p.back();
        }
        for (double& x : p) x /= sum;
        const auto a = ssc_dimension_interval(r, p);
        // a joint permutation leaves the interval unchanged
        std::vector<int> idx(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) idx[static_cast<std::size_t>(k)] = k;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<double> r2, p2;
        for (int k : idx) {
            r2.push_back(r[static_cast<std::size_t>(k)]);
            p2.push_back(p[static_cast<std::size_t>(k)]);
        }
        const auto b = ssc_dimension_interval(r2, p2);
        CHECK(a.lo == b.lo);
        CHECK(a.hi == b.hi);
        CHECK(a.lo <= a.hi);
        double lo = kInf, hi = -kInf;
        for (int k = 0; k < m; ++k) {
            const double v = std::log(p[static_cast<std::size_t>(k)]) / std::log(r[static_cast<std::size_t>(k)]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(a.lo == doctest::Approx(lo));
        CHECK(a.hi == doctest::Approx(hi));
    }
}
