#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "phidim/netintervals.hpp"

using namespace phidim;

namespace {

Rational rpow(const Rational& x, unsigned e) {
    Rational r = 1;
    for (unsigned i = 0; i < e; ++i) r *= x;
    return r;
}

QuadNumber qpow(const QuadNumber& x, int e, const QuadRing& R) {
    QuadNumber r(1);
    for (int i = 0; i < e; ++i) r = r.mul(x, R);
    return r;
}

void check_tiling(const NetSystem& sys, const std::vector<NetLevel>& levels) {
    const QuadRing& R = sys.ring();
    for (const auto& lv : levels) {
        INFO("level " << lv.n);
        REQUIRE_FALSE(lv.intervals.empty());
        CHECK(lv.intervals.front().left == QuadNumber(0));
        for (std::size_t i = 0; i + 1 < lv.intervals.size(); ++i) {
            const auto& a = lv.intervals[i];
            CHECK(a.length.sign(R) > 0);
            CHECK(a.left + a.length == lv.intervals[i + 1].left);
        }
        const auto& last = lv.intervals.back();
        CHECK(last.left + last.length == QuadNumber(1));
    }
}

}  // namespace

TEST_CASE("netintervals: dyadic levels") {
    NetSystem sys(EquicontractiveIFS::dyadic(Rational(1, 2)));
    auto levels = build_net_levels(sys, 8);
    check_tiling(sys, levels);
    for (const auto& lv : levels) {
        CHECK(lv.intervals.size() == (std::size_t(1) << lv.n));
        for (const auto& iv : lv.intervals) CHECK(iv.length == QuadNumber(Rational(1, 1 << lv.n)));
    }
    auto gap = finite_type_gap_check(sys, levels);
    CHECK(gap.a == doctest::Approx(1.0));
    CHECK(gap.F.size() <= 2);
    CHECK(gap.F_level <= 1);
}

TEST_CASE("netintervals: golden-mean lengths within [rho^{n+3}, rho^n]") {
    NetSystem sys(EquicontractiveIFS::golden_bc(Rational(7, 10)));
    const QuadRing& R = sys.ring();
    auto levels = build_net_levels(sys, 14);
    check_tiling(sys, levels);
    const QuadNumber rho = QuadNumber::rho(R);
    for (const auto& lv : levels) {
        const QuadNumber hi = qpow(rho, lv.n, R), lo = qpow(rho, lv.n + 3, R);
        for (const auto& iv : lv.intervals) {
            CHECK(compare(iv.length, hi, R) <= 0);
            CHECK(compare(iv.length, lo, R) >= 0);
        }
    }
    auto gap = finite_type_gap_check(sys, levels);
    CHECK(gap.a >= std::pow(R.approx, 3) - 1e-12);
    // finite type: the state count settles
    CHECK(gap.states <= 16);
}

TEST_CASE("netintervals: Psi-sharp IFS has half-length intervals at 1/2") {
    NetSystem sys(EquicontractiveIFS::psi_sharp());
    auto levels = build_net_levels(sys, 7);
    check_tiling(sys, levels);
    const QuadNumber half(Rational(1, 2));
    for (const auto& lv : levels) {
        if (lv.n == 0) continue;
        int touching = 0;
        for (const auto& iv : lv.intervals) {
            const bool ends_at = iv.left + iv.length == half, starts_at = iv.left == half;
            if (ends_at || starts_at) {
                ++touching;
                CHECK(iv.length == QuadNumber(Rational(1, 2) / rpow(Rational(3), static_cast<unsigned>(lv.n))));
            }
        }
        CHECK(touching == 2);
    }
    auto gap = finite_type_gap_check(sys, levels);
    CHECK(gap.a <= 0.5 + 1e-12);
}

TEST_CASE("netintervals: exact Q = P without overlap") {
    NetSystem sys(EquicontractiveIFS::dyadic(Rational(2, 3)));
    auto levels = build_net_levels(sys, 10);
    for (const auto& lv : levels) {
        const auto qp = net_interval_qp(sys, lv.intervals.front(), 8);
        CHECK(qp.Q == qp.P);
        CHECK(qp.P == rpow(Rational(2, 3), static_cast<unsigned>(lv.n)));
    }
}

TEST_CASE("netintervals: P_n sandwich and level sums") {
    for (const auto& ifs : {EquicontractiveIFS::golden_bc(Rational(7, 10)), EquicontractiveIFS::psi_sharp(),
                            EquicontractiveIFS::dyadic(Rational(1, 3))}) {
        NetSystem sys(ifs);
        auto levels = build_net_levels(sys, 9);
        auto rep = pn_sandwich_check(sys, levels);
        CHECK(rep.upper_ok);
        CHECK(rep.min_ratio > 0);
        const auto& lv = levels.back();
        Rational prevQ = -1;
        for (int k = 0; k <= 6; ++k) {
            Rational sq = 0, sp = 0;
            for (const auto& iv : lv.intervals) {
                auto qp = net_interval_qp(sys, iv, k);
                sq += qp.Q;
                sp += qp.P;
            }
            CHECK(sq <= 1);
            CHECK(sp >= 1);
            CHECK(sq >= prevQ);
            prevQ = sq;
        }
    }
}

TEST_CASE("netintervals: BC transition norms against the closed recurrences") {
    auto n = bc_transition_norms(Rational(1, 2), 0);
    REQUIRE_FALSE(n.empty());
    CHECK(n[0].norm_T0 == Rational(3, 4));
    const Mat2 t0 = bc_T0(Rational(1, 2));
    CHECK(t0.a == Rational(1, 4));
    CHECK(t0.b == Rational(1, 4));
    CHECK(t0.c == 0);
    CHECK(t0.d == Rational(1, 4));

    // ||T0^{2^k}|| = q^{2^k} + A_k + (1-p)^{2^{k+1}}, ||T1^{2^k}|| = p^{2^{k+1}} + B_k + q^{2^k}, q = p(1-p)
    const Rational p(7, 10), q = p * (1 - p);
    auto rows = bc_transition_norms(p, 6);
    REQUIRE(rows.size() >= 7);
    for (int k = 0; k <= 6; ++k) {
        Rational A = q, B = (1 - p) * (1 - p);
        for (int i = 0; i < k; ++i) {
            A *= rpow(q, 1u << i) + rpow(1 - p, 2u << i);
            B *= rpow(p, 2u << i) + rpow(q, 1u << i);
        }
        const auto& r = rows[static_cast<std::size_t>(k)];
        CHECK(r.k == k);
        CHECK(r.norm_T0 == rpow(q, 1u << k) + A + rpow(1 - p, 2u << k));
        CHECK(r.norm_T1 == rpow(p, 2u << k) + B + rpow(q, 1u << k));
    }
    // the growth ratio (p/(1-p))^{2^k} up to a constant
    for (int k = 2; k <= 6; ++k) {
        const double ratio = to_double(rows[k].norm_T1 / rows[k].norm_T0);
        CHECK(std::log(ratio) >= (1 << k) * std::log(7.0 / 3.0) + std::log(0.05));
    }
}

TEST_CASE("netintervals: doubling checks") {
    NetSystem leb(EquicontractiveIFS::dyadic(Rational(1, 2)));
    auto lev = build_net_levels(leb, 10);
    auto d = phi_doubling_check(leb, lev, DimensionFunction::constant(0));
    CHECK(d.pass);
    CHECK(d.C0 == doctest::Approx(1.0));

    // level-n masses are 2^{#zeros} / 3^n; the pair at 1/2 is 0 1^{n-1} | 1 0^{n-1}
    NetSystem ft(EquicontractiveIFS::dyadic(Rational(2, 3)));
    auto fl = build_net_levels(ft, 12);
    auto one = phi_doubling_check(ft, fl, DimensionFunction::constant(1));
    for (int n = 1; n <= 12; ++n) {
        INFO("n=" << n);
        CHECK(one.max_log_ratio[n] == doctest::Approx(std::max(1, n - 2) * std::log(2.0)).epsilon(1e-9));
        CHECK(one.scaled[n] == doctest::Approx(one.max_log_ratio[n] / (1 + n)).epsilon(1e-9));
    }
    // (n-2) log 2 / (1+n) settles only at deeper levels
    CHECK_FALSE(phi_doubling_check_deep(ft, DimensionFunction::constant(0), 64).pass);
    auto deep = phi_doubling_check_deep(ft, DimensionFunction::constant(1), 64);
    CHECK(deep.pass);
    CHECK(deep.C0 <= 2.0);

    NetSystem bc(EquicontractiveIFS::golden_bc(Rational(7, 10)));
    CHECK_FALSE(phi_doubling_check_deep(bc, DimensionFunction::constant(0), 128).pass);
    for (double delta : {0.1, 0.2, 0.5, 1.0}) {
        INFO("delta " << delta);
        CHECK(phi_doubling_check_deep(bc, DimensionFunction::constant(delta), 128).pass);
    }
}

TEST_CASE("netintervals: finite-type ball oracle") {
    auto sys = std::make_shared<NetSystem>(EquicontractiveIFS::dyadic(Rational(2, 3)));
    FiniteTypeMeasure mu(sys, 14);
    for (int n = 1; n <= 10; ++n) {
        const double c = std::pow(2.0 / 3.0, n);
        auto e = ball_measure(mu, Pt::ratio(0, 1), Pt::inv_pow(2, n), 1.0);
        INFO("n=" << n);
        CHECK(e.lo() >= c * (1 - 1e-12));
        CHECK(e.hi() <= (c + std::pow(2.0 / 3.0, n - 1) / 3) * (1 + 1e-12));
    }

    auto lsys = std::make_shared<NetSystem>(EquicontractiveIFS::dyadic(Rational(1, 2)));
    FiniteTypeMeasure leb(lsys, 16);
    gen::Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const double z = gen::uniform(rng, 0, 1), R = gen::uniform(rng, 1e-3, 0.5);
        const double exact = std::min(1.0, z + R) - std::max(0.0, z - R);
        auto e = ball_measure(leb, Pt::from_double(z), Pt::from_double(R), 1.0);
        CHECK(e.lo() <= exact * (1 + 1e-12));
        CHECK(e.hi() >= exact * (1 - 1e-12));
    }

    auto gsys = std::make_shared<NetSystem>(EquicontractiveIFS::golden_bc(Rational(7, 10)));
    FiniteTypeMeasure g(gsys, 14);
    const double Rmin = std::pow(gsys->ring().approx, 13);
    for (const Pt& z : g.support_net(1e-2)) CHECK(ball_measure(g, z, Pt::from_double(Rmin), 1.0).lo() > 0);
}

TEST_CASE("netintervals: exact decimal rendering of quadratic numbers") {
    const QuadRing G = QuadRing::golden();
    const QuadNumber rho = QuadNumber::rho(G);
    CHECK(to_decimal(rho, G, 20) == "0.61803398874989484820");
    CHECK(to_decimal(-rho, G, 5) == "-0.61803");
    CHECK(to_decimal(QuadNumber(1) - rho, G, 20) == "0.38196601125010515179");
    // rho^2 + rho = 1 exactly
    CHECK(to_decimal(rho.mul(rho, G) + rho, G, 30) == "1.000000000000000000000000000000");
    const QuadRing Q = QuadRing::rational(Rational(1, 3));
    CHECK(to_decimal(QuadNumber(Rational(2, 3)), Q, 4) == "0.6666");
}

TEST_CASE("netintervals property: quadratic arithmetic agrees with doubles") {
    const QuadRing G = QuadRing::golden();
    gen::Rng rng(32);
    for (int t = 0; t < 300; ++t) {
        auto rnd = [&] {
            return QuadNumber(Rational(gen::uniform_int(rng, -50, 50), gen::uniform_int(rng, 1, 20)),
                              Rational(gen::uniform_int(rng, -50, 50), gen::uniform_int(rng, 1, 20)));
        };
        const QuadNumber a = rnd(), b = rnd();
        const double da = a.to_double(G), db = b.to_double(G);
        CHECK(a.mul(b, G).to_double(G) == doctest::Approx(da * db).epsilon(1e-10));
        if (!b.is_zero()) {
            CHECK(a.div(b, G).mul(b, G) == a);
            if (std::fabs(da - db) > 1e-9) CHECK(compare(a, b, G) == (da < db ? -1 : 1));
        }
        // to_decimal truncates toward zero
        const double shown = std::stod(to_decimal(a, G, 12));
        CHECK(std::fabs(shown) <= std::fabs(da) + 1e-12);
        CHECK(std::fabs(da - shown) < 1e-11);
    }
}
