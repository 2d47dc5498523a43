#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include "phidim/measures.hpp"

namespace phidim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kMaxIndex = 4'000'000'000'000'000'000LL;

bool is_integer(const Rational& q) { return denominator(q) == 1; }

BigInt ipow(const BigInt& b, long long e) {
    BigInt r = 1, x = b;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

// Widen a log-space enclosure by a relative amount.
Enclosure widen(Enclosure e, double rel) {
    if (!std::isinf(e.log_lo)) e.log_lo -= rel;
    if (!std::isinf(e.log_hi)) e.log_hi += rel;
    return e;
}

// c * x^{-k} difference between a and b (b > a > 0, b may be inf) computed
// without cancellation: c a^{-k} (1 - (b/a)^{-k}).
long double power_diff(long double c, long double k, long double a, long double b) {
    const long double head = c * std::pow(a, -k);
    if (std::isinf(b)) return head;
    return -head * std::expm1(-k * std::log1p((b - a) / a));
}
}  // namespace

void DiscreteMeasureSpec::validate() const {
    if (position == SeqKind::Polynomial && !(lambda > 0)) throw std::invalid_argument("lambda must be > 0 for polynomial positions");
    if (position == SeqKind::Exponential && !(lambda > 1)) throw std::invalid_argument("lambda must be > 1 for exponential positions");
    if (!(beta > 1)) throw std::invalid_argument("beta must be > 1");
    if (p0 < 0) throw std::invalid_argument("p0 must be >= 0");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
}

double DiscreteMeasureSpec::s() const { return (to_double(beta) - 1.0) / to_double(lambda); }
double DiscreteMeasureSpec::t() const { return to_double(beta) / (to_double(lambda) + 1.0); }

DiscreteMeasure::DiscreteMeasure(DiscreteMeasureSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    lam_ = to_double(spec_.lambda);
    beta_ = to_double(spec_.beta);
    p0_ = to_double(spec_.p0);
    rational_positions_ = is_integer(spec_.lambda);
    if (rational_positions_) lam_int_ = numerator(spec_.lambda).convert_to<long long>();
}

double DiscreteMeasure::position(long long n) const {
    if (spec_.position == SeqKind::Polynomial) return std::pow(static_cast<double>(n), -lam_);
    return std::pow(lam_, -static_cast<double>(n));
}

Pt DiscreteMeasure::position_pt(long long n) const {
    if (rational_positions_) {
        BigInt m = spec_.position == SeqKind::Polynomial ? ipow(BigInt(n), lam_int_) : ipow(BigInt(lam_int_), n);
        if (fits_i128(m)) return Pt::ratio(1, to_i128(m));
    }
    return Pt::from_double(position(n));
}

double DiscreteMeasure::log_weight(long long n) const {
    if (spec_.weight == SeqKind::Polynomial) return -beta_ * std::log(static_cast<double>(n));
    return -static_cast<double>(n) * std::log(beta_);
}

double DiscreteMeasure::inv_position(double c) const {
    if (c <= 0) return kInf;
    if (spec_.position == SeqKind::Polynomial) return std::exp(-std::log(c) / lam_);
    return -std::log(c) / std::log(lam_);
}

int DiscreteMeasure::cmp_position(long long n, const Rational* c, double cd) const {
    // log-domain fast path; exact comparison only inside the tie margin
    const double la = spec_.position == SeqKind::Polynomial ? -lam_ * std::log(static_cast<double>(n))
                                                            : -static_cast<double>(n) * std::log(lam_);
    if (cd > 0) {
        const double lc = std::log(cd);
        const double margin = 1e-12 * (1.0 + std::fabs(la));
        if (la < lc - margin) return -1;
        if (la > lc + margin) return 1;
    }
    if (!rational_positions_ || c == nullptr) return 2;
    if (*c <= 0) return 1;
    const BigInt m = spec_.position == SeqKind::Polynomial ? ipow(BigInt(n), lam_int_) : ipow(BigInt(lam_int_), n);
    // a_n = 1/m versus c: compare 1 with c*m
    Rational cm = *c * m;
    if (cm > 1) return -1;
    if (cm < 1) return 1;
    return 0;
}

Enclosure DiscreteMeasure::weight_sum(long long a, long long b) const {
    if (a < 1) a = 1;
    if (b >= 0 && b < a) return Enclosure::zero();
    if (spec_.weight == SeqKind::Exponential) {
        const double lb = std::log(beta_);
        double l = -static_cast<double>(a) * lb - std::log1p(-1.0 / beta_);
        if (b >= 0) {
            const double cnt = static_cast<double>(b - a + 1);
            l += std::log1p(-std::exp(-cnt * lb));
        }
        return widen(Enclosure::from_log(l, l), 4e-16 * (std::fabs(static_cast<double>(a) * lb) + 16.0));
    }
    // polynomial weights
    const long double bt = beta_;
    long double lo = 0, hi = 0;
    long long n = a;
    // short ranges and the first terms are summed directly (double terms,
    // one ulp each, covered by the final widening)
    const long long direct_end = (b >= 0 && b - a < 32) ? b : std::max<long long>(a, 64) - 1;
    for (; n <= direct_end && (b < 0 || n <= b); ++n) {
        const long double t = std::pow(static_cast<double>(n), -beta_);
        lo += t;
        hi += t;
    }
    if (b < 0 || n <= b) {
        // Euler-Maclaurin through the B4 term on [n, b+1); x^-beta is completely
        // monotone, so each tail's remainder is bounded by the B6 term
        const long double x = static_cast<long double>(n);
        const long double y = b < 0 ? std::numeric_limits<long double>::infinity() : static_cast<long double>(b) + 1.0L;
        const long double c3 = bt * (bt + 1.0L) * (bt + 2.0L) / 720.0L;
        const long double c5 = bt * (bt + 1.0L) * (bt + 2.0L) * (bt + 3.0L) * (bt + 4.0L) / 30240.0L;
        const long double S = power_diff(1.0L / (bt - 1.0L), bt - 1.0L, x, y) + power_diff(0.5L, bt, x, y) +
                              power_diff(bt / 12.0L, bt + 1.0L, x, y) - power_diff(c3, bt + 3.0L, x, y);
        const long double wx = c5 * std::pow(x, -(bt + 5.0L));
        const long double wy = std::isinf(y) ? 0.0L : c5 * std::pow(y, -(bt + 5.0L));
        lo += S - wx - wy;
        hi += S + wx + wy;
    }
    Enclosure e = Enclosure::from_log(static_cast<double>(std::log(lo)), static_cast<double>(std::log(hi)));
    return widen(e, 1e-14);
}

Enclosure DiscreteMeasure::ball(const Pt& z, const Pt& R) const {
    const double up_d = z.v + R.v, lo_d = z.v - R.v;
    std::optional<Rational> up_q, lo_q;
    auto upq = [&]() -> const Rational& {
        if (!up_q) up_q = z.to_rational() + R.to_rational();
        return *up_q;
    };
    auto loq = [&]() -> const Rational& {
        if (!lo_q) lo_q = z.to_rational() - R.to_rational();
        return *lo_q;
    };
    // in_up(n): a_n < z+R; in_lo(n): a_n > z-R  (1 yes, 0 no, 2 undecidable)
    auto in_up = [&](long long n) {
        if (up_d <= 0 && upq() <= 0) return 0;
        int c = cmp_position(n, nullptr, up_d);
        if (c == 2) c = cmp_position(n, &upq(), up_d);
        if (c == 2) return 2;
        return c < 0 ? 1 : 0;
    };
    auto in_lo = [&](long long n) {
        if (lo_d <= 0 && loq() <= 0) return 1;
        int c = cmp_position(n, nullptr, lo_d);
        if (c == 2) c = cmp_position(n, &loq(), lo_d);
        if (c == 2) return 2;
        return c > 0 ? 1 : 0;
    };

    Enclosure total = Enclosure::zero();

    // atom at 0: |z| < R
    if (p0_ > 0) {
        int inside;
        if (lo_d < -1e-12 * R.v && up_d > 1e-12 * R.v)
            inside = 1;
        else if (up_d < -1e-12 * R.v || lo_d > 1e-12 * R.v)
            inside = 0;
        else
            inside = (loq() < 0 && upq() > 0) ? 1 : 0;
        if (inside) total = total + enclosure_of(spec_.p0);
    }

    if (!(up_d > 0) && upq() <= 0) return total;

    // first n with in_up != 0 (possible) and == 1 (sure)
    double nstar = inv_position(up_d);
    long long n = nstar >= static_cast<double>(kMaxIndex) ? kMaxIndex : std::max<long long>(1, static_cast<long long>(std::floor(nstar)) - 1);
    while (n > 1 && in_up(n - 1) != 0) --n;
    while (in_up(n) == 0) ++n;
    const long long n1_poss = n;
    long long n1_sure = n;
    while (in_up(n1_sure) == 2) ++n1_sure;

    // last n with in_lo != 0 (possible) and == 1 (sure); -1 means unbounded
    long long n2_poss = -1, n2_sure = -1;
    if (lo_d > 0 || loq() > 0) {
        double mstar = inv_position(lo_d);
        long long m = mstar >= static_cast<double>(kMaxIndex) ? kMaxIndex : std::max<long long>(1, static_cast<long long>(std::floor(mstar)) + 1);
        while (m >= 1 && in_lo(m) == 0) --m;
        while (in_lo(m + 1) != 0) ++m;
        n2_poss = m;  // may be 0: nothing above z-R
        long long ms = m;
        while (ms >= 1 && in_lo(ms) == 2) --ms;
        n2_sure = ms;
    }
    auto range = [&](long long a, long long b, bool unbounded) {
        if (unbounded) return weight_sum(a, -1);
        if (b < a || b < 1) return Enclosure::zero();
        return weight_sum(a, b);
    };
    const bool unb = n2_poss < 0;
    Enclosure sure = range(n1_sure, n2_sure, unb);
    Enclosure poss = range(n1_poss, n2_poss, unb);
    return {(total + sure).log_lo, (total + poss).log_hi};
}

std::vector<Pt> DiscreteMeasure::support_net(double rho) const {
    std::vector<Pt> out;
    out.push_back(Pt::ratio(0, 1));
    long long n = 1;
    double last = kInf;
    for (; n <= spec_.N; ++n) {
        out.push_back(position_pt(n));
        last = position(n);
    }
    // greedy thinning of the remaining atoms at resolution rho; once the
    // last kept atom is below rho, the point 0 covers everything smaller
    while (last >= rho) {
        const double target = last - rho;
        if (target <= 0) break;
        long long m = std::max<long long>(n, static_cast<long long>(std::ceil(inv_position(target))) - 1);
        while (m > n && position(m - 1) <= target) --m;
        while (position(m) > target) ++m;
        out.push_back(position_pt(m));
        last = position(m);
        n = m + 1;
        if (out.size() > 50'000'000) throw std::runtime_error("support net too large");
    }
    std::sort(out.begin(), out.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
    return out;
}

std::pair<double, double> DiscreteMeasure::hull() const { return {0.0, position(1)}; }

Enclosure DiscreteMeasure::total_mass() const {
    Enclosure e = weight_sum(1, -1);
    if (p0_ > 0) e = e + enclosure_of(spec_.p0);
    return e;
}

AtomicMeasure DiscreteMeasure::truncate(long long N) const {
    std::vector<AtomicMeasure::Atom> atoms;
    if (spec_.p0 > 0) atoms.push_back({Rational(0), spec_.p0});
    const bool rational_w = is_integer(spec_.beta);
    const long long bi = rational_w ? numerator(spec_.beta).convert_to<long long>() : 0;
    for (long long n = 1; n <= N; ++n) {
        Rational pos = position_pt(n).to_rational();
        Rational w;
        if (rational_w)
            w = Rational(1, spec_.weight == SeqKind::Polynomial ? ipow(BigInt(n), bi) : ipow(BigInt(bi), n));
        else
            w = rational_from_double(std::exp(log_weight(n)));
        atoms.push_back({pos, w});
    }
    return AtomicMeasure(std::move(atoms));
}

}  // namespace phidim
