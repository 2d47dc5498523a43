#include <algorithm>
#include <cmath>

#include "phidim/measures.hpp"

namespace phidim {

Enclosure ball_measure(const Measure& mu, const Pt& z, const Pt& R, double rel_tol) {
    if (!(R.v > 0)) throw std::invalid_argument("radius must be positive");
    Enclosure e = mu.ball(z, R);
    if (std::isinf(e.log_hi) && e.log_hi < 0) throw EmptyBallError("ball B(" + z.str() + ", " + R.str() + ") misses the support");
    if (e.rel_width() > rel_tol)
        throw PrecisionError("enclosure " + e.str() + " wider than relative tolerance");
    return e;
}

Enclosure enclosure_of(const Rational& q) {
    if (q == 0) return Enclosure::zero();
    double d = to_double(q);
    double lo = d, hi = d;
    Rational dq = rational_from_double(d);
    if (dq > q) lo = std::nextafter(d, 0.0);
    if (dq < q) hi = std::nextafter(d, HUGE_VAL);
    Enclosure e = Enclosure::from_linear(lo, hi);
    // logs round too; widen by one ulp of the log
    e.log_lo = std::nextafter(e.log_lo, -HUGE_VAL);
    e.log_hi = std::nextafter(e.log_hi, HUGE_VAL);
    return e;
}

// ------------------------------------------------------------ Lebesgue
Enclosure LebesgueUnit::ball(const Pt& z, const Pt& R) const {
    Rational zq = z.to_rational(), Rq = R.to_rational();
    Rational a = std::max(Rational(0), Rational(zq - Rq));
    Rational b = std::min(Rational(1), Rational(zq + Rq));
    if (b <= a) return Enclosure::zero();
    return enclosure_of(b - a);
}

std::vector<Pt> LebesgueUnit::support_net(double rho) const {
    std::vector<Pt> out;
    long long n = static_cast<long long>(std::ceil(1.0 / rho));
    n = std::max(1LL, n);
    for (long long k = 0; k <= n; ++k) out.push_back(Pt::ratio(k, n));
    return out;
}

// ------------------------------------------------------------ point mass
Enclosure PointMass::ball(const Pt& z, const Pt& R) const {
    Rational d = z.to_rational() - at_;
    if (d < 0) d = -d;
    return d < R.to_rational() ? enclosure_of(mass_) : Enclosure::zero();
}
std::vector<Pt> PointMass::support_net(double) const { return {Pt::from_rational(at_)}; }
std::pair<double, double> PointMass::hull() const { return {to_double(at_), to_double(at_)}; }
Enclosure PointMass::total_mass() const { return enclosure_of(mass_); }

// ------------------------------------------------------------ atomic
AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("atomic measure needs at least one atom");
    for (auto& a : atoms_)
        if (a.mass <= 0) throw std::invalid_argument("atom masses must be positive");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.pos < b.pos; });
}

Rational AtomicMeasure::ball_exact(const Rational& z, const Rational& R) const {
    Rational s = 0;
    for (auto& a : atoms_) {
        Rational d = a.pos - z;
        if (d < 0) d = -d;
        if (d < R) s += a.mass;
    }
    return s;
}

Enclosure AtomicMeasure::ball(const Pt& z, const Pt& R) const { return enclosure_of(ball_exact(z.to_rational(), R.to_rational())); }

std::vector<Pt> AtomicMeasure::support_net(double) const {
    std::vector<Pt> out;
    for (auto& a : atoms_) out.push_back(Pt::from_rational(a.pos));
    return out;
}

std::pair<double, double> AtomicMeasure::hull() const { return {to_double(atoms_.front().pos), to_double(atoms_.back().pos)}; }

Enclosure AtomicMeasure::total_mass() const {
    Rational s = 0;
    for (auto& a : atoms_) s += a.mass;
    return enclosure_of(s);
}

}  // namespace phidim
