#pragma once
#include <cmath>
#include <limits>
#include <string>

namespace phidim {

// Two-sided bound on a nonnegative quantity, kept as natural logs so that
// masses far below the double range stay representable. log_lo == -inf
// encodes a zero lower bound.
struct Enclosure {
    double log_lo = -std::numeric_limits<double>::infinity();
    double log_hi = -std::numeric_limits<double>::infinity();

    static Enclosure zero() { return {}; }
    static Enclosure exact(double v) { return from_linear(v, v); }
    static Enclosure from_linear(double lo, double hi);
    static Enclosure from_log(double llo, double lhi) { return {llo, lhi}; }

    double lo() const { return std::exp(log_lo); }
    double hi() const { return std::exp(log_hi); }
    double mid() const { return 0.5 * (lo() + hi()); }
    double width() const { return hi() - lo(); }
    double rel_width() const;  // (hi - lo)/hi, 0 for the zero enclosure
    bool contains(double v) const { return lo() <= v && v <= hi(); }
    bool valid() const { return !(log_lo > log_hi); }
    std::string str() const;
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);

// log(exp(a) + exp(b)) without overflow/underflow.
double log_add(double a, double b);

// Conservative exponent estimates from a pair of enclosures: the upper
// direction uses mu(B(z,R)).lo / mu(B(z,r)).hi, the lower direction uses
// mu(B(z,R)).hi / mu(B(z,r)).lo. log_ratio = log(R/r) > 0. Returns NaN when
// the certified side cannot be formed (zero denominator or zero numerator).
double alpha_upper(const Enclosure& big, const Enclosure& small, double log_ratio);
double alpha_lower(const Enclosure& big, const Enclosure& small, double log_ratio);

}  // namespace phidim
