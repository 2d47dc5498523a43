#pragma once
#include <string>

#include "phidim/exact.hpp"

namespace phidim {

using i128 = __int128;

// A real query coordinate: the double value plus, when known, its exact
// rational form num/den (den > 0). With den == 0 the double itself is the
// exact value (every finite double is a dyadic rational).
struct Pt {
    double v = 0.0;
    i128 num = 0, den = 0;

    static Pt from_double(double x) { return {x, 0, 0}; }
    static Pt ratio(i128 n, i128 d);  // reduces; d != 0
    static Pt from_rational(const Rational& q);  // falls back to double if it does not fit
    static Pt inv_pow(long long b, int e);     // b^{-e}

    bool exact_ratio() const { return den != 0; }
    Rational to_rational() const;
    std::string str() const;
};

// Exact comparison of a + s*b against c (s = +1 or -1) as rationals.
int compare_sum(const Pt& a, int s, const Pt& b, const Rational& c);

std::string i128_to_string(i128 x);
bool fits_i128(const BigInt& x);
i128 to_i128(const BigInt& x);
BigInt from_i128(i128 x);

}  // namespace phidim
