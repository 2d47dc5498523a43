#pragma once
// Seeded random-case generators for the property tests.
#include <cstdint>
#include <random>
#include <vector>

#include "phidim/dimfunc.hpp"
#include "phidim/exact.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
inline int uniform_int(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
inline bool coin(Rng& g) { return uniform_int(g, 0, 1) == 1; }

template <class T>
const T& pick(Rng& g, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(g, 0, static_cast<int>(v.size()) - 1))];
}

inline phidim::DimensionFunction builtin_phi(Rng& g) {
    using phidim::DimensionFunction;
    switch (uniform_int(g, 0, 4)) {
        case 0: return DimensionFunction::constant(uniform(g, 0, 4));
        case 1: return DimensionFunction::inverse_log(uniform(g, 0.1, 10));
        case 2: return DimensionFunction::psi();
        case 3: return DimensionFunction::abs_log();
        default: return DimensionFunction::theta_spectrum(uniform(g, 0.05, 0.95));
    }
}

// p/q with 1 <= q <= qmax and p/q in [0, 1]
inline phidim::Rational unit_rational(Rng& g, int qmax) {
    const int q = uniform_int(g, 1, qmax);
    return phidim::Rational(uniform_int(g, 0, q), q);
}

// Probability vector of n exact rationals with common denominator q
inline std::vector<phidim::Rational> simplex(Rng& g, int n, int q, bool positive) {
    std::vector<int> w(static_cast<std::size_t>(n), positive ? 1 : 0);
    int left = q - (positive ? n : 0);
    for (int k = 0; k < n - 1 && left > 0; ++k) {
        const int take = uniform_int(g, 0, left);
        w[static_cast<std::size_t>(k)] += take;
        left -= take;
    }
    w.back() += left;
    std::vector<phidim::Rational> out;
    for (int x : w) out.emplace_back(x, q);
    return out;
}

}  // namespace gen
