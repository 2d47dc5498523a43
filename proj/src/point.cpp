#include "phidim/point.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phidim {

namespace {
i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}
constexpr i128 kI128Max = (~static_cast<unsigned __int128>(0)) >> 1;
}  // namespace

std::string i128_to_string(i128 x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
    std::string s;
    while (u) {
        s += static_cast<char>('0' + static_cast<int>(u % 10));
        u /= 10;
    }
    if (neg) s += '-';
    return {s.rbegin(), s.rend()};
}

BigInt from_i128(i128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
    BigInt r = static_cast<unsigned long long>(u >> 64);
    r <<= 64;
    r += static_cast<unsigned long long>(u & 0xFFFFFFFFFFFFFFFFull);
    return neg ? BigInt(-r) : r;
}

bool fits_i128(const BigInt& x) {
    static const BigInt hi = from_i128(kI128Max);
    return x <= hi && x >= -hi;
}

i128 to_i128(const BigInt& x) {
    if (!fits_i128(x)) throw std::overflow_error("value does not fit in 128 bits");
    bool neg = x < 0;
    BigInt a = neg ? BigInt(-x) : x;
    unsigned long long lo = static_cast<unsigned long long>(a & BigInt(0xFFFFFFFFFFFFFFFFull));
    unsigned long long hi = static_cast<unsigned long long>(a >> 64);
    i128 r = (static_cast<i128>(hi) << 64) | lo;
    return neg ? -r : r;
}

Pt Pt::ratio(i128 n, i128 d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    i128 g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Pt p;
    p.num = n;
    p.den = d;
    p.v = static_cast<double>(static_cast<long double>(n) / static_cast<long double>(d));
    return p;
}

Pt Pt::from_rational(const Rational& q) {
    const BigInt& n = numerator(q);
    const BigInt& d = denominator(q);
    if (fits_i128(n) && fits_i128(d)) return ratio(to_i128(n), to_i128(d));
    return from_double(to_double(q));
}

Pt Pt::inv_pow(long long b, int e) {
    i128 d = 1;
    for (int i = 0; i < e; ++i) {
        if (d > kI128Max / b) return from_double(std::pow(static_cast<double>(b), -e));
        d *= b;
    }
    return ratio(1, d);
}

Rational Pt::to_rational() const {
    if (den != 0) return Rational(from_i128(num), from_i128(den));
    return rational_from_double(v);
}

std::string Pt::str() const {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

int compare_sum(const Pt& a, int s, const Pt& b, const Rational& c) {
    Rational lhs = s > 0 ? Rational(a.to_rational() + b.to_rational()) : Rational(a.to_rational() - b.to_rational());
    return lhs < c ? -1 : (lhs > c ? 1 : 0);
}

}  // namespace phidim
