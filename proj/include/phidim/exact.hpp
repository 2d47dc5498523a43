#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace phidim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", integers and finite decimals ("0.125", "-3.5e-2") exactly.
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);
double to_double(const Rational& q);
// Exact value of a finite double.
Rational rational_from_double(double v);
// Decimal rendering with `digits` significant fractional digits (truncated toward zero).
std::string to_decimal(const Rational& q, int digits);

BigInt floor_div(const BigInt& a, const BigInt& b);
BigInt ceil_div(const BigInt& a, const BigInt& b);

// Quadratic ring Q[rho] with rho^2 = alpha*rho + gamma. `approx` selects
// which root rho denotes. A rational ring (quadratic == false) has rho
// equal to the rational `value` and every element keeps v == 0.
struct QuadRing {
    bool quadratic = false;
    Rational alpha, gamma;
    Rational value;  // rational mode only
    double approx = 0.0;

    static QuadRing golden();  // rho = (sqrt5 - 1)/2, rho^2 = 1 - rho
    static QuadRing rational(const Rational& r);
    bool operator==(const QuadRing& o) const;
};

class QuadNumber {
public:
    QuadNumber() = default;
    QuadNumber(Rational u, Rational v = 0) : u_(std::move(u)), v_(std::move(v)) {}
    static QuadNumber rho(const QuadRing& R);

    const Rational& u() const { return u_; }
    const Rational& v() const { return v_; }

    QuadNumber operator+(const QuadNumber& o) const { return {u_ + o.u_, v_ + o.v_}; }
    QuadNumber operator-(const QuadNumber& o) const { return {u_ - o.u_, v_ - o.v_}; }
    QuadNumber operator-() const { return {-u_, -v_}; }
    QuadNumber mul(const QuadNumber& o, const QuadRing& R) const;
    QuadNumber scale(const Rational& s) const { return {u_ * s, v_ * s}; }
    QuadNumber inv(const QuadRing& R) const;
    QuadNumber div(const QuadNumber& o, const QuadRing& R) const { return mul(o.inv(R), R); }

    bool is_zero() const { return u_ == 0 && v_ == 0; }
    // Exact sign; a double interval decides first, exact algebra on failure.
    int sign(const QuadRing& R) const;
    double to_double(const QuadRing& R) const;
    std::string str() const;
    bool operator==(const QuadNumber& o) const { return u_ == o.u_ && v_ == o.v_; }
    bool operator<(const QuadNumber& o) const { return u_ < o.u_ || (u_ == o.u_ && v_ < o.v_); }  // structural order

private:
    Rational u_{0}, v_{0};
};

int compare(const QuadNumber& a, const QuadNumber& b, const QuadRing& R);

// Decimal rendering truncated toward zero after `digits` fractional digits;
// exact in both ring kinds (no floating-point step).
std::string to_decimal(const QuadNumber& x, const QuadRing& R, int digits);

// Counters for tests: how often the double fast path was inconclusive.
struct SignStats {
    unsigned long long fast = 0, exact = 0;
};
SignStats& sign_stats();

}  // namespace phidim
