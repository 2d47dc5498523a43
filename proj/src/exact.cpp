#include "phidim/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace phidim {

namespace {
thread_local SignStats g_stats;

BigInt pow10(int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= 10;
    return r;
}

int sign_of(const Rational& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); }
}  // namespace

SignStats& sign_stats() { return g_stats; }

Rational parse_rational(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + raw + "'");
        return num / den;
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    BigInt mant = 0;
    int frac = 0;
    bool seen_dot = false, any = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (ch >= '0' && ch <= '9') {
            mant = mant * 10 + (ch - '0');
            if (seen_dot) ++frac;
            any = true;
        } else if (ch == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any) throw std::invalid_argument("not a number: '" + raw + "'");
    int exp10 = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw std::invalid_argument("not a number: '" + raw + "'");
        std::size_t used = 0;
        try {
            exp10 = std::stoi(s.substr(i + 1), &used);
        } catch (...) {
            throw std::invalid_argument("bad exponent in '" + raw + "'");
        }
        if (i + 1 + used != s.size()) throw std::invalid_argument("not a number: '" + raw + "'");
    }
    const int e = exp10 - frac;
    Rational q = e >= 0 ? Rational(mant * pow10(e)) : Rational(mant, pow10(-e));
    return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite double");
    if (v == 0) return 0;
    int e = 0;
    double m = std::frexp(v, &e);  // v = m 2^e, 0.5 <= |m| < 1
    auto mi = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    BigInt num = mi;
    if (e >= 0) return Rational(num << e);
    return Rational(num, BigInt(1) << (-e));
}

std::string to_decimal(const Rational& q, int digits) {
    const bool neg = q < 0;
    Rational a = neg ? Rational(-q) : q;
    BigInt ip = numerator(a) / denominator(a);
    Rational fr = a - Rational(ip);
    std::string out = (neg ? "-" : "") + ip.str();
    if (digits > 0) {
        BigInt scaled = numerator(fr) * pow10(digits) / denominator(fr);
        std::string f = scaled.str();
        out += "." + std::string(digits - f.size(), '0') + f;
    }
    return out;
}

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}
BigInt ceil_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && ((r < 0) == (b < 0))) ++q;
    return q;
}

QuadRing QuadRing::golden() {
    QuadRing R;
    R.quadratic = true;
    R.alpha = -1;
    R.gamma = 1;
    R.approx = (std::sqrt(5.0) - 1.0) / 2.0;
    return R;
}

QuadRing QuadRing::rational(const Rational& r) {
    QuadRing R;
    R.quadratic = false;
    R.value = r;
    R.approx = to_double(r);
    return R;
}

bool QuadRing::operator==(const QuadRing& o) const {
    return quadratic == o.quadratic && alpha == o.alpha && gamma == o.gamma && value == o.value;
}

QuadNumber QuadNumber::rho(const QuadRing& R) {
    if (!R.quadratic) return {R.value, 0};
    return {0, 1};
}

QuadNumber QuadNumber::mul(const QuadNumber& o, const QuadRing& R) const {
    if (!R.quadratic) return {u_ * o.u_, 0};
    // (a + b rho)(c + d rho) with rho^2 = alpha rho + gamma
    const Rational bd = v_ * o.v_;
    return {u_ * o.u_ + bd * R.gamma, u_ * o.v_ + v_ * o.u_ + bd * R.alpha};
}

QuadNumber QuadNumber::inv(const QuadRing& R) const {
    if (!R.quadratic) {
        if (u_ == 0) throw std::domain_error("division by zero");
        return {Rational(1) / u_, 0};
    }
    // conjugate rho' = alpha - rho; (a + b rho)(a + b rho') = a^2 + a b alpha - b^2 gamma
    const Rational norm = u_ * u_ + u_ * v_ * R.alpha - v_ * v_ * R.gamma;
    if (norm == 0) throw std::domain_error("division by zero");
    return {(u_ + v_ * R.alpha) / norm, -v_ / norm};
}

int QuadNumber::sign(const QuadRing& R) const {
    if (!R.quadratic || v_ == 0) return sign_of(u_);
    if (u_ == 0) return sign_of(v_) * (R.approx > 0 ? 1 : -1);
    // fast path: interval evaluation in double
    const double du = u_.convert_to<double>(), dv = v_.convert_to<double>();
    const double val = du + dv * R.approx;
    const double err = 1e-12 * (std::fabs(du) + std::fabs(dv * R.approx)) + 1e-300;
    if (std::isfinite(val) && std::fabs(val) > err) {
        ++g_stats.fast;
        return val > 0 ? 1 : -1;
    }
    ++g_stats.exact;
    // rho = (alpha + s sqrt(D))/2 with D = alpha^2 + 4 gamma, s chosen by approx
    const Rational D = R.alpha * R.alpha + 4 * R.gamma;
    const double root_plus = (R.alpha.convert_to<double>() + std::sqrt(D.convert_to<double>())) / 2;
    const int s = std::fabs(root_plus - R.approx) < 1e-9 ? 1 : -1;
    // u + v rho = (2u + v alpha)/2 + (s v / 2) sqrt(D); sign of A + B sqrt(D)
    const Rational A = 2 * u_ + v_ * R.alpha;
    const Rational B = s * v_;
    const int sa = sign_of(A), sb = sign_of(B);
    if (sa >= 0 && sb >= 0) return (sa == 0 && sb == 0) ? 0 : 1;
    if (sa <= 0 && sb <= 0) return -1;
    const Rational a2 = A * A, b2 = B * B * D;
    if (a2 == b2) return 0;
    if (sa > 0) return a2 > b2 ? 1 : -1;
    return b2 > a2 ? 1 : -1;
}

double QuadNumber::to_double(const QuadRing& R) const {
    if (!R.quadratic) return u_.convert_to<double>();
    return u_.convert_to<double>() + v_.convert_to<double>() * R.approx;
}

std::string QuadNumber::str() const {
    if (v_ == 0) return phidim::to_string(u_);
    return phidim::to_string(u_) + (v_ < 0 ? " - " : " + ") + phidim::to_string(v_ < 0 ? Rational(-v_) : v_) + "*rho";
}

int compare(const QuadNumber& a, const QuadNumber& b, const QuadRing& R) { return (a - b).sign(R); }


namespace {
// sign of p + q sqrt(D), D > 0 an integer that is not a perfect square
int sign_surd(const Rational& p, const Rational& q, const BigInt& D) {
    const int sp = p > 0 ? 1 : (p < 0 ? -1 : 0), sq = q > 0 ? 1 : (q < 0 ? -1 : 0);
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    const Rational lhs = p * p, rhs = q * q * Rational(D);
    return lhs > rhs ? sp : (lhs < rhs ? sq : 0);
}

// floor(a + b sqrt(D))
BigInt floor_surd(const Rational& a, const Rational& b, const BigInt& D) {
    // integer-sqrt estimate, then exact correction
    const Rational b2D = b * b * Rational(D);
    const BigInt nd = numerator(b2D) * denominator(b2D);
    Rational approx = a + (b < 0 ? Rational(-1) : Rational(1)) * Rational(boost::multiprecision::sqrt(nd), denominator(b2D));
    BigInt m = floor_div(numerator(approx), denominator(approx));
    while (sign_surd(a - Rational(m), b, D) < 0) --m;
    while (sign_surd(a - Rational(m + 1), b, D) >= 0) ++m;
    return m;
}
}  // namespace

std::string to_decimal(const QuadNumber& x, const QuadRing& R, int digits) {
    if (!R.quadratic || x.v() == 0) return to_decimal(x.u(), digits);
    // rho = (alpha + s sqrt(disc)) / 2 with s picked to match the approximation
    const Rational disc = R.alpha * R.alpha + 4 * R.gamma;
    const double dd = std::sqrt(disc.convert_to<double>()), al = R.alpha.convert_to<double>();
    const int s = std::fabs((al + dd) / 2 - R.approx) <= std::fabs((al - dd) / 2 - R.approx) ? 1 : -1;
    const BigInt D = numerator(disc) * denominator(disc);
    const Rational A = x.u() + x.v() * R.alpha / 2;
    const Rational B = x.v() * s / 2 / Rational(denominator(disc));
    if (boost::multiprecision::sqrt(D) * boost::multiprecision::sqrt(D) == D) {
        const Rational q = A + B * Rational(boost::multiprecision::sqrt(D));
        return to_decimal(q, digits);
    }
    const int sg = sign_surd(A, B, D);
    const Rational a = sg < 0 ? Rational(-A) : A, b = sg < 0 ? Rational(-B) : B;
    BigInt scale = 1;
    for (int k = 0; k < digits; ++k) scale *= 10;
    const BigInt m = floor_surd(a * Rational(scale), b * Rational(scale), D);
    std::string t = m.str();
    if (digits > 0) {
        if (static_cast<int>(t.size()) <= digits) t = std::string(digits + 1 - t.size(), '0') + t;
        t.insert(t.size() - digits, ".");
    }
    return (sg < 0 ? "-" : "") + t;
}

}  // namespace phidim
