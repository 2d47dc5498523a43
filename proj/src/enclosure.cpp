#include "phidim/enclosure.hpp"

#include <algorithm>
#include <sstream>

namespace phidim {

Enclosure Enclosure::from_linear(double lo, double hi) {
    Enclosure e;
    e.log_lo = lo > 0 ? std::log(lo) : -std::numeric_limits<double>::infinity();
    e.log_hi = hi > 0 ? std::log(hi) : -std::numeric_limits<double>::infinity();
    return e;
}

double Enclosure::rel_width() const {
    if (std::isinf(log_hi) && log_hi < 0) return 0.0;
    return -std::expm1(log_lo - log_hi);
}

std::string Enclosure::str() const {
    std::ostringstream os;
    os.precision(17);
    os << "[" << lo() << ", " << hi() << "]";
    return os.str();
}

double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(b) && b < 0) return a;
    return a + std::log1p(std::exp(b - a));
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
    return {log_add(a.log_lo, b.log_lo), log_add(a.log_hi, b.log_hi)};
}

double alpha_upper(const Enclosure& big, const Enclosure& small, double log_ratio) {
    if (std::isinf(small.log_hi) || std::isinf(big.log_lo)) return std::numeric_limits<double>::quiet_NaN();
    return (big.log_lo - small.log_hi) / log_ratio;
}

double alpha_lower(const Enclosure& big, const Enclosure& small, double log_ratio) {
    if (std::isinf(small.log_lo) || std::isinf(big.log_hi)) return std::numeric_limits<double>::quiet_NaN();
    return (big.log_hi - small.log_lo) / log_ratio;
}

}  // namespace phidim
