#include <algorithm>
#include <cmath>

#include "phidim/measures.hpp"

namespace phidim {

LocalDimEstimate local_dimension_estimate(const Measure& mu, const Pt& z, double b, int k0, int k1, double min_log_ratio) {
    if (k1 <= k0) throw std::invalid_argument("scale range must be non-empty");
    LocalDimEstimate out;
    const long long bi = static_cast<long long>(b);
    auto radius = [&](int k) { return static_cast<double>(bi) == b ? Pt::inv_pow(bi, k) : Pt::from_double(std::pow(b, -k)); };
    std::vector<double> logmid(k1 + 1);
    for (int k = k0; k <= k1; ++k) {
        const Enclosure e = mu.ball(z, radius(k));
        logmid[k] = std::log(e.mid());
        out.samples.emplace_back(-k * std::log(b), logmid[k]);
    }
    // least-squares slope of log mid against log r
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : out.samples) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(out.samples.size());
    out.regression = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::vector<double> slopes;
    for (int k = k0 + 1; k <= k1; ++k) {
        const double lr = (k - k0) * std::log(b);
        if (lr < min_log_ratio) continue;
        slopes.push_back((logmid[k0] - logmid[k]) / lr);
    }
    if (slopes.empty()) {
        out.lower = out.upper = out.regression;
        return out;
    }
    const std::size_t start = slopes.size() / 2;
    out.lower = *std::min_element(slopes.begin() + start, slopes.end());
    out.upper = *std::max_element(slopes.begin() + start, slopes.end());
    return out;
}

}  // namespace phidim
