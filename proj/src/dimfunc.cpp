#include "phidim/dimfunc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace phidim {

std::string to_string(PhiKind k) {
    switch (k) {
        case PhiKind::Constant: return "constant";
        case PhiKind::InverseLog: return "inverse_log";
        case PhiKind::Psi: return "psi";
        case PhiKind::AbsLog: return "abs_log";
        case PhiKind::Theta: return "theta";
        case PhiKind::Table: return "table";
    }
    return "?";
}

std::optional<PhiKind> phi_kind_from_string(const std::string& s) {
    if (s == "constant") return PhiKind::Constant;
    if (s == "inverse_log") return PhiKind::InverseLog;
    if (s == "psi") return PhiKind::Psi;
    if (s == "abs_log") return PhiKind::AbsLog;
    if (s == "theta") return PhiKind::Theta;
    if (s == "table") return PhiKind::Table;
    return std::nullopt;
}

DimensionFunction DimensionFunction::constant(double d) {
    DimensionFunction f;
    f.kind = PhiKind::Constant;
    f.delta = d;
    return f;
}
DimensionFunction DimensionFunction::inverse_log(double c) {
    DimensionFunction f;
    f.kind = PhiKind::InverseLog;
    f.c = c;
    return f;
}
DimensionFunction DimensionFunction::psi() {
    DimensionFunction f;
    f.kind = PhiKind::Psi;
    return f;
}
DimensionFunction DimensionFunction::abs_log() {
    DimensionFunction f;
    f.kind = PhiKind::AbsLog;
    return f;
}
DimensionFunction DimensionFunction::theta_spectrum(double th) {
    DimensionFunction f;
    f.kind = PhiKind::Theta;
    f.theta = th;
    return f;
}
DimensionFunction DimensionFunction::table(std::vector<std::pair<double, double>> pts) {
    DimensionFunction f;
    f.kind = PhiKind::Table;
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
    f.points = std::move(pts);
    return f;
}

double DimensionFunction::eval(double x) const {
    if (!(x > floor && x < 1.0)) {
        std::ostringstream os;
        os << "x=" << x << " outside (" << floor << ", 1)";
        throw DomainError(os.str());
    }
    return eval_abs_log(-std::log(x));
}

double DimensionFunction::eval_abs_log(double ax) const {
    if (!(ax > 0)) throw DomainError("|log x| must be positive");
    switch (kind) {
        case PhiKind::Constant: return delta;
        case PhiKind::InverseLog: return c / ax;
        case PhiKind::Psi: return ax > 1.0 ? std::log(ax) / ax : 0.0;
        case PhiKind::AbsLog: return ax;
        case PhiKind::Theta: return 1.0 / theta - 1.0;
        case PhiKind::Table: {
            if (points.empty()) return 0.0;
            // points ascending in x, i.e. descending in t = |log x|
            const double t_hi = -std::log(points.front().first), t_lo = -std::log(points.back().first);
            if (ax >= t_hi) return points.front().second;
            if (ax <= t_lo) return points.back().second;
            for (std::size_t i = 1; i < points.size(); ++i) {
                const double ta = -std::log(points[i - 1].first), tb = -std::log(points[i].first);
                if (ax <= ta && ax >= tb) {
                    const double w = (ta - ax) / (ta - tb);
                    return points[i - 1].second + w * (points[i].second - points[i - 1].second);
                }
            }
            return points.back().second;
        }
    }
    return 0.0;
}

std::string DimensionFunction::describe() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case PhiKind::Constant: os << "(delta=" << delta << ")"; break;
        case PhiKind::InverseLog: os << "(c=" << c << ")"; break;
        case PhiKind::Theta: os << "(theta=" << theta << ")"; break;
        case PhiKind::Table: os << "(" << points.size() << " points)"; break;
        default: break;
    }
    return os.str();
}

double eval_phi(const DimensionFunction& f, double x) { return f.eval(x); }

std::vector<double> geometric_grid(double b, int i0, int i1) {
    std::vector<double> g;
    for (int i = i0; i <= i1; ++i) g.push_back(std::pow(b, -i));
    return g;
}

ValidationReport validate_dimension_function(const DimensionFunction& f, const std::vector<double>& grid) {
    ValidationReport rep;
    std::vector<double> xs;
    for (double x : grid)
        if (x > f.floor && x < 1.0) xs.push_back(x);
    std::sort(xs.begin(), xs.end(), std::greater<>());
    if (xs.size() < 8) {
        rep.pass = false;
        rep.violation = "grid has fewer than 8 admissible points";
        return rep;
    }
    double prev_log_g = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const double phi = f.eval(x);
        if (!(phi >= 0.0)) {
            rep.pass = false;
            rep.x = x;
            std::ostringstream os;
            os << "positivity: Phi(" << x << ") = " << phi << " < 0";
            rep.violation = os.str();
            return rep;
        }
        // log of x^{1+Phi(x)}; must strictly decrease as x decreases
        const double lg = (1.0 + phi) * std::log(x);
        if (i > 0 && !(lg < prev_log_g)) {
            rep.pass = false;
            rep.x = x;
            std::ostringstream os;
            os << "monotonicity: x^(1+Phi(x)) at x=" << x << " is " << std::exp(lg)
               << ", not below the value " << std::exp(prev_log_g) << " at x=" << xs[i - 1];
            rep.violation = os.str();
            return rep;
        }
        prev_log_g = lg;
    }
    return rep;
}

PhiMetadata limsup_inv_L(const DimensionFunction& f, const std::vector<double>& grid) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    PhiMetadata m;
    m.provenance = "analytic";
    switch (f.kind) {
        case PhiKind::Constant: m.L = f.delta > 0 ? 1.0 / f.delta : inf; break;
        case PhiKind::Theta: m.L = 1.0 / (1.0 / f.theta - 1.0); break;
        case PhiKind::InverseLog: m.L = inf; break;
        case PhiKind::Psi: m.L = inf; break;
        case PhiKind::AbsLog: m.L = 0.0; break;
        case PhiKind::Table: {
            m.provenance = "grid-estimate";
            std::vector<double> xs;
            const auto& src = grid.empty() ? geometric_grid(2.0, 1, 63) : grid;
            for (double x : src)
                if (x > f.floor && x < 1.0) xs.push_back(x);
            std::sort(xs.begin(), xs.end());  // finest first
            const std::size_t q = std::max<std::size_t>(1, xs.size() / 4);
            double L = 0.0;
            for (std::size_t i = 0; i < q && i < xs.size(); ++i) {
                const double phi = f.eval(xs[i]);
                L = std::max(L, phi > 0 ? 1.0 / phi : inf);
            }
            m.L = L;
            break;
        }
    }
    std::vector<double> dgrid = grid.empty() ? geometric_grid(2.0, 2, 62) : grid;
    auto d = is_doubling_function(f, dgrid);
    m.is_doubling = d.doubling;
    m.doubling_c = d.c;
    return m;
}

double phi_of_n(const DimensionFunction& f, int n, double r_min) {
    if (n < 1 || !(r_min > 0.0 && r_min < 1.0)) throw DomainError("phi_of_n requires n >= 1 and 0 < r_min < 1");
    const double x = std::pow(r_min, n);
    if (!(x > f.floor)) throw DomainError("r_min^n below the domain floor");
    return n * f.eval(x);
}

DoublingFunctionResult is_doubling_function(const DimensionFunction& f, const std::vector<double>& grid) {
    std::vector<double> xs;
    for (double x : grid)
        if (x / 2 > f.floor && x < 1.0) xs.push_back(x);
    std::sort(xs.begin(), xs.end(), std::greater<>());  // coarse to fine
    std::vector<double> ratios;
    for (double x : xs) {
        const double den = f.eval(x / 2);
        if (den == 0.0) continue;
        ratios.push_back(f.eval(x) / den);
    }
    DoublingFunctionResult r;
    if (ratios.empty()) {
        r.doubling = true;
        r.c = 1.0;
        return r;
    }
    const std::size_t h = ratios.size() / 2;
    double coarse = 0.0, fine = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) (i < h ? coarse : fine) = std::max(i < h ? coarse : fine, ratios[i]);
    r.c = std::max(coarse, fine);
    r.doubling = std::isfinite(r.c) && (h == 0 || fine <= 1.1 * coarse + 1e-12);
    return r;
}

}  // namespace phidim
