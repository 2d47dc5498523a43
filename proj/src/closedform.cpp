#include "phidim/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace phidim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

ClosedFormResult single(double v, std::string branch) {
    ClosedFormResult r;
    r.lo = r.hi = v;
    r.branch = std::move(branch);
    return r;
}

// a * L with the convention 0 * inf = 0 (a vanishing coefficient kills L)
double times_L(double a, double L) { return a == 0 ? 0.0 : a * L; }

double psi_fn(double t) { return t > 1 ? std::log(t) / t : 0.0; }
}  // namespace

ClosedFormResult ssc_dimension_interval(const std::vector<double>& r, const std::vector<double>& p) {
    if (r.empty() || r.size() != p.size()) throw DomainError("r and p must be non-empty and of equal length");
    double sum = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (!(r[j] > 0 && r[j] < 1)) throw DomainError("contraction ratios must lie in (0,1)");
        if (!(p[j] > 0)) throw DomainError("probabilities must be positive");
        sum += p[j];
    }
    if (std::fabs(sum - 1) > 1e-12) throw DomainError("probabilities must sum to 1");
    ClosedFormResult res;
    res.lo = kInf;
    res.hi = -kInf;
    std::string rs, ps;
    for (std::size_t j = 0; j < r.size(); ++j) {
        const double v = std::log(p[j]) / std::log(r[j]);
        res.lo = std::min(res.lo, v);
        res.hi = std::max(res.hi, v);
        rs += (j ? "," : "") + num(r[j]);
        ps += (j ? "," : "") + num(p[j]);
    }
    res.branch = "ssc";
    res.inputs = {{"r", rs}, {"p", ps}};
    return res;
}

PhiData phi_data(const DimensionFunction& f) {
    PhiData d;
    const PhiMetadata m = limsup_inv_L(f);
    d.L = m.L;
    d.provenance = m.provenance == "analytic" ? "exact" : m.provenance;
    switch (f.kind) {
        case PhiKind::Constant: d.psi_over_phi = f.delta > 0 ? 0.0 : kInf; break;
        case PhiKind::Theta: d.psi_over_phi = 0.0; break;
        // Psi / (c/|log x|) = log|log x| / c grows without bound
        case PhiKind::InverseLog: d.psi_over_phi = kInf; break;
        case PhiKind::Psi: d.psi_over_phi = 1.0; break;
        case PhiKind::AbsLog: d.psi_over_phi = 0.0; break;
        case PhiKind::Table: {
            // grid limsup over the finest quarter of a dyadic grid
            std::vector<double> vals;
            for (int i = 2; i <= 63; ++i) {
                const double t = i * std::log(2.0);
                const double ph = f.eval_abs_log(t);
                vals.push_back(ph > 0 ? psi_fn(t) / ph : kInf);
            }
            double best = 0;
            for (std::size_t k = vals.size() - vals.size() / 4; k < vals.size(); ++k) best = std::max(best, vals[k]);
            d.psi_over_phi = best;
            d.provenance = "grid-estimate";
            break;
        }
    }
    return d;
}

ClosedFormResult discrete_phi_dimension(const DiscreteMeasureSpec& spec, const PhiData& phi) {
    spec.validate();
    const double beta = to_double(spec.beta), lambda = to_double(spec.lambda);
    const bool atom0 = spec.p0 != 0;
    const double L = phi.L;
    ClosedFormResult res;
    const bool ppos = spec.position == SeqKind::Polynomial, pw = spec.weight == SeqKind::Polynomial;
    if (pw && ppos) {
        const double s = (beta - 1) / lambda, t = beta / (lambda + 1);
        if (L >= lambda) {
            const double v = atom0 ? times_L(s, L) + std::max(1.0, s) : std::max(1.0, s);
            res = single(v, atom0 ? "poly-poly, p0 != 0, L >= lambda" : "poly-poly, p0 = 0, L >= lambda");
        } else {
            const double v = atom0 ? (1 + L) * std::max(s, t) : std::max(t + L * (t - s), s);
            res = single(v, atom0 ? "poly-poly, p0 != 0, L <= lambda" : "poly-poly, p0 = 0, L <= lambda");
        }
        res.inputs.push_back({"s", num(s)});
        res.inputs.push_back({"t", num(t)});
    } else if (!pw && !ppos) {
        const double r = std::log(beta) / std::log(lambda);
        res = atom0 ? single((1 + L) * r, "exp-exp, p0 != 0") : single(r, "exp-exp, p0 = 0");
    } else if (!pw && ppos) {
        res = single(kInf, "exp-poly");
    } else {
        const double q = phi.psi_over_phi;
        if (std::isnan(q)) throw DomainError("limsup Psi/Phi unavailable for this dimension function");
        res = atom0 ? single(times_L(beta, q), "poly-exp, p0 != 0") : single(q, "poly-exp, p0 = 0");
        if (phi.provenance != "exact") res.provenance = phi.provenance;
    }
    if ((pw && ppos) || (!pw && !ppos)) res.provenance = phi.provenance;
    res.inputs.insert(res.inputs.begin(), {{"position", ppos ? "polynomial" : "exponential"},
                                           {"weight", pw ? "polynomial" : "exponential"},
                                           {"lambda", to_string(spec.lambda)},
                                           {"beta", to_string(spec.beta)},
                                           {"p0", to_string(spec.p0)},
                                           {"L", num(L)}});
    return res;
}

ClosedFormResult discrete_phi_dimension(const DiscreteMeasureSpec& spec, const DimensionFunction& f) {
    ClosedFormResult r = discrete_phi_dimension(spec, phi_data(f));
    r.inputs.push_back({"phi", f.describe()});
    return r;
}

BoxFrostmanBounds box_frostman_bounds(double M, double F, double L) {
    if (F > M) throw DomainError("dim_F must not exceed dim_M");
    if (!(L >= 0)) throw DomainError("L must be >= 0");
    const double gap = times_L(M - F, L);
    return {M, M + gap, F - gap, F};
}

double theta_form_upper(double M, double F, double theta) {
    if (!(theta > 0 && theta < 1)) throw DomainError("theta must lie in (0,1)");
    return (M - theta * F) / (1 - theta);
}

TransferBounds comparison_transfer_bounds(double lambda, double upper_phi, double lower_phi, double dim_A) {
    if (!(lambda > 0 && lambda <= 1)) throw DomainError("lambda must lie in (0,1]");
    return {lambda * upper_phi, lower_phi + times_L(1 - lambda, dim_A)};
}

ClosedFormResult example_reference_values(const std::string& name, const std::map<std::string, double>& params) {
    auto get = [&](const char* k) {
        auto it = params.find(k);
        if (it == params.end()) throw DomainError(name + " requires parameter '" + k + "'");
        return it->second;
    };
    ClosedFormResult r;
    if (name == "ftnotqa") {
        // Phi = theta constant
        const double th = get("theta");
        if (!(th > 0)) throw DomainError("theta must be > 0");
        r = single(1 / th + std::log(3.0) / std::log(2.0), "ftnotqa");
    } else if (name == "bc_lower") {
        const double p = get("p"), d = get("delta");
        const double rho = params.count("rho") ? params.at("rho") : (std::sqrt(5.0) - 1) / 2;
        if (!(p > 0.5 && p < 1) || !(d > 0) || !(rho > 0 && rho < 1)) throw DomainError("bc_lower needs 1/2 < p < 1, delta > 0, 0 < rho < 1");
        r = single(std::log(p / (1 - p)) / (2 * d * std::fabs(std::log(rho))), "bc_lower");
    } else if (name == "cascade_phi1") {
        if (params.count("liminf_p")) {
            const double p = params.at("liminf_p");
            if (!(p >= 0 && p <= 1)) throw DomainError("liminf_p must lie in [0,1]");
            r = single(p == 0 ? kInf : std::max(1.0, -std::log(p) / std::log(3.0)), "cascade_phi1 upper");
        } else {
            const double p = get("limsup_p");
            if (!(p >= 0 && p <= 1)) throw DomainError("limsup_p must lie in [0,1]");
            r = single(p == 0 ? 1.0 : std::min(1.0, -std::log(p) / std::log(3.0)), "cascade_phi1 lower");
        }
    } else {
        throw DomainError("unknown example '" + name + "' (expected ftnotqa, bc_lower, cascade_phi1)");
    }
    for (auto& [k, v] : params) r.inputs.push_back({k, num(v)});
    return r;
}

}  // namespace phidim
