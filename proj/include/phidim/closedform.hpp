#pragma once
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "phidim/dimfunc.hpp"
#include "phidim/measures.hpp"

namespace phidim {

// Value or interval (lo == hi for a single value); +inf is a value, not an
// error. `inputs` echoes the arguments in a stable order.
struct ClosedFormResult {
    double lo = 0, hi = 0;
    std::string branch;
    std::string provenance = "exact";  // or "grid-estimate"
    std::vector<std::pair<std::string, std::string>> inputs;
    double value() const { return lo; }
    bool is_interval() const { return lo != hi; }
};

// [min_j log p_j / log r_j, max_j log p_j / log r_j]
ClosedFormResult ssc_dimension_interval(const std::vector<double>& r, const std::vector<double>& p);

// Data about Phi needed by the discrete-measure formulas.
struct PhiData {
    double L = 0;  // limsup 1/Phi, may be +inf
    // limsup Psi/Phi, may be +inf; NaN when unknown
    double psi_over_phi = std::numeric_limits<double>::quiet_NaN();
    std::string provenance = "exact";
};
PhiData phi_data(const DimensionFunction& f);

// Upper Phi-dimension of p0 delta_0 + sum p_n delta_{a_n}.
ClosedFormResult discrete_phi_dimension(const DiscreteMeasureSpec& spec, const PhiData& phi);
ClosedFormResult discrete_phi_dimension(const DiscreteMeasureSpec& spec, const DimensionFunction& f);

struct BoxFrostmanBounds {
    double upper_lo, upper_hi;  // upper Phi-dimension interval
    double lower_lo, lower_hi;  // lower Phi-dimension interval
};
BoxFrostmanBounds box_frostman_bounds(double dim_M, double dim_F, double L);
// Upper end for Phi = 1/theta - 1, i.e. L = theta/(1 - theta).
double theta_form_upper(double dim_M, double dim_F, double theta);

struct TransferBounds {
    double psi_upper_at_least;
    double psi_lower_at_most;
};
TransferBounds comparison_transfer_bounds(double lambda, double upper_phi, double lower_phi, double dim_A);

// Named examples: "ftnotqa" {theta}, "bc_lower" {p, delta, rho},
// "cascade_phi1" {liminf_p} or {limsup_p}.
ClosedFormResult example_reference_values(const std::string& name, const std::map<std::string, double>& params);

}  // namespace phidim
