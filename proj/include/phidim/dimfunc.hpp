#pragma once
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phidim {

enum class PhiKind { Constant, InverseLog, Psi, AbsLog, Theta, Table };

std::string to_string(PhiKind k);
std::optional<PhiKind> phi_kind_from_string(const std::string& s);

// Dimension function on (0,1). Built-in kinds are evaluated analytically;
// Psi is clamped at 0 on (1/e, 1) where log|log x| would turn negative.
struct DimensionFunction {
    PhiKind kind = PhiKind::Constant;
    double delta = 0.0;
    double c = 1.0;
    double theta = 0.5;
    std::vector<std::pair<double, double>> points;  // (x, phi), any order
    double floor = 0x1p-64;

    static DimensionFunction constant(double d);
    static DimensionFunction inverse_log(double c);
    static DimensionFunction psi();
    static DimensionFunction abs_log();
    static DimensionFunction theta_spectrum(double th);
    static DimensionFunction table(std::vector<std::pair<double, double>> pts);

    double operator()(double x) const { return eval(x); }
    double eval(double x) const;
    // Phi as a function of t = |log x| > 0; every kind depends on x only
    // through t, so this form has no floor and no underflow.
    double eval_abs_log(double t) const;
    std::string describe() const;
};

struct DomainError : std::exception {
    std::string msg;
    explicit DomainError(std::string m) : msg(std::move(m)) {}
    const char* what() const noexcept override { return msg.c_str(); }
};

double eval_phi(const DimensionFunction& f, double x);

// Geometric grid x_i = b^{-i}, i = i0..i1.
std::vector<double> geometric_grid(double b, int i0, int i1);

struct ValidationReport {
    bool pass = true;
    std::string violation;  // empty when pass
    double x = 0.0;         // first offending grid point
};

ValidationReport validate_dimension_function(const DimensionFunction& f, const std::vector<double>& grid);

struct PhiMetadata {
    double L = 0.0;  // +inf allowed
    bool is_doubling = false;
    double doubling_c = std::numeric_limits<double>::quiet_NaN();
    std::string provenance;  // "analytic" or "grid-estimate"
};

PhiMetadata limsup_inv_L(const DimensionFunction& f, const std::vector<double>& grid = {});

double phi_of_n(const DimensionFunction& f, int n, double r_min);

struct DoublingFunctionResult {
    bool doubling = false;
    double c = 0.0;
};

DoublingFunctionResult is_doubling_function(const DimensionFunction& f, const std::vector<double>& grid);

}  // namespace phidim
