#pragma once
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phidim/dimfunc.hpp"
#include "phidim/enclosure.hpp"
#include "phidim/measures.hpp"

namespace phidim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScanMode { Full, Boundary };
enum class Direction { Upper, Lower };
std::string to_string(Direction d);
std::string to_string(ScanMode m);

struct EstimationConfig {
    int base = 2;
    int n_min = 2;
    int n_max = 16;
    ScanMode mode = ScanMode::Full;
    double lambda_min = 3.0;            // minimum natural-log ratio log(R/r)
    std::optional<double> R_cap;        // default diam(supp)/2
    double divergence_threshold = 0.5;  // curve rise over the finest half

    // Explicit scale grids replace R = b^-i, r = b^-j when both are set.
    std::vector<Pt> R_grid, r_grid;

    // Center selection for measures with a cell tree.
    std::size_t full_net_budget = 1u << 12;  // cells kept exhaustively
    std::size_t beam = 64;                   // cells per score class beyond that
    // Other measures: support_net(r) thinned to at most this many centers.
    std::size_t max_centers = 4096;

    int threads = 1;

    void validate() const;
};

// One admissible (z, R, r) triple with the enclosures of mu(B(z,R)) and
// mu(B(z,r)). X_lo = big.lo/small.hi and X_hi = big.hi/small.lo are kept
// as logs.
struct PairRecord {
    Pt z, R, r;
    int i = 0, j = 0;  // scale indices (grid positions in explicit mode)
    Enclosure big, small;
    double log_x_lo() const { return big.log_lo - small.log_hi; }
    double log_x_hi() const { return big.log_hi - small.log_lo; }
};

struct Witness {
    Pt z, R, r;
    bool valid = false;
};

struct DimensionEstimate {
    Direction direction = Direction::Upper;
    double value = std::numeric_limits<double>::quiet_NaN();
    // curve[j] = extremal alpha over records with r at depth j (NaN if none)
    std::vector<double> curve;
    std::vector<Witness> curve_witness;
    bool diverging = false;
    Witness witness;
    std::size_t records = 0;
    std::size_t dropped = 0;  // records whose enclosures certify nothing
};

// Admissibility shared by every scan: r <= R^{1+Phi(R)}, R > r,
// log(R/r) >= lambda_min and R <= cap.
double phi_at(const DimensionFunction& f, const Pt& R);
double log_ratio(const Pt& R, const Pt& r);
bool admissible(const DimensionFunction& f, const Pt& R, const Pt& r, double lambda_min, double cap);

// First depth j (>= n_min) at which some admissible pair exists, or -1.
int first_admissible_depth(const DimensionFunction& f, const EstimationConfig& cfg, double cap, int j_limit = 4096);

struct PhiRequest {
    DimensionFunction phi;
    bool upper = true;
    bool lower = true;
};

struct MultiEstimate {
    std::vector<DimensionEstimate> upper, lower;  // one per request
};

using RecordSink = std::function<void(const PairRecord&)>;

// One pass over all depths; every request sees the same centers, so results
// for different Phi are directly comparable. The sink (if any) receives the
// admissible records of request 0.
MultiEstimate estimate_many(const Measure& mu, const std::vector<PhiRequest>& reqs, const EstimationConfig& cfg,
                            const RecordSink& sink = {});

void scan_admissible_pairs(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg,
                           const RecordSink& sink);
DimensionEstimate estimate_upper_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg);
DimensionEstimate estimate_lower_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg);

struct SpectrumRow {
    double theta = 0;  // 0 marks the Phi = 0 (Assouad) row
    DimensionEstimate upper, lower;
};
struct SpectrumReport {
    std::vector<SpectrumRow> rows;  // Phi = 0 first, then theta ascending
    bool upper_nondecreasing_in_theta = true;
    double upper_trend = 0;  // slope of upper vs theta over the last two thetas
};
SpectrumReport estimate_spectrum(const Measure& mu, const std::vector<double>& thetas, const EstimationConfig& cfg);

struct MinkowskiFrostman {
    double dim_M = 0, dim_F = 0;
    std::vector<double> curve_M, curve_F;
};
// Secant slopes of log mu(B(z, r)) from the anchor radius R_cap down to
// r = b^-j; dim_M = max over centers, dim_F = min, at the finest depth.
MinkowskiFrostman estimate_minkowski_frostman(const Measure& mu, const EstimationConfig& cfg);

// Least number of open radius-r balls covering the sorted points lying in
// the closed window [a, b].
long long covering_number(const std::vector<double>& sorted_points, double a, double b, double r);

DimensionEstimate estimate_set_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg,
                                       Direction dir);

struct BruteForceResult {
    double upper = 0, lower = 0;
    Witness upper_witness, lower_witness;
    std::size_t triples = 0;
};
// Exhaustive evaluation of the definition over every atom z and every
// admissible (R, r) from the explicit grids, with exact rational ball sums.
BruteForceResult brute_force_reference(const AtomicMeasure& mu, const DimensionFunction& f, const std::vector<Pt>& R_grid,
                                       const std::vector<Pt>& r_grid, double lambda_min = 0.0,
                                       double cap = std::numeric_limits<double>::infinity());

}  // namespace phidim
