#pragma once
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "phidim/dimfunc.hpp"
#include "phidim/enclosure.hpp"
#include "phidim/exact.hpp"
#include "phidim/measures.hpp"

namespace phidim {

// Equicontractive IFS S_j(x) = rho x + d_j on [0,1] with probabilities p_j.
struct EquicontractiveIFS {
    QuadRing ring;
    std::vector<QuadNumber> d;
    std::vector<Rational> p;

    void validate() const;  // hull [0,1], p_j > 0 summing to 1
    double rho() const { return ring.approx; }

    static EquicontractiveIFS golden_bc(const Rational& p);        // {rho x, rho x + 1 - rho}
    static EquicontractiveIFS dyadic(const Rational& p0);          // {x/2, x/2 + 1/2}
    static EquicontractiveIFS psi_sharp();                         // x/3 + {0, 1/6, 1/3, 2/3}, p = 1/4
    static EquicontractiveIFS rational(const Rational& r, std::vector<Rational> d, std::vector<Rational> p);
};

// Characteristic data of a net interval Delta = [0, L] in units of rho^n:
// neighbor images S_w[0,1] (w of length n meeting the interior) sit at
// [-x, -x + 1]; identical offsets are merged.
struct NeighborState {
    QuadNumber L;
    std::vector<QuadNumber> offsets;  // sorted by value
};

struct Transition {
    int child_state = 0;
    QuadNumber left;                         // child left endpoint, parent-normalized units
    std::vector<std::vector<Rational>> map;  // child weights = map * parent weights
};

class NetSystem {
public:
    explicit NetSystem(EquicontractiveIFS ifs, std::size_t max_states = 4096);

    const EquicontractiveIFS& ifs() const { return ifs_; }
    const QuadRing& ring() const { return ifs_.ring; }
    int root_state() const { return 0; }
    std::size_t state_count() const { return states_.size(); }
    const NeighborState& state(int s) const { return states_[s]; }
    const std::vector<Transition>& transitions(int s) const;

    // Probe functionals: P_k / Q_k of an interval in state s equal
    // sum_i w_i * coef[i].
    const std::vector<Rational>& p_coef(int s, int k) const;
    const std::vector<Rational>& q_coef(int s, int k) const;

private:
    int intern(const NeighborState& st) const;
    Rational probe(const QuadNumber& x, const QuadNumber& L, int k, bool contained) const;

    EquicontractiveIFS ifs_;
    std::size_t max_states_;
    QuadNumber rho_, inv_rho_;
    mutable std::vector<NeighborState> states_;
    mutable std::map<std::string, int> index_;
    mutable std::vector<std::unique_ptr<std::vector<Transition>>> trans_;
    mutable std::map<std::pair<int, int>, std::vector<Rational>> pcache_, qcache_;
};

struct FiniteTypeViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetInterval {
    QuadNumber left;  // absolute
    QuadNumber length;
    int state = 0;
    std::vector<Rational> weights;  // aligned with the state's offsets

    Rational P() const;  // sum of neighbor probabilities
};

struct NetLevel {
    int n = 0;
    std::vector<NetInterval> intervals;
};

std::vector<NetLevel> build_net_levels(const NetSystem& sys, int n_max);

// [Q, P] at probe depth k for an interval.
Enclosure net_interval_measure_enclosure(const NetSystem& sys, const NetInterval& iv, int k);
struct ExactQP {
    Rational Q, P;
};
ExactQP net_interval_qp(const NetSystem& sys, const NetInterval& iv, int k);

// Intervals at levels 0..n_max whose closure contains x (one or two per level).
std::vector<NetLevel> local_net_levels(const NetSystem& sys, const QuadNumber& x, int n_max);

struct GapReport {
    double a = 1.0;                 // min length / rho^n
    int a_level = 0;
    std::vector<std::string> F;     // distinct normalized offsets
    int F_level = 0;                // level after which F stopped growing
    std::size_t M = 0;              // max neighbors of one interval
    std::size_t states = 0;
    std::vector<std::size_t> states_per_level;
};
GapReport finite_type_gap_check(const NetSystem& sys, const std::vector<NetLevel>& levels);

// Checks P_{n-1}(parent) >= P_n(child) >= p P_{n-1}(parent) on built levels;
// returns the observed minimal child/parent ratio.
struct PnReport {
    bool upper_ok = true;
    Rational min_ratio{1};
};
PnReport pn_sandwich_check(const NetSystem& sys, const std::vector<NetLevel>& levels);

struct DoublingReport {
    std::vector<double> max_log_ratio;  // per level (index n), raw
    std::vector<double> scaled;         // divided by 1 + phi(n)
    double C0 = 1.0;
    bool pass = false;
    int n_max = 0;
    std::size_t dropped = 0;  // pairs whose Q vanished
    std::size_t working_set = 0;
};

// phi(n) = n Phi(rho^n), evaluated through |log x| so that deep levels stay
// usable below the dimension function's floor.
double phi_of_level(const DimensionFunction& f, int n, double rho);

// Exhaustive: every adjacent pair of every built level.
DoublingReport phi_doubling_check(const NetSystem& sys, const std::vector<NetLevel>& levels, const DimensionFunction& f,
                                  int probe_depth = 8);
// Deep version: adjacent-pair weight vectors grouped by state pair and pruned
// to the extreme rays of their cone (exact for ratio maxima).
DoublingReport phi_doubling_check_deep(const NetSystem& sys, const DimensionFunction& f, int n_max, int probe_depth = 8);
// Pass rule shared by both versions.
void finalize_doubling(DoublingReport& rep);

struct Mat2 {
    Rational a, b, c, d;
    Mat2 operator*(const Mat2& o) const;
    Rational norm() const;  // sum of absolute entries
};
struct TransitionNorms {
    int k = 0;
    Rational norm_T0, norm_T1;  // of T^{2^k}
};
Mat2 bc_T0(const Rational& p);
Mat2 bc_T1(const Rational& p);
std::vector<TransitionNorms> bc_transition_norms(const Rational& p, int k_max);

// Ball oracle from the finest built level.
class FiniteTypeMeasure final : public Measure {
public:
    FiniteTypeMeasure(std::shared_ptr<const NetSystem> sys, int n_max, int probe_depth = 8);
    std::string kind() const override { return "finite_type"; }
    Enclosure ball(const Pt& z, const Pt& R) const override;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override { return {0.0, 1.0}; }
    Enclosure total_mass() const override { return Enclosure::exact(1.0); }
    double resolution() const;  // min interval length at the finest level

private:
    std::shared_ptr<const NetSystem> sys_;
    int n_max_;
    std::vector<QuadNumber> left_exact_;
    std::vector<double> left_, right_;
    std::vector<long double> qpre_, ppre_;  // prefix sums
};

}  // namespace phidim
