#pragma once
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phidim/enclosure.hpp"
#include "phidim/exact.hpp"
#include "phidim/point.hpp"

namespace phidim {

struct EmptyBallError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Node of a hierarchical cell decomposition. Positions are integers in a
// measure-specific unit (see LatticeMeasure); `state` is measure-private.
struct Cell {
    i128 lo = 0, len = 0;
    long double mass = 1.0L;
    int depth = 0;
    int state = 0;
};

class Measure {
public:
    virtual ~Measure() = default;
    virtual std::string kind() const = 0;
    // Enclosure of mu(open ball B(z,R)).
    virtual Enclosure ball(const Pt& z, const Pt& R) const = 0;
    // Points of supp(mu) such that every support point is within rho of one.
    virtual std::vector<Pt> support_net(double rho) const = 0;
    virtual std::pair<double, double> hull() const = 0;
    double diam() const { return hull().second - hull().first; }
    virtual Enclosure total_mass() const = 0;

    // Optional cell tree used for adaptive center selection.
    virtual bool has_cells() const { return false; }
    virtual Cell root_cell() const { throw CapabilityError("no cell tree"); }
    virtual void children(const Cell&, std::vector<Cell>&) const { throw CapabilityError("no cell tree"); }
    virtual std::vector<Pt> cell_points(const Cell&) const { throw CapabilityError("no cell tree"); }
    virtual int cell_depth_cap() const { return 0; }
};

using MeasurePtr = std::shared_ptr<const Measure>;

// Checked query: empty-ball and precision errors per the oracle contract.
Enclosure ball_measure(const Measure& mu, const Pt& z, const Pt& R, double rel_tol = 1e-9);

// ---------------------------------------------------------------- simple
class LebesgueUnit final : public Measure {
public:
    std::string kind() const override { return "lebesgue"; }
    Enclosure ball(const Pt& z, const Pt& R) const override;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override { return {0.0, 1.0}; }
    Enclosure total_mass() const override { return Enclosure::exact(1.0); }
};

class PointMass final : public Measure {
public:
    explicit PointMass(Rational at = 0, Rational mass = 1) : at_(std::move(at)), mass_(std::move(mass)) {}
    std::string kind() const override { return "point_mass"; }
    Enclosure ball(const Pt& z, const Pt& R) const override;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override;
    Enclosure total_mass() const override;

private:
    Rational at_, mass_;
};

// Finite atomic measure with exact rational positions and masses; ball
// sums are exact and rounded outward once.
class AtomicMeasure final : public Measure {
public:
    struct Atom {
        Rational pos, mass;
    };
    explicit AtomicMeasure(std::vector<Atom> atoms);
    std::string kind() const override { return "atomic"; }
    Enclosure ball(const Pt& z, const Pt& R) const override;
    Rational ball_exact(const Rational& z, const Rational& R) const;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override;
    Enclosure total_mass() const override;
    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    std::vector<Atom> atoms_;  // sorted by position
};

Enclosure enclosure_of(const Rational& q);  // outward-rounded

// ---------------------------------------------------------------- discrete
enum class SeqKind { Polynomial, Exponential };

struct DiscreteMeasureSpec {
    SeqKind position = SeqKind::Polynomial;  // a_n = n^-lambda or lambda^-n
    SeqKind weight = SeqKind::Polynomial;    // p_n = n^-beta or beta^-n
    Rational lambda{1};
    Rational beta{2};
    Rational p0{0};
    long long N = 64;  // explicit-enumeration cutoff (support net, truncation)

    void validate() const;
    // Derived exponents (both kinds polynomial).
    double s() const;
    double t() const;
};

class DiscreteMeasure final : public Measure {
public:
    explicit DiscreteMeasure(DiscreteMeasureSpec spec);
    std::string kind() const override { return "discrete"; }
    Enclosure ball(const Pt& z, const Pt& R) const override;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override;
    Enclosure total_mass() const override;

    const DiscreteMeasureSpec& spec() const { return spec_; }
    double position(long long n) const;
    Pt position_pt(long long n) const;
    double log_weight(long long n) const;
    // Enclosure of sum_{n=a}^{b} p_n; b < 0 means infinity.
    Enclosure weight_sum(long long a, long long b) const;
    // Truncation to atoms 1..N (plus p0) with exact rational data where possible.
    AtomicMeasure truncate(long long N) const;

private:
    // sign(a_n - c); 2 when undecidable
    int cmp_position(long long n, const Rational* c, double cd) const;
    // smallest n >= 1 with a_n < c (strict); sets uncertain range
    double inv_position(double c) const;  // real n with a_n = c

    DiscreteMeasureSpec spec_;
    bool rational_positions_ = false;
    long long lam_int_ = 0;
    double lam_, beta_, p0_;
};

// ---------------------------------------------------------------- lattice
// Measures built from a tree of nested intervals whose endpoints are
// rationals with denominators dividing unit U = Lambda * prod q_k. Ball
// queries descend the tree to depth D; fully covered cells add their mass,
// partially covered cells at depth D add [0, mass].
class LatticeMeasure : public Measure {
public:
    Enclosure ball(const Pt& z, const Pt& R) const override;
    std::vector<Pt> support_net(double rho) const override;
    std::pair<double, double> hull() const override { return {0.0, 1.0}; }
    Enclosure total_mass() const override { return Enclosure::exact(1.0); }

    bool has_cells() const override { return true; }
    Cell root_cell() const override;
    std::vector<Pt> cell_points(const Cell& c) const override;
    int cell_depth_cap() const override { return D_; }

    int depth_cap() const { return D_; }
    i128 unit() const { return U_; }
    Pt to_pt(i128 units) const { return Pt::ratio(units, U_); }

protected:
    // q[k] = denominator introduced at level k+1; Lambda scales the root.
    void init_lattice(const std::vector<long long>& q_per_level, long long Lambda, int requested_depth);

private:
    struct Bounds {
        i128 a_floor, a_ceil, b_floor, b_ceil;
    };
    Bounds to_units(const Pt& z, const Pt& R) const;
    void accumulate(const Cell& c, const Bounds& bd, long double& lo, long double& hi, std::vector<Cell>& scratch) const;

    int D_ = 0;
    i128 U_ = 1;
};

struct CascadeMeasureSpec {
    int base = 2;
    // stationary rule
    std::vector<Rational> ratios;
    // middle-child schedule (base 3)
    bool middle_child = false;
    std::vector<long long> n_levels;  // n_1 < n_2 < ...
    std::vector<Rational> p;          // p_j; last value repeats
    int depth = 60;

    void validate() const;
    static std::vector<long long> default_schedule(int max_level);  // n_1 = 1, n_{j+1} = 9 n_j
};

class CascadeMeasure final : public LatticeMeasure {
public:
    explicit CascadeMeasure(CascadeMeasureSpec spec);
    std::string kind() const override { return "cascade"; }
    void children(const Cell& c, std::vector<Cell>& out) const override;
    // Exact product of ratios along a digit word.
    Rational interval_measure(const std::vector<int>& word) const;
    const CascadeMeasureSpec& spec() const { return spec_; }

private:
    // ratios of the children of a cell in `state`, as exact and double values
    void child_ratios(int state, std::vector<Rational>& exact) const;
    int child_state(const Cell& parent, int digit, i128 child_lo, i128 child_len, int child_depth) const;
    CascadeMeasureSpec spec_;
    std::vector<long double> stationary_;
    std::vector<long double> pj_;
};

struct SelfSimilarSpec {
    std::vector<Rational> r, d, p;

    void validate_ssc() const;  // hull [0,1], pairwise-disjoint first-level images
    double separation_gap() const;
};

class SSCMeasure final : public LatticeMeasure {
public:
    explicit SSCMeasure(SelfSimilarSpec spec, int depth = 60);
    std::string kind() const override { return "ssc"; }
    void children(const Cell& c, std::vector<Cell>& out) const override;
    const SelfSimilarSpec& spec() const { return spec_; }

private:
    SelfSimilarSpec spec_;
    std::vector<i128> a_;   // r_j = a_j / Q
    std::vector<i128> e_;   // d_j = e_j / Lambda
    std::vector<long double> pl_;
    i128 Q_ = 1, Lambda_ = 1;
};

struct SSCCylinder {
    Rational mass;
    Rational left, right;
};
SSCCylinder ssc_cylinder_measure(const SelfSimilarSpec& spec, const std::vector<int>& word);

struct CentralCantorSpec {
    std::vector<Rational> ratios;  // r_k in (0, 1/2]; last value repeats
    int depth = 60;
    void validate() const;
};

class CentralCantorMeasure final : public LatticeMeasure {
public:
    explicit CentralCantorMeasure(CentralCantorSpec spec);
    std::string kind() const override { return "central_cantor"; }
    void children(const Cell& c, std::vector<Cell>& out) const override;

private:
    CentralCantorSpec spec_;
    std::vector<i128> num_;  // per level numerator a_k (r_k = a_k/q_k)
    std::vector<i128> den_;
};

// Middle-third Cantor uniform measure as an SSC spec.
SelfSimilarSpec cantor_spec();

// ---------------------------------------------------------------- local dim
struct LocalDimEstimate {
    double lower = 0, upper = 0, regression = 0;
    std::vector<std::pair<double, double>> samples;  // (log r, log mid)
};

// Slopes log(mu(B(z,r_k0))/mu(B(z,r_k)))/log(r_k0/r_k) from an anchor scale
// r_k0 = b^-k0 to finer scales, restricted to log ratio >= min_log_ratio;
// (lower, upper) = (min, max) over the finest half, plus the least-squares
// slope of log(ball midpoint) vs log r.
LocalDimEstimate local_dimension_estimate(const Measure& mu, const Pt& z, double b, int k0, int k1,
                                          double min_log_ratio = 3.0);

}  // namespace phidim
