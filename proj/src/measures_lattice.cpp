#include <algorithm>
#include <cmath>
#include <numeric>

#include "phidim/measures.hpp"

namespace phidim {

namespace {
constexpr long double kSlack = 0x1p-40L;  // relative slack for long double mass arithmetic
const i128 kUnitLimit = static_cast<i128>(1) << 120;

i128 lcm128(i128 a, i128 b) {
    i128 x = a, y = b;
    while (y) {
        i128 t = x % y;
        x = y;
        y = t;
    }
    return a / x * b;
}

i128 clamp_units(const BigInt& v, i128 U) {
    static const BigInt lo = -1;
    const BigInt hi = from_i128(U) + 1;
    if (v < lo) return -1;
    if (v > hi) return U + 1;
    return to_i128(v);
}

Enclosure finish(long double lo, long double hi) {
    lo *= (1.0L - kSlack);
    hi *= (1.0L + kSlack);
    Enclosure e;
    e.log_lo = lo > 0 ? static_cast<double>(std::log(lo)) : -std::numeric_limits<double>::infinity();
    e.log_hi = hi > 0 ? static_cast<double>(std::log(hi)) : -std::numeric_limits<double>::infinity();
    return e;
}
}  // namespace

// ------------------------------------------------------------ lattice core
void LatticeMeasure::init_lattice(const std::vector<long long>& q, long long Lambda, int requested) {
    i128 U = Lambda;
    int D = 0;
    for (int k = 0; k < requested; ++k) {
        const long long qk = q[std::min<std::size_t>(k, q.size() - 1)];
        if (U > kUnitLimit / qk) break;
        U *= qk;
        ++D;
    }
    D_ = D;
    U_ = U;
}

Cell LatticeMeasure::root_cell() const {
    Cell c;
    c.lo = 0;
    c.len = U_;
    c.mass = 1.0L;
    c.depth = 0;
    c.state = 0;
    return c;
}

std::vector<Pt> LatticeMeasure::cell_points(const Cell& c) const { return {to_pt(c.lo), to_pt(c.lo + c.len)}; }

LatticeMeasure::Bounds LatticeMeasure::to_units(const Pt& z, const Pt& R) const {
    Bounds b{};
    if (z.den > 0 && R.den > 0 && U_ % z.den == 0 && U_ % R.den == 0) {
        const i128 zu = z.num * (U_ / z.den);
        const i128 ru = R.num * (U_ / R.den);
        const i128 a = zu - ru, c = zu + ru;
        b.a_floor = b.a_ceil = std::clamp<i128>(a, -1, U_ + 1);
        b.b_floor = b.b_ceil = std::clamp<i128>(c, -1, U_ + 1);
        return b;
    }
    const Rational zq = z.to_rational(), rq = R.to_rational();
    const BigInt Ub = from_i128(U_);
    const Rational a = (zq - rq) * Ub, c = (zq + rq) * Ub;
    b.a_floor = clamp_units(floor_div(numerator(a), denominator(a)), U_);
    b.a_ceil = clamp_units(ceil_div(numerator(a), denominator(a)), U_);
    b.b_floor = clamp_units(floor_div(numerator(c), denominator(c)), U_);
    b.b_ceil = clamp_units(ceil_div(numerator(c), denominator(c)), U_);
    return b;
}

Enclosure LatticeMeasure::ball(const Pt& z, const Pt& R) const {
    const Bounds bd = to_units(z, R);
    long double lo = 0, hi = 0;
    std::vector<Cell> stack;
    stack.reserve(256);
    stack.push_back(root_cell());
    std::vector<Cell> kids;
    while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        const i128 right = c.lo + c.len;
        if (right <= bd.a_floor || c.lo >= bd.b_ceil) continue;  // disjoint from the open ball
        if (c.lo >= bd.a_ceil && right <= bd.b_floor) {
            lo += c.mass;
            hi += c.mass;
            continue;
        }
        if (c.depth >= D_) {
            hi += c.mass;
            continue;
        }
        kids.clear();
        children(c, kids);
        for (const Cell& k : kids)
            if (k.mass > 0) stack.push_back(k);
    }
    return finish(lo, hi);
}

std::vector<Pt> LatticeMeasure::support_net(double rho) const {
    // slack so that a double rho = b^-n selects level n; cells up to 2 rho would still do
    const long double lim = static_cast<long double>(rho) * static_cast<long double>(U_) * (1 + 1e-12L);
    std::vector<i128> pts;
    std::vector<Cell> stack{root_cell()}, kids;
    while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        if (static_cast<long double>(c.len) <= lim || c.depth >= D_) {
            pts.push_back(c.lo);
            pts.push_back(c.lo + c.len);
            continue;
        }
        kids.clear();
        children(c, kids);
        for (auto& k : kids)
            if (k.mass > 0) stack.push_back(k);
        if (pts.size() > 100'000'000) throw std::runtime_error("support net too large");
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Pt> out;
    out.reserve(pts.size());
    for (i128 p : pts) out.push_back(to_pt(p));
    return out;
}

// ------------------------------------------------------------ cascade
std::vector<long long> CascadeMeasureSpec::default_schedule(int max_level) {
    std::vector<long long> n{1};
    while (n.back() <= max_level) n.push_back(9 * n.back());
    return n;
}

void CascadeMeasureSpec::validate() const {
    if (base < 2) throw std::invalid_argument("measure.base must be >= 2");
    if (depth < 1) throw std::invalid_argument("measure.depth must be >= 1");
    if (middle_child) {
        if (base != 3) throw std::invalid_argument("middle-child schedule requires base 3");
        if (p.empty()) throw std::invalid_argument("measure.p must list at least one middle ratio");
        for (auto& x : p)
            if (x < 0 || x > 1) throw std::invalid_argument("measure.p entries must lie in [0,1]");
        for (std::size_t j = 1; j < n_levels.size(); ++j)
            if (n_levels[j] <= n_levels[j - 1]) throw std::invalid_argument("measure.n_levels must increase");
        if (!n_levels.empty() && n_levels.front() < 1) throw std::invalid_argument("measure.n_levels must be positive");
        return;
    }
    if (ratios.size() != static_cast<std::size_t>(base)) throw std::invalid_argument("measure.ratios must have `base` entries");
    Rational s = 0;
    for (auto& r : ratios) {
        if (r < 0 || r >= 1) throw std::invalid_argument("measure.ratios entries must lie in [0,1)");
        s += r;
    }
    if (s != 1) throw std::invalid_argument("measure.ratios must sum to 1 exactly");
}

CascadeMeasure::CascadeMeasure(CascadeMeasureSpec spec) : spec_(std::move(spec)) {
    if (spec_.middle_child && spec_.n_levels.empty()) spec_.n_levels = CascadeMeasureSpec::default_schedule(spec_.depth);
    spec_.validate();
    for (auto& r : spec_.ratios) stationary_.push_back(r.convert_to<long double>());
    for (auto& r : spec_.p) pj_.push_back(r.convert_to<long double>());
    init_lattice({spec_.base}, 1, spec_.depth);
}

namespace {
// middle-child state: 0 normal, else 1 + (j << 8) + k for cell M_{n_j + k}
int mc_state(int j, int k) { return 1 + (j << 8) + k; }
int mc_j(int s) { return (s - 1) >> 8; }
int mc_k(int s) { return (s - 1) & 0xff; }
}  // namespace

int CascadeMeasure::child_state(const Cell& parent, int digit, i128 child_lo, i128 child_len, int child_depth) const {
    if (parent.state != 0) {
        const int j = mc_j(parent.state), k = mc_k(parent.state);
        if (digit == 1 && k + 1 <= spec_.n_levels[j]) return mc_state(j, k + 1);
        return 0;
    }
    for (std::size_t j = 0; j < spec_.n_levels.size(); ++j)
        if (spec_.n_levels[j] == child_depth && child_lo == child_len) return mc_state(static_cast<int>(j), 0);
    return 0;
}

void CascadeMeasure::children(const Cell& c, std::vector<Cell>& out) const {
    const int b = spec_.base;
    const i128 w = c.len / b;
    for (int d = 0; d < b; ++d) {
        Cell k;
        k.lo = c.lo + d * w;
        k.len = w;
        k.depth = c.depth + 1;
        long double ratio;
        if (!spec_.middle_child) {
            ratio = stationary_[d];
            k.state = 0;
        } else {
            if (c.state != 0) {
                const int j = mc_j(c.state);
                const long double pj = pj_[std::min<std::size_t>(j, pj_.size() - 1)];
                ratio = d == 1 ? pj : (1.0L - pj) / 2.0L;
            } else {
                ratio = 1.0L / 3.0L;
            }
            k.state = child_state(c, d, k.lo, k.len, k.depth);
        }
        k.mass = c.mass * ratio;
        out.push_back(k);
    }
}

Rational CascadeMeasure::interval_measure(const std::vector<int>& word) const {
    Rational m = 1;
    BigInt index = 0;  // cell [index/b^n, (index+1)/b^n]
    int state = 0;
    long long level = 0;
    for (int d : word) {
        if (d < 0 || d >= spec_.base) throw std::invalid_argument("digit out of range");
        Rational ratio;
        int next = 0;
        if (!spec_.middle_child) {
            ratio = spec_.ratios[d];
        } else if (state != 0) {
            const int j = mc_j(state), k = mc_k(state);
            const Rational& pj = spec_.p[std::min<std::size_t>(j, spec_.p.size() - 1)];
            ratio = d == 1 ? pj : (1 - pj) / 2;
            if (d == 1 && k + 1 <= spec_.n_levels[j]) next = mc_state(j, k + 1);
        } else {
            ratio = Rational(1, 3);
        }
        m *= ratio;
        index = index * spec_.base + d;
        ++level;
        if (spec_.middle_child && state == 0 && index == 1)
            for (std::size_t j = 0; j < spec_.n_levels.size(); ++j)
                if (spec_.n_levels[j] == level) next = mc_state(static_cast<int>(j), 0);
        state = next;
    }
    return m;
}

// ------------------------------------------------------------ SSC
void SelfSimilarSpec::validate_ssc() const {
    const std::size_t m = r.size();
    if (m < 2 || d.size() != m || p.size() != m) throw std::invalid_argument("SSC spec needs matching r, d, p with >= 2 maps");
    Rational ps = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(r[j] > 0 && r[j] < 1)) throw std::invalid_argument("r_j must lie in (0,1)");
        if (!(p[j] > 0)) throw std::invalid_argument("p_j must be positive");
        if (d[j] < 0 || d[j] + r[j] > 1) throw std::invalid_argument("images must lie in [0,1]");
        ps += p[j];
    }
    if (ps != 1) throw std::invalid_argument("probabilities must sum to 1");
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d[a] < d[b]; });
    if (d[idx.front()] != 0 || d[idx.back()] + r[idx.back()] != 1)
        throw std::invalid_argument("attractor hull must be [0,1] (need maps fixing 0 and 1)");
    for (std::size_t i = 1; i < m; ++i)
        if (!(d[idx[i - 1]] + r[idx[i - 1]] < d[idx[i]]))
            throw std::invalid_argument("first-level images overlap or touch: not SSC");
}

double SelfSimilarSpec::separation_gap() const {
    std::vector<std::size_t> idx(r.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return d[a] < d[b]; });
    Rational g = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) g = std::min(g, Rational(d[idx[i]] - d[idx[i - 1]] - r[idx[i - 1]]));
    return to_double(g);
}

SSCMeasure::SSCMeasure(SelfSimilarSpec spec, int depth) : spec_(std::move(spec)) {
    spec_.validate_ssc();
    for (auto& x : spec_.r) Q_ = lcm128(Q_, to_i128(denominator(x)));
    for (auto& x : spec_.d) Lambda_ = lcm128(Lambda_, to_i128(denominator(x)));
    for (auto& x : spec_.r) a_.push_back(to_i128(numerator(x)) * (Q_ / to_i128(denominator(x))));
    for (auto& x : spec_.d) e_.push_back(to_i128(numerator(x)) * (Lambda_ / to_i128(denominator(x))));
    for (auto& x : spec_.p) pl_.push_back(x.convert_to<long double>());
    if (Q_ > (static_cast<i128>(1) << 40) || Lambda_ > (static_cast<i128>(1) << 40))
        throw std::invalid_argument("SSC denominators too large for the lattice engine");
    init_lattice({static_cast<long long>(Q_)}, static_cast<long long>(Lambda_), depth);
}

void SSCMeasure::children(const Cell& c, std::vector<Cell>& out) const {
    const i128 step = c.len / Lambda_;
    for (std::size_t j = 0; j < a_.size(); ++j) {
        Cell k;
        k.lo = c.lo + e_[j] * step;
        k.len = c.len / Q_ * a_[j];
        k.depth = c.depth + 1;
        k.mass = c.mass * pl_[j];
        out.push_back(k);
    }
}

SSCCylinder ssc_cylinder_measure(const SelfSimilarSpec& spec, const std::vector<int>& word) {
    spec.validate_ssc();
    // S_w = S_{w1} o ... o S_{wn}; apply innermost first
    Rational left = 0, right = 1, mass = 1;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const int j = *it;
        if (j < 0 || static_cast<std::size_t>(j) >= spec.r.size()) throw std::invalid_argument("map index out of range");
        left = spec.r[j] * left + spec.d[j];
        right = spec.r[j] * right + spec.d[j];
        mass *= spec.p[j];
    }
    return {mass, left, right};
}

SelfSimilarSpec cantor_spec() {
    SelfSimilarSpec s;
    s.r = {Rational(1, 3), Rational(1, 3)};
    s.d = {Rational(0), Rational(2, 3)};
    s.p = {Rational(1, 2), Rational(1, 2)};
    return s;
}

// ------------------------------------------------------------ central Cantor
void CentralCantorSpec::validate() const {
    if (ratios.empty()) throw std::invalid_argument("central Cantor needs at least one ratio");
    for (auto& r : ratios)
        if (!(r > 0 && r <= Rational(1, 2))) throw std::invalid_argument("central Cantor ratios must lie in (0, 1/2]");
}

CentralCantorMeasure::CentralCantorMeasure(CentralCantorSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::vector<long long> q;
    for (auto& r : spec_.ratios) {
        num_.push_back(to_i128(numerator(r)));
        den_.push_back(to_i128(denominator(r)));
        q.push_back(static_cast<long long>(den_.back()));
    }
    init_lattice(q, 1, spec_.depth);
}

void CentralCantorMeasure::children(const Cell& c, std::vector<Cell>& out) const {
    const std::size_t k = std::min<std::size_t>(c.depth, num_.size() - 1);
    const i128 w = c.len / den_[k] * num_[k];
    Cell l;
    l.lo = c.lo;
    l.len = w;
    l.depth = c.depth + 1;
    l.mass = c.mass / 2;
    Cell r = l;
    r.lo = c.lo + c.len - w;
    out.push_back(l);
    out.push_back(r);
}

}  // namespace phidim
