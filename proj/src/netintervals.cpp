#include "phidim/netintervals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace phidim {

// ------------------------------------------------------------ IFS
void EquicontractiveIFS::validate() const {
    if (d.size() < 2 || d.size() != p.size()) throw std::invalid_argument("IFS needs >= 2 maps with matching probabilities");
    const QuadNumber rho = QuadNumber::rho(ring);
    if (!(rho.sign(ring) > 0 && (QuadNumber(1) - rho).sign(ring) > 0)) throw std::invalid_argument("rho must lie in (0,1)");
    Rational s = 0;
    for (auto& x : p) {
        if (!(x > 0)) throw std::invalid_argument("probabilities must be positive");
        s += x;
    }
    if (s != 1) throw std::invalid_argument("probabilities must sum to 1");
    bool has0 = false, has1 = false;
    for (auto& x : d) {
        if (x.sign(ring) < 0 || (x + rho - QuadNumber(1)).sign(ring) > 0) throw std::invalid_argument("images must lie in [0,1]");
        has0 = has0 || x.is_zero();
        has1 = has1 || (x + rho - QuadNumber(1)).is_zero();
    }
    if (!has0 || !has1) throw std::invalid_argument("attractor hull must be [0,1]");
}

EquicontractiveIFS EquicontractiveIFS::golden_bc(const Rational& p) {
    EquicontractiveIFS f;
    f.ring = QuadRing::golden();
    f.d = {QuadNumber(0), QuadNumber(1, -1)};
    f.p = {p, 1 - p};
    return f;
}

EquicontractiveIFS EquicontractiveIFS::rational(const Rational& r, std::vector<Rational> d, std::vector<Rational> p) {
    EquicontractiveIFS f;
    f.ring = QuadRing::rational(r);
    for (auto& x : d) f.d.emplace_back(x);
    f.p = std::move(p);
    return f;
}

EquicontractiveIFS EquicontractiveIFS::dyadic(const Rational& p0) {
    return rational(Rational(1, 2), {Rational(0), Rational(1, 2)}, {p0, 1 - p0});
}

EquicontractiveIFS EquicontractiveIFS::psi_sharp() {
    return rational(Rational(1, 3), {Rational(0), Rational(1, 6), Rational(1, 3), Rational(2, 3)},
                    {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)});
}

// ------------------------------------------------------------ system
namespace {
std::string key_of(const NeighborState& s) {
    std::string k = s.L.str();
    for (auto& x : s.offsets) k += "|" + x.str();
    return k;
}
}  // namespace

NetSystem::NetSystem(EquicontractiveIFS ifs, std::size_t max_states) : ifs_(std::move(ifs)), max_states_(max_states) {
    ifs_.validate();
    rho_ = QuadNumber::rho(ifs_.ring);
    inv_rho_ = rho_.inv(ifs_.ring);
    NeighborState root{QuadNumber(1), {QuadNumber(0)}};
    intern(root);
}

int NetSystem::intern(const NeighborState& st) const {
    const std::string k = key_of(st);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    if (states_.size() >= max_states_)
        throw FiniteTypeViolation("neighbor-state count exceeded " + std::to_string(max_states_) + ": finite-type violation suspected");
    states_.push_back(st);
    trans_.emplace_back();
    index_.emplace(k, static_cast<int>(states_.size() - 1));
    return static_cast<int>(states_.size() - 1);
}

const std::vector<Transition>& NetSystem::transitions(int s) const {
    if (trans_[s]) return *trans_[s];
    const QuadRing& R = ifs_.ring;
    const NeighborState st = states_[s];  // copy: intern may grow states_
    struct Img {
        QuadNumber lo, hi;
        std::size_t nb;
        const Rational* p;
    };
    std::vector<Img> imgs;
    std::vector<QuadNumber> pts;
    const QuadNumber zero(0);
    for (std::size_t i = 0; i < st.offsets.size(); ++i)
        for (std::size_t j = 0; j < ifs_.d.size(); ++j) {
            Img im{ifs_.d[j] - st.offsets[i], ifs_.d[j] - st.offsets[i] + rho_, i, &ifs_.p[j]};
            for (const QuadNumber* q : {&im.lo, &im.hi})
                if (q->sign(R) > 0 && compare(*q, st.L, R) < 0) pts.push_back(*q);
            imgs.push_back(std::move(im));
        }
    auto less = [&](const QuadNumber& a, const QuadNumber& b) { return compare(a, b, R) < 0; };
    std::sort(pts.begin(), pts.end(), less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<QuadNumber> bounds;
    bounds.push_back(zero);
    bounds.insert(bounds.end(), pts.begin(), pts.end());
    bounds.push_back(st.L);

    auto out = std::make_unique<std::vector<Transition>>();
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const QuadNumber& a = bounds[b];
        const QuadNumber& c = bounds[b + 1];
        // child-normalized offsets of covering images, merged
        std::vector<std::pair<QuadNumber, std::vector<Rational>>> rows;
        for (const Img& im : imgs) {
            if (compare(im.lo, a, R) > 0 || compare(c, im.hi, R) > 0) continue;
            QuadNumber off = (a - im.lo).mul(inv_rho_, R);
            auto it = std::find_if(rows.begin(), rows.end(), [&](auto& r) { return r.first == off; });
            if (it == rows.end()) {
                rows.emplace_back(off, std::vector<Rational>(st.offsets.size(), Rational(0)));
                it = rows.end() - 1;
            }
            it->second[im.nb] += *im.p;
        }
        std::sort(rows.begin(), rows.end(), [&](auto& x, auto& y) { return less(x.first, y.first); });
        NeighborState child;
        child.L = (c - a).mul(inv_rho_, R);
        Transition t;
        t.left = a;
        for (auto& r : rows) {
            child.offsets.push_back(r.first);
            t.map.push_back(r.second);
        }
        t.child_state = intern(child);
        out->push_back(std::move(t));
    }
    trans_[s] = std::move(out);
    return *trans_[s];
}

Rational NetSystem::probe(const QuadNumber& x, const QuadNumber& L, int k, bool contained) const {
    const QuadRing& R = ifs_.ring;
    // neighbor image [-x, 1 - x] against [0, L]
    const QuadNumber lo = -x, hi = QuadNumber(1) - x;
    if (compare(lo, L, R) >= 0 || hi.sign(R) <= 0) return 0;                 // disjoint interiors
    if (lo.sign(R) >= 0 && compare(hi, L, R) <= 0) return 1;                 // inside: every descendant counts
    if (k == 0) return contained ? Rational(0) : Rational(1);
    Rational s = 0;
    const QuadNumber L2 = L.mul(inv_rho_, R);
    for (std::size_t j = 0; j < ifs_.d.size(); ++j) {
        const QuadNumber x2 = (x - ifs_.d[j]).mul(inv_rho_, R);
        s += ifs_.p[j] * probe(x2, L2, k - 1, contained);
    }
    return s;
}

const std::vector<Rational>& NetSystem::p_coef(int s, int k) const {
    auto key = std::make_pair(s, k);
    auto it = pcache_.find(key);
    if (it != pcache_.end()) return it->second;
    std::vector<Rational> c;
    for (auto& x : states_[s].offsets) c.push_back(probe(x, states_[s].L, k, false));
    return pcache_[key] = std::move(c);
}

const std::vector<Rational>& NetSystem::q_coef(int s, int k) const {
    auto key = std::make_pair(s, k);
    auto it = qcache_.find(key);
    if (it != qcache_.end()) return it->second;
    std::vector<Rational> c;
    for (auto& x : states_[s].offsets) c.push_back(probe(x, states_[s].L, k, true));
    return qcache_[key] = std::move(c);
}

// ------------------------------------------------------------ levels
Rational NetInterval::P() const {
    Rational s = 0;
    for (auto& w : weights) s += w;
    return s;
}

namespace {
std::vector<Rational> apply(const std::vector<std::vector<Rational>>& M, const std::vector<Rational>& w) {
    std::vector<Rational> out(M.size(), Rational(0));
    for (std::size_t r = 0; r < M.size(); ++r)
        for (std::size_t c = 0; c < w.size(); ++c)
            if (M[r][c] != 0) out[r] += M[r][c] * w[c];
    return out;
}

NetInterval root_interval() {
    NetInterval iv;
    iv.left = QuadNumber(0);
    iv.length = QuadNumber(1);
    iv.state = 0;
    iv.weights = {Rational(1)};
    return iv;
}

std::vector<NetInterval> expand(const NetSystem& sys, const NetInterval& iv, const QuadNumber& unit) {
    std::vector<NetInterval> kids;
    const QuadRing& R = sys.ring();
    for (const Transition& t : sys.transitions(iv.state)) {
        NetInterval k;
        k.left = iv.left + t.left.mul(unit, R);
        k.state = t.child_state;
        k.weights = apply(t.map, iv.weights);
        kids.push_back(std::move(k));
    }
    const QuadNumber rho = QuadNumber::rho(R);
    const QuadNumber child_unit = unit.mul(rho, R);
    for (auto& k : kids) k.length = sys.state(k.state).L.mul(child_unit, R);
    return kids;
}
}  // namespace

std::vector<NetLevel> build_net_levels(const NetSystem& sys, int n_max) {
    std::vector<NetLevel> levels(1);
    levels[0].n = 0;
    levels[0].intervals.push_back(root_interval());
    QuadNumber unit(1);
    const QuadNumber rho = QuadNumber::rho(sys.ring());
    for (int n = 1; n <= n_max; ++n) {
        NetLevel lv;
        lv.n = n;
        for (const NetInterval& iv : levels.back().intervals) {
            auto kids = expand(sys, iv, unit);
            for (auto& k : kids) lv.intervals.push_back(std::move(k));
        }
        unit = unit.mul(rho, sys.ring());
        levels.push_back(std::move(lv));
    }
    return levels;
}

std::vector<NetLevel> local_net_levels(const NetSystem& sys, const QuadNumber& x, int n_max) {
    const QuadRing& R = sys.ring();
    std::vector<NetLevel> levels(1);
    levels[0].intervals.push_back(root_interval());
    QuadNumber unit(1);
    const QuadNumber rho = QuadNumber::rho(R);
    for (int n = 1; n <= n_max; ++n) {
        NetLevel lv;
        lv.n = n;
        for (const NetInterval& iv : levels.back().intervals)
            for (auto& k : expand(sys, iv, unit))
                if (compare(k.left, x, R) <= 0 && compare(x, k.left + k.length, R) <= 0) lv.intervals.push_back(std::move(k));
        unit = unit.mul(rho, R);
        levels.push_back(std::move(lv));
    }
    return levels;
}

ExactQP net_interval_qp(const NetSystem& sys, const NetInterval& iv, int k) {
    const auto& pc = sys.p_coef(iv.state, k);
    const auto& qc = sys.q_coef(iv.state, k);
    ExactQP r{0, 0};
    for (std::size_t i = 0; i < iv.weights.size(); ++i) {
        r.P += pc[i] * iv.weights[i];
        r.Q += qc[i] * iv.weights[i];
    }
    return r;
}

Enclosure net_interval_measure_enclosure(const NetSystem& sys, const NetInterval& iv, int k) {
    const ExactQP qp = net_interval_qp(sys, iv, k);
    Enclosure lo = enclosure_of(qp.Q), hi = enclosure_of(qp.P);
    return {lo.log_lo, hi.log_hi};
}

GapReport finite_type_gap_check(const NetSystem& sys, const std::vector<NetLevel>& levels) {
    GapReport g;
    std::set<std::string> F;
    std::set<int> seen;
    for (const NetLevel& lv : levels) {
        std::set<int> here;
        for (const NetInterval& iv : lv.intervals) {
            const NeighborState& st = sys.state(iv.state);
            const double a = st.L.to_double(sys.ring());
            if (a < g.a) {
                g.a = a;
                g.a_level = lv.n;
            }
            g.M = std::max(g.M, st.offsets.size());
            here.insert(iv.state);
            for (auto& x : st.offsets)
                if (F.insert(x.str()).second) g.F_level = lv.n;
        }
        g.states_per_level.push_back(here.size());
        seen.insert(here.begin(), here.end());
    }
    g.F.assign(F.begin(), F.end());
    g.states = seen.size();
    return g;
}

PnReport pn_sandwich_check(const NetSystem& sys, const std::vector<NetLevel>& levels) {
    PnReport rep;
    for (std::size_t n = 1; n < levels.size(); ++n) {
        // children are emitted parent by parent in order
        std::size_t ci = 0;
        for (const NetInterval& par : levels[n - 1].intervals) {
            const Rational Pp = par.P();
            const std::size_t nk = sys.transitions(par.state).size();
            for (std::size_t t = 0; t < nk; ++t, ++ci) {
                const Rational Pc = levels[n].intervals[ci].P();
                if (Pc > Pp) rep.upper_ok = false;
                rep.min_ratio = std::min(rep.min_ratio, Rational(Pc / Pp));
            }
        }
    }
    return rep;
}

// ------------------------------------------------------------ transition matrices
Mat2 Mat2::operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}
Rational Mat2::norm() const { return abs(a) + abs(b) + abs(c) + abs(d); }

Mat2 bc_T0(const Rational& p) { return {p * (1 - p), p * (1 - p), 0, (1 - p) * (1 - p)}; }
Mat2 bc_T1(const Rational& p) { return {p * p, 0, (1 - p) * (1 - p), p * (1 - p)}; }

std::vector<TransitionNorms> bc_transition_norms(const Rational& p, int k_max) {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("p must lie in (0,1)");
    std::vector<TransitionNorms> out;
    Mat2 A = bc_T0(p), B = bc_T1(p);
    for (int k = 0; k <= k_max; ++k) {
        out.push_back({k, A.norm(), B.norm()});
        A = A * A;
        B = B * B;
    }
    return out;
}

// ------------------------------------------------------------ ball oracle
FiniteTypeMeasure::FiniteTypeMeasure(std::shared_ptr<const NetSystem> sys, int n_max, int probe_depth)
    : sys_(std::move(sys)), n_max_(n_max) {
    auto levels = build_net_levels(*sys_, n_max);
    const auto& finest = levels.back().intervals;
    qpre_.push_back(0);
    ppre_.push_back(0);
    for (const NetInterval& iv : finest) {
        left_exact_.push_back(iv.left);
        left_.push_back(iv.left.to_double(sys_->ring()));
        right_.push_back((iv.left + iv.length).to_double(sys_->ring()));
        const ExactQP qp = net_interval_qp(*sys_, iv, probe_depth);
        qpre_.push_back(qpre_.back() + qp.Q.convert_to<long double>());
        ppre_.push_back(ppre_.back() + qp.P.convert_to<long double>());
    }
    left_exact_.push_back(QuadNumber(1));
}

double FiniteTypeMeasure::resolution() const {
    double m = 1;
    for (std::size_t i = 0; i < left_.size(); ++i) m = std::min(m, right_[i] - left_[i]);
    return m;
}

Enclosure FiniteTypeMeasure::ball(const Pt& z, const Pt& R) const {
    const QuadRing& ring = sys_->ring();
    const Rational a = z.to_rational() - R.to_rational();
    const Rational b = z.to_rational() + R.to_rational();
    const double ad = to_double(a), bd = to_double(b);
    // exact compare endpoint e (index into left_exact_) with rational c
    auto cmp = [&](std::size_t e, const Rational& c, double cd) {
        const double ed = e < left_.size() ? left_[e] : 1.0;
        if (ed < cd - 1e-12) return -1;
        if (ed > cd + 1e-12) return 1;
        return (left_exact_[e] - QuadNumber(c)).sign(ring);
    };
    const std::size_t n = left_.size();
    // contained: left_i >= a and right_i = left_{i+1} <= b
    // meeting:   right_i > a and left_i < b
    auto first_geq = [&](const Rational& c, double cd, bool strict) {
        std::size_t lo = 0, hi = n + 1;  // endpoints 0..n
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int s = cmp(mid, c, cd);
            if (strict ? s > 0 : s >= 0)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;  // first endpoint index with e >= c (or > c)
    };
    // intervals i = [e_i, e_{i+1}]; contained: e_i >= a and e_{i+1} <= b
    const std::size_t ca = first_geq(a, ad, false);
    const std::size_t cb_plus = first_geq(b, bd, true);  // first endpoint > b
    long double lo = 0, hi = 0;
    if (cb_plus >= 1) {
        const std::size_t cb = std::min(cb_plus - 1, n);
        if (cb > ca) lo = qpre_[cb] - qpre_[ca];
    }
    // meeting the open ball: e_{i+1} > a and e_i < b
    const std::size_t ma = first_geq(a, ad, true);
    const std::size_t mb = first_geq(b, bd, false);
    const std::size_t i0 = ma == 0 ? 0 : ma - 1;
    const std::size_t i1 = std::min(mb, n);
    if (i1 > i0) hi = ppre_[i1] - ppre_[i0];
    lo *= 1.0L - 0x1p-40L;
    hi *= 1.0L + 0x1p-40L;
    Enclosure e;
    e.log_lo = lo > 0 ? static_cast<double>(std::log(lo)) : -std::numeric_limits<double>::infinity();
    e.log_hi = hi > 0 ? static_cast<double>(std::log(hi)) : -std::numeric_limits<double>::infinity();
    return e;
}

std::vector<Pt> FiniteTypeMeasure::support_net(double rho) const {
    std::vector<Pt> out;
    double last = -1;
    for (std::size_t i = 0; i <= left_.size(); ++i) {
        const double x = i < left_.size() ? left_[i] : 1.0;
        if (i == left_.size() || x - last >= rho || i == 0) {
            const QuadNumber& e = left_exact_[i];
            if (e.v() == 0)
                out.push_back(Pt::from_rational(e.u()));
            else
                out.push_back(Pt::from_double(x));
            last = x;
        }
    }
    return out;
}

}  // namespace phidim
