#include "phidim/estimate.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <thread>
#include <unordered_map>

namespace phidim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct PtKey {
    i128 num, den;
    bool operator==(const PtKey& o) const { return num == o.num && den == o.den; }
};
struct PtKeyHash {
    std::size_t operator()(const PtKey& k) const {
        auto h = [](i128 x) { return std::hash<unsigned long long>()(static_cast<unsigned long long>(x) ^ static_cast<unsigned long long>(x >> 64)); };
        return h(k.num) * 1000003u ^ h(k.den);
    }
};
PtKey key_of(const Pt& p) {
    if (p.den != 0) return {p.num, p.den};
    unsigned long long bits;
    std::memcpy(&bits, &p.v, sizeof bits);
    return {static_cast<i128>(bits), 0};
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (threads <= 1 || n < 64) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    const std::size_t t = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(t);
    for (std::size_t w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < n; k += t) fn(k);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

double cap_of(const Measure& mu, const EstimationConfig& cfg) {
    if (cfg.R_cap) return *cfg.R_cap;
    const double d = mu.diam();
    return d > 0 ? d / 2 : 1.0;
}

// Scale lists: index k -> radius. Geometric mode uses b^-k for k = 0..n_max
// (only k >= i0 are used as R); explicit mode uses the grids as given.
struct Scales {
    bool explicit_grid = false;
    std::vector<Pt> R, r;  // geometric: both equal b^-k
    int i0 = 0;            // first usable R index (R <= cap)
    int j_lo = 0, j_hi = 0;
    double log_b = 0;
};

Scales make_scales(const EstimationConfig& cfg, double cap) {
    Scales s;
    if (!cfg.R_grid.empty() || !cfg.r_grid.empty()) {
        if (cfg.R_grid.empty() || cfg.r_grid.empty()) throw ConfigError("explicit grids need both R_grid and r_grid");
        s.explicit_grid = true;
        s.R = cfg.R_grid;
        s.r = cfg.r_grid;
        auto desc = [](const Pt& a, const Pt& b) { return a.v > b.v; };
        std::stable_sort(s.R.begin(), s.R.end(), desc);
        std::stable_sort(s.r.begin(), s.r.end(), desc);
        s.i0 = 0;
        while (s.i0 < static_cast<int>(s.R.size()) && s.R[s.i0].v > cap) ++s.i0;
        s.j_lo = 0;
        s.j_hi = static_cast<int>(s.r.size()) - 1;
        return s;
    }
    s.log_b = std::log(static_cast<double>(cfg.base));
    for (int k = 0; k <= cfg.n_max; ++k) s.R.push_back(Pt::inv_pow(cfg.base, k));
    s.r = s.R;
    s.i0 = 0;
    while (s.i0 <= cfg.n_max && s.R[s.i0].v > cap) ++s.i0;
    s.j_lo = cfg.n_min;
    s.j_hi = cfg.n_max;
    return s;
}

// adm[j][i]: is (R_i, r_j) admissible for a request.
using AdmTable = std::vector<std::vector<char>>;

AdmTable phi_table(const Scales& s, const DimensionFunction& f, const EstimationConfig& cfg, double cap,
                   bool boundary) {
    AdmTable t(s.r.size(), std::vector<char>(s.R.size(), 0));
    for (int j = s.j_lo; j <= s.j_hi; ++j)
        for (int i = s.i0; i < static_cast<int>(s.R.size()); ++i)
            t[j][i] = admissible(f, s.R[i], s.r[j], cfg.lambda_min, cap);
    if (boundary && !s.explicit_grid) {
        // keep, for each R, only its smallest admissible depth
        for (int i = s.i0; i < static_cast<int>(s.R.size()); ++i) {
            bool seen = false;
            for (int j = s.j_lo; j <= s.j_hi; ++j) {
                if (!t[j][i]) continue;
                if (seen) t[j][i] = 0;
                seen = true;
            }
        }
    }
    return t;
}

AdmTable anchor_table(const Scales& s, const EstimationConfig& cfg) {
    AdmTable t(s.r.size(), std::vector<char>(s.R.size(), 0));
    for (int j = s.j_lo; j <= s.j_hi; ++j)
        if (s.i0 < static_cast<int>(s.R.size()) && s.R[s.i0].v > s.r[j].v &&
            log_ratio(s.R[s.i0], s.r[j]) >= cfg.lambda_min)
            t[j][s.i0] = 1;
    return t;
}

// Profile of one center: enclosures of mu(B(z, R_i)) for every R index used
// and of mu(B(z, r_j)) for the current depth.
struct Profile {
    std::vector<Enclosure> big;  // indexed by R index; filled lazily
    int filled = -1;             // big[0..filled] valid (geometric mode)
};

struct Reduction {
    std::vector<double> curve;
    std::vector<Witness> wit;
    std::size_t records = 0, dropped = 0;
};

struct EngineReq {
    AdmTable adm;
    bool up = true, lo = true;
    Reduction r_up, r_lo;
};

// Center sources -----------------------------------------------------------

std::vector<Pt> thin(std::vector<Pt> pts, std::size_t cap) {
    if (cap == 0 || pts.size() <= cap) return pts;
    std::vector<Pt> out;
    out.reserve(cap);
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < cap; ++k) out.push_back(pts[(k * (n - 1)) / (cap - 1)]);
    return out;
}

struct CellBeam {
    const Measure& mu;
    const EstimationConfig& cfg;
    std::vector<Cell> kept;
    long double unit;

    CellBeam(const Measure& m, const EstimationConfig& c) : mu(m), cfg(c) {
        kept.push_back(mu.root_cell());
        const auto* lm = dynamic_cast<const LatticeMeasure*>(&mu);
        unit = lm ? static_cast<long double>(lm->unit()) : 1.0L;
    }

    // Refine kept cells until every one is no longer than rho.
    std::vector<Cell> frontier(double rho) const {
        const long double lim = static_cast<long double>(rho) * unit * (1 + 1e-12L);
        std::vector<Cell> out, stack(kept.rbegin(), kept.rend()), kids;
        while (!stack.empty()) {
            Cell c = stack.back();
            stack.pop_back();
            if (static_cast<long double>(c.len) <= lim || c.depth >= mu.cell_depth_cap()) {
                out.push_back(c);
                continue;
            }
            kids.clear();
            mu.children(c, kids);
            for (auto it = kids.rbegin(); it != kids.rend(); ++it)
                if (it->mass > 0) stack.push_back(*it);
        }
        return out;
    }
};

double score_up(const Profile& p, const Enclosure& small, int i0, int i_last, int j, const Scales& s, double lambda) {
    double best = kNaN;
    for (int i = i0; i <= i_last; ++i) {
        const double lr = log_ratio(s.R[i], s.r[j]);
        if (!(lr >= lambda)) continue;
        const double a = alpha_upper(p.big[i], small, lr);
        if (std::isnan(a)) continue;
        if (std::isnan(best) || a > best) best = a;
    }
    return best;
}
double score_lo(const Profile& p, const Enclosure& small, int i0, int i_last, int j, const Scales& s, double lambda) {
    double best = kNaN;
    for (int i = i0; i <= i_last; ++i) {
        const double lr = log_ratio(s.R[i], s.r[j]);
        if (!(lr >= lambda)) continue;
        const double a = alpha_lower(p.big[i], small, lr);
        if (std::isnan(a)) continue;
        if (std::isnan(best) || a < best) best = a;
    }
    return best;
}

void finish(DimensionEstimate& e, const Reduction& red, const Scales& s, const EstimationConfig& cfg) {
    e.curve = red.curve;
    e.curve_witness = red.wit;
    e.records = red.records;
    e.dropped = red.dropped;
    if (s.explicit_grid) {
        // a finite instance: the value is the extremum over every record
        for (std::size_t j = 0; j < red.curve.size(); ++j) {
            const double v = red.curve[j];
            if (std::isnan(v)) continue;
            const bool better = std::isnan(e.value) || (e.direction == Direction::Upper ? v > e.value : v < e.value);
            if (better) {
                e.value = v;
                e.witness = red.wit[j];
            }
        }
        return;
    }
    e.value = red.curve[s.j_hi];
    e.witness = red.wit[s.j_hi];
    const int half = std::max(s.j_lo, s.j_hi / 2);
    double ref = kNaN;
    for (int j = half; j <= s.j_hi && std::isnan(ref); ++j) ref = red.curve[j];
    if (!std::isnan(ref) && !std::isnan(e.value)) e.diverging = (e.value - ref) >= cfg.divergence_threshold;
    if (std::isinf(e.value) && e.value > 0) e.diverging = true;
}

void reduce(EngineReq& q, int j, const std::vector<Pt>& centers, const std::vector<Profile*>& profs,
            const std::vector<Enclosure>& smalls, const Scales& s, const RecordSink* sink) {
    const auto& row = q.adm[j];
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const Profile& p = *profs[c];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!row[i]) continue;
            const double lr = log_ratio(s.R[i], s.r[j]);
            const Enclosure& big = p.big[i];
            if (sink && *sink) {
                PairRecord rec{centers[c], s.R[i], s.r[j], static_cast<int>(i), j, big, smalls[c]};
                (*sink)(rec);
            }
            if (q.up) {
                ++q.r_up.records;
                const double a = alpha_upper(big, smalls[c], lr);
                if (std::isnan(a))
                    ++q.r_up.dropped;
                else if (std::isnan(q.r_up.curve[j]) || a > q.r_up.curve[j]) {
                    q.r_up.curve[j] = a;
                    q.r_up.wit[j] = {centers[c], s.R[i], s.r[j], true};
                }
            }
            if (q.lo) {
                ++q.r_lo.records;
                const double a = alpha_lower(big, smalls[c], lr);
                if (std::isnan(a))
                    ++q.r_lo.dropped;
                else if (std::isnan(q.r_lo.curve[j]) || a < q.r_lo.curve[j]) {
                    q.r_lo.curve[j] = a;
                    q.r_lo.wit[j] = {centers[c], s.R[i], s.r[j], true};
                }
            }
        }
    }
}

// Runs every request over the same centers. Cell measures refine a beam of
// cells level by level; other measures use support_net(r) directly.
void run_engine(const Measure& mu, std::vector<EngineReq>& reqs, const Scales& s, const EstimationConfig& cfg,
                const RecordSink* sink) {
    for (auto& q : reqs) {
        q.r_up.curve.assign(s.r.size(), kNaN);
        q.r_up.wit.assign(s.r.size(), {});
        q.r_lo.curve = q.r_up.curve;
        q.r_lo.wit = q.r_up.wit;
    }
    const int nR = static_cast<int>(s.R.size());
    const bool beam_mode = mu.has_cells() && !s.explicit_grid;
    std::unordered_map<PtKey, Profile, PtKeyHash> memo;
    std::optional<CellBeam> beam;
    if (beam_mode) beam.emplace(mu, cfg);

    for (int j = s.j_lo; j <= s.j_hi; ++j) {
        // R indices needed at this depth
        int i_last = s.i0 - 1;
        if (s.explicit_grid)
            i_last = nR - 1;
        else
            i_last = std::min(j - 1, nR - 1);

        std::vector<Pt> centers;
        std::vector<Cell> cells;
        std::vector<std::vector<std::size_t>> cell_pts;
        if (beam_mode) {
            cells = beam->frontier(s.r[j].v);
            std::unordered_map<PtKey, std::size_t, PtKeyHash> idx;
            for (auto& c : cells) {
                std::vector<std::size_t> ids;
                for (const Pt& p : mu.cell_points(c)) {
                    auto [it, fresh] = idx.emplace(key_of(p), centers.size());
                    if (fresh) centers.push_back(p);
                    ids.push_back(it->second);
                }
                cell_pts.push_back(std::move(ids));
            }
        } else {
            centers = thin(mu.support_net(s.r[j].v), cfg.max_centers);
        }

        // profiles: extend memoized entries, evaluate the small ball
        std::unordered_map<PtKey, Profile, PtKeyHash> next;
        std::vector<Profile*> profs(centers.size());
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const PtKey k = key_of(centers[c]);
            auto it = memo.find(k);
            Profile p;
            if (it != memo.end()) p = std::move(it->second);
            if (p.big.size() < static_cast<std::size_t>(nR)) p.big.resize(nR);
            profs[c] = &(next[k] = std::move(p));
        }
        std::vector<Enclosure> smalls(centers.size());
        // geometric radii coincide with the r grid, so the small ball at
        // depth j becomes the R = b^-j entry reused by deeper levels
        const int fill_to = s.explicit_grid ? i_last : j;
        parallel_for(centers.size(), cfg.threads, [&](std::size_t c) {
            Profile& p = *profs[c];
            for (int i = std::max(p.filled + 1, s.explicit_grid ? s.i0 : std::min(s.i0, j)); i <= fill_to; ++i)
                p.big[i] = mu.ball(centers[c], s.R[i]);
            p.filled = std::max(p.filled, fill_to);
            smalls[c] = s.explicit_grid ? mu.ball(centers[c], s.r[j]) : p.big[j];
        });
        memo = std::move(next);

        for (std::size_t k = 0; k < reqs.size(); ++k) reduce(reqs[k], j, centers, profs, smalls, s, k == 0 ? sink : nullptr);

        if (beam_mode) {
            if (cells.size() <= cfg.full_net_budget) {
                beam->kept = cells;
                continue;
            }
            // score classes: all R, R >= r^{1/2}, R >= r^{1/4}; both directions
            const int limits[3] = {j - 1, j / 2, j / 4};
            std::vector<char> keep(cells.size(), 0);
            std::vector<std::pair<double, std::size_t>> sc(cells.size());
            for (int dir = 0; dir < 2; ++dir)
                for (int cl = 0; cl < 3; ++cl) {
                    const int lim = std::min(limits[cl], i_last);
                    for (std::size_t c = 0; c < cells.size(); ++c) {
                        double v = kNaN;
                        for (std::size_t id : cell_pts[c]) {
                            const double a = dir == 0 ? score_up(*profs[id], smalls[id], s.i0, lim, j, s, cfg.lambda_min)
                                                      : -score_lo(*profs[id], smalls[id], s.i0, lim, j, s, cfg.lambda_min);
                            if (!std::isnan(a) && (std::isnan(v) || a > v)) v = a;
                        }
                        sc[c] = {std::isnan(v) ? -kInf : v, c};
                    }
                    const std::size_t k = std::min(cfg.beam, sc.size());
                    std::partial_sort(sc.begin(), sc.begin() + k, sc.end(), [](const auto& a, const auto& b) {
                        return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
                    for (std::size_t t = 0; t < k; ++t) keep[sc[t].second] = 1;
                }
            beam->kept.clear();
            for (std::size_t c = 0; c < cells.size(); ++c)
                if (keep[c]) beam->kept.push_back(cells[c]);
        }
    }
}

void check_admissible_exists(const std::vector<EngineReq>& reqs, const Scales& s, const std::vector<DimensionFunction>& fs,
                             const EstimationConfig& cfg, double cap) {
    for (std::size_t q = 0; q < reqs.size(); ++q) {
        bool any = false;
        for (auto& row : reqs[q].adm)
            for (char c : row) any = any || c;
        if (any) continue;
        if (s.explicit_grid) throw ConfigError("no admissible (R, r) pair in the explicit grids");
        const int first = first_admissible_depth(fs[q], cfg, cap);
        if (first < 0) throw ConfigError("no admissible (R, r) pair at any depth for " + fs[q].describe());
        throw ConfigError("no admissible pair up to depth " + std::to_string(cfg.n_max) + " for " + fs[q].describe() +
                          "; first admissible depth is " + std::to_string(first));
    }
}
}  // namespace

std::string to_string(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }
std::string to_string(ScanMode m) { return m == ScanMode::Full ? "full" : "boundary"; }

void EstimationConfig::validate() const {
    if (R_grid.empty() != r_grid.empty()) throw ConfigError("explicit grids need both R_grid and r_grid");
    if (R_grid.empty()) {
        if (base < 2) throw ConfigError("estimator.base must be an integer >= 2");
        if (n_min < 2) throw ConfigError("estimator.n_min must be >= 2");
        if (n_max < n_min) throw ConfigError("estimator.n_max must be >= n_min");
        if (!(lambda_min > 0)) throw ConfigError("estimator.lambda_min must be > 0");
    }
    for (const Pt& p : R_grid)
        if (!(p.v > 0)) throw ConfigError("estimator.R_grid entries must be positive");
    for (const Pt& p : r_grid)
        if (!(p.v > 0)) throw ConfigError("estimator.r_grid entries must be positive");
    // explicit grids are small hand-made examples; 0 disables the filter there
    if (!(lambda_min >= 0)) throw ConfigError("estimator.lambda_min must be >= 0");
    if (R_cap && !(*R_cap > 0)) throw ConfigError("estimator.R_cap must be positive");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

double phi_at(const DimensionFunction& f, const Pt& R) {
    // scales at or above 1 occur only in explicit grids; only a constant
    // function has an unambiguous value there
    if (R.v >= 1.0) return f.kind == PhiKind::Constant ? f.delta : kNaN;
    return R.v > f.floor ? f.eval(R.v) : f.eval_abs_log(-std::log(R.v));
}

double log_ratio(const Pt& R, const Pt& r) { return std::log(R.v) - std::log(r.v); }

bool admissible(const DimensionFunction& f, const Pt& R, const Pt& r, double lambda_min, double cap) {
    if (!(R.v <= cap) || !(r.v < R.v)) return false;
    const double lr = log_ratio(R, r);
    if (!(lr > 0) || !(lr >= lambda_min)) return false;
    // r <= R^{1+Phi(R)} in log form; a relative slack of 1e-12 absorbs the
    // rounding of exact boundary cases such as r = R^2
    const double ph = phi_at(f, R);
    if (std::isnan(ph)) return false;
    const double need = (1.0 + ph) * std::log(R.v);
    const double have = std::log(r.v);
    return have <= need + 1e-12 * std::fabs(need);
}

int first_admissible_depth(const DimensionFunction& f, const EstimationConfig& cfg, double cap, int j_limit) {
    for (int j = cfg.n_min; j <= j_limit; ++j) {
        const Pt r = Pt::inv_pow(cfg.base, std::min(j, 120));
        const Pt rr = j <= 120 ? r : Pt::from_double(std::pow(static_cast<double>(cfg.base), -j));
        for (int i = 1; i < j; ++i) {
            const Pt R = Pt::inv_pow(cfg.base, i);
            if (admissible(f, R, rr, cfg.lambda_min, cap)) return j;
        }
    }
    return -1;
}

MultiEstimate estimate_many(const Measure& mu, const std::vector<PhiRequest>& reqs, const EstimationConfig& cfg,
                            const RecordSink& sink) {
    cfg.validate();
    const double cap = cap_of(mu, cfg);
    const Scales s = make_scales(cfg, cap);
    std::vector<EngineReq> er;
    std::vector<DimensionFunction> fs;
    for (auto& r : reqs) {
        EngineReq q;
        q.adm = phi_table(s, r.phi, cfg, cap, cfg.mode == ScanMode::Boundary);
        q.up = r.upper;
        q.lo = r.lower;
        er.push_back(std::move(q));
        fs.push_back(r.phi);
    }
    check_admissible_exists(er, s, fs, cfg, cap);
    run_engine(mu, er, s, cfg, sink ? &sink : nullptr);
    MultiEstimate out;
    for (auto& q : er) {
        DimensionEstimate u, l;
        u.direction = Direction::Upper;
        l.direction = Direction::Lower;
        if (q.up) finish(u, q.r_up, s, cfg);
        if (q.lo) finish(l, q.r_lo, s, cfg);
        out.upper.push_back(std::move(u));
        out.lower.push_back(std::move(l));
    }
    return out;
}

void scan_admissible_pairs(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg,
                           const RecordSink& sink) {
    estimate_many(mu, {PhiRequest{f, true, false}}, cfg, sink);
}

DimensionEstimate estimate_upper_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg) {
    return estimate_many(mu, {PhiRequest{f, true, false}}, cfg).upper[0];
}

DimensionEstimate estimate_lower_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg) {
    return estimate_many(mu, {PhiRequest{f, false, true}}, cfg).lower[0];
}

SpectrumReport estimate_spectrum(const Measure& mu, const std::vector<double>& thetas, const EstimationConfig& cfg) {
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        if (!(thetas[k] > 0 && thetas[k] < 1)) throw ConfigError("theta values must lie in (0,1)");
        if (k && !(thetas[k] > thetas[k - 1])) throw ConfigError("theta values must be increasing");
    }
    std::vector<PhiRequest> reqs{{DimensionFunction::constant(0.0)}};
    for (double t : thetas) reqs.push_back({DimensionFunction::theta_spectrum(t)});
    MultiEstimate m = estimate_many(mu, reqs, cfg);
    SpectrumReport rep;
    for (std::size_t k = 0; k < reqs.size(); ++k)
        rep.rows.push_back({k == 0 ? 0.0 : thetas[k - 1], m.upper[k], m.lower[k]});
    for (std::size_t k = 2; k < rep.rows.size(); ++k)
        if (rep.rows[k].upper.value < rep.rows[k - 1].upper.value) rep.upper_nondecreasing_in_theta = false;
    if (rep.rows.size() >= 3) {
        const auto& a = rep.rows[rep.rows.size() - 2];
        const auto& b = rep.rows.back();
        rep.upper_trend = (b.upper.value - a.upper.value) / (b.theta - a.theta);
    }
    return rep;
}

MinkowskiFrostman estimate_minkowski_frostman(const Measure& mu, const EstimationConfig& cfg) {
    cfg.validate();
    const double cap = cap_of(mu, cfg);
    const Scales s = make_scales(cfg, cap);
    std::vector<EngineReq> er(1);
    er[0].adm = anchor_table(s, cfg);
    std::vector<DimensionFunction> fs{DimensionFunction::constant(0)};
    check_admissible_exists(er, s, fs, cfg, cap);
    run_engine(mu, er, s, cfg, nullptr);
    DimensionEstimate u, l;
    u.direction = Direction::Upper;
    l.direction = Direction::Lower;
    finish(u, er[0].r_up, s, cfg);
    finish(l, er[0].r_lo, s, cfg);
    return {u.value, l.value, u.curve, l.curve};
}

long long covering_number(const std::vector<double>& pts, double a, double b, double r) {
    auto it = std::lower_bound(pts.begin(), pts.end(), a);
    const auto end = std::upper_bound(pts.begin(), pts.end(), b);
    long long n = 0;
    while (it < end) {
        ++n;
        // an open ball of radius r covers [p, p + 2r)
        it = std::lower_bound(it, end, *it + 2 * r);
    }
    return n;
}

DimensionEstimate estimate_set_phi_dim(const Measure& mu, const DimensionFunction& f, const EstimationConfig& cfg,
                                       Direction dir) {
    cfg.validate();
    const double cap = cap_of(mu, cfg);
    const Scales s = make_scales(cfg, cap);
    std::vector<EngineReq> er(1);
    er[0].adm = phi_table(s, f, cfg, cap, cfg.mode == ScanMode::Boundary);
    check_admissible_exists(er, s, {f}, cfg, cap);
    // E is represented by a net four times finer than the smallest r
    double finest = kInf;
    for (const Pt& p : s.r) finest = std::min(finest, p.v);
    std::vector<double> E;
    for (const Pt& p : mu.support_net(finest / 4)) E.push_back(p.v);
    std::sort(E.begin(), E.end());
    Reduction red;
    red.curve.assign(s.r.size(), kNaN);
    red.wit.assign(s.r.size(), {});
    const std::size_t N = E.size();
    // greedy covering with binary lifting: jump[k][p] is the index reached
    // after 2^k balls starting at point p (N once past the end)
    std::vector<std::vector<std::uint32_t>> jump;
    for (int j = s.j_lo; j <= s.j_hi; ++j) {
        const auto& row = er[0].adm[j];
        if (std::find(row.begin(), row.end(), 1) == row.end()) continue;
        const double r = s.r[j].v;
        jump.assign(1, std::vector<std::uint32_t>(N + 1, static_cast<std::uint32_t>(N)));
        for (std::size_t p = 0, q = 0; p < N; ++p) {
            q = std::max(q, p);
            while (q < N && E[q] < E[p] + 2 * r) ++q;
            jump[0][p] = static_cast<std::uint32_t>(q);
        }
        while ((std::size_t(1) << jump.size()) <= N) {
            const auto& prev = jump.back();
            std::vector<std::uint32_t> next(N + 1);
            for (std::size_t p = 0; p <= N; ++p) next[p] = prev[prev[p]];
            jump.push_back(std::move(next));
        }
        auto cover = [&](double a, double b) -> long long {
            std::size_t lo = std::lower_bound(E.begin(), E.end(), a) - E.begin();
            const std::size_t hi = std::upper_bound(E.begin(), E.end(), b) - E.begin();
            if (lo >= hi) return 0;
            long long n = 0;
            for (std::size_t k = jump.size(); k-- > 0;)
                if (jump[k][lo] < hi) {
                    lo = jump[k][lo];
                    n += 1LL << k;
                }
            return n + 1;
        };
        const std::vector<Pt> centers = thin(mu.support_net(r), cfg.max_centers);
        for (const Pt& z : centers)
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (!row[i]) continue;
                ++red.records;
                const double R = s.R[i].v;
                // open ball B(z,R): shrink the closed window by one ulp
                const long long n = cover(std::nextafter(z.v - R, kInf), std::nextafter(z.v + R, -kInf));
                if (n <= 0) {
                    ++red.dropped;
                    continue;
                }
                const double a = std::log(static_cast<double>(n)) / log_ratio(s.R[i], s.r[j]);
                const bool better = std::isnan(red.curve[j]) || (dir == Direction::Upper ? a > red.curve[j] : a < red.curve[j]);
                if (better) {
                    red.curve[j] = a;
                    red.wit[j] = {z, s.R[i], s.r[j], true};
                }
            }
    }
    DimensionEstimate e;
    e.direction = dir;
    finish(e, red, s, cfg);
    return e;
}

BruteForceResult brute_force_reference(const AtomicMeasure& mu, const DimensionFunction& f, const std::vector<Pt>& R_grid,
                                       const std::vector<Pt>& r_grid, double lambda_min, double cap) {
    if (mu.atoms().size() > 1000) throw std::length_error("brute force limited to 1000 atoms");
    if (R_grid.size() > 100 || r_grid.size() > 100) throw std::length_error("brute force limited to 100 scales per grid");
    BruteForceResult res;
    res.upper = kNaN;
    res.lower = kNaN;
    for (const auto& atom : mu.atoms()) {
        const Pt z = Pt::from_rational(atom.pos);
        for (const Pt& R : R_grid)
            for (const Pt& r : r_grid) {
                if (!admissible(f, R, r, lambda_min, cap)) continue;
                ++res.triples;
                const Enclosure big = enclosure_of(mu.ball_exact(atom.pos, R.to_rational()));
                const Enclosure small = enclosure_of(mu.ball_exact(atom.pos, r.to_rational()));
                const double lr = log_ratio(R, r);
                const double au = alpha_upper(big, small, lr), al = alpha_lower(big, small, lr);
                if (!std::isnan(au) && (std::isnan(res.upper) || au > res.upper)) {
                    res.upper = au;
                    res.upper_witness = {z, R, r, true};
                }
                if (!std::isnan(al) && (std::isnan(res.lower) || al < res.lower)) {
                    res.lower = al;
                    res.lower_witness = {z, R, r, true};
                }
            }
    }
    if (res.triples == 0) throw ConfigError("no admissible triple in the explicit grids");
    return res;
}

}  // namespace phidim
