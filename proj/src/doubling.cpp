#include <algorithm>
#include <cmath>
#include <map>

#include "phidim/netintervals.hpp"

namespace phidim {

double phi_of_level(const DimensionFunction& f, int n, double rho) {
    if (n < 1) throw DomainError("level must be >= 1");
    return n * f.eval_abs_log(-n * std::log(rho));
}

void finalize_doubling(DoublingReport& rep) {
    const int n_max = static_cast<int>(rep.scaled.size()) - 1;
    rep.n_max = n_max;
    const int h = n_max / 2;
    double first = 0, fine = 0, all = 0;
    for (int n = 1; n <= n_max; ++n) {
        const double s = rep.scaled[n];
        if (!std::isfinite(s)) {
            all = s;
            break;
        }
        (n <= h ? first : fine) = std::max(n <= h ? first : fine, s);
        all = std::max(all, s);
    }
    rep.C0 = std::exp(all);
    rep.pass = std::isfinite(all) && fine <= 1.1 * first + 1e-9;
}

DoublingReport phi_doubling_check(const NetSystem& sys, const std::vector<NetLevel>& levels, const DimensionFunction& f,
                                  int k) {
    DoublingReport rep;
    rep.max_log_ratio.assign(levels.size(), 0.0);
    rep.scaled.assign(levels.size(), 0.0);
    for (std::size_t n = 1; n < levels.size(); ++n) {
        const auto& iv = levels[n].intervals;
        std::vector<ExactQP> qp;
        qp.reserve(iv.size());
        for (auto& x : iv) qp.push_back(net_interval_qp(sys, x, k));
        double best = 0;
        for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
            const ExactQP& a = qp[i];
            const ExactQP& b = qp[i + 1];
            for (int order = 0; order < 2; ++order) {
                const ExactQP& num = order ? a : b;
                const ExactQP& den = order ? b : a;
                if (den.Q == 0) {
                    ++rep.dropped;
                    continue;
                }
                const Rational r = num.P / den.Q;
                best = std::max(best, std::log(to_double(r)));
            }
        }
        rep.max_log_ratio[n] = best;
        rep.scaled[n] = best / (1.0 + phi_of_level(f, static_cast<int>(n), sys.ifs().rho()));
    }
    finalize_doubling(rep);
    return rep;
}

namespace {
using Vec = std::vector<double>;

// Is v a convex combination of the columns `others` (all normalized to
// coordinate sum 1)? Phase-one simplex with Bland's rule.
bool in_hull(const Vec& v, const std::vector<const Vec*>& others) {
    const std::size_t d = v.size(), m = others.size();
    if (m == 0) return false;
    // tableau rows: d constraints; columns: m lambdas, d artificials, rhs
    const std::size_t cols = m + d + 1;
    std::vector<double> T(d * cols, 0.0);
    std::vector<std::size_t> basis(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t j = 0; j < m; ++j) T[r * cols + j] = (*others[j])[r];
        T[r * cols + m + r] = 1.0;
        T[r * cols + cols - 1] = v[r];
        basis[r] = m + r;
    }
    // objective: minimize sum of artificials => reduced costs
    std::vector<double> z(cols, 0.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (c < m || c == cols - 1) z[c] += T[r * cols + c];
    const double eps = 1e-13;
    for (int iter = 0; iter < 10000; ++iter) {
        std::size_t enter = cols;
        for (std::size_t c = 0; c < m + d; ++c)
            if (z[c] > eps) {
                enter = c;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = d;
        double best = 0;
        for (std::size_t r = 0; r < d; ++r) {
            const double a = T[r * cols + enter];
            if (a > eps) {
                const double ratio = T[r * cols + cols - 1] / a;
                if (leave == d || ratio < best - 1e-15 || (std::fabs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave == d) break;
        const double piv = T[leave * cols + enter];
        for (std::size_t c = 0; c < cols; ++c) T[leave * cols + c] /= piv;
        for (std::size_t r = 0; r < d; ++r) {
            if (r == leave) continue;
            const double f = T[r * cols + enter];
            if (f != 0)
                for (std::size_t c = 0; c < cols; ++c) T[r * cols + c] -= f * T[leave * cols + c];
        }
        const double f = z[enter];
        for (std::size_t c = 0; c < cols; ++c) z[c] -= f * T[leave * cols + c];
        basis[leave] = enter;
    }
    return z[cols - 1] < 1e-12;
}

void prune(std::vector<Vec>& vs) {
    for (auto& v : vs) {
        double s = 0;
        for (double x : v) s += x;
        if (s > 0)
            for (double& x : v) x /= s;
    }
    vs.erase(std::remove_if(vs.begin(), vs.end(), [](const Vec& v) { return !(v.empty() || v[0] == v[0]); }), vs.end());
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end(),
                         [](const Vec& a, const Vec& b) {
                             for (std::size_t i = 0; i < a.size(); ++i)
                                 if (std::fabs(a[i] - b[i]) > 1e-15) return false;
                             return true;
                         }),
             vs.end());
    if (vs.size() <= 2) return;
    const std::size_t d = vs[0].size();
    if (d == 1) {
        vs.resize(1);
        return;
    }
    if (d == 2) {
        auto [mn, mx] = std::minmax_element(vs.begin(), vs.end(), [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
        std::vector<Vec> keep{*mn, *mx};
        vs = std::move(keep);
        return;
    }
    std::vector<bool> alive(vs.size(), true);
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::vector<const Vec*> others;
        for (std::size_t j = 0; j < vs.size(); ++j)
            if (j != i && alive[j]) others.push_back(&vs[j]);
        if (in_hull(vs[i], others)) alive[i] = false;
    }
    std::vector<Vec> keep;
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (alive[i]) keep.push_back(std::move(vs[i]));
    vs = std::move(keep);
}

struct DMap {
    int child;
    std::vector<std::vector<double>> M;
};

Vec mul(const std::vector<std::vector<double>>& M, const double* w, std::size_t n) {
    Vec out(M.size(), 0.0);
    for (std::size_t r = 0; r < M.size(); ++r)
        for (std::size_t c = 0; c < n; ++c) out[r] += M[r][c] * w[c];
    return out;
}
}  // namespace

DoublingReport phi_doubling_check_deep(const NetSystem& sys, const DimensionFunction& f, int n_max, int k) {
    std::map<int, std::vector<DMap>> maps;
    auto get_maps = [&](int s) -> const std::vector<DMap>& {
        auto it = maps.find(s);
        if (it != maps.end()) return it->second;
        std::vector<DMap> v;
        for (const Transition& t : sys.transitions(s)) {
            DMap m;
            m.child = t.child_state;
            for (auto& row : t.map) {
                std::vector<double> r;
                for (auto& x : row) r.push_back(to_double(x));
                m.M.push_back(std::move(r));
            }
            v.push_back(std::move(m));
        }
        return maps[s] = std::move(v);
    };
    std::map<int, std::pair<Vec, Vec>> coefs;  // state -> (P coef, Q coef)
    auto get_coef = [&](int s) -> const std::pair<Vec, Vec>& {
        auto it = coefs.find(s);
        if (it != coefs.end()) return it->second;
        Vec p, q;
        for (auto& x : sys.p_coef(s, k)) p.push_back(to_double(x));
        for (auto& x : sys.q_coef(s, k)) q.push_back(to_double(x));
        return coefs[s] = {p, q};
    };
    auto dot = [](const Vec& a, const double* b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    DoublingReport rep;
    rep.max_log_ratio.assign(n_max + 1, 0.0);
    rep.scaled.assign(n_max + 1, 0.0);
    std::map<int, std::vector<Vec>> singles{{sys.root_state(), {Vec{1.0}}}};
    std::map<std::pair<int, int>, std::vector<Vec>> pairs;
    for (int n = 1; n <= n_max; ++n) {
        std::map<int, std::vector<Vec>> ns;
        std::map<std::pair<int, int>, std::vector<Vec>> np;
        for (auto& [s, vs] : singles) {
            const auto& ms = get_maps(s);
            for (const Vec& v : vs) {
                std::vector<Vec> kids;
                for (auto& m : ms) kids.push_back(mul(m.M, v.data(), v.size()));
                for (std::size_t t = 0; t < ms.size(); ++t) {
                    ns[ms[t].child].push_back(kids[t]);
                    if (t + 1 < ms.size()) {
                        Vec c = kids[t];
                        c.insert(c.end(), kids[t + 1].begin(), kids[t + 1].end());
                        np[{ms[t].child, ms[t + 1].child}].push_back(std::move(c));
                    }
                }
            }
        }
        for (auto& [key, vs] : pairs) {
            const auto& ma = get_maps(key.first).back();
            const auto& mb = get_maps(key.second).front();
            const std::size_t na = sys.state(key.first).offsets.size();
            for (const Vec& v : vs) {
                Vec c = mul(ma.M, v.data(), na);
                Vec e = mul(mb.M, v.data() + na, v.size() - na);
                c.insert(c.end(), e.begin(), e.end());
                np[{ma.child, mb.child}].push_back(std::move(c));
            }
        }
        std::size_t ws = 0;
        for (auto& [s, vs] : ns) {
            prune(vs);
            ws += vs.size();
        }
        double best = 0;
        for (auto& [key, vs] : np) {
            prune(vs);
            ws += vs.size();
            const auto& ca = get_coef(key.first);
            const auto& cb = get_coef(key.second);
            const std::size_t na = ca.first.size();
            for (const Vec& v : vs) {
                const double PA = dot(ca.first, v.data()), QA = dot(ca.second, v.data());
                const double PB = dot(cb.first, v.data() + na), QB = dot(cb.second, v.data() + na);
                if (QA > 0)
                    best = std::max(best, std::log(PB / QA));
                else
                    ++rep.dropped;
                if (QB > 0)
                    best = std::max(best, std::log(PA / QB));
                else
                    ++rep.dropped;
            }
        }
        rep.working_set = std::max(rep.working_set, ws);
        rep.max_log_ratio[n] = best;
        rep.scaled[n] = best / (1.0 + phi_of_level(f, n, sys.ifs().rho()));
        singles = std::move(ns);
        pairs = std::move(np);
    }
    finalize_doubling(rep);
    return rep;
}

}  // namespace phidim
