#include "phidim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace phidim {

namespace {

class Obj {
public:
    Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw config_error(path_, "expected an object");
    }
    std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    const std::string& path() const { return path_; }
    bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }
    const Json& req(const std::string& k) {
        used_.insert(k);
        if (!has(k)) throw config_error(at(k), "required field is missing");
        return j_.at(k);
    }
    const Json* opt(const std::string& k) {
        used_.insert(k);
        return has(k) ? &j_.at(k) : nullptr;
    }
    void allow(const std::string& k) { used_.insert(k); }
    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw config_error(at(it.key()), "unknown field");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

long long json_int(const Json& v, const std::string& path, long long lo, long long hi) {
    if (!v.is_number_integer()) throw config_error(path, "expected an integer");
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        throw config_error(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

std::string json_string(const Json& v, const std::string& path) {
    if (!v.is_string()) throw config_error(path, "expected a string");
    return v.get<std::string>();
}

bool json_bool(const Json& v, const std::string& path) {
    if (!v.is_boolean()) throw config_error(path, "expected true or false");
    return v.get<bool>();
}

std::vector<Rational> rational_list(const Json& v, const std::string& path, bool allow_empty = false) {
    if (!v.is_array()) throw config_error(path, "expected an array");
    if (v.empty() && !allow_empty) throw config_error(path, "must not be empty");
    std::vector<Rational> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(json_rational(v[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

Json rational_json(const Rational& q) { return to_string(q); }

Json rational_list_json(const std::vector<Rational>& v) {
    Json a = Json::array();
    for (auto& q : v) a.push_back(rational_json(q));
    return a;
}

SeqKind seq_kind(const Json& v, const std::string& path) {
    const std::string s = json_string(v, path);
    if (s == "polynomial") return SeqKind::Polynomial;
    if (s == "exponential") return SeqKind::Exponential;
    throw config_error(path, "expected \"polynomial\" or \"exponential\", got \"" + s + "\"");
}

std::string seq_name(SeqKind k) { return k == SeqKind::Polynomial ? "polynomial" : "exponential"; }

// Runs a library validator and re-labels its message with a config path.
template <class F>
void checked(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(path, e.what());
    }
}

Json measure_discrete(Obj& o) {
    DiscreteMeasureSpec s;
    Obj p(o.req("p"), o.at("p"));
    s.weight = seq_kind(p.req("kind"), p.at("kind"));
    s.beta = json_rational(p.req("beta"), p.at("beta"));
    p.finish();
    Obj a(o.req("a"), o.at("a"));
    s.position = seq_kind(a.req("kind"), a.at("kind"));
    s.lambda = json_rational(a.req("lambda"), a.at("lambda"));
    a.finish();
    if (auto* v = o.opt("p0")) s.p0 = json_rational(*v, o.at("p0"));
    if (auto* v = o.opt("N")) s.N = json_int(*v, o.at("N"), 1, 1 << 24);
    if (!(s.beta > 1)) throw config_error(o.at("p.beta"), "must be > 1");
    if (s.position == SeqKind::Polynomial && !(s.lambda > 0)) throw config_error(o.at("a.lambda"), "must be > 0");
    if (s.position == SeqKind::Exponential && !(s.lambda > 1)) throw config_error(o.at("a.lambda"), "must be > 1");
    if (s.p0 < 0) throw config_error(o.at("p0"), "must be >= 0");
    Json c;
    c["kind"] = "discrete";
    c["p"] = {{"kind", seq_name(s.weight)}, {"beta", rational_json(s.beta)}};
    c["a"] = {{"kind", seq_name(s.position)}, {"lambda", rational_json(s.lambda)}};
    c["p0"] = rational_json(s.p0);
    c["N"] = s.N;
    return c;
}

Json measure_cascade(Obj& o) {
    CascadeMeasureSpec s;
    if (auto* v = o.opt("base")) s.base = static_cast<int>(json_int(*v, o.at("base"), 2, 64));
    if (auto* v = o.opt("depth")) s.depth = static_cast<int>(json_int(*v, o.at("depth"), 1, 200));
    Json c;
    c["kind"] = "cascade";
    c["base"] = s.base;
    if (auto* mc = o.opt("middle_child")) {
        Obj m(*mc, o.at("middle_child"));
        s.middle_child = true;
        s.p = rational_list(m.req("p"), m.at("p"));
        if (auto* lv = m.opt("levels")) {
            if (!lv->is_array() || lv->empty()) throw config_error(m.at("levels"), "expected a non-empty array");
            for (std::size_t k = 0; k < lv->size(); ++k)
                s.n_levels.push_back(json_int((*lv)[k], m.at("levels") + "[" + std::to_string(k) + "]", 1, 1LL << 40));
        } else {
            s.n_levels = CascadeMeasureSpec::default_schedule(s.depth);
        }
        m.finish();
        if (o.has("ratios")) throw config_error(o.at("ratios"), "not allowed together with middle_child");
        checked(o.path(), [&] { s.validate(); });
        Json lv = Json::array();
        for (auto n : s.n_levels) lv.push_back(n);
        c["middle_child"] = {{"p", rational_list_json(s.p)}, {"levels", lv}};
    } else {
        s.ratios = rational_list(o.req("ratios"), o.at("ratios"));
        if (static_cast<int>(s.ratios.size()) != s.base)
            throw config_error(o.at("ratios"), "needs exactly base = " + std::to_string(s.base) + " entries");
        Rational sum = 0;
        for (std::size_t k = 0; k < s.ratios.size(); ++k) {
            if (s.ratios[k] < 0) throw config_error(o.at("ratios") + "[" + std::to_string(k) + "]", "must be >= 0");
            sum += s.ratios[k];
        }
        if (sum != 1) throw config_error(o.at("ratios"), "must sum to 1 exactly (got " + to_string(sum) + ")");
        checked(o.path(), [&] { s.validate(); });
        c["ratios"] = rational_list_json(s.ratios);
    }
    c["depth"] = s.depth;
    return c;
}

Json measure_ssc(Obj& o) {
    SelfSimilarSpec s;
    s.r = rational_list(o.req("r"), o.at("r"));
    s.d = rational_list(o.req("d"), o.at("d"));
    s.p = rational_list(o.req("p"), o.at("p"));
    int depth = 30;
    if (auto* v = o.opt("depth")) depth = static_cast<int>(json_int(*v, o.at("depth"), 1, 200));
    checked(o.path(), [&] { s.validate_ssc(); });
    Json c;
    c["kind"] = "ssc";
    c["r"] = rational_list_json(s.r);
    c["d"] = rational_list_json(s.d);
    c["p"] = rational_list_json(s.p);
    c["depth"] = depth;
    return c;
}

Json measure_central(Obj& o) {
    CentralCantorSpec s;
    s.ratios = rational_list(o.req("ratios"), o.at("ratios"));
    if (auto* v = o.opt("depth")) s.depth = static_cast<int>(json_int(*v, o.at("depth"), 1, 200));
    checked(o.path(), [&] { s.validate(); });
    Json c;
    c["kind"] = "central_cantor";
    c["ratios"] = rational_list_json(s.ratios);
    c["depth"] = s.depth;
    return c;
}

Json measure_finite_type(Obj& o) {
    const std::string ifs = json_string(o.req("ifs"), o.at("ifs"));
    Json c;
    c["kind"] = "finite_type";
    c["ifs"] = ifs;
    if (ifs == "golden_bc" || ifs == "dyadic") {
        const Rational p = json_rational(o.req("p"), o.at("p"));
        if (!(p > 0 && p < 1)) throw config_error(o.at("p"), "must lie in (0,1)");
        c["p"] = rational_json(p);
    } else if (ifs == "psi_sharp") {
    } else if (ifs == "rational") {
        const Rational r = json_rational(o.req("r"), o.at("r"));
        auto d = rational_list(o.req("d"), o.at("d"));
        auto p = rational_list(o.req("p"), o.at("p"));
        if (d.size() != p.size()) throw config_error(o.at("p"), "needs one probability per map");
        checked(o.path(), [&] { EquicontractiveIFS::rational(r, d, p).validate(); });
        c["r"] = rational_json(r);
        c["d"] = rational_list_json(d);
        c["p"] = rational_list_json(p);
    } else {
        // only IFS with exact (rational or golden-quadratic) data reach the net-interval engine
        throw config_error(o.at("ifs"), "expected golden_bc, dyadic, psi_sharp or rational, got \"" + ifs + "\"");
    }
    long long levels = 12, probe = 8, max_states = 4096;
    if (auto* v = o.opt("levels")) levels = json_int(*v, o.at("levels"), 1, 40);
    if (auto* v = o.opt("probe_depth")) probe = json_int(*v, o.at("probe_depth"), 0, 40);
    if (auto* v = o.opt("max_states")) max_states = json_int(*v, o.at("max_states"), 1, 1 << 20);
    c["levels"] = levels;
    c["probe_depth"] = probe;
    c["max_states"] = max_states;
    return c;
}

EquicontractiveIFS ifs_of(const Json& c) {
    const std::string ifs = c.at("ifs");
    if (ifs == "golden_bc") return EquicontractiveIFS::golden_bc(parse_rational(c.at("p")));
    if (ifs == "dyadic") return EquicontractiveIFS::dyadic(parse_rational(c.at("p")));
    if (ifs == "psi_sharp") return EquicontractiveIFS::psi_sharp();
    std::vector<Rational> d, p;
    for (auto& x : c.at("d")) d.push_back(parse_rational(x));
    for (auto& x : c.at("p")) p.push_back(parse_rational(x));
    return EquicontractiveIFS::rational(parse_rational(c.at("r")), d, p);
}

std::vector<Rational> rationals_of(const Json& a) {
    std::vector<Rational> out;
    for (auto& x : a) out.push_back(parse_rational(x));
    return out;
}

std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Json witness_json(const Witness& w) {
    if (!w.valid) return nullptr;
    return {{"z", w.z.str()}, {"R", w.R.str()}, {"r", w.r.str()}};
}

void parse_estimator_into(const Json& j, const std::string& path, EstimationConfig& c, DirectionSet* dirs) {
    Obj o(j, path);
    if (auto* v = o.opt("base")) c.base = static_cast<int>(json_int(*v, o.at("base"), 2, 64));
    if (auto* v = o.opt("n_min")) c.n_min = static_cast<int>(json_int(*v, o.at("n_min"), 0, 4096));
    if (auto* v = o.opt("n_max")) c.n_max = static_cast<int>(json_int(*v, o.at("n_max"), 0, 4096));
    if (auto* v = o.opt("mode")) {
        const std::string m = json_string(*v, o.at("mode"));
        if (m == "full") c.mode = ScanMode::Full;
        else if (m == "boundary") c.mode = ScanMode::Boundary;
        else throw config_error(o.at("mode"), "expected \"full\" or \"boundary\", got \"" + m + "\"");
    }
    if (auto* v = o.opt("lambda_min")) c.lambda_min = json_real(*v, o.at("lambda_min"));
    if (auto* v = o.opt("R_cap")) c.R_cap = json_real(*v, o.at("R_cap"));
    if (auto* v = o.opt("divergence_threshold")) c.divergence_threshold = json_real(*v, o.at("divergence_threshold"));
    for (const char* g : {"R_grid", "r_grid"}) {
        if (auto* v = o.opt(g)) {
            auto& dst = std::string(g) == "R_grid" ? c.R_grid : c.r_grid;
            dst.clear();
            const auto qs = rational_list(*v, o.at(g), true);
            for (std::size_t k = 0; k < qs.size(); ++k) {
                if (!(qs[k] > 0)) throw config_error(o.at(g) + "[" + std::to_string(k) + "]", "must be > 0");
                dst.push_back(Pt::from_rational(qs[k]));
            }
        }
    }
    if (auto* v = o.opt("full_net_budget")) c.full_net_budget = json_int(*v, o.at("full_net_budget"), 1, 1LL << 30);
    if (auto* v = o.opt("beam")) c.beam = json_int(*v, o.at("beam"), 1, 1LL << 24);
    if (auto* v = o.opt("max_centers")) c.max_centers = json_int(*v, o.at("max_centers"), 1, 1LL << 30);
    if (auto* v = o.opt("threads")) c.threads = static_cast<int>(json_int(*v, o.at("threads"), 1, 1024));
    if (auto* v = o.opt("direction")) {
        if (!dirs) throw config_error(o.at("direction"), "unknown field");
        const std::string d = json_string(*v, o.at("direction"));
        if (d == "upper") *dirs = DirectionSet::Upper;
        else if (d == "lower") *dirs = DirectionSet::Lower;
        else if (d == "both") *dirs = DirectionSet::Both;
        else throw config_error(o.at("direction"), "expected \"upper\", \"lower\" or \"both\", got \"" + d + "\"");
    }
    o.finish();
    if (c.R_grid.empty() != c.r_grid.empty()) throw config_error(path, "R_grid and r_grid must be given together");
    checked(path, [&] { c.validate(); });
}

}  // namespace

ConfigError config_error(const std::string& path, const std::string& what) {
    return ConfigError(path + ": " + what);
}

Rational json_rational(const Json& v, const std::string& path) {
    try {
        if (v.is_number_integer()) return Rational(v.get<long long>());
        if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
        // the shortest round-trip rendering of a JSON float is the decimal the user wrote
        if (v.is_number_float()) return parse_rational(v.dump());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
        throw config_error(path, std::string("not an exact number: ") + e.what());
    }
    throw config_error(path, "expected a number or a \"p/q\" string");
}

double json_real(const Json& v, const std::string& path) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
    }
    return to_double(json_rational(v, path));
}

MeasureConfig parse_measure(const Json& j, const std::string& path) {
    Obj o(j, path);
    const std::string kind = json_string(o.req("kind"), o.at("kind"));
    MeasureConfig m;
    if (kind == "lebesgue") {
        m.canonical = {{"kind", "lebesgue"}};
    } else if (kind == "point_mass") {
        Rational at = 0, mass = 1;
        if (auto* v = o.opt("at")) at = json_rational(*v, o.at("at"));
        if (auto* v = o.opt("mass")) mass = json_rational(*v, o.at("mass"));
        if (!(mass > 0)) throw config_error(o.at("mass"), "must be > 0");
        m.canonical = {{"kind", "point_mass"}, {"at", to_string(at)}, {"mass", to_string(mass)}};
    } else if (kind == "discrete") {
        m.canonical = measure_discrete(o);
    } else if (kind == "cascade") {
        m.canonical = measure_cascade(o);
    } else if (kind == "ssc") {
        m.canonical = measure_ssc(o);
    } else if (kind == "central_cantor") {
        m.canonical = measure_central(o);
    } else if (kind == "finite_type") {
        m.canonical = measure_finite_type(o);
    } else {
        throw config_error(o.at("kind"), "unknown measure kind \"" + kind +
                                             "\" (expected lebesgue, point_mass, discrete, cascade, ssc, "
                                             "central_cantor, finite_type)");
    }
    o.finish();
    return m;
}

DimensionFunction parse_phi(const Json& j, const std::string& path) {
    Obj o(j, path);
    const std::string ks = json_string(o.req("kind"), o.at("kind"));
    const auto kind = phi_kind_from_string(ks);
    if (!kind)
        throw config_error(o.at("kind"), "unknown phi kind \"" + ks +
                                             "\" (expected constant, inverse_log, psi, abs_log, theta, table)");
    DimensionFunction f;
    switch (*kind) {
        case PhiKind::Constant: {
            const double d = json_real(o.req("delta"), o.at("delta"));
            if (!(d >= 0) || std::isinf(d)) throw config_error(o.at("delta"), "must be finite and >= 0");
            f = DimensionFunction::constant(d);
            break;
        }
        case PhiKind::InverseLog: {
            double c = 1;
            if (auto* v = o.opt("c")) c = json_real(*v, o.at("c"));
            if (!(c > 0) || std::isinf(c)) throw config_error(o.at("c"), "must be finite and > 0");
            f = DimensionFunction::inverse_log(c);
            break;
        }
        case PhiKind::Psi: f = DimensionFunction::psi(); break;
        case PhiKind::AbsLog: f = DimensionFunction::abs_log(); break;
        case PhiKind::Theta: {
            const double th = json_real(o.req("theta"), o.at("theta"));
            if (!(th > 0 && th < 1)) throw config_error(o.at("theta"), "must lie in (0,1)");
            f = DimensionFunction::theta_spectrum(th);
            break;
        }
        case PhiKind::Table: {
            const Json& pts = o.req("points");
            if (!pts.is_array() || pts.size() < 2) throw config_error(o.at("points"), "expected at least two [x, phi] pairs");
            std::vector<std::pair<double, double>> v;
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const std::string pk = o.at("points") + "[" + std::to_string(k) + "]";
                if (!pts[k].is_array() || pts[k].size() != 2) throw config_error(pk, "expected [x, phi]");
                const double x = json_real(pts[k][0], pk + "[0]"), y = json_real(pts[k][1], pk + "[1]");
                if (!(x > 0 && x < 1)) throw config_error(pk + "[0]", "x must lie in (0,1)");
                if (!(y >= 0) || std::isinf(y)) throw config_error(pk + "[1]", "phi must be finite and >= 0");
                v.push_back({x, y});
            }
            try {
                f = DimensionFunction::table(v);
            } catch (const std::exception& e) {
                throw config_error(o.at("points"), e.what());
            }
            break;
        }
    }
    // allow the echo of unused parameters of other kinds only when absent
    o.allow("delta");
    o.allow("c");
    o.allow("theta");
    o.allow("points");
    for (const char* k : {"delta", "c", "theta", "points"}) {
        const bool used = (*kind == PhiKind::Constant && std::string(k) == "delta") ||
                          (*kind == PhiKind::InverseLog && std::string(k) == "c") ||
                          (*kind == PhiKind::Theta && std::string(k) == "theta") ||
                          (*kind == PhiKind::Table && std::string(k) == "points");
        if (!used && o.has(k)) throw config_error(o.at(k), "not a parameter of phi kind \"" + ks + "\"");
    }
    o.finish();
    const auto rep = validate_dimension_function(f, geometric_grid(2.0, 1, 60));
    if (!rep.pass) throw config_error(path, "not a dimension function: " + rep.violation);
    return f;
}

Json phi_to_json(const DimensionFunction& f) {
    Json j;
    j["kind"] = to_string(f.kind);
    switch (f.kind) {
        case PhiKind::Constant: j["delta"] = f.delta; break;
        case PhiKind::InverseLog: j["c"] = f.c; break;
        case PhiKind::Theta: j["theta"] = f.theta; break;
        case PhiKind::Table: {
            Json pts = Json::array();
            for (auto& [x, y] : f.points) pts.push_back({x, y});
            j["points"] = pts;
            break;
        }
        default: break;
    }
    return j;
}

EstimationConfig parse_estimator(const Json& j, const std::string& path) {
    EstimationConfig c;
    parse_estimator_into(j, path, c, nullptr);
    return c;
}

Json estimator_to_json(const EstimationConfig& c) {
    Json j;
    j["base"] = c.base;
    j["n_min"] = c.n_min;
    j["n_max"] = c.n_max;
    j["mode"] = to_string(c.mode);
    j["lambda_min"] = c.lambda_min;
    j["R_cap"] = c.R_cap ? Json(*c.R_cap) : Json(nullptr);
    j["divergence_threshold"] = c.divergence_threshold;
    Json Rg = Json::array(), rg = Json::array();
    for (auto& p : c.R_grid) Rg.push_back(to_string(p.to_rational()));
    for (auto& p : c.r_grid) rg.push_back(to_string(p.to_rational()));
    j["R_grid"] = Rg;
    j["r_grid"] = rg;
    j["full_net_budget"] = c.full_net_budget;
    j["beam"] = c.beam;
    j["max_centers"] = c.max_centers;
    j["threads"] = c.threads;
    return j;
}

ExperimentConfig parse_config(const Json& j) {
    Obj o(j, "");
    ExperimentConfig c;
    o.allow("schema");
    o.allow("version");
    if (auto* v = o.opt("schema"))
        if (json_string(*v, "schema") != kSchema) throw config_error("schema", std::string("expected \"") + kSchema + "\"");
    if (auto* v = o.opt("measure")) c.measure = parse_measure(*v, "measure");
    if (auto* v = o.opt("phi")) {
        if (v->is_array()) {
            if (v->empty()) throw config_error("phi", "list must not be empty");
            for (std::size_t k = 0; k < v->size(); ++k) c.phis.push_back(parse_phi((*v)[k], "phi[" + std::to_string(k) + "]"));
        } else {
            c.phis.push_back(parse_phi(*v, "phi"));
        }
    }
    if (auto* v = o.opt("estimator")) parse_estimator_into(*v, "estimator", c.estimator, &c.directions);
    if (auto* v = o.opt("thetas")) {
        if (!v->is_array() || v->empty()) throw config_error("thetas", "expected a non-empty array");
        for (std::size_t k = 0; k < v->size(); ++k) {
            const std::string p = "thetas[" + std::to_string(k) + "]";
            const double th = json_real((*v)[k], p);
            if (!(th > 0 && th < 1)) throw config_error(p, "must lie in (0,1)");
            if (!c.thetas.empty() && !(th > c.thetas.back())) throw config_error(p, "thetas must be strictly increasing");
            c.thetas.push_back(th);
        }
    }
    if (auto* v = o.opt("outputs")) {
        Obj out(*v, "outputs");
        for (auto [key, dst] : {std::pair{"dir", &c.outputs.dir}, std::pair{"summary", &c.outputs.summary},
                                std::pair{"pairs", &c.outputs.pairs}, std::pair{"curve", &c.outputs.curve}})
            if (auto* s = out.opt(key)) *dst = json_string(*s, out.at(key));
        if (auto* s = out.opt("write_pairs")) c.outputs.write_pairs = json_bool(*s, out.at("write_pairs"));
        if (auto* s = out.opt("write_curve")) c.outputs.write_curve = json_bool(*s, out.at("write_curve"));
        out.finish();
    }
    if (auto* v = o.opt("mode")) {
        if (!v->is_object()) throw config_error("mode", "expected an object");
        c.mode = *v;
    }
    o.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return parse_config(j);
}

Json config_to_json(const ExperimentConfig& c) {
    Json j;
    j["schema"] = kSchema;
    j["version"] = kVersion;
    if (!c.measure.canonical.is_null()) j["measure"] = c.measure.canonical;
    if (c.phis.size() == 1) {
        j["phi"] = phi_to_json(c.phis[0]);
    } else if (!c.phis.empty()) {
        Json a = Json::array();
        for (auto& f : c.phis) a.push_back(phi_to_json(f));
        j["phi"] = a;
    }
    Json est = estimator_to_json(c.estimator);
    est["direction"] = c.directions == DirectionSet::Upper ? "upper" : c.directions == DirectionSet::Lower ? "lower" : "both";
    j["estimator"] = est;
    if (!c.thetas.empty()) j["thetas"] = c.thetas;
    j["outputs"] = {{"dir", c.outputs.dir},         {"summary", c.outputs.summary},
                    {"pairs", c.outputs.pairs},     {"curve", c.outputs.curve},
                    {"write_pairs", c.outputs.write_pairs}, {"write_curve", c.outputs.write_curve}};
    j["mode"] = c.mode;
    return j;
}

MeasurePtr build_measure(const MeasureConfig& m) {
    const Json& c = m.canonical;
    const std::string kind = m.kind();
    if (kind == "lebesgue") return std::make_shared<LebesgueUnit>();
    if (kind == "point_mass") return std::make_shared<PointMass>(parse_rational(c.at("at")), parse_rational(c.at("mass")));
    if (kind == "discrete") return std::make_shared<DiscreteMeasure>(discrete_spec(m));
    if (kind == "cascade") {
        CascadeMeasureSpec s;
        s.base = c.at("base");
        s.depth = c.at("depth");
        if (c.contains("middle_child")) {
            s.middle_child = true;
            s.p = rationals_of(c.at("middle_child").at("p"));
            for (auto& n : c.at("middle_child").at("levels")) s.n_levels.push_back(n.get<long long>());
        } else {
            s.ratios = rationals_of(c.at("ratios"));
        }
        return std::make_shared<CascadeMeasure>(s);
    }
    if (kind == "ssc") {
        SelfSimilarSpec s{rationals_of(c.at("r")), rationals_of(c.at("d")), rationals_of(c.at("p"))};
        return std::make_shared<SSCMeasure>(s, c.at("depth").get<int>());
    }
    if (kind == "central_cantor") {
        CentralCantorSpec s;
        s.ratios = rationals_of(c.at("ratios"));
        s.depth = c.at("depth");
        return std::make_shared<CentralCantorMeasure>(s);
    }
    if (kind == "finite_type")
        return std::make_shared<FiniteTypeMeasure>(build_net_system(m), c.at("levels").get<int>(),
                                                   c.at("probe_depth").get<int>());
    throw ConfigError("measure: no measure configured");
}

DiscreteMeasureSpec discrete_spec(const MeasureConfig& m) {
    const Json& c = m.canonical;
    if (m.kind() != "discrete") throw ConfigError("measure.kind: expected \"discrete\"");
    DiscreteMeasureSpec s;
    s.weight = c.at("p").at("kind") == "polynomial" ? SeqKind::Polynomial : SeqKind::Exponential;
    s.beta = parse_rational(c.at("p").at("beta"));
    s.position = c.at("a").at("kind") == "polynomial" ? SeqKind::Polynomial : SeqKind::Exponential;
    s.lambda = parse_rational(c.at("a").at("lambda"));
    s.p0 = parse_rational(c.at("p0"));
    s.N = c.at("N");
    return s;
}

std::shared_ptr<const NetSystem> build_net_system(const MeasureConfig& m) {
    if (m.kind() != "finite_type") throw ConfigError("measure.kind: expected \"finite_type\"");
    const Json& c = m.canonical;
    return std::make_shared<NetSystem>(ifs_of(c), c.at("max_states").get<std::size_t>());
}

Json json_number(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

Json estimate_to_json(const DimensionEstimate& e, const DimensionFunction& f) {
    Json j;
    j["direction"] = to_string(e.direction);
    j["value"] = json_number(e.value);
    Json curve = Json::array();
    for (std::size_t d = 0; d < e.curve.size(); ++d)
        if (!std::isnan(e.curve[d])) curve.push_back({{"depth", d}, {"alpha_hat", json_number(e.curve[d])}});
    j["curve"] = curve;
    j["diverging"] = e.diverging;
    j["witness"] = witness_json(e.witness);
    j["phi"] = phi_to_json(f);
    j["records"] = e.records;
    j["dropped"] = e.dropped;
    return j;
}

Json closed_form_to_json(const ClosedFormResult& r) {
    Json j;
    if (r.is_interval()) {
        j["lo"] = json_number(r.lo);
        j["hi"] = json_number(r.hi);
    } else {
        j["value"] = json_number(r.lo);
    }
    j["branch"] = r.branch;
    j["provenance"] = r.provenance;
    Json in;
    in = Json::object();
    for (auto& [k, v] : r.inputs) in[k] = v;
    j["inputs"] = in;
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string pairs_csv_header() { return "z,R,r,X_lo,X_hi,alpha_hat\r\n"; }

std::string pairs_csv_row(const PairRecord& rec, Direction d) {
    const double lr = log_ratio(rec.R, rec.r);
    const double a = d == Direction::Upper ? alpha_upper(rec.big, rec.small, lr) : alpha_lower(rec.big, rec.small, lr);
    std::string row;
    for (const std::string& f : {rec.z.str(), rec.R.str(), rec.r.str(), fmt_double(std::exp(rec.log_x_lo())),
                                 fmt_double(std::exp(rec.log_x_hi())), std::isnan(a) ? std::string() : fmt_double(a)}) {
        if (!row.empty()) row += ',';
        row += csv_field(f);
    }
    return row + "\r\n";
}

std::string curve_csv(const DimensionEstimate& e) {
    std::string s = "depth,alpha_hat\r\n";
    for (std::size_t d = 0; d < e.curve.size(); ++d)
        if (!std::isnan(e.curve[d])) s += std::to_string(d) + "," + fmt_double(e.curve[d]) + "\r\n";
    return s;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace phidim
