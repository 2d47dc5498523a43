#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "phidim/closedform.hpp"
#include "phidim/config.hpp"
#include "phidim/netintervals.hpp"
#include "phidim/verify.hpp"

using namespace phidim;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kPrecision = 2, kVerify = 3 };

struct Flags {
    std::string config;
    std::string out;
    int threads = 0;
    bool fast = false;
    // closed-form
    std::string cf_case;
    std::vector<std::string> cf_params;
    // net-intervals
    std::string ring;
    int precision = 20;
    std::vector<int> criteria;
};

int env_threads() {
    if (const char* s = std::getenv("PHIDIM_THREADS")) {
        try {
            const int n = std::stoi(s);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        throw ConfigError(std::string("PHIDIM_THREADS: expected a positive integer, got \"") + s + "\"");
    }
    return 0;
}

ExperimentConfig load(const Flags& fl) {
    if (fl.config.empty()) throw ConfigError("-c: a config file is required for this command");
    ExperimentConfig c = load_config(fl.config);
    if (fl.threads > 0) c.estimator.threads = fl.threads;
    else if (int n = env_threads()) c.estimator.threads = n;
    if (!fl.out.empty()) c.outputs.dir = fl.out;
    return c;
}

void require_measure(const ExperimentConfig& c) {
    if (c.measure.canonical.is_null()) throw config_error("measure", "required field is missing");
}

std::string out_path(const ExperimentConfig& c, const std::string& name) {
    fs::create_directories(c.outputs.dir);
    return (fs::path(c.outputs.dir) / name).string();
}

Json header(const std::string& command, const ExperimentConfig& c) {
    Json j;
    j["schema"] = kSchema;
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config_to_json(c);
    return j;
}

long long mode_int(const ExperimentConfig& c, const std::string& key, long long def, long long lo, long long hi) {
    if (!c.mode.contains(key)) return def;
    const Json& v = c.mode.at(key);
    if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > hi)
        throw config_error("mode." + key, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v.get<long long>();
}

bool mode_bool(const ExperimentConfig& c, const std::string& key, bool def) {
    if (!c.mode.contains(key)) return def;
    if (!c.mode.at(key).is_boolean()) throw config_error("mode." + key, "expected true or false");
    return c.mode.at(key).get<bool>();
}

// ------------------------------------------------------------------ estimate

int cmd_estimate(const Flags& fl) {
    ExperimentConfig c = load(fl);
    require_measure(c);
    if (c.phis.empty()) throw config_error("phi", "required field is missing");
    const MeasurePtr mu = build_measure(c.measure);
    const bool want_up = c.directions != DirectionSet::Lower, want_lo = c.directions != DirectionSet::Upper;
    std::vector<PhiRequest> reqs;
    for (auto& f : c.phis) reqs.push_back({f, want_up, want_lo});

    std::ofstream pairs;
    RecordSink sink;
    if (c.outputs.write_pairs) {
        const std::string p = out_path(c, c.outputs.pairs);
        pairs.open(p, std::ios::binary);
        if (!pairs) throw std::runtime_error(p + ": cannot open for writing");
        pairs << pairs_csv_header();
        const Direction d = want_up ? Direction::Upper : Direction::Lower;
        sink = [&pairs, d](const PairRecord& r) { pairs << pairs_csv_row(r, d); };
    }
    const MultiEstimate m = estimate_many(*mu, reqs, c.estimator, sink);
    if (pairs.is_open()) pairs.close();

    Json summary = header("estimate", c);
    Json results = Json::array();
    std::vector<const DimensionEstimate*> order;
    for (std::size_t k = 0; k < reqs.size(); ++k) {
        if (want_up) order.push_back(&m.upper[k]);
        if (want_lo) order.push_back(&m.lower[k]);
    }
    for (std::size_t n = 0; n < order.size(); ++n) {
        const std::size_t k = (want_up && want_lo) ? n / 2 : n;
        results.push_back(estimate_to_json(*order[n], c.phis[k]));
        std::cout << c.phis[k].describe() << "  " << to_string(order[n]->direction) << " = " << order[n]->value
                  << (order[n]->diverging ? "  (diverging)" : "") << "\n";
        if (c.outputs.write_curve) {
            std::string name = c.outputs.curve;
            if (n > 0) {
                const auto dot = name.rfind('.');
                const std::string tag = "_" + std::to_string(k) + "_" + to_string(order[n]->direction);
                name = dot == std::string::npos ? name + tag : name.substr(0, dot) + tag + name.substr(dot);
            }
            write_text(out_path(c, name), curve_csv(*order[n]));
        }
    }
    summary["results"] = results;
    write_text(out_path(c, c.outputs.summary), dump_json(summary));
    return kOk;
}

// ------------------------------------------------------------------ spectrum

int cmd_spectrum(const Flags& fl) {
    ExperimentConfig c = load(fl);
    require_measure(c);
    if (c.thetas.empty()) throw config_error("thetas", "required for spectrum");
    const MeasurePtr mu = build_measure(c.measure);
    const SpectrumReport rep = estimate_spectrum(*mu, c.thetas, c.estimator);
    Json summary = header("spectrum", c);
    Json rows = Json::array();
    std::string csv = "theta,upper,lower,upper_diverging\r\n";
    for (const auto& r : rep.rows) {
        const DimensionFunction f =
            r.theta == 0 ? DimensionFunction::constant(0) : DimensionFunction::theta_spectrum(r.theta);
        Json row;
        row["theta"] = r.theta == 0 ? Json(nullptr) : Json(r.theta);
        row["upper"] = estimate_to_json(r.upper, f);
        row["lower"] = estimate_to_json(r.lower, f);
        rows.push_back(row);
        std::ostringstream line;
        line.precision(17);
        line << (r.theta == 0 ? std::string("assouad") : std::to_string(r.theta)) << "," << r.upper.value << ","
             << r.lower.value << "," << (r.upper.diverging ? "true" : "false") << "\r\n";
        csv += line.str();
        std::cout << (r.theta == 0 ? std::string("Phi=0      ") : "theta=" + std::to_string(r.theta)) << "  upper "
                  << r.upper.value << "  lower " << r.lower.value << "\n";
    }
    summary["rows"] = rows;
    summary["upper_nondecreasing_in_theta"] = rep.upper_nondecreasing_in_theta;
    summary["upper_trend"] = json_number(rep.upper_trend);
    write_text(out_path(c, c.outputs.summary), dump_json(summary));
    write_text(out_path(c, "spectrum.csv"), csv);
    return kOk;
}

// ------------------------------------------------------------------ closed-form

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, std::string> m;
    for (const auto& it : items) {
        std::stringstream ss(it);
        std::string tok;
        // "k=v" tokens, optionally several per argument separated by ';'
        while (std::getline(ss, tok, ';')) {
            if (tok.empty()) continue;
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0) throw config_error("--params", "expected key=value, got \"" + tok + "\"");
            m[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    return m;
}

double param_real(const std::map<std::string, std::string>& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) throw config_error("--params." + k, "required parameter is missing");
    if (it->second == "inf") return std::numeric_limits<double>::infinity();
    return json_real(Json(it->second), "--params." + k);
}

std::vector<double> param_list(const std::map<std::string, std::string>& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) throw config_error("--params." + k, "required parameter is missing");
    std::vector<double> v;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(json_real(Json(tok), "--params." + k));
    return v;
}

DimensionFunction param_phi(const std::map<std::string, std::string>& m) {
    auto it = m.find("phi");
    const std::string kind = it == m.end() ? "constant" : it->second;
    Json j{{"kind", kind}};
    for (const char* k : {"delta", "c", "theta"})
        if (m.count(k)) j[k] = m.at(k);
    return parse_phi(j, "--params.phi");
}

int cmd_closed_form(const Flags& fl) {
    const auto p = parse_params(fl.cf_params);
    const std::string& cs = fl.cf_case;
    Json out;
    try {
        if (cs == "ssc") {
            out = closed_form_to_json(ssc_dimension_interval(param_list(p, "r"), param_list(p, "p")));
        } else if (cs == "discrete") {
            Json mj{{"kind", "discrete"},
                    {"p", {{"kind", p.count("weight") ? p.at("weight") : "polynomial"}}},
                    {"a", {{"kind", p.count("position") ? p.at("position") : "polynomial"}}}};
            if (p.count("beta")) mj["p"]["beta"] = p.at("beta");
            if (p.count("lambda")) mj["a"]["lambda"] = p.at("lambda");
            if (p.count("p0")) mj["p0"] = p.at("p0");
            const MeasureConfig mc = parse_measure(mj, "--params");
            out = closed_form_to_json(discrete_phi_dimension(discrete_spec(mc), param_phi(p)));
        } else if (cs == "box") {
            const auto b = box_frostman_bounds(param_real(p, "M"), param_real(p, "F"), param_real(p, "L"));
            out = {{"upper", {{"lo", json_number(b.upper_lo)}, {"hi", json_number(b.upper_hi)}}},
                   {"lower", {{"lo", json_number(b.lower_lo)}, {"hi", json_number(b.lower_hi)}}}};
        } else if (cs == "theta_upper") {
            out = {{"value", json_number(theta_form_upper(param_real(p, "M"), param_real(p, "F"), param_real(p, "theta")))}};
        } else if (cs == "transfer") {
            const auto t = comparison_transfer_bounds(param_real(p, "lambda"), param_real(p, "upper"),
                                                      param_real(p, "lower"), param_real(p, "dim_A"));
            out = {{"upper_psi_lower_bound", json_number(t.psi_upper_at_least)}, {"lower_psi_upper_bound", json_number(t.psi_lower_at_most)}};
        } else if (cs == "ftnotqa" || cs == "bc_lower" || cs == "cascade_phi1") {
            std::map<std::string, double> num;
            for (auto& [k, v] : p) num[k] = param_real(p, k);
            out = closed_form_to_json(example_reference_values(cs, num));
        } else {
            throw config_error("--case", "unknown case \"" + cs +
                                             "\" (expected ssc, discrete, box, theta_upper, transfer, ftnotqa, bc_lower, "
                                             "cascade_phi1)");
        }
    } catch (const DomainError& e) {
        throw config_error("--params", e.what());
    }
    Json full;
    full["schema"] = kSchema;
    full["version"] = kVersion;
    full["case"] = cs;
    for (auto it = out.begin(); it != out.end(); ++it) full[it.key()] = it.value();
    std::cout << full.dump() << "\n";
    return kOk;
}

// ------------------------------------------------------------------ net intervals

int cmd_net_intervals(const Flags& fl) {
    ExperimentConfig c = load(fl);
    require_measure(c);
    const auto sys = build_net_system(c.measure);
    const bool golden = sys->ring().quadratic;
    if (!fl.ring.empty() && fl.ring != (golden ? "golden" : "rational"))
        throw config_error("--ring", "\"" + fl.ring + "\" does not match the configured IFS (" +
                                         (golden ? "golden" : "rational") + " ring)");
    const int levels = static_cast<int>(mode_int(c, "levels", c.measure.canonical.at("levels"), 0, 40));
    const int probe = static_cast<int>(mode_int(c, "probe_depth", c.measure.canonical.at("probe_depth"), 0, 40));
    const int digits = fl.precision;
    const auto lv = build_net_levels(*sys, levels);
    const QuadRing& R = sys->ring();
    const QuadNumber rho = QuadNumber::rho(R);
    std::string csv = "level,left,right,length_ratio,P,Q_lo\r\n";
    QuadNumber rho_n(1);
    for (const auto& L : lv) {
        if (L.n > 0) rho_n = rho_n.mul(rho, R);
        for (const auto& iv : L.intervals) {
            const ExactQP qp = net_interval_qp(*sys, iv, probe);
            csv += std::to_string(L.n) + "," + to_decimal(iv.left, R, digits) + "," +
                   to_decimal(iv.left + iv.length, R, digits) + "," + to_decimal(iv.length.div(rho_n, R), R, digits) + "," +
                   to_decimal(qp.P, digits) + "," + to_decimal(qp.Q, digits) + "\r\n";
        }
    }
    const std::string path = out_path(c, "net_intervals.csv");
    write_text(path, csv);
    const GapReport g = finite_type_gap_check(*sys, lv);
    Json summary = header("net-intervals", c);
    summary["levels"] = levels;
    summary["states"] = g.states;
    summary["gap_a"] = g.a;
    summary["max_neighbors"] = g.M;
    summary["distinct_offsets"] = g.F.size();
    write_text(out_path(c, c.outputs.summary), dump_json(summary));
    std::cout << path << ": " << lv.size() << " levels, " << g.states << " states\n";
    return kOk;
}

// ------------------------------------------------------------------ doubling

int cmd_doubling(const Flags& fl) {
    ExperimentConfig c = load(fl);
    require_measure(c);
    const auto sys = build_net_system(c.measure);
    const bool deep = mode_bool(c, "deep", true);
    const int n_max = static_cast<int>(mode_int(c, "n_max", deep ? 256 : 14, 1, deep ? 4096 : 24));
    const int probe = static_cast<int>(mode_int(c, "probe_depth", 8, 0, 40));
    std::vector<DimensionFunction> phis = c.phis;
    if (phis.empty()) phis.push_back(DimensionFunction::constant(0));
    std::vector<NetLevel> levels;
    if (!deep) levels = build_net_levels(*sys, n_max);
    Json summary = header("doubling-check", c);
    Json results = Json::array();
    for (const auto& f : phis) {
        const DoublingReport r = deep ? phi_doubling_check_deep(*sys, f, n_max, probe) : phi_doubling_check(*sys, levels, f, probe);
        Json j;
        j["phi"] = phi_to_json(f);
        j["pass"] = r.pass;
        j["C0"] = json_number(r.C0);
        j["n_max"] = r.n_max;
        j["dropped"] = r.dropped;
        j["working_set"] = r.working_set;
        Json sc = Json::array();
        for (double x : r.scaled) sc.push_back(json_number(x));
        j["scaled"] = sc;
        results.push_back(j);
        std::cout << f.describe() << ": " << (r.pass ? "Phi-doubling" : "not Phi-doubling") << " (C0 = " << r.C0 << ")\n";
    }
    summary["results"] = results;
    write_text(out_path(c, c.outputs.summary), dump_json(summary));
    return kOk;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const Flags& fl) {
    VerifyOptions opt;
    opt.fast = fl.fast;
    opt.threads = fl.threads > 0 ? fl.threads : std::max(1, env_threads());
    opt.on_result = [](const CheckResult& r) { std::cout << format_result(r) << std::endl; };
    std::vector<CheckResult> all;
    if (fl.criteria.empty()) {
        all = run_invariants(opt);
        const auto acc = run_acceptance(opt);
        all.insert(all.end(), acc.begin(), acc.end());
    } else {
        for (int id : fl.criteria) {
            all.push_back(run_criterion(id, opt));
            opt.on_result(all.back());
        }
    }
    std::map<CheckStatus, int> count;
    for (auto& r : all) ++count[r.status];
    std::cout << "summary: " << count[CheckStatus::Pass] << " pass, " << count[CheckStatus::Fail] << " fail, "
              << count[CheckStatus::KnownFail] << " known failure(s), " << count[CheckStatus::Skipped] << " skipped\n";
    return verify_exit_code(all) == 0 ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phidim: Phi-dimensions of measures (estimators, closed forms, net intervals)"};
    app.set_version_flag("--version", std::string("phidim ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Flags fl;
    app.add_option("-c,--config", fl.config, "experiment config (JSON)");
    app.add_option("--out", fl.out, "output directory (overrides outputs.dir)");
    app.add_option("--threads", fl.threads, "worker threads (fallback: PHIDIM_THREADS)")->check(CLI::PositiveNumber);
    app.add_flag("--fast", fl.fast, "verify: skip the deep-scale criteria");

    auto* est = app.add_subcommand("estimate", "upper/lower Phi-dimension estimates");
    auto* spec = app.add_subcommand("spectrum", "theta-spectrum table with the Phi = 0 row");
    auto* cf = app.add_subcommand("closed-form", "evaluate a closed-form value");
    cf->add_option("--case", fl.cf_case, "ssc | discrete | box | theta_upper | transfer | ftnotqa | bc_lower | cascade_phi1")
        ->required();
    cf->add_option("--params", fl.cf_params, "key=value items, e.g. r=1/3,1/3 p=3/4,1/4");
    auto* net = app.add_subcommand("net-intervals", "per-level net-interval CSV of a finite-type IFS");
    net->add_option("--ring", fl.ring, "golden | rational (must match the IFS)")->check(CLI::IsMember({"golden", "rational"}));
    net->add_option("--precision", fl.precision, "fractional digits of exact values")->check(CLI::Range(0, 200));
    auto* dbl = app.add_subcommand("doubling-check", "Phi-doubling check on net intervals");
    auto* ver = app.add_subcommand("verify", "run module invariants and acceptance criteria");
    ver->add_option("--criterion", fl.criteria, "run only these criteria")->check(CLI::Range(1, 13));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*est) return cmd_estimate(fl);
        if (*spec) return cmd_spectrum(fl);
        if (*cf) return cmd_closed_form(fl);
        if (*net) return cmd_net_intervals(fl);
        if (*dbl) return cmd_doubling(fl);
        if (*ver) return cmd_verify(fl);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const PrecisionError& e) {
        std::cerr << "precision error: " << e.what() << "\n";
        return kPrecision;
    } catch (const FiniteTypeViolation& e) {
        std::cerr << "finite-type violation: " << e.what() << "\n";
        return kPrecision;
    } catch (const EmptyBallError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    }
    return kOk;
}
