#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "phidim/config.hpp"

using namespace phidim;

namespace {

// message of the ConfigError thrown by f, or "" if none
template <class F>
std::string config_failure(F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

Json discrete_json() {
    return Json::parse(R"({"kind": "discrete", "p": {"kind": "polynomial", "beta": "3/2"},
                           "a": {"kind": "polynomial", "lambda": 1}, "p0": "1/10"})");
}

}  // namespace

TEST_CASE("config: exact numbers") {
    CHECK(json_rational(Json("1/10"), "x") == Rational(1, 10));
    CHECK(json_rational(Json(0.1), "x") == Rational(1, 10));
    CHECK(json_rational(Json(7), "x") == Rational(7));
    CHECK(std::isinf(json_real(Json("inf"), "x")));
    CHECK(starts_with(config_failure([] { json_rational(Json("1/0"), "a.b"); }), "a.b:"));
    CHECK(starts_with(config_failure([] { json_rational(Json(true), "a.b"); }), "a.b:"));
}

TEST_CASE("config: errors name the offending field") {
    Json j = discrete_json();
    j["p"].erase("beta");
    CHECK(starts_with(config_failure([&] { parse_measure(j); }), "measure.p.beta:"));
    j = discrete_json();
    j["p"]["beta"] = "1";
    CHECK(starts_with(config_failure([&] { parse_measure(j); }), "measure.p.beta:"));
    j = discrete_json();
    j["p"]["kind"] = "poly";
    CHECK(starts_with(config_failure([&] { parse_measure(j); }), "measure.p.kind:"));
    j = discrete_json();
    j["extra"] = 1;
    CHECK(starts_with(config_failure([&] { parse_measure(j); }), "measure.extra:"));

    CHECK(starts_with(config_failure([] { parse_phi(Json::parse(R"({"kind": "theta", "theta": 1})")); }), "phi.theta:"));
    CHECK(starts_with(config_failure([] { parse_phi(Json::parse(R"({"kind": "bogus"})")); }), "phi.kind:"));
    CHECK(starts_with(config_failure([] { parse_phi(Json::parse(R"({"kind": "constant", "delta": -1})")); }), "phi.delta:"));

    CHECK(starts_with(config_failure([] { parse_config(Json::parse(R"({"thetas": [0.5, 0.4]})")); }), "thetas[1]:"));
    CHECK(starts_with(config_failure([] { parse_config(Json::parse(R"({"schema": "other/2"})")); }), "schema:"));
    CHECK(starts_with(config_failure([] { parse_config(Json::parse(R"({"outputs": {"dri": "x"}})")); }), "outputs.dri:"));
    CHECK(starts_with(config_failure([] {
                          parse_config(Json::parse(R"({"measure": {"kind": "cascade", "base": 2, "ratios": ["1/2", "1/3"]}})"));
                      }),
                      "measure.ratios:"));
}

TEST_CASE("config: canonical form is exact and stable") {
    const ExperimentConfig c = parse_config(Json::parse(R"({
        "measure": {"kind": "discrete", "p": {"kind": "polynomial", "beta": 1.5},
                    "a": {"kind": "polynomial", "lambda": 1}, "p0": 0.1},
        "phi": {"kind": "constant", "delta": 0.5},
        "estimator": {"base": 3, "n_max": 12}})"));
    CHECK(c.measure.canonical["p"]["beta"] == "3/2");
    CHECK(c.measure.canonical["p0"] == "1/10");
    const auto s = discrete_spec(c.measure);
    CHECK(s.beta == Rational(3, 2));
    CHECK(s.p0 == Rational(1, 10));
    CHECK(c.estimator.base == 3);
    CHECK(c.estimator.n_max == 12);

    const Json once = config_to_json(c);
    const Json twice = config_to_json(parse_config(once));
    CHECK(once == twice);
    CHECK(dump_json(once) == dump_json(twice));
}

TEST_CASE("config property: random phi specs round-trip") {
    gen::Rng rng(61);
    for (int trial = 0; trial < 300; ++trial) {
        const DimensionFunction f = gen::builtin_phi(rng);
        const Json j = phi_to_json(f);
        const DimensionFunction g = parse_phi(j);
        INFO(j.dump());
        CHECK(phi_to_json(g) == j);
        for (double x : {0.3, 1e-3, 1e-9}) CHECK(eval_phi(g, x) == eval_phi(f, x));
    }
}

TEST_CASE("config: CSV and JSON output helpers") {
    CHECK(pairs_csv_header() == "z,R,r,X_lo,X_hi,alpha_hat\r\n");
    CHECK(csv_field("1/3") == "1/3");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(json_number(1.5) == Json(1.5));
    CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(json_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(json_number(std::nan("")).is_null());

    SSCMeasure cantor(cantor_spec(), 20);
    EstimationConfig c;
    c.base = 3;
    c.n_max = 8;
    const auto f = DimensionFunction::constant(0);
    const auto e = estimate_upper_phi_dim(cantor, f, c);
    const Json j = estimate_to_json(e, f);
    for (const char* k : {"direction", "value", "curve", "diverging", "witness", "phi"}) CHECK(j.contains(k));
    CHECK(j["direction"] == "upper");
    CHECK(j["value"].get<double>() == e.value);
    const std::string csv = curve_csv(e);
    CHECK(starts_with(csv, "depth,alpha_hat\r\n"));
}
