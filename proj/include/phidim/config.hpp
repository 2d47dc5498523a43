#pragma once
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "phidim/closedform.hpp"
#include "phidim/dimfunc.hpp"
#include "phidim/estimate.hpp"
#include "phidim/measures.hpp"
#include "phidim/netintervals.hpp"

namespace phidim {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kSchema = "phidim/1";

// Measure description in canonical form: every real is an exact rational
// string ("3/4"), integers stay integers, keys appear in a fixed order.
struct MeasureConfig {
    Json canonical;
    std::string kind() const { return canonical.value("kind", ""); }
};

struct OutputConfig {
    std::string dir = ".";
    std::string summary = "summary.json";
    std::string pairs = "pairs.csv";
    std::string curve = "curve.csv";
    bool write_pairs = true;
    bool write_curve = true;
};

enum class DirectionSet { Upper, Lower, Both };

struct ExperimentConfig {
    MeasureConfig measure;
    std::vector<DimensionFunction> phis;  // at least one when present
    EstimationConfig estimator;
    DirectionSet directions = DirectionSet::Both;
    std::vector<double> thetas;  // spectrum
    OutputConfig outputs;
    Json mode = Json::object();  // subcommand parameters, passed through
};

// Every parse failure names the offending field, e.g. "measure.p.beta".
ConfigError config_error(const std::string& path, const std::string& what);

Rational json_rational(const Json& v, const std::string& path);
double json_real(const Json& v, const std::string& path);

MeasureConfig parse_measure(const Json& j, const std::string& path = "measure");
DimensionFunction parse_phi(const Json& j, const std::string& path = "phi");
Json phi_to_json(const DimensionFunction& f);
EstimationConfig parse_estimator(const Json& j, const std::string& path = "estimator");
Json estimator_to_json(const EstimationConfig& c);

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);
// Canonical echo; parse_config(config_to_json(c)) reproduces c.
Json config_to_json(const ExperimentConfig& c);

MeasurePtr build_measure(const MeasureConfig& m);
// Discrete spec of a "discrete" measure config (closed-form cross-checks).
DiscreteMeasureSpec discrete_spec(const MeasureConfig& m);
// Net system for a "finite_type" measure config.
std::shared_ptr<const NetSystem> build_net_system(const MeasureConfig& m);

// ----------------------------------------------------------------- reports
Json json_number(double x);  // finite -> number, +-inf -> "inf"/"-inf", NaN -> null
Json estimate_to_json(const DimensionEstimate& e, const DimensionFunction& f);
Json closed_form_to_json(const ClosedFormResult& r);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string pairs_csv_header();
std::string pairs_csv_row(const PairRecord& rec, Direction d);
std::string curve_csv(const DimensionEstimate& e);

// Writes summary.json with a stable layout ({"schema","version",...} first).
void write_text(const std::string& path, const std::string& text);
std::string dump_json(const Json& j);

}  // namespace phidim
