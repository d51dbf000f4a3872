#pragma once

// Configuration parsing and machine-readable report generation for the
// command-line front end. Reports are deterministic: identical configuration
// and library version produce byte-identical output.

#include <kmslcm/kms.hpp>
#include <kmslcm/measure.hpp>
#include <kmslcm/scale.hpp>
#include <kmslcm/uniqueness.hpp>

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kmslcm {

inline constexpr const char* kReportSchema = "kms-lcm/1";
inline constexpr const char* kLibraryVersion = "1.0.0";

// Raised for malformed configuration documents (unknown keys, bad values).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceSpec {
  std::string type;  // "character" | "fourier" | "lamp_character"
  std::vector<std::complex<double>> z;
  std::vector<double> coeffs;
  std::vector<int> signs;
};

struct Config {
  MonoidDescriptor descriptor;
  std::map<std::string, Rational> weights;
  std::vector<double> beta;
  Rational class_cutoff = Rational(1024);
  int depth = 3;
  int pair_depth = 2;
  int ladder_height = 6;
  int subset_budget = 6;
  std::uint64_t node_budget = 2'000'000;
  std::optional<double> tolerance;
  std::vector<TraceSpec> traces;
  std::optional<std::string> output;
  std::uint64_t seed = 0;
};

// Parses a JSON configuration document. Unknown keys are errors; diagnostics
// name the offending key. Throws ConfigError.
Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Instantiates the configured monoid and scale. Throws ConfigError on
// invalid family parameters or weights.
Scale build_scale(const Config& config);

// Converts a trace specification into a trace functional for the configured
// scale. Throws ConfigError on malformed specifications.
Trace build_trace(const TraceSpec& spec);

// Report builders. Each returns a self-contained JSON document carrying the
// schema tag, the canonical configuration echo, and provenance fields
// (cutoffs, exact/float flags, tail bounds) for every reported number.
nlohmann::json report_families();
nlohmann::json report_existence(const Config& config);
nlohmann::json report_zeta(const Config& config);
nlohmann::json report_boundary(const Config& config);
nlohmann::json report_uniqueness(const Config& config);
nlohmann::json report_kms_eval(const Config& config, const std::string& s_text,
                               const std::string& t_text);
nlohmann::json report_analyze(const Config& config);

// Renders a report as pretty JSON (default) or as flattened CSV rows
// ("path,value" per leaf).
std::string render_report(const nlohmann::json& report, bool csv);

// Fixed-width float formatting used in reports: 17 significant digits.
std::string format_float(double v);

}  // namespace kmslcm
