#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/thermal_channel.hpp"

namespace fermi_landauer {

enum class Scenario { modes, vacuum, thermal, oracle, sweep };
enum class OutputFormat { csv, json };
enum class SweepChannel { vacuum, thermal };

// One swept parameter: `name=lo:hi:count[:log]` on the command line.
struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;
  bool log = false;

  std::vector<double> values() const;
};

// Parameters straight from the command line / config file. Optional fields
// stay unset until a scenario demands them; validate() enforces that.
struct RunConfig {
  Scenario scenario = Scenario::modes;
  CavityConfig cavity;

  std::optional<double> omega;
  // Alternative to omega: tune the gap exactly onto mode B.
  std::optional<int> resonant_mode;
  std::optional<double> lambda;
  std::optional<double> duration;  // --T
  std::optional<double> x0;
  std::optional<double> velocity;
  std::optional<double> p;
  std::optional<double> t_detector;
  std::optional<double> t_field;
  Spinor eta{Complex{1.0, 0.0}, Complex{0.0, 0.0}};

  std::optional<int> n_max;
  TemperatureConvention convention = TemperatureConvention::gibbs;
  SwitchingProfile switching;
  bool allow_detuned = false;

  std::optional<double> dt;
  int n_modes = 2;

  int grid = 20;
  double grid_min = 0.1;  // in units of w_B
  double grid_max = 10.0;

  std::vector<SweepAxis> sweep_axes;
  SweepChannel sweep_channel = SweepChannel::vacuum;
  int sweep_random = 0;  // > 0: that many random points instead of a grid

  std::optional<std::filesystem::path> output;
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 0;
  std::optional<int> threads;

  // Throws ConfigError naming the first missing or out-of-range key.
  void validate() const;

  // Every setting that influences results, as (dotted key, value) pairs in a
  // fixed order. Output location and thread count are excluded.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  // Detector gap: --omega, or w_B of --resonant-mode.
  double gap() const;
  // Detector built from the gap, lambda/T/x0/velocity/eta and the given p.
  DetectorConfig detector(double p_value) const;
  // p from --p or, failing that, from --t-detector at frequency `omega`.
  double initial_population(double omega_value) const;
};

// `--help` was requested; the payload is the rendered help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// args excludes the program name: {"vacuum", "--L", "1", ...}. Values from
// `file_text` (flat key=value lines with dotted keys, '#' comments) are
// applied first and flags override them. A --config flag in `args` is read
// from disk when `file_text` is not supplied.
RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& file_text =
                           std::nullopt);

// Dotted config-file key for every supported flag, e.g. "--T" ->
// "detector.T".
const std::map<std::string, std::string>& config_keys();

std::string to_string(Scenario scenario);
std::string to_string(TemperatureConvention convention);
std::string to_string(const SwitchingProfile& switching);

}  // namespace fermi_landauer
