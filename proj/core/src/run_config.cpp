#include "fermi_landauer/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/exact_oracle.hpp"

namespace fermi_landauer {
namespace {

using RawValues = std::map<std::string, std::string>;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double value = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE ||
      std::isnan(value)) {
    throw ConfigError(key, key + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const long long value = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(key, key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t.empty()) return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, key + ": expected true or false, got '" + text + "'");
}

SwitchingProfile parse_switching(const std::string& key,
                                 const std::string& text) {
  const std::string t = trim(text);
  if (t == "sharp") return SwitchingProfile::sharp();
  if (t.rfind("cosine:", 0) == 0) {
    const double r = parse_double(key, t.substr(7));
    if (!(r > 0.0 && r < 0.5)) {
      throw ConfigError(key, key + ": cosine ramp fraction must lie in (0, 0.5)");
    }
    return SwitchingProfile::cosine(r);
  }
  throw ConfigError(key, key + ": expected 'sharp' or 'cosine:r', got '" +
                             text + "'");
}

Spinor parse_eta(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) {
    throw ConfigError(key, key + ": expected re,im,re,im");
  }
  Spinor eta{Complex{parse_double(key, parts[0]), parse_double(key, parts[1])},
             Complex{parse_double(key, parts[2]), parse_double(key, parts[3])}};
  const double norm2 = std::norm(eta[0]) + std::norm(eta[1]);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw ConfigError(key, key + ": reference spinor must be non-zero");
  }
  return normalize_spinor(eta);
}

SweepAxis parse_axis(const std::string& key, const std::string& text) {
  static const std::vector<std::string> kNames = {
      "lambda", "T", "x0", "p", "omega", "mass", "L", "t_field", "t_detector",
      "velocity"};
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(key, key + ": expected name=lo:hi:count[:log]");
  }
  SweepAxis axis;
  axis.name = trim(text.substr(0, eq));
  if (std::find(kNames.begin(), kNames.end(), axis.name) == kNames.end()) {
    throw ConfigError(key, key + ": unknown sweep parameter '" + axis.name + "'");
  }
  const auto fields = split(text.substr(eq + 1), ':');
  if (fields.size() < 3 || fields.size() > 4) {
    throw ConfigError(key, key + ": expected name=lo:hi:count[:log]");
  }
  axis.lo = parse_double(key, fields[0]);
  axis.hi = parse_double(key, fields[1]);
  const long long count = parse_integer(key, fields[2]);
  if (count < 1 || count > 100000) {
    throw ConfigError(key, key + ": axis count must lie in [1, 100000]");
  }
  axis.count = static_cast<int>(count);
  if (fields.size() == 4) {
    if (fields[3] != "log") {
      throw ConfigError(key, key + ": the optional fourth field must be 'log'");
    }
    axis.log = true;
    if (!(axis.lo > 0.0 && axis.hi > 0.0)) {
      throw ConfigError(key, key + ": log axes need positive bounds");
    }
  }
  return axis;
}

RawValues parse_file(const std::string& text) {
  RawValues values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    const auto& keys = config_keys();
    const bool known = std::any_of(keys.begin(), keys.end(), [&](const auto& kv) {
      return kv.second == key;
    });
    if (!known) throw ConfigError(key, "unknown config key '" + key + "'");
    if (key == "sweep.axis" && values.count(key)) {
      value = values[key] + ";" + value;
    }
    values[key] = value;
  }
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunConfig build(Scenario scenario, const RawValues& raw) {
  RunConfig c;
  c.scenario = scenario;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto number = [&](const char* key, std::optional<double>& slot) {
    if (const auto* v = get(key)) slot = parse_double(key, *v);
  };
  auto number_into = [&](const char* key, double& slot) {
    if (const auto* v = get(key)) slot = parse_double(key, *v);
  };
  auto integer_into = [&](const char* key, int& slot, int lo, int hi) {
    if (const auto* v = get(key)) {
      const long long value = parse_integer(key, *v);
      if (value < lo || value > hi) {
        throw ConfigError(key, std::string(key) + " must lie in [" +
                                   std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
      }
      slot = static_cast<int>(value);
    }
  };

  number_into("cavity.L", c.cavity.L);
  number_into("cavity.mass", c.cavity.mass);
  number_into("cavity.root_tol", c.cavity.root_tol);
  number_into("cavity.quad_tol", c.cavity.quad_tol);
  number("detector.omega", c.omega);
  if (get("detector.resonant_mode")) {
    int b = 0;
    integer_into("detector.resonant_mode", b, 1, 100000);
    c.resonant_mode = b;
  }
  number("detector.lambda", c.lambda);
  number("detector.T", c.duration);
  number("detector.x0", c.x0);
  number("detector.velocity", c.velocity);
  number("detector.p", c.p);
  number("detector.t_detector", c.t_detector);
  number("field.t_field", c.t_field);
  if (const auto* v = get("detector.eta")) c.eta = parse_eta("detector.eta", *v);
  if (get("run.n_max")) {
    int n = 0;
    integer_into("run.n_max", n, 1, 100000);
    c.n_max = n;
  }
  if (const auto* v = get("run.convention")) {
    if (*v == "gibbs") {
      c.convention = TemperatureConvention::gibbs;
    } else if (*v == "paper") {
      c.convention = TemperatureConvention::paper;
    } else {
      throw ConfigError("run.convention",
                        "run.convention: expected 'gibbs' or 'paper', got '" +
                            *v + "'");
    }
  }
  if (const auto* v = get("run.switching")) {
    c.switching = parse_switching("run.switching", *v);
  }
  if (const auto* v = get("thermal.allow_detuned")) {
    c.allow_detuned = parse_bool("thermal.allow_detuned", *v);
  }
  integer_into("thermal.grid", c.grid, 1, 10000);
  number_into("thermal.grid_min", c.grid_min);
  number_into("thermal.grid_max", c.grid_max);
  number("oracle.dt", c.dt);
  integer_into("oracle.n_modes", c.n_modes, 1, TruncatedSpace::kMaxModes);
  if (const auto* v = get("sweep.axis")) {
    for (const auto& spec : split(*v, ';')) {
      if (!spec.empty()) c.sweep_axes.push_back(parse_axis("sweep.axis", spec));
    }
  }
  if (const auto* v = get("sweep.channel")) {
    if (*v == "vacuum") {
      c.sweep_channel = SweepChannel::vacuum;
    } else if (*v == "thermal") {
      c.sweep_channel = SweepChannel::thermal;
    } else {
      throw ConfigError("sweep.channel",
                        "sweep.channel: expected 'vacuum' or 'thermal'");
    }
  }
  integer_into("sweep.random", c.sweep_random, 0, 1000000);
  if (const auto* v = get("run.output")) c.output = *v;
  if (const auto* v = get("run.format")) {
    if (*v == "csv") {
      c.format = OutputFormat::csv;
    } else if (*v == "json") {
      c.format = OutputFormat::json;
    } else {
      throw ConfigError("run.format", "run.format: expected 'csv' or 'json'");
    }
  }
  if (const auto* v = get("run.seed")) {
    const long long seed = parse_integer("run.seed", *v);
    if (seed < 0) throw ConfigError("run.seed", "run.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (get("run.threads")) {
    int threads = 1;
    integer_into("run.threads", threads, 1, 4096);
    c.threads = threads;
  }
  c.validate();
  return c;
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return out;
}

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"--L", "cavity.L"},
      {"--mass", "cavity.mass"},
      {"--root-tol", "cavity.root_tol"},
      {"--quad-tol", "cavity.quad_tol"},
      {"--omega", "detector.omega"},
      {"--resonant-mode", "detector.resonant_mode"},
      {"--lambda", "detector.lambda"},
      {"--T", "detector.T"},
      {"--x0", "detector.x0"},
      {"--velocity", "detector.velocity"},
      {"--p", "detector.p"},
      {"--t-detector", "detector.t_detector"},
      {"--eta", "detector.eta"},
      {"--t-field", "field.t_field"},
      {"--n-max", "run.n_max"},
      {"--convention", "run.convention"},
      {"--switching", "run.switching"},
      {"--allow-detuned", "thermal.allow_detuned"},
      {"--grid", "thermal.grid"},
      {"--grid-min", "thermal.grid_min"},
      {"--grid-max", "thermal.grid_max"},
      {"--dt", "oracle.dt"},
      {"--n-modes", "oracle.n_modes"},
      {"--axis", "sweep.axis"},
      {"--channel", "sweep.channel"},
      {"--random", "sweep.random"},
      {"--output", "run.output"},
      {"--format", "run.format"},
      {"--seed", "run.seed"},
      {"--threads", "run.threads"},
  };
  return keys;
}

void RunConfig::validate() const {
  auto require = [](const auto& value, const char* key) {
    if (!value) {
      throw ConfigError(key, std::string("missing required setting ") + key);
    }
  };
  if (!(cavity.L > 0.0) || !std::isfinite(cavity.L)) {
    throw ConfigError("cavity.L", "cavity.L (--L) must be positive");
  }
  if (!(cavity.mass >= 0.0) || !std::isfinite(cavity.mass)) {
    throw ConfigError("cavity.mass", "cavity.mass (--mass) must be >= 0");
  }
  if (!(cavity.root_tol > 0.0)) {
    throw ConfigError("cavity.root_tol", "cavity.root_tol must be positive");
  }
  if (!(cavity.quad_tol > 0.0)) {
    throw ConfigError("cavity.quad_tol", "cavity.quad_tol must be positive");
  }
  if (p && !(*p >= 0.0 && *p <= 1.0)) {
    throw ConfigError("detector.p",
                      "detector.p (--p) must lie in [0, 1], got " +
                          format_number(*p));
  }
  if (p && t_detector) {
    throw ConfigError("detector.t_detector",
                      "--p and --t-detector are mutually exclusive");
  }
  if (t_detector && !(*t_detector > 0.0)) {
    throw ConfigError("detector.t_detector",
                      "detector.t_detector (--t-detector) must be positive");
  }
  if (t_field && !(*t_field >= 0.0)) {
    throw ConfigError("field.t_field",
                      "field.t_field (--t-field) must be >= 0");
  }
  if (omega && !(*omega > 0.0)) {
    throw ConfigError("detector.omega", "detector.omega (--omega) must be positive");
  }
  if (lambda && !(*lambda >= 0.0)) {
    throw ConfigError("detector.lambda", "detector.lambda (--lambda) must be >= 0");
  }
  if (duration && !(*duration > 0.0)) {
    throw ConfigError("detector.T", "detector.T (--T) must be positive");
  }
  if (velocity && !(std::abs(*velocity) < 1.0)) {
    throw ConfigError("detector.velocity",
                      "detector.velocity (--velocity) must satisfy |v| < 1");
  }
  if (x0 && !(*x0 >= 0.0 && *x0 <= cavity.L)) {
    throw ConfigError("detector.x0", "detector.x0 (--x0) must lie in [0, L]");
  }
  if (x0 && duration) {
    const double end = *x0 + velocity.value_or(0.0) * *duration;
    if (!(end >= 0.0 && end <= cavity.L)) {
      throw ConfigError("detector.velocity",
                        "worldline leaves the cavity before T: x(T) = " +
                            format_number(end));
    }
  }
  if (dt && !(*dt > 0.0)) {
    throw ConfigError("oracle.dt", "oracle.dt (--dt) must be positive");
  }
  if (!(grid_min > 0.0 && grid_max >= grid_min)) {
    throw ConfigError("thermal.grid_min",
                      "thermal grid needs 0 < grid-min <= grid-max");
  }

  if (omega && resonant_mode) {
    throw ConfigError("detector.resonant_mode",
                      "--omega and --resonant-mode are mutually exclusive");
  }
  auto require_detector = [&] {
    if (!resonant_mode) require(omega, "detector.omega");
    require(lambda, "detector.lambda");
    require(duration, "detector.T");
    require(x0, "detector.x0");
  };
  switch (scenario) {
    case Scenario::modes:
      require(n_max, "run.n_max");
      break;
    case Scenario::vacuum:
      require_detector();
      require(n_max, "run.n_max");
      if (!p && !t_detector) require(p, "detector.p");
      break;
    case Scenario::thermal:
      require_detector();
      if (velocity && *velocity != 0.0) {
        throw ConfigError("detector.velocity",
                          "the thermal channel needs a stationary detector");
      }
      // A single-point evaluation at t_field needs the detector state.
      if (t_field && !p && !t_detector) require(p, "detector.p");
      break;
    case Scenario::oracle:
      require_detector();
      if (!p && !t_detector) require(p, "detector.p");
      if (dt && *dt > *duration) {
        throw ConfigError("oracle.dt", "oracle.dt must not exceed T");
      }
      if (dt && *duration / *dt > static_cast<double>(10'000'000)) {
        throw ConfigError("oracle.dt", "oracle.dt gives more than 1e7 steps");
      }
      break;
    case Scenario::sweep: {
      if (sweep_axes.empty() || sweep_axes.size() > 2) {
        throw ConfigError("sweep.axis", "sweep needs one or two --axis specs");
      }
      auto swept = [&](const std::string& name) {
        return std::any_of(sweep_axes.begin(), sweep_axes.end(),
                           [&](const SweepAxis& a) { return a.name == name; });
      };
      if (!omega && !resonant_mode && !swept("omega")) {
        require(omega, "detector.omega");
      }
      if (!lambda && !swept("lambda")) require(lambda, "detector.lambda");
      if (!duration && !swept("T")) require(duration, "detector.T");
      if (!x0 && !swept("x0")) require(x0, "detector.x0");
      if (sweep_channel == SweepChannel::vacuum) {
        require(n_max, "run.n_max");
        if (!p && !t_detector && !swept("p") && !swept("t_detector")) {
          require(p, "detector.p");
        }
      } else if (!t_field && !swept("t_field")) {
        require(t_field, "field.t_field");
      }
      break;
    }
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string key, std::string value) {
    out.emplace_back(std::move(key), std::move(value));
  };
  auto add_opt = [&](std::string key, const std::optional<double>& v) {
    if (v) add(std::move(key), format_number(*v));
  };
  add("scenario", to_string(scenario));
  add("cavity.L", format_number(cavity.L));
  add("cavity.mass", format_number(cavity.mass));
  add("cavity.root_tol", format_number(cavity.root_tol));
  add("cavity.quad_tol", format_number(cavity.quad_tol));
  add_opt("detector.omega", omega);
  if (resonant_mode) {
    add("detector.resonant_mode", std::to_string(*resonant_mode));
  }
  add_opt("detector.lambda", lambda);
  add_opt("detector.T", duration);
  add_opt("detector.x0", x0);
  add_opt("detector.velocity", velocity);
  add_opt("detector.p", p);
  add_opt("detector.t_detector", t_detector);
  add("detector.eta", format_number(eta[0].real()) + "," +
                          format_number(eta[0].imag()) + "," +
                          format_number(eta[1].real()) + "," +
                          format_number(eta[1].imag()));
  add_opt("field.t_field", t_field);
  if (n_max) add("run.n_max", std::to_string(*n_max));
  add("run.convention", to_string(convention));
  add("run.switching", to_string(switching));
  add("run.format", format == OutputFormat::csv ? "csv" : "json");
  add("run.seed", std::to_string(seed));
  if (scenario == Scenario::thermal) {
    add("thermal.allow_detuned", allow_detuned ? "true" : "false");
    add("thermal.grid", std::to_string(grid));
    add("thermal.grid_min", format_number(grid_min));
    add("thermal.grid_max", format_number(grid_max));
  }
  if (scenario == Scenario::oracle) {
    add_opt("oracle.dt", dt);
    add("oracle.n_modes", std::to_string(n_modes));
  }
  if (scenario == Scenario::sweep) {
    std::string axes;
    for (const auto& a : sweep_axes) {
      if (!axes.empty()) axes += ";";
      axes += a.name + "=" + format_number(a.lo) + ":" + format_number(a.hi) +
              ":" + std::to_string(a.count) + (a.log ? ":log" : "");
    }
    add("sweep.axis", axes);
    add("sweep.channel",
        sweep_channel == SweepChannel::vacuum ? "vacuum" : "thermal");
    add("sweep.random", std::to_string(sweep_random));
    add("thermal.allow_detuned", allow_detuned ? "true" : "false");
  }
  return out;
}

double RunConfig::gap() const {
  if (omega) return *omega;
  if (resonant_mode) {
    return solve_modes(cavity, *resonant_mode).back().omega;
  }
  throw ConfigError("detector.omega", "missing required setting detector.omega");
}

DetectorConfig RunConfig::detector(double p_value) const {
  const double T = duration.value_or(1.0);
  const double v = velocity.value_or(0.0);
  const Worldline worldline =
      v == 0.0 ? Worldline::stationary(x0.value_or(0.0), cavity)
               : Worldline::uniform(x0.value_or(0.0), v, cavity, T);
  return DetectorConfig::make(gap(), lambda.value_or(0.0), T,
                              worldline, eta, p_value);
}

double RunConfig::initial_population(double omega_value) const {
  if (p) return *p;
  if (t_detector) return p_from_temperature(*t_detector, omega_value, convention);
  throw ConfigError("detector.p", "missing required setting detector.p");
}

RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& file_text) {
  CLI::App app{"Unruh-DeWitt detector in a fermionic bag cavity: heat, "
               "entropy and the Landauer bound",
               "fermi-landauer"};
  app.require_subcommand(1);
  std::map<std::string, std::optional<std::string>> flag_values;
  std::vector<std::string> axes;
  std::optional<std::string> config_path;
  bool allow_detuned_flag = false;

  app.add_option("--config", config_path, "flat key=value config file");
  for (const auto& [flag, key] : config_keys()) {
    if (flag == "--axis") {
      app.add_option("--axis", axes, "sweep axis name=lo:hi:count[:log]");
    } else if (flag == "--allow-detuned") {
      app.add_flag("--allow-detuned", allow_detuned_flag,
                   "run the thermal channel off resonance");
    } else {
      app.add_option(flag, flag_values[flag], key);
    }
  }
  const std::vector<std::pair<Scenario, const char*>> scenarios = {
      {Scenario::modes, "cavity mode table"},
      {Scenario::vacuum, "vacuum-field channel, per-mode table and convergence"},
      {Scenario::thermal, "thermal field over a (T_R, T_D) grid"},
      {Scenario::oracle, "exact small-space evolution vs perturbation theory"},
      {Scenario::sweep, "vacuum or thermal channel over user axes"}};
  std::vector<CLI::App*> subs;
  for (const auto& [scenario, description] : scenarios) {
    auto* sub = app.add_subcommand(to_string(scenario), description);
    sub->fallthrough();
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  Scenario scenario = Scenario::modes;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) scenario = scenarios[i].first;
  }

  RawValues raw;
  if (file_text) {
    raw = parse_file(*file_text);
  } else if (config_path) {
    raw = parse_file(read_file(*config_path));
  }
  for (const auto& [flag, value] : flag_values) {
    if (value) raw[config_keys().at(flag)] = *value;
  }
  if (!axes.empty()) {
    std::string joined;
    for (const auto& a : axes) joined += (joined.empty() ? "" : ";") + a;
    raw["sweep.axis"] = joined;
  }
  if (allow_detuned_flag) raw["thermal.allow_detuned"] = "true";
  return build(scenario, raw);
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::modes: return "modes";
    case Scenario::vacuum: return "vacuum";
    case Scenario::thermal: return "thermal";
    case Scenario::oracle: return "oracle";
    case Scenario::sweep: return "sweep";
  }
  return "unknown";
}

std::string to_string(TemperatureConvention convention) {
  return convention == TemperatureConvention::gibbs ? "gibbs" : "paper";
}

std::string to_string(const SwitchingProfile& switching) {
  if (switching.kind == SwitchingProfile::Kind::sharp) return "sharp";
  return "cosine:" + format_number(switching.ramp_fraction);
}

}  // namespace fermi_landauer
