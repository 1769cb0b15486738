#include "fermi_landauer/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/exact_oracle.hpp"
#include "fermi_landauer/spectrum.hpp"
#include "fermi_landauer/thermal_channel.hpp"
#include "fermi_landauer/vacuum_channel.hpp"

namespace fermi_landauer {
namespace {

constexpr const char* kGenerator = "fermi_landauer";
constexpr int kDefaultOracleSteps = 4096;

std::string version() { return FERMI_LANDAUER_VERSION; }

std::string csv_header(const RunConfig& config) {
  std::string out = "# " + std::string(kGenerator) + " " + version() + "\n";
  for (const auto& [key, value] : config.resolved()) {
    out += "# " + key + "=" + value + "\n";
  }
  return out;
}

JsonObject meta(const RunConfig& config) {
  JsonObject resolved;
  for (const auto& [key, value] : config.resolved()) resolved.string(key, value);
  JsonObject m;
  m.string("generator", kGenerator).string("version", version()).object(
      "config", resolved);
  return m;
}

Artifact table_artifact(const RunConfig& config, const std::string& stem,
                        const Table& table) {
  if (config.format == OutputFormat::json) {
    JsonObject doc;
    doc.object("meta", meta(config)).raw("rows", render_json_rows(table, 2));
    return {stem + ".json", doc.dump() + "\n"};
  }
  std::ostringstream out;
  out << csv_header(config);
  render_csv(out, table);
  return {stem + ".csv", out.str()};
}

Artifact summary_artifact(const RunConfig& config, const std::string& stem,
                          JsonObject body) {
  JsonObject doc;
  doc.object("meta", meta(config));
  doc.object("result", body);
  return {stem + ".json", doc.dump() + "\n"};
}

JsonObject channel_json(const ChannelResult& r) {
  JsonObject out;
  out.number("delta_p", r.delta_p)
      .number("dQ", r.dQ)
      .number("dS_linear", r.dS_linear)
      .number("dS_exact", r.dS_exact)
      .number("landauer_margin", r.landauer_margin);
  return out;
}

std::vector<int> convergence_orders(int n_max) {
  std::vector<int> orders;
  for (int divisor : {8, 4, 2, 1}) {
    const int n = std::max(1, n_max / divisor);
    if (orders.empty() || n > orders.back()) orders.push_back(n);
  }
  if (orders.back() != n_max) orders.push_back(n_max);
  return orders;
}

// Enough modes that the spectrum passes the detector gap.
int modes_covering(const CavityConfig& cavity, double omega) {
  const double k = std::sqrt(std::max(0.0, omega * omega -
                                               cavity.mass * cavity.mass));
  return static_cast<int>(std::ceil(k * cavity.L / std::numbers::pi + 0.5)) + 1;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  return SweepAxis{"", lo, hi, count, lo != hi}.values();
}

// ---------------------------------------------------------------- modes

std::vector<Artifact> run_modes(const RunConfig& config) {
  const auto modes = solve_modes(config.cavity, *config.n_max);
  return {table_artifact(config, "modes", mode_table(modes))};
}

// --------------------------------------------------------------- vacuum

std::vector<Artifact> run_vacuum(const RunConfig& config) {
  const double omega = config.gap();
  const DetectorConfig detector =
      config.detector(config.initial_population(omega));
  const CouplingSet couplings = compute_coupling_set(
      config.cavity, detector, *config.n_max, config.switching);
  const ChannelResult result = apply_vacuum_channel(couplings, detector);
  const ConvergenceReport report = convergence_report(
      couplings, detector, convergence_orders(*config.n_max));

  Table convergence{{"n_max", "dQ", "delta_p", "tail_estimate"}, {}};
  for (const auto& row : report.rows) {
    convergence.rows.push_back({std::to_string(row.n_max), format_number(row.dQ),
                                format_number(row.delta_p),
                                format_number(row.tail_estimate)});
  }

  JsonObject body = channel_json(result);
  body.integer("n_max", couplings.n_max)
      .number("tail_estimate", couplings.tail_estimate)
      .number("p", detector.p)
      .number("field_trace", result.field_diag->trace())
      .number("field_vacuum_weight", result.field_diag->vacuum)
      .number("dQ_decay_exponent", report.decay_exponent);

  return {table_artifact(config, "vacuum_modes",
                         vacuum_mode_table(couplings, detector)),
          summary_artifact(config, "vacuum_summary", body),
          table_artifact(config, "vacuum_convergence", convergence),
          table_artifact(config, "vacuum_couplings", coupling_table(couplings))};
}

// -------------------------------------------------------------- thermal

struct ResonantCoupling {
  ResonanceSpec resonance;
  Complex V_B;
};

ResonantCoupling resonant_coupling(const RunConfig& config,
                                   const DetectorConfig& detector) {
  const int count = std::max(config.resonant_mode.value_or(1),
                             modes_covering(config.cavity, detector.omega_gap));
  const auto modes = solve_modes(config.cavity, count);
  ResonantCoupling rc;
  rc.resonance = find_resonance(modes, detector);
  if (!config.allow_detuned &&
      !(rc.resonance.detuning_check < kMaxResonanceDetuning)) {
    throw ConfigError("detector.omega",
                      "detector gap is not resonant with any mode: closest is "
                      "mode " + std::to_string(rc.resonance.B) + " with w_B = " +
                          format_number(rc.resonance.omega_B) +
                          " (use --resonant-mode or --allow-detuned)");
  }
  const Mode& mode = modes[static_cast<std::size_t>(rc.resonance.B - 1)];
  rc.V_B = compute_coupling(mode, detector, CouplingKind::V, config.switching,
                            config.cavity);
  return rc;
}

std::vector<Artifact> run_thermal(const RunConfig& config) {
  const DetectorConfig base = config.detector(config.p.value_or(0.5));
  const ResonantCoupling rc = resonant_coupling(config, base);
  const double wB = rc.resonance.omega_B;

  const std::vector<double> temps =
      log_grid(config.grid_min * wB, config.grid_max * wB, config.grid);
  const auto rows = thermal_sweep(rc.V_B, base, rc.resonance, temps, temps,
                                  config.convention, config.allow_detuned);

  double min_margin = std::numeric_limits<double>::infinity();
  double min_relative = std::numeric_limits<double>::infinity();
  double max_diag = 0.0;
  int sign_mismatches = 0;
  for (const auto& row : rows) {
    min_margin = std::min(min_margin, row.result.landauer_margin);
    if (row.result.dQ != 0.0) {
      min_relative = std::min(min_relative, row.result.landauer_margin /
                                                std::abs(row.result.dQ));
    }
    if (row.T_R == row.T_D) {
      max_diag = std::max({max_diag, std::abs(row.result.dQ),
                           std::abs(row.result.dS_linear.value_or(0.0))});
    } else {
      const double expected = row.T_D > row.T_R ? 1.0 : -1.0;
      const double expected_sign =
          config.convention == TemperatureConvention::gibbs ? expected : 0.0;
      if (expected_sign != 0.0 && row.result.dQ * expected_sign <= 0.0) {
        ++sign_mismatches;
      }
    }
  }

  JsonObject body;
  body.integer("resonant_mode", rc.resonance.B)
      .number("omega_B", wB)
      .number("detuning_check", rc.resonance.detuning_check)
      .number("re_V_B", rc.V_B.real())
      .number("im_V_B", rc.V_B.imag())
      .number("abs_V_B2", std::norm(rc.V_B))
      .integer("grid_points", static_cast<long long>(rows.size()))
      .number("min_landauer_margin", min_margin)
      .number("min_margin_over_abs_dQ",
              std::isfinite(min_relative) ? std::optional<double>(min_relative)
                                          : std::nullopt)
      .integer("heat_sign_mismatches", sign_mismatches)
      .number("max_abs_diagonal_dQ_dS", max_diag);

  if (config.t_field) {
    DetectorConfig point = base;
    point.p = config.initial_population(wB);
    const auto occ = occupation_marginals(*config.t_field, wB);
    const ChannelResult r = apply_thermal_channel(occ, rc.V_B, point,
                                                  rc.resonance,
                                                  config.allow_detuned);
    JsonObject at = channel_json(r);
    at.number("T_R", *config.t_field)
        .number("p", point.p)
        .number("P0", occ.P0)
        .number("P1", occ.P1)
        .number("P2", occ.P2)
        .number("X", resonant_weight(occ, point.p));
    body.object("point", at);
  }

  return {table_artifact(config, "thermal_sweep", thermal_sweep_table(rows)),
          summary_artifact(config, "thermal_summary", body)};
}

// --------------------------------------------------------------- oracle

std::vector<Artifact> run_oracle(const RunConfig& config) {
  const double omega = config.gap();
  OracleSetup setup{TruncatedSpace(config.n_modes), config.cavity,
                    config.detector(config.initial_population(omega)),
                    config.switching, InteractionTerms::all};
  const double T_R = config.t_field.value_or(0.0);
  const double dt =
      config.dt.value_or(setup.detector.duration / kDefaultOracleSteps);
  const double lambda = setup.detector.lambda;
  const std::vector<double> lambdas{lambda, 0.5 * lambda};

  std::vector<OracleComparisonRow> rows =
      compare_with_perturbation(setup, T_R, lambdas, dt);

  const auto modes = solve_modes(config.cavity, config.n_modes);
  const OracleState rho0 = initial_state(setup.space, modes, setup.detector.p, T_R);
  const DtHalvingReport halving = dt_halving_report(setup, rho0, dt);
  const auto fine_rows = compare_with_perturbation(
      setup, T_R, std::vector<double>{lambda}, 0.5 * dt);
  rows.insert(rows.end(), fine_rows.begin(), fine_rows.end());

  auto ratio = [](double a, double b) -> std::optional<double> {
    if (b > 0.0 && std::isfinite(a / b)) return a / b;
    return std::nullopt;
  };
  JsonObject body;
  body.integer("n_modes", config.n_modes)
      .integer("dim", setup.space.dim())
      .number("T_R", T_R)
      .number("p", setup.detector.p)
      .number("dt", rows.front().dt)
      .number("rel_err_delta_p", rows[0].rel_err_delta_p)
      .number("rel_err_delta_p_half_lambda", rows[1].rel_err_delta_p)
      .number("error_ratio_delta_p",
              ratio(rows[0].rel_err_delta_p, rows[1].rel_err_delta_p))
      .number("rel_err_dQ", rows[0].rel_err_dQ)
      .number("rel_err_dQ_half_lambda", rows[1].rel_err_dQ)
      .number("error_ratio_dQ", ratio(rows[0].rel_err_dQ, rows[1].rel_err_dQ))
      .number("dt_halving_contraction", halving.contraction)
      .number("trace_drift", halving.finest.trace_drift)
      .number("hermiticity_drift", halving.finest.hermiticity_drift)
      .boolean("restored", halving.finest.restored);
  if (T_R == 0.0 && (setup.detector.p == 0.0 || setup.detector.p == 1.0)) {
    body.number("purity_drift", std::abs(purity(halving.finest.rho) - 1.0));
  }

  return {table_artifact(config, "oracle_comparison", oracle_table(rows)),
          summary_artifact(config, "oracle_summary", body)};
}

// ---------------------------------------------------------------- sweep

// splitmix64; fixed output across platforms, unlike std distributions.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

void apply_axis(RunConfig& config, const std::string& name, double value) {
  if (name == "lambda") config.lambda = value;
  else if (name == "T") config.duration = value;
  else if (name == "x0") config.x0 = value;
  else if (name == "omega") {
    config.omega = value;
    config.resonant_mode.reset();
  } else if (name == "mass") config.cavity.mass = value;
  else if (name == "L") config.cavity.L = value;
  else if (name == "t_field") config.t_field = value;
  else if (name == "velocity") config.velocity = value;
  else if (name == "p") {
    config.p = value;
    config.t_detector.reset();
  } else if (name == "t_detector") {
    config.t_detector = value;
    config.p.reset();
  }
}

std::vector<std::vector<double>> sweep_points(const RunConfig& config) {
  std::vector<std::vector<double>> points;
  const auto& axes = config.sweep_axes;
  if (config.sweep_random > 0) {
    SplitMix64 rng{config.seed};
    for (int i = 0; i < config.sweep_random; ++i) {
      std::vector<double> point;
      for (const auto& axis : axes) {
        const double u = rng.uniform();
        point.push_back(axis.log ? axis.lo * std::pow(axis.hi / axis.lo, u)
                                 : axis.lo + (axis.hi - axis.lo) * u);
      }
      points.push_back(std::move(point));
    }
    return points;
  }
  const auto first = axes[0].values();
  if (axes.size() == 1) {
    for (double v : first) points.push_back({v});
    return points;
  }
  const auto second = axes[1].values();
  for (double a : first) {
    for (double b : second) points.push_back({a, b});
  }
  return points;
}

std::vector<std::string> sweep_point(const RunConfig& base,
                                     const std::vector<double>& point) {
  RunConfig config = base;
  for (std::size_t i = 0; i < point.size(); ++i) {
    apply_axis(config, base.sweep_axes[i].name, point[i]);
  }
  config.scenario = Scenario::vacuum;  // reuse the single-point checks
  if (base.sweep_channel == SweepChannel::thermal) {
    config.scenario = Scenario::thermal;
  }
  config.validate();

  std::vector<std::string> cells;
  for (double v : point) cells.push_back(format_number(v));
  if (base.sweep_channel == SweepChannel::vacuum) {
    const DetectorConfig detector =
        config.detector(config.initial_population(config.gap()));
    const CouplingSet couplings = compute_coupling_set(
        config.cavity, detector, *config.n_max, config.switching);
    const ChannelResult r = apply_vacuum_channel(couplings, detector);
    for (double v : {detector.p, r.delta_p, r.dQ}) cells.push_back(format_number(v));
    cells.push_back(format_number(r.dS_linear));
    cells.push_back(format_number(r.dS_exact));
    cells.push_back(format_number(r.landauer_margin));
    cells.push_back(format_number(couplings.tail_estimate));
    return cells;
  }
  const DetectorConfig base_detector = config.detector(0.5);
  const ResonantCoupling rc = resonant_coupling(config, base_detector);
  DetectorConfig detector = base_detector;
  detector.p = config.initial_population(rc.resonance.omega_B);
  const auto occ = occupation_marginals(*config.t_field, rc.resonance.omega_B);
  const ChannelResult r = apply_thermal_channel(occ, rc.V_B, detector,
                                                rc.resonance,
                                                config.allow_detuned);
  for (double v : {detector.p, resonant_weight(occ, detector.p), r.delta_p, r.dQ}) {
    cells.push_back(format_number(v));
  }
  cells.push_back(format_number(r.dS_linear));
  cells.push_back(format_number(r.dS_exact));
  cells.push_back(format_number(r.landauer_margin));
  return cells;
}

std::vector<Artifact> run_sweep(const RunConfig& config) {
  const auto points = sweep_points(config);
  Table table;
  for (const auto& axis : config.sweep_axes) table.columns.push_back(axis.name);
  if (config.sweep_channel == SweepChannel::vacuum) {
    for (const char* c : {"p", "delta_p", "dQ", "dS_linear", "dS_exact",
                          "landauer_margin", "tail_estimate"}) {
      table.columns.push_back(c);
    }
  } else {
    for (const char* c : {"p", "X", "delta_p", "dQ", "dS_linear", "dS_exact",
                          "landauer_margin"}) {
      table.columns.push_back(c);
    }
  }
  table.rows.resize(points.size());

  // Workers claim indices; rows land in grid order whatever the timing.
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        table.rows[i] = sweep_point(config, points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers =
      std::min<int>(worker_count(config), static_cast<int>(points.size()));
  std::vector<std::jthread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double min_margin = std::numeric_limits<double>::infinity();
  const auto margin_col = static_cast<std::size_t>(
      std::find(table.columns.begin(), table.columns.end(), "landauer_margin") -
      table.columns.begin());
  for (const auto& row : table.rows) {
    min_margin = std::min(min_margin, std::strtod(row[margin_col].c_str(), nullptr));
  }
  JsonObject body;
  body.integer("points", static_cast<long long>(points.size()))
      .number("min_landauer_margin", min_margin);
  return {table_artifact(config, "sweep", table),
          summary_artifact(config, "sweep_summary", body)};
}

}  // namespace

int worker_count(const RunConfig& config) {
  int workers = config.threads.value_or(
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) {
      workers = std::min<int>(workers, static_cast<int>(cap));
    }
  }
  return std::max(1, workers);
}

std::vector<Artifact> run_scenario(const RunConfig& config) {
  config.validate();
  switch (config.scenario) {
    case Scenario::modes: return run_modes(config);
    case Scenario::vacuum: return run_vacuum(config);
    case Scenario::thermal: return run_thermal(config);
    case Scenario::oracle: return run_oracle(config);
    case Scenario::sweep: return run_sweep(config);
  }
  return {};
}

int run_cli(const std::vector<std::string>& args) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const HelpRequested& help) {
    std::cout << help.what();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto artifacts = run_scenario(config);
    if (config.output) {
      write_artifacts(*config.output, artifacts);
    } else {
      std::cout << artifacts.front().contents;
      std::cout.flush();
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const PerturbationBreakdown& e) {
    std::cerr << "perturbation breakdown: " << e.what() << '\n';
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fermi_landauer
