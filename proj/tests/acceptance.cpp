// Runs the acceptance criteria 1-9 and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/exact_oracle.hpp"
#include "fermi_landauer/run_config.hpp"
#include "fermi_landauer/scenario.hpp"
#include "fermi_landauer/spectrum.hpp"
#include "fermi_landauer/thermal_channel.hpp"
#include "fermi_landauer/vacuum_channel.hpp"
#include "support.hpp"

namespace fl = fermi_landauer;
using fl::testing::cavity;
using fl::testing::static_detector;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void spectrum(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  double worst_residual = 0.0;
  double worst_dispersion = 0.0;
  for (double m : {0.0, 0.1, 1.0, 10.0}) {
    for (double L : {0.5, 1.0, 2.0}) {
      const auto c = cavity(L, m);
      for (const auto& mode : fl::solve_modes(c, 50)) {
        worst_residual = std::max(worst_residual, std::abs(fl::boundary_residual(mode.k, c)));
        if (m > 0.0) {
          worst_dispersion = std::max(
              worst_dispersion, std::abs(mode.omega * std::abs(std::sin(mode.k * L)) - mode.k));
        }
      }
    }
  }
  double worst_massless = 0.0;
  for (const auto& mode : fl::solve_modes(cavity(1.0, 1e-8), 50)) {
    worst_massless = std::max(worst_massless,
                              std::abs(mode.k - (mode.n - 0.5) * std::numbers::pi));
  }
  const double elapsed = seconds_since(start);
  out.detail << "max residual " << worst_residual << ", max dispersion error "
             << worst_dispersion << ", max |k - (n-1/2)pi| " << worst_massless << ", "
             << elapsed << " s";
  out.require(worst_residual < 1e-12, "boundary residual");
  out.require(worst_dispersion < 1e-10, "dispersion");
  out.require(worst_massless < 1e-6, "small-mass limit");
  out.require(elapsed < 1.0, "runtime");
}

void orthonormality(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto c = cavity(1.0, 1.0);
  const auto modes = fl::solve_modes(c, 8);
  const Eigen::MatrixXd gram = fl::gram_matrix(modes, c);
  const double err = (gram - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff();
  const double elapsed = seconds_since(start);
  out.detail << gram.rows() << "x" << gram.cols() << " max |G - I| " << err << ", " << elapsed
             << " s";
  out.require(gram.rows() == 16 && err < 1e-8, "identity");
  out.require(elapsed < 5.0, "runtime");
}

void coupling_oracle(Outcome& out) {
  fl::testing::Draw draw(2024);
  double worst = 0.0;
  int comparisons = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double m = draw.uniform(0.0, 10.0);
    const double L = draw.uniform(0.5, 2.0);
    const double omega = draw.uniform(0.2, 20.0);
    const double T = draw.log_uniform(0.5, 50.0);
    const double x0 = draw.uniform(0.0, L);
    const auto c = cavity(L, m);
    const auto d = static_detector(c, omega, 0.01, T, x0, 0.0);
    for (const auto& mode : fl::solve_modes(c, 5)) {
      for (auto kind : {fl::CouplingKind::W, fl::CouplingKind::V}) {
        const auto exact = fl::closed_form_static(mode, d, kind, c);
        const auto quad = fl::compute_coupling(mode, d, kind, fl::SwitchingProfile::sharp(), c);
        worst = std::max(worst, std::abs(quad - exact) / std::abs(exact));
        ++comparisons;
      }
    }
  }
  out.detail << comparisons << " amplitudes over 50 draws, max relative error " << worst;
  out.require(worst < 1e-9, "relative error");
}

void resonance_dominance(Outcome& out) {
  const auto c = cavity(1.0, 1.0);
  const auto modes = fl::solve_modes(c, 10);
  const int B = 3;
  const double omega = modes[B - 1].omega;
  double worst_ratio = 0.0;
  double worst_cap = 0.0;  // max |V_n|^2 / cap
  for (double T : {1.0, 2.5, 5.0, 10.0, 20.0, 50.0, 100.0}) {
    const auto d1 = static_detector(c, omega, 0.01, T, 0.3, 0.0);
    const auto d2 = static_detector(c, omega, 0.01, 2.0 * T, 0.3, 0.0);
    const auto sharp = fl::SwitchingProfile::sharp();
    const double v1 = std::norm(fl::compute_coupling(modes[B - 1], d1, fl::CouplingKind::V, sharp, c));
    const double v2 = std::norm(fl::compute_coupling(modes[B - 1], d2, fl::CouplingKind::V, sharp, c));
    worst_ratio = std::max(worst_ratio, std::abs(v2 / v1 - 4.0));
    for (const auto& mode : modes) {
      if (mode.n == B) continue;
      const double detune = omega - mode.omega;
      const auto amp = fl::smear_amplitude(mode, fl::SpinorKind::antiparticle, 0.3, d1.eta, c);
      const double cap = 4.0 * std::norm(amp) / (detune * detune);
      const double v = std::norm(fl::compute_coupling(mode, d1, fl::CouplingKind::V, sharp, c));
      worst_cap = std::max(worst_cap, v / cap);
    }
  }
  out.detail << "max |ratio - 4| " << worst_ratio << ", max |V_n|^2 / cap " << worst_cap;
  out.require(worst_ratio < 1e-6, "quadrupling");
  out.require(worst_cap <= 1.0 + 1e-9, "off-resonant cap");
}

void vacuum_channel(Outcome& out) {
  fl::testing::Draw draw(77);
  double min_dQ = std::numeric_limits<double>::infinity();
  double worst_trace = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = cavity(draw.uniform(0.5, 2.0), draw.uniform(0.0, 5.0));
    const auto d = static_detector(c, draw.uniform(0.5, 10.0), 0.01, draw.uniform(1.0, 10.0),
                                   draw.uniform(0.0, c.L), draw.uniform(0.0, 1.0));
    const auto set = fl::compute_coupling_set(c, d, 40, fl::SwitchingProfile::sharp());
    const auto r = fl::apply_vacuum_channel(set, d);
    min_dQ = std::min(min_dQ, r.dQ);
    worst_trace = std::max(worst_trace, std::abs(r.field_diag->trace() - 1.0));
  }

  const auto c = cavity(1.0, 1.0);
  auto gap = [&](double lambda) {
    const auto d = static_detector(c, 1.0, lambda, 5.0, 0.3, 0.3);
    const auto r = fl::apply_vacuum_channel(
        fl::compute_coupling_set(c, d, 40, fl::SwitchingProfile::sharp()), d);
    return std::abs(r.dS_exact - *r.dS_linear) / (lambda * lambda);
  };
  const double factor = gap(0.02) / gap(0.01);
  out.detail << "min dQ " << min_dQ << ", max |tr - 1| " << worst_trace
             << ", entropy gap factor " << factor;
  out.require(min_dQ >= 0.0, "dQ >= 0");
  out.require(worst_trace < 1e-12, "field trace");
  out.require(factor >= 3.0, "linearization factor");
}

void thermal_channel(Outcome& out) {
  const auto c = cavity(1.0, 1.0);
  const auto modes = fl::solve_modes(c, 3);
  const auto base = static_detector(c, modes[0].omega, 0.01, 10.0, 0.3, 0.0);
  const auto resonance = fl::find_resonance(modes, base);
  const double w = resonance.omega_B;
  const auto V = fl::compute_coupling(modes[0], base, fl::CouplingKind::V,
                                      fl::SwitchingProfile::sharp(), c);

  fl::SweepAxis axis{"T", 0.1 * w, 10.0 * w, 20, true};
  const auto temps = axis.values();
  const auto rows = fl::thermal_sweep(V, base, resonance, temps, temps,
                                      fl::TemperatureConvention::gibbs);
  double worst_margin = 0.0;  // most negative margin / |dQ|
  int sign_mismatch = 0;
  double worst_diag = 0.0;
  for (const auto& row : rows) {
    const auto& r = row.result;
    if (r.dQ != 0.0) worst_margin = std::min(worst_margin, r.landauer_margin / std::abs(r.dQ));
    else if (r.landauer_margin < 0.0) worst_margin = -std::numeric_limits<double>::infinity();
    if (row.T_R == row.T_D) {
      worst_diag = std::max({worst_diag, std::abs(r.dQ), std::abs(r.dS_exact),
                             std::abs(r.dS_linear.value_or(0.0))});
    } else if ((r.dQ > 0.0) != (row.T_D > row.T_R) || r.dQ == 0.0) {
      ++sign_mismatch;
    }
  }

  auto d = base;
  d.p = 0.3;
  const auto cold = fl::apply_thermal_channel(fl::occupation_marginals(1e-8, w), V, d, resonance);
  const double lv = 1e-4 * std::norm(V);
  const double err_p = std::abs(cold.delta_p - (-lv * d.p)) / (lv * d.p);
  const double err_q = std::abs(cold.dQ - lv * w * d.p) / (lv * w * d.p);

  out.detail << rows.size() << " grid points, min margin/|dQ| " << worst_margin
             << ", sign mismatches " << sign_mismatch << ", max diagonal |dQ|,|dS| "
             << worst_diag << ", cold-field rel err " << std::max(err_p, err_q);
  out.require(rows.size() == 400, "grid size");
  out.require(worst_margin >= -1e-15, "Landauer margin");
  out.require(sign_mismatch == 0, "heat sign");
  out.require(worst_diag <= 1e-14, "diagonal");
  out.require(err_p < 1e-10 && err_q < 1e-10, "cold limit");
}

void oracle_equivalence(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  const double w = fl::solve_modes(cavity(1.0, 1.0), 1)[0].omega;
  const std::vector<double> lambdas{0.01, 0.005};
  for (double T_R : {0.0, w / std::log(2.0)}) {
    const auto setup = fl::testing::default_oracle(0.01, 0.0);
    const auto rows = fl::compare_with_perturbation(setup, T_R, lambdas, fl::testing::kDefaultOracleDt);
    const double rp = rows[0].rel_err_delta_p / rows[1].rel_err_delta_p;
    const double rq = rows[0].rel_err_dQ / rows[1].rel_err_dQ;
    const char* label = T_R == 0.0 ? "vacuum" : "thermal";
    out.detail << label << " ratios dp " << rp << " dQ " << rq << "; ";
    out.require(rp >= 3.0 && rp <= 5.0, std::string(label) + " delta_p ratio");
    out.require(rq >= 3.0 && rq <= 5.0, std::string(label) + " dQ ratio");
  }
  const double elapsed = seconds_since(start);
  out.detail << elapsed << " s";
  out.require(elapsed < 60.0, "runtime");
}

void oracle_integrity(Outcome& out) {
  const auto setup = fl::testing::default_oracle(0.01, 1.0);
  const auto modes = fl::solve_modes(setup.cavity, setup.space.n_modes());
  const auto init = fl::initial_state(setup.space, modes, 1.0, 0.0);
  const auto report = fl::dt_halving_report(setup, init, fl::testing::kDefaultOracleDt);
  const double trace_drift = std::abs(report.finest.rho.trace().real() - 1.0);
  const double purity_drift = std::abs(fl::purity(report.finest.rho) - 1.0);
  out.detail << "trace drift " << std::max(trace_drift, report.finest.trace_drift)
             << ", purity drift " << purity_drift << ", dt-halving contraction "
             << report.contraction;
  out.require(std::max(trace_drift, report.finest.trace_drift) < 1e-10, "trace");
  out.require(purity_drift < 1e-9, "purity");
  out.require(report.contraction >= 3.5 && report.contraction <= 4.5, "contraction");
}

void determinism(Outcome& out) {
  using Args = std::vector<std::string>;
  const std::vector<Args> runs{
      {"modes", "--mass", "1", "--n-max", "50"},
      {"vacuum", "--mass", "1", "--omega", "1", "--lambda", "0.01", "--T", "5", "--x0", "0.3",
       "--p", "0.3", "--n-max", "40"},
      {"thermal", "--mass", "1", "--resonant-mode", "1", "--lambda", "0.01", "--T", "10",
       "--x0", "0.3", "--t-field", "2", "--t-detector", "5"},
      {"oracle", "--mass", "1", "--resonant-mode", "1", "--lambda", "0.01", "--T", "5",
       "--x0", "0.3", "--p", "0.5", "--n-modes", "1", "--dt", "0.01"},
      {"sweep", "--axis", "x0=0.05:0.95:1", "--axis", "omega=0.5:8:1", "--random", "24",
       "--seed", "7", "--mass", "1", "--lambda", "0.01", "--T", "5", "--p", "0.3",
       "--n-max", "20"},
      {"sweep", "--axis", "lambda=0.001:0.02:4:log", "--axis", "x0=0.1:0.9:4", "--mass",
       "1", "--omega", "2", "--T", "5", "--p", "0.3", "--n-max", "20", "--format", "json"},
  };
  int compared = 0;
  for (const auto& args : runs) {
    const auto config = fl::parse_config(args);
    const auto a = fl::run_scenario(config);
    const auto b = fl::run_scenario(config);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].filename == b[i].filename && a[i].contents == b[i].contents;
      ++compared;
    }
    out.require(same, args.front() + " output differs");
  }
  out.detail << compared << " artifacts over " << runs.size() << " runs compared byte for byte";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"spectrum correctness", spectrum},
      {"orthonormality", orthonormality},
      {"coupling oracle", coupling_oracle},
      {"resonance dominance", resonance_dominance},
      {"vacuum channel", vacuum_channel},
      {"thermal channel", thermal_channel},
      {"oracle equivalence", oracle_equivalence},
      {"oracle integrity", oracle_integrity},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome outcome;
    outcome.detail.precision(3);
    const auto start = std::chrono::steady_clock::now();
    try {
      check(outcome);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << " [exception: " << e.what() << "]";
    }
    failed += outcome.pass ? 0 : 1;
    std::printf("criterion %d %-22s %s  %s (%.2f s)\n", index, name.c_str(),
                outcome.pass ? "PASS" : "FAIL", outcome.detail.str().c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failed;
}
