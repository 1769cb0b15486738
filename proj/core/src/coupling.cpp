#include "fermi_landauer/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/quadrature.hpp"

namespace fermi_landauer {
namespace {

constexpr Complex kI{0.0, 1.0};

// Signed angular frequency of the phase factor e^{i nu t}.
double phase_frequency(const Mode& mode, double omega_gap, CouplingKind kind) {
  return kind == CouplingKind::W ? -(omega_gap + mode.omega)
                                 : (omega_gap - mode.omega);
}

SpinorKind spinor_kind(CouplingKind kind) {
  return kind == CouplingKind::W ? SpinorKind::particle
                                 : SpinorKind::antiparticle;
}

}  // namespace

Worldline Worldline::stationary(double x0, const CavityConfig& cavity) {
  if (!(x0 >= 0.0 && x0 <= cavity.L)) {
    throw DomainError("detector position x0 = " + format_number(x0) +
                      " lies outside [0, L]");
  }
  return Worldline(Kind::stationary, x0, 0.0, cavity.L);
}

Worldline Worldline::uniform(double x0, double velocity,
                             const CavityConfig& cavity, double duration) {
  if (!(std::abs(velocity) < 1.0)) {
    throw DomainError("detector velocity must satisfy |v| < 1");
  }
  if (!(duration > 0.0)) throw DomainError("interaction time must be positive");
  const double x_end = x0 + velocity * duration;
  if (!(x0 >= 0.0 && x0 <= cavity.L) || !(x_end >= 0.0 && x_end <= cavity.L)) {
    throw DomainError("worldline leaves the cavity: x(0) = " +
                      format_number(x0) + ", x(T) = " + format_number(x_end));
  }
  return Worldline(Kind::uniform, x0, velocity, cavity.L);
}

double Worldline::position(double t) const {
  if (kind_ == Kind::stationary) return x0_;
  return std::clamp(x0_ + velocity_ * t, 0.0, length_);
}

SwitchingProfile SwitchingProfile::cosine(double ramp_fraction) {
  if (!(ramp_fraction > 0.0 && ramp_fraction < 0.5)) {
    throw DomainError("cosine ramp fraction must lie in (0, 0.5)");
  }
  return {Kind::cosine_ramp, ramp_fraction};
}

double SwitchingProfile::operator()(double t, double duration) const {
  if (t < 0.0 || t > duration) return 0.0;
  if (kind == Kind::sharp) return 1.0;
  const double ramp = ramp_fraction * duration;
  const double edge = std::min(t, duration - t);
  if (edge >= ramp) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * edge / ramp));
}

double SwitchingProfile::bandwidth(double duration) const {
  if (kind == Kind::sharp) return 0.0;
  return std::numbers::pi / (ramp_fraction * duration);
}

Spinor normalize_spinor(const Spinor& eta) {
  const double norm = std::sqrt(std::norm(eta[0]) + std::norm(eta[1]));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("reference spinor eta must be non-zero and finite");
  }
  return {eta[0] / norm, eta[1] / norm};
}

DetectorConfig DetectorConfig::make(double omega_gap, double lambda,
                                    double duration, Worldline worldline,
                                    Spinor eta, double p) {
  if (!(omega_gap > 0.0) || !std::isfinite(omega_gap)) {
    throw DomainError("detector gap Omega must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("coupling lambda must be non-negative");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw DomainError("interaction time T must be positive");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("initial population p must lie in [0, 1]");
  }
  DetectorConfig config;
  config.omega_gap = omega_gap;
  config.lambda = lambda;
  config.duration = duration;
  config.worldline = worldline;
  config.eta = normalize_spinor(eta);
  config.p = p;
  return config;
}

Complex smear_amplitude(const Mode& mode, SpinorKind kind, double x,
                        const Spinor& eta, const CavityConfig& cavity) {
  const SpinorValue psi = eval_mode_spinor(mode, kind, x, cavity);
  // gamma^0 = sigma_1 swaps the two components.
  if (kind == SpinorKind::particle) {
    return std::conj(eta[0]) * psi.lower + std::conj(eta[1]) * psi.upper;
  }
  return std::conj(psi.upper) * eta[1] + std::conj(psi.lower) * eta[0];
}

Complex compute_coupling(const Mode& mode, const DetectorConfig& detector,
                         CouplingKind kind, const SwitchingProfile& switching,
                         const CavityConfig& cavity) {
  const double nu = phase_frequency(mode, detector.omega_gap, kind);
  const double T = detector.duration;
  const SpinorKind sk = spinor_kind(kind);

  // Fastest oscillation in the integrand: the phase, the spatial factor
  // sampled along the trajectory, and the switching edges.
  const double spatial = mode.k * std::abs(detector.worldline.velocity());
  const double fastest = std::abs(nu) + spatial + switching.bandwidth(T);

  const double bound =
      mode.norm * (mode.omega / mode.k + 1.0 + cavity.mass / mode.k);
  const double slow = std::abs(nu) > 0.0 ? std::min(T, 2.0 / std::abs(nu)) : T;

  QuadratureOptions options;
  options.abs_tol = cavity.quad_tol * bound * slow;
  // Phases nu t lose about eps |nu t| of accuracy near the end of the run.
  options.rounding =
      std::numeric_limits<double>::epsilon() * (1.0 + (std::abs(nu) + spatial) * T);
  options.max_panel =
      fastest > 0.0 ? (2.0 * std::numbers::pi / fastest) / 8.0 : 0.0;

  if (detector.worldline.kind() == Worldline::Kind::stationary) {
    // Spatial factor is constant; integrate the unit-modulus phase alone.
    options.abs_tol = cavity.quad_tol * slow;
    const Complex amplitude = smear_amplitude(
        mode, sk, detector.worldline.x0(), detector.eta, cavity);
    return amplitude * integrate_complex(
                           [&](double t) { return std::polar(switching(t, T), nu * t); },
                           0.0, T, options);
  }
  return integrate_complex(
      [&](double t) {
        const double x = detector.worldline.position(t);
        return std::polar(switching(t, T), nu * t) *
               smear_amplitude(mode, sk, x, detector.eta, cavity);
      },
      0.0, T, options);
}

Complex closed_form_static(const Mode& mode, const DetectorConfig& detector,
                           CouplingKind kind, const CavityConfig& cavity) {
  const double T = detector.duration;
  const Complex amplitude = smear_amplitude(
      mode, spinor_kind(kind), detector.worldline.x0(), detector.eta, cavity);
  if (kind == CouplingKind::W) {
    const double nu = detector.omega_gap + mode.omega;
    return amplitude * (1.0 - std::polar(1.0, -nu * T)) / (kI * nu);
  }
  const double nu = detector.omega_gap - mode.omega;
  if (std::abs(nu) * T < kResonanceThreshold) return amplitude * T;
  return amplitude * (std::polar(1.0, nu * T) - 1.0) / (kI * nu);
}

double tail_share(const CouplingSet& set) {
  const std::size_t n = set.modes.size();
  const std::size_t tail = (n + 4) / 5;
  double total = 0.0;
  double tail_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double term =
        (std::norm(set.W[i]) + std::norm(set.V[i])) * set.modes[i].omega;
    total += term;
    if (i >= n - tail) tail_sum += term;
  }
  return total > 0.0 ? tail_sum / total : 0.0;
}

CouplingSet compute_coupling_set(const CavityConfig& cavity,
                                 const DetectorConfig& detector, int n_max,
                                 const SwitchingProfile& switching) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  CouplingSet set;
  set.modes = solve_modes(cavity, n_max);
  set.n_max = n_max;
  set.W.reserve(set.modes.size());
  set.V.reserve(set.modes.size());
  for (const auto& mode : set.modes) {
    set.W.push_back(
        compute_coupling(mode, detector, CouplingKind::W, switching, cavity));
    set.V.push_back(
        compute_coupling(mode, detector, CouplingKind::V, switching, cavity));
  }

  set.tail_estimate = tail_share(set);
  return set;
}

Table coupling_table(const CouplingSet& set) {
  Table table{{"n", "re_W", "im_W", "re_V", "im_V", "abs_W2", "abs_V2"}, {}};
  for (std::size_t i = 0; i < set.modes.size(); ++i) {
    table.rows.push_back(
        {std::to_string(set.modes[i].n), format_number(set.W[i].real()),
         format_number(set.W[i].imag()), format_number(set.V[i].real()),
         format_number(set.V[i].imag()), format_number(std::norm(set.W[i])),
         format_number(std::norm(set.V[i]))});
  }
  return table;
}

void write_coupling_csv(std::ostream& out, const CouplingSet& set) {
  render_csv(out, coupling_table(set));
}

}  // namespace fermi_landauer
