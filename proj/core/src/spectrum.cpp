#include "fermi_landauer/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/quadrature.hpp"

namespace fermi_landauer {
namespace {

constexpr int kBisectionCap = 400;

double bisect_mode(const CavityConfig& cavity, int n) {
  const double pi = std::numbers::pi;
  double lo = (n - 0.5) * pi / cavity.L;
  double hi = n * pi / cavity.L;
  double r_lo = boundary_residual(lo, cavity);
  double r_hi = boundary_residual(hi, cavity);
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;
  if (std::signbit(r_lo) == std::signbit(r_hi)) {
    throw NumericalFailure("no sign change of the boundary residual in bracket " +
                           std::to_string(n));
  }
  // Bisect down to adjacent doubles; the bracket endpoint with the smaller
  // residual is the root.
  for (int it = 0; it < kBisectionCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      const double k = std::abs(r_lo) <= std::abs(r_hi) ? lo : hi;
      const double r = std::min(std::abs(r_lo), std::abs(r_hi));
      if (r > cavity.root_tol) {
        throw NumericalFailure("mode " + std::to_string(n) +
                               ": residual stalled at " + format_number(r) +
                               " above root_tol");
      }
      return k;
    }
    const double r_mid = boundary_residual(mid, cavity);
    if (r_mid == 0.0) return mid;
    if (std::signbit(r_mid) == std::signbit(r_lo)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
      r_hi = r_mid;
    }
  }
  throw NumericalFailure("mode " + std::to_string(n) +
                         ": bisection exceeded its iteration cap");
}

}  // namespace

void CavityConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw DomainError("cavity length L must be positive and finite");
  }
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw DomainError("mass must be non-negative and finite");
  }
  if (!(root_tol > 0.0) || !(quad_tol > 0.0)) {
    throw DomainError("root_tol and quad_tol must be positive");
  }
}

double boundary_residual(double k, const CavityConfig& cavity) {
  return (cavity.mass / k) * std::sin(k * cavity.L) + std::cos(k * cavity.L);
}

double mode_norm(double k, const CavityConfig& cavity) {
  const double m = cavity.mass;
  const double w2 = k * k + m * m;
  const double s = std::sin(k * cavity.L);
  return std::numbers::sqrt2 * k * k /
         std::sqrt(k * k * (m + 2.0 * cavity.L * w2) + m * w2 * s * s);
}

std::vector<Mode> solve_modes(const CavityConfig& cavity, int count) {
  cavity.validate();
  if (count < 1) throw DomainError("mode count must be at least 1");

  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    Mode mode;
    mode.n = n;
    mode.k = cavity.mass == 0.0 ? (n - 0.5) * std::numbers::pi / cavity.L
                                : bisect_mode(cavity, n);
    mode.omega = std::sqrt(mode.k * mode.k + cavity.mass * cavity.mass);
    mode.norm = mode_norm(mode.k, cavity);
    modes.push_back(mode);
  }
  return modes;
}

SpinorValue eval_mode_spinor(const Mode& mode, SpinorKind kind, double x,
                             const CavityConfig& cavity) {
  if (!(x >= 0.0 && x <= cavity.L)) {
    throw DomainError("position " + format_number(x) + " lies outside [0, L]");
  }
  const double s = std::sin(mode.k * x);
  const double c = std::cos(mode.k * x);
  const double upper = mode.norm * (mode.omega / mode.k) * s;
  const double lower = mode.norm * (c + (cavity.mass / mode.k) * s);
  return {kind == SpinorKind::particle ? upper : -upper, lower};
}

Eigen::MatrixXd gram_matrix(std::span<const Mode> modes,
                            const CavityConfig& cavity) {
  cavity.validate();
  const auto n = static_cast<Eigen::Index>(modes.size());
  const Eigen::Index dim = 2 * n;

  double k_max = 0.0;
  for (const auto& m : modes) k_max = std::max(k_max, m.k);
  QuadratureOptions options;
  options.abs_tol = cavity.quad_tol;
  // Eight panels per shortest product wavelength.
  options.max_panel =
      k_max > 0.0 ? (2.0 * std::numbers::pi / (2.0 * k_max)) / 8.0 : 0.0;

  auto entry = [&](Eigen::Index i) {
    const auto& mode = modes[static_cast<std::size_t>(i % n)];
    const auto kind = i < n ? SpinorKind::particle : SpinorKind::antiparticle;
    return std::pair{mode, kind};
  };

  Eigen::MatrixXd gram(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a; b < dim; ++b) {
      const auto [mode_a, kind_a] = entry(a);
      const auto [mode_b, kind_b] = entry(b);
      const double value = integrate(
          [&](double x) {
            const auto pa = eval_mode_spinor(mode_a, kind_a, x, cavity);
            const auto pb = eval_mode_spinor(mode_b, kind_b, x, cavity);
            return std::real(std::conj(pa.upper) * pb.upper +
                             std::conj(pa.lower) * pb.lower);
          },
          0.0, cavity.L, options);
      gram(a, b) = value;
      gram(b, a) = value;
    }
  }
  return gram;
}

Table mode_table(std::span<const Mode> modes) {
  Table table{{"n", "k", "omega", "norm"}, {}};
  for (const auto& m : modes) {
    table.rows.push_back({std::to_string(m.n), format_number(m.k),
                          format_number(m.omega), format_number(m.norm)});
  }
  return table;
}

void write_mode_table_csv(std::ostream& out, std::span<const Mode> modes) {
  render_csv(out, mode_table(modes));
}

}  // namespace fermi_landauer
