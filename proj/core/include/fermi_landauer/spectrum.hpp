#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fermi_landauer/emit.hpp"

namespace fermi_landauer {

// A 1+1D cavity of length L bounded by bag walls at x = 0 and x = L.
// Natural units; the metric signature is (+, -) and gamma^0 = sigma_1,
// gamma^1 = sigma_3.
struct CavityConfig {
  double L = 1.0;
  double mass = 0.0;
  double root_tol = 1e-12;
  double quad_tol = 1e-10;

  // Throws DomainError if any invariant (L > 0, m >= 0, tolerances > 0)
  // is violated.
  void validate() const;
};

struct Mode {
  int n = 0;          // 1-based
  double k = 0.0;     // wavenumber
  double omega = 0.0; // sqrt(k^2 + m^2)
  double norm = 0.0;  // N_n
};

enum class SpinorKind { particle, antiparticle };

struct SpinorValue {
  std::complex<double> upper;
  std::complex<double> lower;
};

// (m/k) sin(kL) + cos(kL); zero exactly on the cavity spectrum.
double boundary_residual(double k, const CavityConfig& cavity);

// Normalization of the mode spinors,
//   N = sqrt(2) k^2 [k^2 (m + 2 L w^2) + m w^2 sin^2(kL)]^(-1/2),
// evaluated literally (it reduces to 1/sqrt(L) at m = 0).
double mode_norm(double k, const CavityConfig& cavity);

// Modes n = 1..count. The massless spectrum is taken analytically,
// k_n = (n - 1/2) pi / L; otherwise each root is bisected inside
// ((n - 1/2) pi / L, n pi / L), where the residual changes sign.
std::vector<Mode> solve_modes(const CavityConfig& cavity, int count);

// f_n(x) = N (w/k sin kx, cos kx + m/k sin kx); h_n flips the upper sign.
SpinorValue eval_mode_spinor(const Mode& mode, SpinorKind kind, double x,
                             const CavityConfig& cavity);

// Overlaps <psi_a|psi_b> over the combined list {f_1..f_N, h_1..h_N}.
Eigen::MatrixXd gram_matrix(std::span<const Mode> modes,
                            const CavityConfig& cavity);

Table mode_table(std::span<const Mode> modes);
// CSV columns n,k,omega,norm.
void write_mode_table_csv(std::ostream& out, std::span<const Mode> modes);

}  // namespace fermi_landauer
