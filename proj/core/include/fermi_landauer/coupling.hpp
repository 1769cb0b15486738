#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <vector>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/spectrum.hpp"

namespace fermi_landauer {

using Complex = std::complex<double>;
using Spinor = std::array<Complex, 2>;

// Straight-line detector trajectory x(t) = x0 + v t. Construction checks the
// path stays inside [0, L] for the whole interaction window, so integration
// never meets an out-of-cavity point.
class Worldline {
 public:
  enum class Kind { stationary, uniform };

  static Worldline stationary(double x0, const CavityConfig& cavity);
  static Worldline uniform(double x0, double velocity,
                           const CavityConfig& cavity, double duration);

  Kind kind() const noexcept { return kind_; }
  double x0() const noexcept { return x0_; }
  double velocity() const noexcept { return velocity_; }
  double position(double t) const;

 private:
  Worldline(Kind kind, double x0, double velocity, double length)
      : kind_(kind), x0_(x0), velocity_(velocity), length_(length) {}

  Kind kind_;
  double x0_;
  double velocity_;
  double length_;
};

// chi(t) on [0, T]. The sharp profile is the unit step; the cosine ramp
// rises as (1 - cos)/2 over the first r T and falls symmetrically over the
// last r T.
struct SwitchingProfile {
  enum class Kind { sharp, cosine_ramp };
  Kind kind = Kind::sharp;
  double ramp_fraction = 0.0;

  static SwitchingProfile sharp() { return {}; }
  static SwitchingProfile cosine(double ramp_fraction);

  double operator()(double t, double duration) const;
  // Highest angular frequency the profile itself introduces.
  double bandwidth(double duration) const;
};

struct DetectorConfig {
  double omega_gap = 1.0;  // Omega
  double lambda = 0.0;
  double duration = 1.0;   // T
  Worldline worldline = Worldline::stationary(0.0, CavityConfig{});
  Spinor eta{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
  double p = 0.0;          // initial excited-state population

  // Normalizes eta and checks every invariant against the cavity.
  static DetectorConfig make(double omega_gap, double lambda, double duration,
                             Worldline worldline, Spinor eta, double p);
};

// Normalizes a reference spinor; throws DomainError for the zero spinor.
Spinor normalize_spinor(const Spinor& eta);

enum class CouplingKind { W, V };

// bar(eta) f_n(x) = eta^dagger gamma^0 f_n(x) for particles;
// bar(h_n)(x) eta = h_n(x)^dagger gamma^0 eta for antiparticles.
Complex smear_amplitude(const Mode& mode, SpinorKind kind, double x,
                        const Spinor& eta, const CavityConfig& cavity);

// W_n = int_0^T e^{-i(Omega + w_n)t} chi(t) bar(eta) f_n(x(t)) dt
// V_n = int_0^T e^{+i(Omega - w_n)t} chi(t) bar(h_n)(x(t)) eta dt
Complex compute_coupling(const Mode& mode, const DetectorConfig& detector,
                         CouplingKind kind, const SwitchingProfile& switching,
                         const CavityConfig& cavity);

// Below this value of |Omega - w_n| T the V integral is replaced by its
// resonant limit amplitude * T.
inline constexpr double kResonanceThreshold = 1e-8;

// Analytic W_n / V_n for a stationary detector with sharp switching.
Complex closed_form_static(const Mode& mode, const DetectorConfig& detector,
                           CouplingKind kind, const CavityConfig& cavity);

struct CouplingSet {
  std::vector<Mode> modes;
  std::vector<Complex> W;
  std::vector<Complex> V;
  int n_max = 0;
  // Share of sum_n (|W_n|^2 + |V_n|^2) w_n carried by the last
  // ceil(n_max / 5) modes.
  double tail_estimate = 0.0;
};

// Recomputes CouplingSet::tail_estimate from its modes and amplitudes.
double tail_share(const CouplingSet& set);

CouplingSet compute_coupling_set(const CavityConfig& cavity,
                                 const DetectorConfig& detector, int n_max,
                                 const SwitchingProfile& switching);

Table coupling_table(const CouplingSet& set);
// CSV columns n,re_W,im_W,re_V,im_V,abs_W2,abs_V2.
void write_coupling_csv(std::ostream& out, const CouplingSet& set);

}  // namespace fermi_landauer
