#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/vacuum_channel.hpp"

namespace fermi_landauer {

// Marginal occupation probabilities of the resonant mode B in a thermal
// field at temperature T_R = 1/beta. Every other mode sums out to 1.
struct ThermalOccupancy {
  double beta = 0.0;  // +inf at T_R = 0
  double omega_B = 0.0;
  double Z_B = 1.0;   // (1 + e^{-beta w})^2
  double P0 = 1.0;    // empty
  double P1 = 0.0;    // exactly the fermion slot (same for the antifermion)
  double P2 = 0.0;    // both slots
  // Mean occupation of a single slot, P1 + P2 = 1 / (e^{beta w} + 1).
  double slot_occupation = 0.0;

  double temperature() const;
};

// Fermi-Dirac weight 1 / (e^{energy / temperature} + 1); 0 at T = 0 and
// 1/2 at T = inf.
double fermi_occupation(double energy, double temperature);

// Throws DomainError for negative temperature or non-positive omega_B.
// T_R = +inf gives beta = 0.
ThermalOccupancy occupation_marginals(double T_R, double omega_B);

enum class TemperatureConvention {
  gibbs,  // excited population e^{-w/T}/(1 + e^{-w/T}) <= 1/2
  paper,  // e^{w/T}/(e^{w/T} + 1) >= 1/2, the inverted weight
};

double p_from_temperature(double T_D, double omega,
                          TemperatureConvention convention);

struct ResonanceSpec {
  int B = 0;
  double omega_B = 0.0;
  double detuning_check = 0.0;  // |Omega - w_B| T
};

// Mode closest in frequency to the detector gap.
ResonanceSpec find_resonance(std::span<const Mode> modes,
                             const DetectorConfig& detector);

inline constexpr double kMaxResonanceDetuning = 1e-6;

double landauer_margin(double dQ, double dS, double T_R);

// Resonance approximation with only V_B kept:
//   X = p P0 + (2p - 1) P1 - (1 - p) P2,
//   delta_p = -lambda^2 |V_B|^2 X, dQ = lambda^2 w_B |V_B|^2 X,
//   dS_lin = lambda^2 ln((1-p)/p) |V_B|^2 X,
// margin = dQ - T_R dS (dS_lin when defined, else dS_exact). Refuses to run
// when resonance.detuning_check >= kMaxResonanceDetuning unless
// `allow_detuned` is set.
ChannelResult apply_thermal_channel(const ThermalOccupancy& occupancy,
                                    Complex V_B, const DetectorConfig& detector,
                                    const ResonanceSpec& resonance,
                                    bool allow_detuned = false);

// Weight X of the resonant channel. Computed as p - (P1 + P2), which is the
// same polynomial once P0 + 2 P1 + P2 = 1 and vanishes exactly at
// equilibrium.
double resonant_weight(const ThermalOccupancy& occupancy, double p);

// Complete second-order channel for a thermal field over every mode of the
// coupling set (each slot occupied independently with the Fermi weight):
//   delta_p = lambda^2 sum [|W_n|^2 (1 - p - n_n) + |V_n|^2 (n_n - p)]
//   dQ      = lambda^2 sum w_n [|W_n|^2 (1 - p - n_n) + |V_n|^2 (p - n_n)]
// It reduces to the vacuum channel at T_R = 0 and to the resonance
// approximation when only V_B is kept. Used as the perturbative reference
// for the exact oracle.
ChannelResult thermal_second_order(const CouplingSet& couplings,
                                   const DetectorConfig& detector,
                                   double T_R);

struct ThermalSweepRow {
  double T_R = 0.0;
  double T_D = 0.0;
  double p = 0.0;
  ThermalOccupancy occupancy;
  double X = 0.0;
  ChannelResult result;
};

// Full grid in row-major order (T_R outer, T_D inner).
std::vector<ThermalSweepRow> thermal_sweep(
    Complex V_B, const DetectorConfig& detector, const ResonanceSpec& resonance,
    std::span<const double> field_temperatures,
    std::span<const double> detector_temperatures,
    TemperatureConvention convention, bool allow_detuned = false);

Table thermal_sweep_table(std::span<const ThermalSweepRow> rows);
// CSV columns T_R,T_D,p,P0,P1,P2,X,dQ,dS_linear,dS_exact,landauer_margin.
void write_thermal_sweep_csv(std::ostream& out,
                             std::span<const ThermalSweepRow> rows);

}  // namespace fermi_landauer
