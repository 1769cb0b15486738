#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/emit.hpp"

namespace fermi_landauer {

struct ModeContribution {
  int n = 0;
  double dQ = 0.0;
  std::optional<double> dS;  // linearized; undefined for p in {0, 1}
};

// Diagonal of the field state after the interaction, to order lambda^2.
struct FieldDiagonal {
  double vacuum = 1.0;
  std::vector<double> fermion;      // one fermion in mode n
  std::vector<double> antifermion;  // one antifermion in mode n

  double trace() const;
};

struct ChannelResult {
  double delta_p = 0.0;
  double dQ = 0.0;
  std::optional<double> dS_linear;
  double dS_exact = 0.0;
  double landauer_margin = 0.0;
  std::vector<ModeContribution> per_mode;
  // Populated by the vacuum channel only.
  std::optional<FieldDiagonal> field_diag;
};

// -q ln q - (1 - q) ln(1 - q), with 0 ln 0 = 0.
double binary_entropy(double q);

// Second-order transition probabilities lambda^2 sum |W_n|^2 and
// lambda^2 sum |V_n|^2 above this trigger PerturbationBreakdown.
inline constexpr double kMaxTransitionProbability = 0.1;

// Vacuum field, diagonal detector state with excited population p:
//   delta_p = lambda^2 sum [(1-p)|W_n|^2 - p|V_n|^2]
//   dQ      = lambda^2 sum [(1-p)|W_n|^2 + p|V_n|^2] w_n
//   dS_lin  = lambda^2 ln((1-p)/p) sum [p|V_n|^2 - (1-p)|W_n|^2]
//   dS_exact = S2(p) - S2(p + delta_p)
// The field is at zero temperature so the Landauer margin is dQ itself.
ChannelResult apply_vacuum_channel(const CouplingSet& couplings,
                                   const DetectorConfig& detector);

// First n modes of a coupling set, with the tail estimate recomputed.
CouplingSet truncate(const CouplingSet& couplings, int n_max);

struct ConvergenceRow {
  int n_max = 0;
  double dQ = 0.0;
  double delta_p = 0.0;
  double tail_estimate = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Least-squares slope of log(block-averaged dQ_n) against log(w_n) over
  // the upper half of the largest truncation; about -1 under sharp
  // switching. Informational only.
  std::optional<double> decay_exponent;
};

ConvergenceReport convergence_report(const CavityConfig& cavity,
                                     const DetectorConfig& detector,
                                     const SwitchingProfile& switching,
                                     const std::vector<int>& n_max_list);

ConvergenceReport convergence_report(const CouplingSet& couplings,
                                     const DetectorConfig& detector,
                                     const std::vector<int>& n_max_list);

Table vacuum_mode_table(const CouplingSet& couplings,
                        const DetectorConfig& detector);
// CSV columns n,abs_W2,abs_V2,dQ_n,cum_dQ,cum_delta_p.
void write_vacuum_modes_csv(std::ostream& out, const CouplingSet& couplings,
                            const DetectorConfig& detector);

}  // namespace fermi_landauer
