#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/emit.hpp"

namespace fermi_landauer {

// Detector qubit tensored with the Fock space of the first n_modes cavity
// modes, each mode contributing a fermion slot and an antifermion slot.
// Basis index bits: slot j (ordered b_1, d_1, b_2, d_2, ...) is bit j and
// the detector level (1 = excited) is the most significant bit.
class TruncatedSpace {
 public:
  static constexpr int kMaxModes = 3;

  explicit TruncatedSpace(int n_modes);

  int n_modes() const noexcept { return n_modes_; }
  int n_slots() const noexcept { return 2 * n_modes_; }
  int dim() const noexcept { return 2 << n_slots(); }
  static int fermion_slot(int mode_index) { return 2 * mode_index; }
  static int antifermion_slot(int mode_index) { return 2 * mode_index + 1; }
  bool excited(int basis_index) const {
    return ((basis_index >> n_slots()) & 1) != 0;
  }
  bool occupied(int basis_index, int slot) const {
    return ((basis_index >> slot) & 1) != 0;
  }

 private:
  int n_modes_;
};

// Dense matrices on the full space. Field ladder operators carry a parity
// string over the preceding slots so every pair anticommutes; detector
// operators act on the leading factor and commute with them.
struct OperatorSet {
  std::vector<Eigen::MatrixXd> b;  // fermion annihilators, one per mode
  std::vector<Eigen::MatrixXd> d;  // antifermion annihilators
  Eigen::MatrixXd sigma_plus;      // |+><-| on the detector
  Eigen::MatrixXd sigma_minus;
  Eigen::MatrixXd sigma_z;
};

OperatorSet build_operators(const TruncatedSpace& space);

enum class InteractionTerms {
  all,
  // Only sigma_+ d_n + h.c., the terms that conserve excitation energy at
  // resonance.
  rotating_only,
};

struct OracleSetup {
  TruncatedSpace space{1};
  CavityConfig cavity;
  DetectorConfig detector;
  SwitchingProfile switching;
  InteractionTerms terms = InteractionTerms::all;
};

// H_int(t) = lambda chi(t) [ e^{i Omega t} sigma_+ sum_n ( e^{i w_n t}
//   conj(bar(eta) f_n) b_n^dag + e^{-i w_n t} (bar(h_n) eta) d_n ) + h.c. ]
// evaluated on x(t), with `modes` the first n_modes cavity modes.
Eigen::MatrixXcd interaction_hamiltonian(const OracleSetup& setup,
                                         const OperatorSet& ops,
                                         std::span<const Mode> modes,
                                         double t);

struct OracleState {
  Eigen::MatrixXcd rho;
  double time = 0.0;
  long steps = 0;
  // Largest deviations seen before any restoration.
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
  bool restored = false;
};

// Diagonal product state: detector excited with probability p, every field
// slot occupied with its Fermi weight at T_R (vacuum when T_R = 0).
OracleState initial_state(const TruncatedSpace& space,
                          std::span<const Mode> modes, double p, double T_R);

struct Propagator {
  Eigen::MatrixXcd U;
  double dt = 0.0;
  long steps = 0;
};

inline constexpr long kMaxOracleSteps = 10'000'000;

// Ordered product of midpoint step propagators exp(-i H(t_k + dt/2) dt),
// each from a Hermitian eigendecomposition. dt is shrunk so that an integer
// number of steps covers [0, T] exactly.
Propagator build_propagator(const OracleSetup& setup, double dt);

// rho(T) = U rho(0) U^dag. Trace or Hermiticity drift above 1e-12 is
// repaired (and recorded); drift beyond 1e-8 or an eigenvalue below -1e-10
// raises NumericalFailure.
OracleState evolve_exact(const Propagator& propagator,
                         const OracleState& initial);
OracleState evolve_exact(const OracleSetup& setup, const OracleState& initial,
                         double dt);

struct OracleMeasurement {
  double delta_p = 0.0;
  double dQ = 0.0;  // tr[H_f (rho_T - rho_0)]
  double dS = 0.0;  // S(rho_D(0)) - S(rho_D(T))
};

// 2x2 reduced detector state (basis |->, |+>).
Eigen::Matrix2cd reduced_detector(const TruncatedSpace& space,
                                  const Eigen::MatrixXcd& rho);
double von_neumann_entropy(const Eigen::MatrixXcd& rho);
double trace_norm(const Eigen::MatrixXcd& a);
double purity(const Eigen::MatrixXcd& rho);

OracleMeasurement measure_channel(const OracleState& initial,
                                  const OracleState& final_state,
                                  const TruncatedSpace& space,
                                  std::span<const Mode> modes);

struct DtHalvingReport {
  double dt = 0.0;
  double coarse_difference = 0.0;  // ||rho_dt - rho_{dt/2}||_1
  double fine_difference = 0.0;    // ||rho_{dt/2} - rho_{dt/4}||_1
  double contraction = 0.0;        // coarse / fine, ~4 for a second-order rule
  OracleState finest;
};

DtHalvingReport dt_halving_report(const OracleSetup& setup,
                                  const OracleState& initial, double dt);

struct OracleComparisonRow {
  double lambda = 0.0;
  double dt = 0.0;
  OracleMeasurement exact;
  double delta_p_pert = 0.0;
  double dQ_pert = 0.0;
  double dS_pert = 0.0;
  double rel_err_delta_p = 0.0;
  double rel_err_dQ = 0.0;
};

// Exact evolution against the complete second-order channel truncated to
// the same modes, for each coupling in `lambdas`.
std::vector<OracleComparisonRow> compare_with_perturbation(
    const OracleSetup& setup, double T_R, std::span<const double> lambdas,
    double dt);

Table oracle_table(std::span<const OracleComparisonRow> rows);
// CSV columns lambda,dt,delta_p_exact,delta_p_pert,dQ_exact,dQ_pert,
// dS_exact,dS_pert,rel_err_delta_p,rel_err_dQ.
void write_oracle_csv(std::ostream& out,
                      std::span<const OracleComparisonRow> rows);

}  // namespace fermi_landauer
