#include "fermi_landauer/exact_oracle.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/thermal_channel.hpp"

namespace fermi_landauer {
namespace {

constexpr double kRepairThreshold = 1e-12;
constexpr double kFailThreshold = 1e-8;
constexpr double kNegativeEigenvalueFloor = -1e-10;

Eigen::MatrixXd annihilator(const TruncatedSpace& space, int slot) {
  const int dim = space.dim();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim, dim);
  const unsigned below = (1u << slot) - 1u;
  for (int s = 0; s < dim; ++s) {
    if (!space.occupied(s, slot)) continue;
    const int parity = std::popcount(static_cast<unsigned>(s) & below) & 1;
    c(s ^ (1 << slot), s) = parity ? -1.0 : 1.0;
  }
  return c;
}

double relative_error(double exact, double approx) {
  const double scale = std::abs(exact);
  return scale > 0.0 ? std::abs(exact - approx) / scale
                     : std::abs(exact - approx);
}

}  // namespace

TruncatedSpace::TruncatedSpace(int n_modes) : n_modes_(n_modes) {
  if (n_modes < 1 || n_modes > kMaxModes) {
    throw DomainError("oracle supports 1 to 3 modes, got " +
                      std::to_string(n_modes));
  }
}

OperatorSet build_operators(const TruncatedSpace& space) {
  OperatorSet ops;
  for (int n = 0; n < space.n_modes(); ++n) {
    ops.b.push_back(annihilator(space, TruncatedSpace::fermion_slot(n)));
    ops.d.push_back(annihilator(space, TruncatedSpace::antifermion_slot(n)));
  }
  const int dim = space.dim();
  const int half = dim / 2;
  ops.sigma_plus = Eigen::MatrixXd::Zero(dim, dim);
  ops.sigma_z = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < half; ++s) {
    ops.sigma_plus(s + half, s) = 1.0;
    ops.sigma_z(s, s) = -1.0;
    ops.sigma_z(s + half, s + half) = 1.0;
  }
  ops.sigma_minus = ops.sigma_plus.transpose();
  return ops;
}

namespace {

// sigma_+ b_n^dag and sigma_+ d_n, formed once so that each time step is a
// linear combination instead of a chain of dense products.
struct RaisingTerms {
  std::vector<Eigen::MatrixXcd> with_b_dag;
  std::vector<Eigen::MatrixXcd> with_d;
};

RaisingTerms raising_terms(const OperatorSet& ops) {
  RaisingTerms terms;
  for (std::size_t n = 0; n < ops.b.size(); ++n) {
    terms.with_b_dag.push_back((ops.sigma_plus * ops.b[n].transpose()).cast<Complex>());
    terms.with_d.push_back((ops.sigma_plus * ops.d[n]).cast<Complex>());
  }
  return terms;
}

void assemble_hamiltonian(const OracleSetup& setup, const RaisingTerms& terms,
                          std::span<const Mode> modes, double t,
                          Eigen::MatrixXcd& H) {
  const int dim = setup.space.dim();
  H.setZero(dim, dim);
  const DetectorConfig& det = setup.detector;
  const double chi = setup.switching(t, det.duration);
  if (chi == 0.0 || det.lambda == 0.0) return;

  const double x = det.worldline.position(t);
  const Complex scale = det.lambda * chi * std::polar(1.0, det.omega_gap * t);
  for (int n = 0; n < setup.space.n_modes(); ++n) {
    const Mode& mode = modes[static_cast<std::size_t>(n)];
    const auto idx = static_cast<std::size_t>(n);
    if (setup.terms == InteractionTerms::all) {
      const Complex a =
          smear_amplitude(mode, SpinorKind::particle, x, det.eta, setup.cavity);
      H += (scale * std::polar(1.0, mode.omega * t) * std::conj(a)) *
           terms.with_b_dag[idx];
    }
    const Complex b = smear_amplitude(mode, SpinorKind::antiparticle, x,
                                      det.eta, setup.cavity);
    H += (scale * std::polar(1.0, -mode.omega * t) * b) * terms.with_d[idx];
  }
  H += H.adjoint().eval();
}

}  // namespace

Eigen::MatrixXcd interaction_hamiltonian(const OracleSetup& setup,
                                         const OperatorSet& ops,
                                         std::span<const Mode> modes,
                                         double t) {
  Eigen::MatrixXcd H;
  assemble_hamiltonian(setup, raising_terms(ops), modes, t, H);
  return H;
}

OracleState initial_state(const TruncatedSpace& space,
                          std::span<const Mode> modes, double p, double T_R) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
  if (static_cast<int>(modes.size()) < space.n_modes()) {
    throw DomainError("not enough modes for the truncated space");
  }
  std::vector<double> slot_occ(static_cast<std::size_t>(space.n_slots()));
  for (int n = 0; n < space.n_modes(); ++n) {
    const double occ =
        fermi_occupation(modes[static_cast<std::size_t>(n)].omega, T_R);
    slot_occ[static_cast<std::size_t>(TruncatedSpace::fermion_slot(n))] = occ;
    slot_occ[static_cast<std::size_t>(TruncatedSpace::antifermion_slot(n))] =
        occ;
  }
  const int dim = space.dim();
  OracleState state;
  state.rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    double weight = space.excited(s) ? p : 1.0 - p;
    for (int slot = 0; slot < space.n_slots(); ++slot) {
      const double occ = slot_occ[static_cast<std::size_t>(slot)];
      weight *= space.occupied(s, slot) ? occ : 1.0 - occ;
    }
    state.rho(s, s) = weight;
  }
  return state;
}

Propagator build_propagator(const OracleSetup& setup, double dt) {
  const double T = setup.detector.duration;
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double raw_steps = std::ceil(T / dt - 1e-9);
  if (raw_steps > static_cast<double>(kMaxOracleSteps)) {
    throw NumericalFailure("oracle step count " + format_number(raw_steps) +
                           " exceeds the cap of 1e7");
  }
  Propagator prop;
  prop.steps = std::max(1L, static_cast<long>(raw_steps));
  prop.dt = T / static_cast<double>(prop.steps);

  const OperatorSet ops = build_operators(setup.space);
  const std::vector<Mode> modes =
      solve_modes(setup.cavity, setup.space.n_modes());
  const int dim = setup.space.dim();
  prop.U = Eigen::MatrixXcd::Identity(dim, dim);
  const RaisingTerms terms = raising_terms(ops);
  Eigen::MatrixXcd H(dim, dim);
  Eigen::MatrixXcd step(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dim);
  Eigen::VectorXcd phases(dim);
  for (long k = 0; k < prop.steps; ++k) {
    const double t_mid = (static_cast<double>(k) + 0.5) * prop.dt;
    assemble_hamiltonian(setup, terms, modes, t_mid, H);
    eig.compute(H);
    if (eig.info() != Eigen::Success) {
      throw NumericalFailure("eigendecomposition failed at step " +
                             std::to_string(k));
    }
    const auto& values = eig.eigenvalues();
    for (int i = 0; i < dim; ++i) {
      phases(i) = std::polar(1.0, -values(i) * prop.dt);
    }
    const Eigen::MatrixXcd& V = eig.eigenvectors();
    step.noalias() = V * phases.asDiagonal() * V.adjoint();
    prop.U = (step * prop.U).eval();
  }
  return prop;
}

OracleState evolve_exact(const Propagator& propagator,
                         const OracleState& initial) {
  OracleState out;
  out.rho = propagator.U * initial.rho * propagator.U.adjoint();
  out.time = initial.time + propagator.dt * static_cast<double>(propagator.steps);
  out.steps = initial.steps + propagator.steps;

  const Complex trace = out.rho.trace();
  out.trace_drift = std::abs(trace - Complex{initial.rho.trace()});
  out.hermiticity_drift = (out.rho - out.rho.adjoint()).cwiseAbs().maxCoeff();
  if (out.trace_drift > kFailThreshold || out.hermiticity_drift > kFailThreshold) {
    throw NumericalFailure("oracle state drifted beyond 1e-8 (trace " +
                           format_number(out.trace_drift) + ", hermiticity " +
                           format_number(out.hermiticity_drift) + ")");
  }
  if (out.trace_drift > kRepairThreshold ||
      out.hermiticity_drift > kRepairThreshold) {
    out.rho = (0.5 * (out.rho + out.rho.adjoint())).eval();
    out.rho /= out.rho.trace().real();
    out.restored = true;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(out.rho,
                                                      Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < kNegativeEigenvalueFloor) {
    throw NumericalFailure("oracle state lost positivity");
  }
  return out;
}

OracleState evolve_exact(const OracleSetup& setup, const OracleState& initial,
                         double dt) {
  return evolve_exact(build_propagator(setup, dt), initial);
}

Eigen::Matrix2cd reduced_detector(const TruncatedSpace& space,
                                  const Eigen::MatrixXcd& rho) {
  const int half = space.dim() / 2;
  Eigen::Matrix2cd out;
  out(0, 0) = rho.topLeftCorner(half, half).trace();
  out(1, 1) = rho.bottomRightCorner(half, half).trace();
  out(0, 1) = rho.topRightCorner(half, half).trace();
  out(1, 0) = rho.bottomLeftCorner(half, half).trace();
  return out;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho,
                                                      Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()(i);
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double trace_norm(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().sum();
}

double purity(const Eigen::MatrixXcd& rho) {
  return (rho * rho).trace().real();
}

OracleMeasurement measure_channel(const OracleState& initial,
                                  const OracleState& final_state,
                                  const TruncatedSpace& space,
                                  std::span<const Mode> modes) {
  const Eigen::Matrix2cd d0 = reduced_detector(space, initial.rho);
  const Eigen::Matrix2cd d1 = reduced_detector(space, final_state.rho);

  OracleMeasurement m;
  m.delta_p = d1(1, 1).real() - d0(1, 1).real();
  for (int s = 0; s < space.dim(); ++s) {
    double energy = 0.0;
    for (int n = 0; n < space.n_modes(); ++n) {
      const double w = modes[static_cast<std::size_t>(n)].omega;
      if (space.occupied(s, TruncatedSpace::fermion_slot(n))) energy += w;
      if (space.occupied(s, TruncatedSpace::antifermion_slot(n))) energy += w;
    }
    if (energy != 0.0) {
      m.dQ += energy * (final_state.rho(s, s).real() - initial.rho(s, s).real());
    }
  }
  m.dS = von_neumann_entropy(d0) - von_neumann_entropy(d1);
  return m;
}

DtHalvingReport dt_halving_report(const OracleSetup& setup,
                                  const OracleState& initial, double dt) {
  DtHalvingReport report;
  const OracleState coarse = evolve_exact(setup, initial, dt);
  const OracleState mid = evolve_exact(setup, initial, 0.5 * dt);
  report.finest = evolve_exact(setup, initial, 0.25 * dt);
  report.dt = setup.detector.duration / static_cast<double>(coarse.steps);
  report.coarse_difference = trace_norm(coarse.rho - mid.rho);
  report.fine_difference = trace_norm(mid.rho - report.finest.rho);
  report.contraction = report.fine_difference > 0.0
                           ? report.coarse_difference / report.fine_difference
                           : 0.0;
  return report;
}

std::vector<OracleComparisonRow> compare_with_perturbation(
    const OracleSetup& setup, double T_R, std::span<const double> lambdas,
    double dt) {
  const int n = setup.space.n_modes();
  const std::vector<Mode> modes = solve_modes(setup.cavity, n);
  const CouplingSet couplings =
      compute_coupling_set(setup.cavity, setup.detector, n, setup.switching);

  std::vector<OracleComparisonRow> rows;
  for (double lambda : lambdas) {
    OracleSetup local = setup;
    local.detector.lambda = lambda;
    const Propagator prop = build_propagator(local, dt);
    const OracleState rho0 =
        initial_state(local.space, modes, local.detector.p, T_R);
    const OracleState rhoT = evolve_exact(prop, rho0);

    OracleComparisonRow row;
    row.lambda = lambda;
    row.dt = prop.dt;
    row.exact = measure_channel(rho0, rhoT, local.space, modes);
    const ChannelResult pert = thermal_second_order(couplings, local.detector, T_R);
    row.delta_p_pert = pert.delta_p;
    row.dQ_pert = pert.dQ;
    row.dS_pert = pert.dS_exact;
    row.rel_err_delta_p = relative_error(row.exact.delta_p, pert.delta_p);
    row.rel_err_dQ = relative_error(row.exact.dQ, pert.dQ);
    rows.push_back(row);
  }
  return rows;
}

Table oracle_table(std::span<const OracleComparisonRow> rows) {
  Table table{{"lambda", "dt", "delta_p_exact", "delta_p_pert", "dQ_exact",
               "dQ_pert", "dS_exact", "dS_pert", "rel_err_delta_p",
               "rel_err_dQ"},
              {}};
  for (const auto& r : rows) {
    table.rows.push_back(
        {format_number(r.lambda), format_number(r.dt),
         format_number(r.exact.delta_p), format_number(r.delta_p_pert),
         format_number(r.exact.dQ), format_number(r.dQ_pert),
         format_number(r.exact.dS), format_number(r.dS_pert),
         format_number(r.rel_err_delta_p), format_number(r.rel_err_dQ)});
  }
  return table;
}

void write_oracle_csv(std::ostream& out,
                      std::span<const OracleComparisonRow> rows) {
  render_csv(out, oracle_table(rows));
}

}  // namespace fermi_landauer
