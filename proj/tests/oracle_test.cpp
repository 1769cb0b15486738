#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/exact_oracle.hpp"
#include "support.hpp"

namespace fl = fermi_landauer;

namespace {

TEST(TruncatedSpace, Dimensions) {
  EXPECT_EQ(fl::TruncatedSpace(1).dim(), 8);
  EXPECT_EQ(fl::TruncatedSpace(3).dim(), 128);
  EXPECT_THROW(fl::TruncatedSpace(0), fl::DomainError);
  EXPECT_THROW(fl::TruncatedSpace(4), fl::DomainError);
}

TEST(Operators, CanonicalAnticommutation) {
  const fl::TruncatedSpace space(2);
  const auto ops = fl::build_operators(space);
  std::vector<Eigen::MatrixXd> all;
  for (int i = 0; i < 2; ++i) {
    all.push_back(ops.b[static_cast<std::size_t>(i)]);
    all.push_back(ops.d[static_cast<std::size_t>(i)]);
  }
  const auto id = Eigen::MatrixXd::Identity(space.dim(), space.dim());
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      const Eigen::MatrixXd aa = all[i] * all[j] + all[j] * all[i];
      EXPECT_LT(aa.cwiseAbs().maxCoeff(), 1e-15);
      const Eigen::MatrixXd ad =
          all[i] * all[j].transpose() + all[j].transpose() * all[i];
      const Eigen::MatrixXd expected = i == j ? Eigen::MatrixXd(id) : Eigen::MatrixXd::Zero(space.dim(), space.dim());
      EXPECT_LT((ad - expected).cwiseAbs().maxCoeff(), 1e-15);
    }
    // Detector operators commute with the field.
    const Eigen::MatrixXd c = ops.sigma_plus * all[i] - all[i] * ops.sigma_plus;
    EXPECT_LT(c.cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Oracle, HamiltonianIsHermitian) {
  const auto setup = fl::testing::default_oracle(0.01, 0.5);
  const auto ops = fl::build_operators(setup.space);
  const auto modes = fl::solve_modes(setup.cavity, 2);
  const Eigen::MatrixXcd H = fl::interaction_hamiltonian(setup, ops, modes, 1.37);
  EXPECT_LT((H - H.adjoint()).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_GT(H.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Oracle, InitialStateIsNormalized) {
  const fl::TruncatedSpace space(2);
  const auto modes = fl::solve_modes(fl::testing::cavity(1.0, 1.0), 2);
  const auto rho = fl::initial_state(space, modes, 0.3, 2.0);
  EXPECT_NEAR(rho.rho.trace().real(), 1.0, 1e-15);
  const auto det = fl::reduced_detector(space, rho.rho);
  EXPECT_NEAR(det(1, 1).real(), 0.3, 1e-15);
  EXPECT_NEAR(fl::purity(fl::initial_state(space, modes, 1.0, 0.0).rho), 1.0, 1e-15);
}

TEST(Oracle, EntropyAndNorms) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.5;
  rho(1, 1) = 0.5;
  EXPECT_NEAR(fl::von_neumann_entropy(rho), std::log(2.0), 1e-15);
  EXPECT_NEAR(fl::purity(rho), 0.5, 1e-15);
  EXPECT_NEAR(fl::trace_norm(rho), 1.0, 1e-15);
}

// Rotating terms alone move the excitation between the detector and the
// resonant antifermion, so detector energy lost equals field energy gained.
TEST(Oracle, RotatingTermsConserveEnergy) {
  auto setup = fl::testing::default_oracle(0.02, 1.0, 1);
  setup.detector.duration = 5.0;
  setup.terms = fl::InteractionTerms::rotating_only;
  const auto modes = fl::solve_modes(setup.cavity, 1);
  const auto init = fl::initial_state(setup.space, modes, 1.0, 0.0);
  const auto final_state = fl::evolve_exact(setup, init, 5.0 / 1024);
  const auto m = fl::measure_channel(init, final_state, setup.space, modes);
  EXPECT_LT(m.delta_p, 0.0);
  EXPECT_NEAR(m.dQ + setup.detector.omega_gap * m.delta_p, 0.0, 1e-9 * m.dQ);
}

TEST(Oracle, SmallCouplingAgreesWithPerturbation) {
  auto setup = fl::testing::default_oracle(0.005, 0.0, 1);
  setup.detector.duration = 5.0;
  const std::vector<double> lambdas{0.005};
  const auto rows = fl::compare_with_perturbation(setup, 0.0, lambdas, 5.0 / 1024);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(rows[0].rel_err_delta_p, 1e-3);
  EXPECT_LT(rows[0].rel_err_dQ, 1e-3);
}

TEST(Oracle, StepSizeIsValidated) {
  const auto setup = fl::testing::default_oracle(0.01, 0.0, 1);
  EXPECT_THROW(fl::build_propagator(setup, 0.0), fl::DomainError);
}

}  // namespace
