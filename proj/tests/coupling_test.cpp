#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/errors.hpp"
#include "fermi_landauer/spectrum.hpp"
#include "support.hpp"

namespace fl = fermi_landauer;
using fl::testing::cavity;
using fl::testing::static_detector;

namespace {

double rel_err(fl::Complex a, fl::Complex b) { return std::abs(a - b) / std::abs(b); }

TEST(Coupling, ReferenceAmplitudes) {
  const auto c = cavity(1.0, 1.0);
  const auto mode = fl::solve_modes(c, 1)[0];
  const auto d = static_detector(c, 1.0, 0.01, 5.0, 0.3, 0.0);
  EXPECT_NEAR(fl::smear_amplitude(mode, fl::SpinorKind::particle, 0.3, d.eta, c).real(),
              0.904237468644776312, 1e-13);

  const fl::Complex W = fl::compute_coupling(mode, d, fl::CouplingKind::W,
                                             fl::SwitchingProfile::sharp(), c);
  const fl::Complex V = fl::compute_coupling(mode, d, fl::CouplingKind::V,
                                             fl::SwitchingProfile::sharp(), c);
  EXPECT_NEAR(W.real(), -0.156796364337515704, 1e-10);
  EXPECT_NEAR(W.imag(), -0.505833120839302710, 1e-10);
  EXPECT_NEAR(V.real(), 0.0185913393597252843, 1e-10);
  EXPECT_NEAR(V.imag(), -0.000241202355382058434, 1e-10);
}

TEST(Coupling, ClosedFormAgreesWithQuadrature) {
  const auto c = cavity(1.0, 1.0);
  const auto d = static_detector(c, 1.7, 0.01, 7.5, 0.61, 0.0);
  for (const auto& mode : fl::solve_modes(c, 10)) {
    for (auto kind : {fl::CouplingKind::W, fl::CouplingKind::V}) {
      const auto q = fl::compute_coupling(mode, d, kind, fl::SwitchingProfile::sharp(), c);
      EXPECT_LT(rel_err(q, fl::closed_form_static(mode, d, kind, c)), 1e-9);
    }
  }
}

TEST(Coupling, ResonantAmplitudeGrowsLinearly) {
  const auto c = cavity(1.0, 1.0);
  const auto mode = fl::solve_modes(c, 2)[1];
  const auto d1 = static_detector(c, mode.omega, 0.01, 10.0, 0.4, 0.0);
  const auto d2 = static_detector(c, mode.omega, 0.01, 20.0, 0.4, 0.0);
  const auto v1 = fl::compute_coupling(mode, d1, fl::CouplingKind::V,
                                       fl::SwitchingProfile::sharp(), c);
  const auto v2 = fl::compute_coupling(mode, d2, fl::CouplingKind::V,
                                       fl::SwitchingProfile::sharp(), c);
  EXPECT_NEAR(std::norm(v2) / std::norm(v1), 4.0, 1e-12);
}

TEST(Coupling, ResonantLimitIsContinuous) {
  // Just outside the threshold the closed form must agree with amplitude*T.
  const auto c = cavity(1.0, 1.0);
  const auto mode = fl::solve_modes(c, 1)[0];
  const double T = 5.0;
  const auto at = static_detector(c, mode.omega, 0.01, T, 0.3, 0.0);
  const auto near = static_detector(c, mode.omega + 2e-8 / T, 0.01, T, 0.3, 0.0);
  const auto a = fl::closed_form_static(mode, at, fl::CouplingKind::V, c);
  const auto b = fl::closed_form_static(mode, near, fl::CouplingKind::V, c);
  EXPECT_LT(rel_err(b, a), 1e-7);
}

TEST(Coupling, SpinorNormalization) {
  const auto eta = fl::normalize_spinor({fl::Complex{3.0, 0.0}, fl::Complex{0.0, 4.0}});
  EXPECT_NEAR(std::norm(eta[0]) + std::norm(eta[1]), 1.0, 1e-15);
  EXPECT_THROW(fl::normalize_spinor({fl::Complex{}, fl::Complex{}}), fl::DomainError);
}

TEST(Coupling, CosineSwitchingSuppressesHighModes) {
  const auto c = cavity(1.0, 1.0);
  const auto d = static_detector(c, 1.0, 0.01, 10.0, 0.3, 0.0);
  const auto sharp = fl::compute_coupling_set(c, d, 40, fl::SwitchingProfile::sharp());
  const auto smooth = fl::compute_coupling_set(c, d, 40, fl::SwitchingProfile::cosine(0.25));
  EXPECT_LT(smooth.tail_estimate, sharp.tail_estimate);
  EXPECT_LT(std::norm(smooth.W.back()), 1e-3 * std::norm(sharp.W.back()));
}

TEST(Coupling, SwitchingProfileShape) {
  const auto s = fl::SwitchingProfile::cosine(0.25);
  EXPECT_DOUBLE_EQ(s(0.0, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(s(2.0, 4.0), 1.0);
  EXPECT_NEAR(s(0.5, 4.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(fl::SwitchingProfile::sharp()(1.0, 4.0), 1.0);
  EXPECT_THROW(fl::SwitchingProfile::cosine(0.5), fl::DomainError);
  EXPECT_THROW(fl::SwitchingProfile::cosine(0.0), fl::DomainError);
}

TEST(Coupling, WorldlineValidation) {
  const auto c = cavity(1.0, 0.5);
  EXPECT_THROW(fl::Worldline::stationary(1.2, c), fl::DomainError);
  EXPECT_THROW(fl::Worldline::uniform(0.1, 1.0, c, 0.5), fl::DomainError);
  EXPECT_THROW(fl::Worldline::uniform(0.1, 0.5, c, 4.0), fl::DomainError);
  const auto w = fl::Worldline::uniform(0.1, 0.2, c, 4.0);
  EXPECT_NEAR(w.position(2.0), 0.5, 1e-15);
  EXPECT_THROW(static_detector(c, -1.0, 0.01, 1.0, 0.5, 0.0), fl::DomainError);
  EXPECT_THROW(static_detector(c, 1.0, 0.01, 0.0, 0.5, 0.0), fl::DomainError);
  EXPECT_THROW(static_detector(c, 1.0, 0.01, 1.0, 0.5, 1.5), fl::DomainError);
}

TEST(Coupling, MovingDetectorMatchesStaticAtZeroVelocityLimit) {
  const auto c = cavity(1.0, 1.0);
  const auto mode = fl::solve_modes(c, 3)[2];
  const double T = 3.0;
  const auto still = static_detector(c, 2.0, 0.01, T, 0.4, 0.0);
  const auto slow = fl::DetectorConfig::make(
      2.0, 0.01, T, fl::Worldline::uniform(0.4, 1e-9, c, T), still.eta, 0.0);
  const auto a = fl::compute_coupling(mode, still, fl::CouplingKind::W,
                                      fl::SwitchingProfile::sharp(), c);
  const auto b = fl::compute_coupling(mode, slow, fl::CouplingKind::W,
                                      fl::SwitchingProfile::sharp(), c);
  EXPECT_LT(rel_err(b, a), 1e-7);
}

// Property: off-resonant |V_n|^2 never exceeds 4|amp_n|^2/(Omega - w_n)^2.
TEST(CouplingProperty, OffResonantBound) {
  fl::testing::Draw draw(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = cavity(draw.uniform(0.5, 2.0), draw.uniform(0.0, 5.0));
    const double x0 = draw.uniform(0.0, c.L);
    const double T = draw.log_uniform(0.5, 50.0);
    const auto modes = fl::solve_modes(c, 8);
    const auto d = static_detector(c, modes[0].omega * draw.uniform(0.3, 3.0),
                                   0.01, T, x0, 0.0);
    for (const auto& mode : modes) {
      const double detune = d.omega_gap - mode.omega;
      const auto amp = fl::smear_amplitude(mode, fl::SpinorKind::antiparticle, x0, d.eta, c);
      const auto v = fl::compute_coupling(mode, d, fl::CouplingKind::V,
                                          fl::SwitchingProfile::sharp(), c);
      EXPECT_LE(std::norm(v), 4.0 * std::norm(amp) / (detune * detune) * (1 + 1e-9) + 1e-20);
    }
  }
}

}  // namespace
