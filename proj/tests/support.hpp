#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "fermi_landauer/coupling.hpp"
#include "fermi_landauer/exact_oracle.hpp"
#include "fermi_landauer/spectrum.hpp"

namespace fermi_landauer::testing {

// Seeded draws with a fixed mapping, so test inputs do not depend on the
// standard library's distribution implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  double log_uniform(double lo, double hi) {
    return lo * std::pow(hi / lo, uniform(0.0, 1.0));
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

inline CavityConfig cavity(double L, double mass) {
  CavityConfig c;
  c.L = L;
  c.mass = mass;
  return c;
}

inline DetectorConfig static_detector(const CavityConfig& c, double omega,
                                      double lambda, double T, double x0,
                                      double p) {
  return DetectorConfig::make(omega, lambda, T, Worldline::stationary(x0, c),
                              Spinor{Complex{1.0, 0.0}, Complex{0.0, 0.0}}, p);
}

// Reference oracle run: L = 1, m = 1, gap on mode 1, T = 20, x0 = 0.3.
inline OracleSetup default_oracle(double lambda, double p, int n_modes = 2) {
  const CavityConfig c = cavity(1.0, 1.0);
  const double omega = solve_modes(c, 1)[0].omega;
  return OracleSetup{TruncatedSpace(n_modes), c,
                     static_detector(c, omega, lambda, 20.0, 0.3, p),
                     SwitchingProfile::sharp(), InteractionTerms::all};
}

inline constexpr double kDefaultOracleDt = 20.0 / 4096.0;

}  // namespace fermi_landauer::testing
