#pragma once

#include <complex>
#include <functional>

namespace fermi_landauer {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_depth = 50;
  // Upper bound on the width of the initial panels; <= 0 means one panel.
  double max_panel = 0.0;
  // Relative rounding error of one evaluation of f; refinement stops once
  // the error estimate is at that level. Values below machine epsilon are
  // raised to it.
  double rounding = 0.0;
};

// Adaptive Simpson integration with Richardson correction. The interval is
// first cut into equal panels no wider than `max_panel`, then each panel is
// refined recursively until the local error estimate is below its share of
// `abs_tol`. Throws NumericalFailure if any branch hits `max_depth` without
// meeting the tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options);

std::complex<double> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadratureOptions& options);

}  // namespace fermi_landauer
