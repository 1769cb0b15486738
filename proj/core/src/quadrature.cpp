#include "fermi_landauer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fermi_landauer/errors.hpp"

namespace fermi_landauer {
namespace {

template <typename Value>
struct Simpson {
  const std::function<Value(double)>& f;
  int max_depth;
  double rounding;

  static double magnitude(const Value& v) { return std::abs(v); }

  Value refine(double a, double b, Value fa, Value fm, Value fb, Value whole,
               double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const Value flm = f(lm);
    const Value frm = f(rm);
    const double h = b - a;
    const Value left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const Value right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const Value delta = left + right - whole;

    // Below this the estimate is dominated by rounding, not truncation:
    // relative error in f, plus the half-widths themselves being rounded
    // to the spacing of doubles near the abscissa.
    const double abscissa =
        std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    const double noise = 64.0 * (rounding * h + abscissa) *
                         std::max({magnitude(fa), magnitude(flm), magnitude(fm),
                                   magnitude(frm), magnitude(fb)});
    if (magnitude(delta) <= 15.0 * tol || magnitude(delta) <= noise) {
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      throw NumericalFailure("adaptive Simpson did not converge on [" +
                             std::to_string(a) + ", " + std::to_string(b) +
                             "]");
    }
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

template <typename Value>
Value integrate_impl(const std::function<Value(double)>& f, double a, double b,
                     const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) {
    throw DomainError("quadrature tolerance must be positive");
  }
  if (a == b) return Value{};
  const double width = b - a;
  int panels = 1;
  if (options.max_panel > 0.0) {
    const double count = std::ceil(std::abs(width) / options.max_panel);
    if (count > 1e8) {
      throw NumericalFailure("quadrature would need more than 1e8 panels");
    }
    panels = std::max(1, static_cast<int>(count));
  }
  const double h = width / panels;
  const double panel_tol = options.abs_tol / panels;
  Simpson<Value> simpson{
      f, options.max_depth,
      std::max(options.rounding, std::numeric_limits<double>::epsilon())};

  Value total{};
  Value fa = f(a);
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
    const double mid = 0.5 * (lo + hi);
    const Value fm = f(mid);
    const Value fb = f(hi);
    const Value whole = ((hi - lo) / 6.0) * (fa + 4.0 * fm + fb);
    total += simpson.refine(lo, hi, fa, fm, fb, whole, panel_tol, 0);
    fa = fb;
  }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& options) {
  return integrate_impl<double>(f, a, b, options);
}

std::complex<double> integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadratureOptions& options) {
  return integrate_impl<std::complex<double>>(f, a, b, options);
}

}  // namespace fermi_landauer
