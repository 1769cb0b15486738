#include "fermi_landauer/vacuum_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <utility>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"

namespace fermi_landauer {
namespace {

void check_transition_probabilities(double w_sum, double v_sum) {
  if (w_sum > kMaxTransitionProbability || v_sum > kMaxTransitionProbability) {
    throw PerturbationBreakdown(
        "second-order transition probability " +
        format_number(std::max(w_sum, v_sum)) + " exceeds " +
        format_number(kMaxTransitionProbability) +
        "; reduce lambda or the interaction time");
  }
}

}  // namespace

double FieldDiagonal::trace() const {
  return vacuum + std::accumulate(fermion.begin(), fermion.end(), 0.0) +
         std::accumulate(antifermion.begin(), antifermion.end(), 0.0);
}

double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("binary entropy needs a probability, got " +
                      format_number(q));
  }
  double s = 0.0;
  if (q > 0.0) s -= q * std::log(q);
  if (q < 1.0) s -= (1.0 - q) * std::log1p(-q);
  return s;
}

ChannelResult apply_vacuum_channel(const CouplingSet& couplings,
                                   const DetectorConfig& detector) {
  const double p = detector.p;
  const double l2 = detector.lambda * detector.lambda;
  const bool interior = p > 0.0 && p < 1.0;
  const double log_odds = interior ? std::log((1.0 - p) / p) : 0.0;

  ChannelResult result;
  FieldDiagonal field;
  result.per_mode.reserve(couplings.modes.size());
  field.fermion.reserve(couplings.modes.size());
  field.antifermion.reserve(couplings.modes.size());

  double w_sum = 0.0;
  double v_sum = 0.0;
  double dS_sum = 0.0;
  for (std::size_t i = 0; i < couplings.modes.size(); ++i) {
    const double w2 = l2 * std::norm(couplings.W[i]);
    const double v2 = l2 * std::norm(couplings.V[i]);
    w_sum += w2;
    v_sum += v2;

    const double up = (1.0 - p) * w2;  // detector excited, fermion emitted
    const double down = p * v2;        // detector relaxed, antifermion emitted
    result.delta_p += up - down;
    const double dQ_n = (up + down) * couplings.modes[i].omega;
    result.dQ += dQ_n;

    ModeContribution contribution{couplings.modes[i].n, dQ_n, std::nullopt};
    if (interior) {
      contribution.dS = log_odds * (down - up);
      dS_sum += down - up;
    }
    result.per_mode.push_back(contribution);
    field.fermion.push_back(up);
    field.antifermion.push_back(down);
  }
  field.vacuum = 1.0 - ((1.0 - p) * w_sum + p * v_sum);
  result.field_diag = std::move(field);

  check_transition_probabilities(w_sum, v_sum);
  const double p_final = p + result.delta_p;
  if (!(p_final >= 0.0 && p_final <= 1.0)) {
    throw PerturbationBreakdown("final population " + format_number(p_final) +
                                " left [0, 1]");
  }

  if (interior) result.dS_linear = log_odds * dS_sum;
  result.dS_exact = binary_entropy(p) - binary_entropy(p_final);
  result.landauer_margin = result.dQ;
  return result;
}

CouplingSet truncate(const CouplingSet& couplings, int n_max) {
  if (n_max < 1 || n_max > couplings.n_max) {
    throw DomainError("truncation order outside the computed coupling set");
  }
  CouplingSet out;
  out.modes.assign(couplings.modes.begin(), couplings.modes.begin() + n_max);
  out.W.assign(couplings.W.begin(), couplings.W.begin() + n_max);
  out.V.assign(couplings.V.begin(), couplings.V.begin() + n_max);
  out.n_max = n_max;

  out.tail_estimate = tail_share(out);
  return out;
}

ConvergenceReport convergence_report(const CouplingSet& couplings,
                                     const DetectorConfig& detector,
                                     const std::vector<int>& n_max_list) {
  if (n_max_list.empty()) throw DomainError("n_max list is empty");
  if (!std::is_sorted(n_max_list.begin(), n_max_list.end()) ||
      std::adjacent_find(n_max_list.begin(), n_max_list.end()) !=
          n_max_list.end()) {
    throw DomainError("n_max list must be strictly increasing");
  }

  ConvergenceReport report;
  for (int n : n_max_list) {
    const CouplingSet slice = truncate(couplings, n);
    const ChannelResult r = apply_vacuum_channel(slice, detector);
    report.rows.push_back({n, r.dQ, r.delta_p, slice.tail_estimate});
  }

  // Block averages smooth out the sin^2 oscillation of |W_n|^2.
  const int n_top = n_max_list.back();
  constexpr int kBlock = 5;
  const int first = n_top / 2;
  const double p = detector.p;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int start = first; start + kBlock <= n_top; start += kBlock) {
    double dq = 0.0;
    double w = 0.0;
    for (int i = start; i < start + kBlock; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const double w_n = couplings.modes[idx].omega;
      dq += ((1.0 - p) * std::norm(couplings.W[idx]) +
             p * std::norm(couplings.V[idx])) * w_n;
      w += w_n;
    }
    if (dq > 0.0) {
      xs.push_back(std::log(w / kBlock));
      ys.push_back(std::log(dq / kBlock));
    }
  }
  if (xs.size() >= 3) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0.0) report.decay_exponent = sxy / sxx;
  }
  return report;
}

ConvergenceReport convergence_report(const CavityConfig& cavity,
                                     const DetectorConfig& detector,
                                     const SwitchingProfile& switching,
                                     const std::vector<int>& n_max_list) {
  if (n_max_list.empty()) throw DomainError("n_max list is empty");
  const int top = *std::max_element(n_max_list.begin(), n_max_list.end());
  return convergence_report(
      compute_coupling_set(cavity, detector, top, switching), detector,
      n_max_list);
}

Table vacuum_mode_table(const CouplingSet& couplings,
                        const DetectorConfig& detector) {
  const double p = detector.p;
  const double l2 = detector.lambda * detector.lambda;
  Table table{{"n", "abs_W2", "abs_V2", "dQ_n", "cum_dQ", "cum_delta_p"}, {}};
  double cum_dQ = 0.0;
  double cum_dp = 0.0;
  for (std::size_t i = 0; i < couplings.modes.size(); ++i) {
    const double w2 = std::norm(couplings.W[i]);
    const double v2 = std::norm(couplings.V[i]);
    const double dQ_n =
        l2 * ((1.0 - p) * w2 + p * v2) * couplings.modes[i].omega;
    cum_dQ += dQ_n;
    cum_dp += l2 * ((1.0 - p) * w2 - p * v2);
    table.rows.push_back({std::to_string(couplings.modes[i].n),
                          format_number(w2), format_number(v2),
                          format_number(dQ_n), format_number(cum_dQ),
                          format_number(cum_dp)});
  }
  return table;
}

void write_vacuum_modes_csv(std::ostream& out, const CouplingSet& couplings,
                            const DetectorConfig& detector) {
  render_csv(out, vacuum_mode_table(couplings, detector));
}

}  // namespace fermi_landauer
