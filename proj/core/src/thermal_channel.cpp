#include "fermi_landauer/thermal_channel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "fermi_landauer/emit.hpp"
#include "fermi_landauer/errors.hpp"

namespace fermi_landauer {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finish_channel(ChannelResult& result, double p, double T_R) {
  const double p_final = p + result.delta_p;
  if (!(p_final >= 0.0 && p_final <= 1.0)) {
    throw PerturbationBreakdown("final population " + format_number(p_final) +
                                " left [0, 1]");
  }
  result.dS_exact = binary_entropy(p) - binary_entropy(p_final);
  result.landauer_margin = landauer_margin(
      result.dQ, result.dS_linear.value_or(result.dS_exact), T_R);
}

}  // namespace

double ThermalOccupancy::temperature() const {
  if (std::isinf(beta)) return 0.0;
  if (beta == 0.0) return kInf;
  return 1.0 / beta;
}

double fermi_occupation(double energy, double temperature) {
  if (temperature == 0.0) return energy > 0.0 ? 0.0 : 0.5;
  if (std::isinf(temperature)) return 0.5;
  return 1.0 / (std::exp(energy / temperature) + 1.0);
}

ThermalOccupancy occupation_marginals(double T_R, double omega_B) {
  if (!(T_R >= 0.0)) {
    throw DomainError("field temperature must be non-negative");
  }
  if (!(omega_B > 0.0) || !std::isfinite(omega_B)) {
    throw DomainError("resonant frequency must be positive");
  }
  ThermalOccupancy occ;
  occ.omega_B = omega_B;
  occ.beta = T_R == 0.0 ? kInf : (std::isinf(T_R) ? 0.0 : 1.0 / T_R);
  const double q = std::isinf(occ.beta) ? 0.0 : std::exp(-occ.beta * omega_B);
  occ.Z_B = (1.0 + q) * (1.0 + q);
  occ.P0 = 1.0 / occ.Z_B;
  occ.P1 = q / occ.Z_B;
  occ.P2 = q * q / occ.Z_B;
  occ.slot_occupation = fermi_occupation(omega_B, T_R);
  return occ;
}

double p_from_temperature(double T_D, double omega,
                          TemperatureConvention convention) {
  if (!(T_D > 0.0)) throw DomainError("detector temperature must be positive");
  const double gibbs = fermi_occupation(omega, T_D);
  if (convention == TemperatureConvention::gibbs) return gibbs;
  // e^{w/T}/(e^{w/T} + 1) = 1/(1 + e^{-w/T})
  if (std::isinf(T_D)) return 0.5;
  return 1.0 / (1.0 + std::exp(-omega / T_D));
}

ResonanceSpec find_resonance(std::span<const Mode> modes,
                             const DetectorConfig& detector) {
  if (modes.empty()) throw DomainError("no modes to resonate with");
  ResonanceSpec spec;
  double best = kInf;
  for (const auto& mode : modes) {
    const double detuning = std::abs(detector.omega_gap - mode.omega);
    if (detuning < best) {
      best = detuning;
      spec.B = mode.n;
      spec.omega_B = mode.omega;
    }
  }
  spec.detuning_check = best * detector.duration;
  return spec;
}

double landauer_margin(double dQ, double dS, double T_R) {
  if (T_R == 0.0) return dQ;
  return dQ - T_R * dS;
}

double resonant_weight(const ThermalOccupancy& occupancy, double p) {
  return p - occupancy.slot_occupation;
}

ChannelResult apply_thermal_channel(const ThermalOccupancy& occupancy,
                                    Complex V_B, const DetectorConfig& detector,
                                    const ResonanceSpec& resonance,
                                    bool allow_detuned) {
  if (!allow_detuned && !(resonance.detuning_check < kMaxResonanceDetuning)) {
    throw DomainError("detector is not resonant with mode " +
                      std::to_string(resonance.B) + ": |Omega - w_B| T = " +
                      format_number(resonance.detuning_check));
  }
  const double p = detector.p;
  const double rate = detector.lambda * detector.lambda * std::norm(V_B);
  if (rate > kMaxTransitionProbability) {
    throw PerturbationBreakdown("resonant transition probability " +
                                format_number(rate) + " exceeds " +
                                format_number(kMaxTransitionProbability));
  }
  const double X = resonant_weight(occupancy, p);

  ChannelResult result;
  result.delta_p = -rate * X;
  result.dQ = occupancy.omega_B * rate * X;
  if (p > 0.0 && p < 1.0) {
    result.dS_linear = std::log((1.0 - p) / p) * rate * X;
  }
  result.per_mode.push_back({resonance.B, result.dQ, result.dS_linear});
  finish_channel(result, p, occupancy.temperature());
  return result;
}

ChannelResult thermal_second_order(const CouplingSet& couplings,
                                   const DetectorConfig& detector,
                                   double T_R) {
  if (!(T_R >= 0.0)) throw DomainError("field temperature must be non-negative");
  const double p = detector.p;
  const double l2 = detector.lambda * detector.lambda;
  const bool interior = p > 0.0 && p < 1.0;
  const double log_odds = interior ? std::log((1.0 - p) / p) : 0.0;

  ChannelResult result;
  double w_sum = 0.0;
  double v_sum = 0.0;
  for (std::size_t i = 0; i < couplings.modes.size(); ++i) {
    const double w_n = couplings.modes[i].omega;
    const double occ = fermi_occupation(w_n, T_R);
    const double w2 = l2 * std::norm(couplings.W[i]);
    const double v2 = l2 * std::norm(couplings.V[i]);
    w_sum += w2;
    v_sum += v2;
    // W: pair creation/absorption of a fermion; V: of an antifermion.
    const double dp_n = w2 * (1.0 - p - occ) + v2 * (occ - p);
    const double dQ_n = w_n * (w2 * (1.0 - p - occ) + v2 * (p - occ));
    result.delta_p += dp_n;
    result.dQ += dQ_n;
    ModeContribution contribution{couplings.modes[i].n, dQ_n, std::nullopt};
    if (interior) contribution.dS = -log_odds * dp_n;
    result.per_mode.push_back(contribution);
  }
  if (w_sum > kMaxTransitionProbability || v_sum > kMaxTransitionProbability) {
    throw PerturbationBreakdown("second-order transition probability exceeds " +
                                format_number(kMaxTransitionProbability));
  }
  if (interior) result.dS_linear = -log_odds * result.delta_p;
  finish_channel(result, p, T_R);
  return result;
}

std::vector<ThermalSweepRow> thermal_sweep(
    Complex V_B, const DetectorConfig& detector, const ResonanceSpec& resonance,
    std::span<const double> field_temperatures,
    std::span<const double> detector_temperatures,
    TemperatureConvention convention, bool allow_detuned) {
  std::vector<ThermalSweepRow> rows;
  rows.reserve(field_temperatures.size() * detector_temperatures.size());
  for (double T_R : field_temperatures) {
    const ThermalOccupancy occ = occupation_marginals(T_R, resonance.omega_B);
    for (double T_D : detector_temperatures) {
      DetectorConfig local = detector;
      local.p = p_from_temperature(T_D, resonance.omega_B, convention);
      ThermalSweepRow row;
      row.T_R = T_R;
      row.T_D = T_D;
      row.p = local.p;
      row.occupancy = occ;
      row.X = resonant_weight(occ, local.p);
      row.result =
          apply_thermal_channel(occ, V_B, local, resonance, allow_detuned);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Table thermal_sweep_table(std::span<const ThermalSweepRow> rows) {
  Table table{{"T_R", "T_D", "p", "P0", "P1", "P2", "X", "dQ", "dS_linear",
               "dS_exact", "landauer_margin"},
              {}};
  for (const auto& row : rows) {
    table.rows.push_back(
        {format_number(row.T_R), format_number(row.T_D), format_number(row.p),
         format_number(row.occupancy.P0), format_number(row.occupancy.P1),
         format_number(row.occupancy.P2), format_number(row.X),
         format_number(row.result.dQ), format_number(row.result.dS_linear),
         format_number(row.result.dS_exact),
         format_number(row.result.landauer_margin)});
  }
  return table;
}

void write_thermal_sweep_csv(std::ostream& out,
                             std::span<const ThermalSweepRow> rows) {
  render_csv(out, thermal_sweep_table(rows));
}

}  // namespace fermi_landauer
