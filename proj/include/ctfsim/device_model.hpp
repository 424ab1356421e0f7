#pragma once

// Behavioral model of a charge-trap-flash gate stack under fragmented
// program pulse trains.
//
// Blocking-oxide (BO) traps charge with first-order kinetics while a pulse is
// on and de-trap while it is off. Tunneling into the charge-trap layer (CTL)
// only becomes effective once the BO occupancy u exceeds a critical value u_c,
// which produces a dead zone at the start of every pulse. Two variants:
//
//  * dead-zone (A): hard threshold; the pulse time past the dead zone
//    accumulates into an effective non-volatile write time T_NV and
//    V_T = VT0 + A ln(1 + T_NV / t0), clamped at VT_max.
//  * ode (B): continuous field-enhanced tunneling, see ode_model.hpp.
//
// BO charge is volatile and invisible to the (slow, low-voltage) read, so V_T
// depends only on the CTL charge.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctfsim/pulse_protocol.hpp"

namespace ctfsim {

// De-trap time constants are quoted for charge loaded by a pulse of this width.
inline constexpr double kDetrapReferenceWidth = 1e-6;  // s

struct ModelParams {
  double tau_trap = 6.676164013906681e-07;     // s, BO trapping at program bias
  double tau_detrap = 1e-4;                    // s, BO de-trapping at zero bias
  double u_c = 0.95;                           // occupancy ending the dead zone
  double A = 0.18640048036788354;              // V, log-programming slope
  double t0 = 1e-6;                            // s, log-programming reference time
  double VT0 = -1.2;                           // V, initialized threshold
  double VT_max = 3.0;                         // V, saturation clamp
  double bo_scale = 1.0;                       // BO thickness / 12 nm
  double to_sens = 0.0;
  double ctl_sens = 0.0;
  // De-trap slowdown for charge loaded by longer pulses:
  // tau_detrap_eff(w) = tau_detrap * (w / 1 us)^detrap_width_exp.
  double detrap_width_exp = 0.0;

  // Throws Error(InvalidArgument) naming the first violated bound.
  void validate() const;

  // tau_trap scaled by the BO thickness factor.
  [[nodiscard]] double trap_time() const { return tau_trap * bo_scale; }
  [[nodiscard]] double detrap_time(double pulse_width) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Shipped calibrated parameter set (see data/default_params.yaml).
ModelParams default_params();
inline constexpr std::string_view kDefaultParamsVersion = "ctf-defaults/1";

enum class Variant { deadzone, ode };

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);

struct DeviceState {
  double u = 0.0;      // BO trap occupancy
  double t_nv = 0.0;   // s, effective non-volatile write time (variant A)
  double q_ctl = 0.0;  // V, normalized CTL charge (variant B)
  double clock = 0.0;  // s

  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

struct VtSample {
  std::int64_t pulse_index;
  double vt;

  friend bool operator==(const VtSample&, const VtSample&) = default;
};

struct VtTrace {
  std::vector<VtSample> entries;
  ModelParams params_used;
  PulseTrain train;

  [[nodiscard]] double final_vt() const { return entries.back().vt; }
  // CSV with header `pulse_index,vt_V`.
  [[nodiscard]] std::string to_csv(const std::string& timestamp = {}) const;

  friend bool operator==(const VtTrace&, const VtTrace&) = default;
};

// Time spent charging the BO from occupancy u0 up to u_c; zero once past it.
double dead_time(double u0, const ModelParams& params);

// Applies one pulse followed by an idle gap (variant A).
DeviceState apply_pulse_deadzone(const DeviceState& state, const Pulse& pulse, double gap_after,
                                 const ModelParams& params);

double vt_of(const DeviceState& state, const ModelParams& params,
             Variant variant = Variant::deadzone);

// Fresh device (u = 0, T_NV = 0), pulses applied in order, V_T sampled at the
// train's read points; pulse 0 and pulse N are always sampled. The ode
// variant uses default_ode_params() and dt_max = t_pw / 20.
VtTrace run_train(const PulseTrain& train, const ModelParams& params,
                  Variant variant = Variant::deadzone);

// Variant A with an arbitrary gap before each pulse after the first
// (gaps.size() + 1 pulses of identical width). Used for stochastic streams.
DeviceState run_gapped_pulses(double width, std::span<const double> gaps,
                              const ModelParams& params);

// Analytic evaluation of a uniform train without stepping. The entry
// occupancy obeys e_{i+1} = (1 - (1 - e_i) a) b with a = exp(-t_pw/tau'),
// b = exp(-t_gap/tau_d), i.e. e_i = e*(1 - (ab)^i); terms are summed until
// e_i reaches its fixed point e* and the remainder is counted in one step.
double closed_form_tnv(std::int64_t count, double width, double gap, const ModelParams& params);
double closed_form_vtn(std::int64_t count, double width, double gap, const ModelParams& params);

// Fixed point e* of the entry occupancy for a uniform train.
double steady_entry_occupancy(double width, double gap, const ModelParams& params);

}  // namespace ctfsim
