#pragma once

// Variant B: continuous field-enhanced tunneling.
//
// While a pulse of amplitude V is on
//   du/dt     = (1 - u) / tau'
//   dq_ctl/dt = J0 exp(-beta / (V + kappa u - eta q_ctl))
// and while it is off
//   du/dt = -u / tau_d(w),  dq_ctl/dt = 0.
// The tunnel-oxide field is a lumped surrogate: trapped BO charge raises it
// (kappa), stored CTL charge lowers it (eta). V_T = VT0 + q_ctl.

#include "ctfsim/device_model.hpp"

namespace ctfsim {

struct OdeParams {
  double J0 = 5e6;      // V/s, normalized current prefactor
  double beta = 200.0;  // V, tunneling exponent constant
  double kappa = 12.5;  // V, field enhancement at full BO occupancy
  double eta = 2.0;     // CTL-charge feedback on the field

  void validate() const;

  friend bool operator==(const OdeParams&, const OdeParams&) = default;
};

OdeParams default_ode_params();

struct OdeDiagnostics {
  int halvings = 0;         // refinements beyond dt_max
  double dt_used = 0.0;     // s, finest step reached
  double last_change = 0.0; // V, |V_T,N(dt) - V_T,N(dt/2)| at acceptance
};

inline constexpr double kOdeTolerance = 1e-6;  // V
inline constexpr int kOdeMaxHalvings = 20;

// Integrates the train with a uniform step no larger than dt, halving the
// step until V_T,N changes by less than kOdeTolerance between successive
// refinements. Throws Error(NumericFailure) after kOdeMaxHalvings.
VtTrace run_train_ode(const PulseTrain& train, const ModelParams& params, const OdeParams& ode,
                      double dt_max, OdeDiagnostics* diagnostics = nullptr);

// One pass at a fixed maximum step; no refinement.
VtTrace integrate_train_ode(const PulseTrain& train, const ModelParams& params,
                            const OdeParams& ode, double dt);

}  // namespace ctfsim
