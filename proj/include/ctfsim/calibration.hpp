#pragma once

// Fits the dead-zone model to a small set of trend anchors: the V_T,N fall
// between N = 1 and N = 1000 at a long gap, and the pulse width below which
// programming is cut off.

#include <array>
#include <cstdint>
#include <string>

#include "ctfsim/device_model.hpp"

namespace ctfsim {

struct AnchorWeights {
  double fall = 1.0;
  double knee = 1.0;
  double monotone = 1e3;
};

struct AnchorSet {
  double d_vt_log_fall = 0.30;  // V, V_T,1 - V_T,1000 at t_gap = 10 s
  double knee_tpw = 2e-6;       // s
  double vt0 = -1.2;            // V
  double t_on = kTableOnTime;   // s
  AnchorWeights weights;

  void validate() const;
};

inline constexpr double kFallFloor = 0.01;      // V, relative-residual denominator floor
inline constexpr double kCutoffFraction = 0.05;
inline constexpr std::int64_t kFallCount = 1000;

// Largest t_pw (N = round(T_ON / t_pw), t_gap = 10 s) whose Delta V_T stays
// below 5% of the single-pulse Delta V_T. 0 when even 1 ns pulses program.
double cutoff_width(const ModelParams& params, double on_time);

// V_T,1 - V_T,1000 at t_gap = 10 s.
double simulated_fall(const ModelParams& params, double on_time);

// True when V_T,N is non-increasing in t_gap over the default grid for
// N = 100, 500, 1000.
bool gap_recovery_monotone(const ModelParams& params, double on_time);

struct ObjectiveTerms {
  double fall = 0.0;       // V, simulated
  double knee = 0.0;       // s, simulated
  bool monotone = true;
  // Signed relative residuals: fall, knee, monotone penalty (0 or 1).
  std::array<double, 3> residuals{};
  double objective = 0.0;  // weighted sum of squared residuals
};

ObjectiveTerms objective_terms(const ModelParams& params, const AnchorSet& anchors);
double objective(const ModelParams& params, const AnchorSet& anchors);

struct FitResult {
  ModelParams params;
  ObjectiveTerms terms;
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;

  // Fit report: anchors, residuals, convergence.
  [[nodiscard]] std::string to_document(const AnchorSet& anchors) const;
};

inline constexpr double kFitObjectiveTolerance = 1e-4;
inline constexpr double kFitSizeTolerance = 1e-6;
inline constexpr double kUcLower = 0.5;
inline constexpr double kUcUpper = 0.99;

// VT0 is taken from the anchors and A solved from the fall anchor at the
// seed's dead zone; Nelder-Mead then polishes (log tau_trap, u_c) with u_c
// confined to [0.5, 0.99]. Deterministic. Returns the best point with
// converged = false when the evaluation budget runs out first.
FitResult fit(const AnchorSet& anchors, const ModelParams& seed, int budget = 400);

}  // namespace ctfsim
