#pragma once

// Gate-stack process splits. Each split is a labelled parameter set; all
// splits are biased so that a single T_ON pulse reaches the same V_T,1.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctfsim/device_model.hpp"

namespace ctfsim {

enum class StackLayer { BlockingOxide, TunnelOxide, ChargeTrapLayer };

struct Split {
  std::string label;
  ModelParams params;
};

// thickness_factor is relative to the base stack (1.0 = base; for the CTL
// anneal split any factor != 1 marks the annealed variant). BO splits scale
// bo_scale; TO and CTL splits scale tau_trap by 1 + sens * (factor - 1).
ModelParams apply_split(const ModelParams& base, StackLayer layer, double thickness_factor);

// Returns params with A chosen so that one pulse of length on_time reaches vt1.
ModelParams normalize_single_pulse(const ModelParams& params, double on_time, double vt1,
                                   double gap = kLongGap);

inline constexpr double kSplitNormalizationTolerance = 5e-3;  // V

struct SweepResult {
  std::vector<std::string> labels;
  std::vector<std::int64_t> counts;
  std::vector<double> widths;                // s, T_ON / N
  std::vector<std::vector<double>> vt;       // [split][count]
  std::vector<double> vt1;                   // V_T after one T_ON pulse
  std::vector<double> delta_vt_reference;    // V_T,N - VT0 at the reference N
  std::vector<double> reduction_reference;   // V_T,1 - V_T,N at the reference N
  std::int64_t reference_count = 1000;
};

// Throws Error(PreconditionViolation) naming the split whose V_T,1 differs
// from the first split by 5 mV or more. The reference N is 1000 when present
// in counts, otherwise the largest N.
SweepResult split_sweep(std::span<const Split> splits, std::span<const std::int64_t> counts,
                        double on_time, double gap = kLongGap);

}  // namespace ctfsim
