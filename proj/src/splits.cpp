#include "ctfsim/splits.hpp"

#include <algorithm>
#include <cmath>

#include "ctfsim/error.hpp"
#include "ctfsim/parallel.hpp"

namespace ctfsim {

ModelParams apply_split(const ModelParams& base, StackLayer layer, double thickness_factor) {
  require(std::isfinite(thickness_factor) && thickness_factor > 0.0,
          "split thickness factor must be > 0");
  ModelParams p = base;
  switch (layer) {
    case StackLayer::BlockingOxide:
      p.bo_scale = base.bo_scale * thickness_factor;
      break;
    case StackLayer::TunnelOxide:
      p.tau_trap = base.tau_trap * (1.0 + base.to_sens * (thickness_factor - 1.0));
      break;
    case StackLayer::ChargeTrapLayer:
      p.tau_trap = base.tau_trap * (1.0 + base.ctl_sens * (thickness_factor - 1.0));
      break;
  }
  p.validate();
  return p;
}

ModelParams normalize_single_pulse(const ModelParams& params, double on_time, double vt1,
                                   double gap) {
  const double t_nv = closed_form_tnv(1, on_time, gap, params);
  require(t_nv > 0.0, "single pulse is fully inside the dead zone; cannot normalize");
  require(vt1 > params.VT0 && vt1 < params.VT_max, "target V_T,1 outside (VT0, VT_max)");
  ModelParams p = params;
  p.A = (vt1 - params.VT0) / std::log1p(t_nv / params.t0);
  return p;
}

SweepResult split_sweep(std::span<const Split> splits, std::span<const std::int64_t> counts,
                        double on_time, double gap) {
  require(!splits.empty(), "at least one split is required");
  require(!counts.empty(), "N list must not be empty");
  require(on_time > 0.0, "T_ON must be > 0");

  SweepResult result;
  result.counts.assign(counts.begin(), counts.end());
  for (auto n : counts) {
    require(n >= 1, "every N must be >= 1");
    result.widths.push_back(on_time / static_cast<double>(n));
  }
  result.reference_count = std::find(counts.begin(), counts.end(), 1000) != counts.end()
                               ? 1000
                               : *std::max_element(counts.begin(), counts.end());

  for (const auto& s : splits) {
    s.params.validate();
    result.labels.push_back(s.label);
    result.vt1.push_back(closed_form_vtn(1, on_time, gap, s.params));
  }
  for (std::size_t i = 1; i < splits.size(); ++i) {
    if (std::abs(result.vt1[i] - result.vt1[0]) >= kSplitNormalizationTolerance) {
      fail(ErrorKind::PreconditionViolation,
           "split '" + splits[i].label + "' is not normalized: V_T,1 differs from '" +
               splits[0].label + "' by " +
               std::to_string(std::abs(result.vt1[i] - result.vt1[0]) * 1e3) + " mV");
    }
  }

  result.vt.assign(splits.size(), std::vector<double>(counts.size()));
  parallel_for(splits.size() * counts.size(), [&](std::size_t k) {
    const std::size_t s = k / counts.size();
    const std::size_t c = k % counts.size();
    const PulseTrain train(Pulse(kProgramAmplitude, result.widths[c]), counts[c], gap);
    result.vt[s][c] = run_train(train, splits[s].params).final_vt();
  });

  const auto ref = static_cast<std::size_t>(
      std::find(counts.begin(), counts.end(), result.reference_count) - counts.begin());
  for (std::size_t s = 0; s < splits.size(); ++s) {
    result.delta_vt_reference.push_back(result.vt[s][ref] - splits[s].params.VT0);
    result.reduction_reference.push_back(result.vt1[s] - result.vt[s][ref]);
  }
  return result;
}

}  // namespace ctfsim
