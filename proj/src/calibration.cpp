#include "ctfsim/calibration.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "ctfsim/error.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

namespace {

constexpr double kPenalty = 1e6;

double delta_vt(const ModelParams& p, double on_time, double width) {
  const auto n = std::max<std::int64_t>(1, std::llround(on_time / width));
  return closed_form_vtn(n, width, kLongGap, p) - p.VT0;
}

// ln(1 + T_NV/t0) difference between N = 1 and N = 1000; the fall is A times this.
double fall_per_volt(const ModelParams& p, double on_time) {
  const double t1 = closed_form_tnv(1, on_time, kLongGap, p);
  const double tn =
      closed_form_tnv(kFallCount, on_time / static_cast<double>(kFallCount), kLongGap, p);
  return std::log1p(t1 / p.t0) - std::log1p(tn / p.t0);
}

struct FitContext {
  const AnchorSet* anchors;
  ModelParams base;
  int evaluations = 0;
};

ModelParams params_at(const gsl_vector* x, const FitContext& ctx) {
  ModelParams p = ctx.base;
  p.tau_trap = std::exp(gsl_vector_get(x, 0));
  p.u_c = gsl_vector_get(x, 1);
  if (ctx.anchors->d_vt_log_fall > 0.0) {
    const double per_volt = fall_per_volt(p, ctx.anchors->t_on);
    if (per_volt > 0.0) p.A = ctx.anchors->d_vt_log_fall / per_volt;
  }
  return p;
}

double gsl_objective(const gsl_vector* x, void* data) {
  auto& ctx = *static_cast<FitContext*>(data);
  ++ctx.evaluations;
  const double u_c = gsl_vector_get(x, 1);
  if (!(u_c >= kUcLower && u_c <= kUcUpper) || !std::isfinite(gsl_vector_get(x, 0))) {
    return kPenalty;
  }
  try {
    const ModelParams p = params_at(x, ctx);
    p.validate();
    return objective(p, *ctx.anchors);
  } catch (const Error&) {
    return kPenalty;
  }
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

void AnchorSet::validate() const {
  require(std::isfinite(d_vt_log_fall) && d_vt_log_fall >= 0.0, "d_vt_log_fall must be >= 0");
  require(knee_tpw > 0.0, "knee_tpw must be > 0");
  require(t_on > 0.0, "t_on must be > 0");
  require(std::isfinite(vt0), "vt0 must be finite");
  require(weights.fall > 0.0 && weights.knee > 0.0 && weights.monotone > 0.0,
          "anchor weights must be > 0");
}

double simulated_fall(const ModelParams& params, double on_time) {
  return closed_form_vtn(1, on_time, kLongGap, params) -
         closed_form_vtn(kFallCount, on_time / static_cast<double>(kFallCount), kLongGap,
                         params);
}

double cutoff_width(const ModelParams& params, double on_time) {
  const double threshold = kCutoffFraction * delta_vt(params, on_time, on_time);
  auto below = [&](double w) { return delta_vt(params, on_time, w) < threshold; };
  double lo = 1e-9;
  double hi = on_time;
  if (!below(lo)) return 0.0;
  if (below(hi)) return hi;
  for (int i = 0; i < 80 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (below(mid) ? lo : hi) = mid;
  }
  return lo;
}

bool gap_recovery_monotone(const ModelParams& params, double on_time) {
  const auto gaps = default_gap_grid();
  for (std::int64_t n : {100, 500, 1000}) {
    const double w = on_time / static_cast<double>(n);
    double prev = INFINITY;
    for (double g : gaps) {
      const double vt = closed_form_vtn(n, w, g, params);
      if (vt > prev + 1e-12) return false;
      prev = vt;
    }
  }
  return true;
}

ObjectiveTerms objective_terms(const ModelParams& params, const AnchorSet& anchors) {
  params.validate();
  anchors.validate();
  ModelParams p = params;
  p.VT0 = anchors.vt0;
  ObjectiveTerms t;
  t.fall = simulated_fall(p, anchors.t_on);
  t.knee = cutoff_width(p, anchors.t_on);
  t.monotone = gap_recovery_monotone(p, anchors.t_on);
  t.residuals[0] = (t.fall - anchors.d_vt_log_fall) / std::max(anchors.d_vt_log_fall, kFallFloor);
  t.residuals[1] = (t.knee - anchors.knee_tpw) / anchors.knee_tpw;
  t.residuals[2] = t.monotone ? 0.0 : 1.0;
  const auto& w = anchors.weights;
  t.objective = w.fall * t.residuals[0] * t.residuals[0] +
                w.knee * t.residuals[1] * t.residuals[1] +
                w.monotone * t.residuals[2] * t.residuals[2];
  return t;
}

double objective(const ModelParams& params, const AnchorSet& anchors) {
  return objective_terms(params, anchors).objective;
}

FitResult fit(const AnchorSet& anchors, const ModelParams& seed, int budget) {
  require(budget >= 100, "fit budget must be >= 100 evaluations");
  anchors.validate();
  seed.validate();

  FitContext ctx{&anchors, seed};
  ctx.base.VT0 = anchors.vt0;

  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(2));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, std::log(seed.tau_trap));
  gsl_vector_set(x.get(), 1, std::clamp(seed.u_c, kUcLower, kUcUpper));
  gsl_vector_set(step.get(), 0, 0.1);
  gsl_vector_set(step.get(), 1, 0.01);

  gsl_multimin_function fn{&gsl_objective, 2, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2));
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());

  FitResult result;
  double size = INFINITY;
  while (ctx.evaluations < budget) {
    ++result.iterations;
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    size = gsl_multimin_fminimizer_size(nm.get());
    if (size < kFitSizeTolerance) break;
  }

  result.params = params_at(nm->x, ctx);
  result.terms = objective_terms(result.params, anchors);
  result.objective = result.terms.objective;
  result.evaluations = ctx.evaluations;
  result.converged = result.objective < kFitObjectiveTolerance || size < kFitSizeTolerance;
  return result;
}

std::string FitResult::to_document(const AnchorSet& anchors) const {
  std::ostringstream os;
  os << "anchors:\n"
     << "  d_vt_log_fall_V: " << format_double(anchors.d_vt_log_fall) << '\n'
     << "  knee_tpw_s: " << format_double(anchors.knee_tpw) << '\n'
     << "  vt0_V: " << format_double(anchors.vt0) << '\n'
     << "  t_on_s: " << format_double(anchors.t_on) << '\n'
     << "  weights: {fall: " << format_double(anchors.weights.fall)
     << ", knee: " << format_double(anchors.weights.knee)
     << ", monotone: " << format_double(anchors.weights.monotone) << "}\n";
  os << "simulated:\n"
     << "  fall_V: " << format_double(terms.fall) << '\n'
     << "  knee_tpw_s: " << format_double(terms.knee) << '\n'
     << "  gap_recovery_monotone: " << (terms.monotone ? "true" : "false") << '\n';
  os << "residuals:\n"
     << "  fall: " << format_double(terms.residuals[0]) << '\n'
     << "  knee: " << format_double(terms.residuals[1]) << '\n'
     << "  monotone: " << format_double(terms.residuals[2]) << '\n';
  os << "objective: " << format_double(objective) << '\n'
     << "iterations: " << iterations << '\n'
     << "evaluations: " << evaluations << '\n'
     << "converged: " << (converged ? "true" : "false") << '\n'
     << "searched: [log tau_trap_s, u_c]\n"
     << "derived: [A_V from the fall anchor]\n"
     << "fixed: [t0_s, tau_detrap_s, detrap_width_exp, bo_scale, to_sens, ctl_sens]\n";
  return os.str();
}

}  // namespace ctfsim
