#include "ctfsim/ode_model.hpp"

#include <cmath>

#include "ctfsim/error.hpp"

namespace ctfsim {

void OdeParams::validate() const {
  require(std::isfinite(J0) && J0 > 0.0, "ode J0 must be > 0");
  require(std::isfinite(beta) && beta > 0.0, "ode beta must be > 0");
  require(std::isfinite(kappa) && kappa >= 0.0, "ode kappa must be >= 0");
  require(std::isfinite(eta) && eta >= 0.0, "ode eta must be >= 0");
}

OdeParams default_ode_params() { return OdeParams{}; }

namespace {

struct OnPulse {
  double amplitude;
  double tau;  // tau', 0 = instantaneous BO charging
  double u0;
  const OdeParams& ode;

  [[nodiscard]] double occupancy(double t) const {
    return tau > 0.0 ? 1.0 - (1.0 - u0) * std::exp(-t / tau) : 1.0;
  }

  [[nodiscard]] double rate(double t, double q) const {
    const double field = amplitude + ode.kappa * occupancy(t) - ode.eta * q;
    return field > 0.0 ? ode.J0 * std::exp(-ode.beta / field) : 0.0;
  }
};

// Classic RK4 on q_ctl across one pulse; u follows its exact solution.
void integrate_pulse(DeviceState& s, const Pulse& pulse, const ModelParams& p,
                     const OdeParams& ode, double dt) {
  const double width = pulse.width();
  const OnPulse on{pulse.amplitude(), p.trap_time(), s.u, ode};
  const auto steps = static_cast<std::int64_t>(std::ceil(width / dt - 1e-9));
  const double h = width / static_cast<double>(std::max<std::int64_t>(1, steps));
  double q = s.q_ctl;
  double t = 0.0;
  for (std::int64_t k = 0; k < std::max<std::int64_t>(1, steps); ++k) {
    const double k1 = on.rate(t, q);
    const double k2 = on.rate(t + 0.5 * h, q + 0.5 * h * k1);
    const double k3 = on.rate(t + 0.5 * h, q + 0.5 * h * k2);
    const double k4 = on.rate(t + h, q + h * k3);
    q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = static_cast<double>(k + 1) * h;
  }
  s.q_ctl = q;
  s.u = on.occupancy(width);
  s.clock += width;
}

}  // namespace

VtTrace integrate_train_ode(const PulseTrain& train, const ModelParams& params,
                            const OdeParams& ode, double dt) {
  require(dt > 0.0, "dt must be > 0");
  VtTrace trace{{}, params, train};
  const auto& reads = train.read_points();
  auto next_read = reads.begin();
  if (next_read != reads.end() && *next_read == 0) ++next_read;

  DeviceState state;
  trace.entries.push_back({0, vt_of(state, params, Variant::ode)});
  const double off_retention =
      std::exp(-train.gap() / params.detrap_time(train.pulse().width()));
  for (std::int64_t n = 1; n <= train.count(); ++n) {
    integrate_pulse(state, train.pulse(), params, ode, dt);
    state.u *= off_retention;
    state.clock += train.gap();
    const bool is_read = next_read != reads.end() && *next_read == n;
    if (is_read) ++next_read;
    if (is_read || n == train.count()) {
      trace.entries.push_back({n, vt_of(state, params, Variant::ode)});
    }
  }
  return trace;
}

VtTrace run_train_ode(const PulseTrain& train, const ModelParams& params, const OdeParams& ode,
                      double dt_max, OdeDiagnostics* diagnostics) {
  params.validate();
  ode.validate();
  require(dt_max > 0.0 && dt_max <= train.pulse().width() / 20.0 * (1.0 + 1e-12),
          "dt_max must lie in (0, t_pw / 20]");

  double dt = dt_max;
  VtTrace coarse = integrate_train_ode(train, params, ode, dt);
  for (int halving = 1; halving <= kOdeMaxHalvings; ++halving) {
    dt *= 0.5;
    VtTrace fine = integrate_train_ode(train, params, ode, dt);
    const double change = std::abs(fine.final_vt() - coarse.final_vt());
    if (change < kOdeTolerance) {
      if (diagnostics != nullptr) *diagnostics = {halving, dt, change};
      return fine;
    }
    coarse = std::move(fine);
  }
  fail(ErrorKind::NumericFailure, "ode step refinement did not converge after " +
                                      std::to_string(kOdeMaxHalvings) + " halvings");
}

}  // namespace ctfsim
