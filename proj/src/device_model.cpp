#include "ctfsim/device_model.hpp"

#include <algorithm>
#include <cmath>

#include "ctfsim/csv.hpp"
#include "ctfsim/error.hpp"
#include "ctfsim/ode_model.hpp"

namespace ctfsim {

namespace {

void check(bool ok, const char* field, const char* bound) {
  if (!ok) fail(ErrorKind::InvalidArgument, std::string("model parameter ") + field + " " + bound);
}

// exp(-width / tau'), with tau' = 0 meaning instantaneous charging.
double charge_retention(double width, const ModelParams& p) {
  const double tp = p.trap_time();
  return tp > 0.0 ? std::exp(-width / tp) : 0.0;
}

double detrap_retention(double gap, double width, const ModelParams& p) {
  return std::exp(-gap / p.detrap_time(width));
}

double effective_write(double u_entry, double width, const ModelParams& p) {
  return std::max(0.0, width - dead_time(u_entry, p));
}

}  // namespace

void ModelParams::validate() const {
  check(std::isfinite(tau_trap) && tau_trap >= 0.0, "tau_trap_s", "must be >= 0");
  check(std::isfinite(tau_detrap) && tau_detrap > 0.0, "tau_detrap_s", "must be > 0");
  check(u_c > 0.0 && u_c < 1.0, "u_c", "must lie in (0, 1)");
  check(std::isfinite(A) && A > 0.0, "A_V", "must be > 0");
  check(std::isfinite(t0) && t0 > 0.0, "t0_s", "must be > 0");
  check(std::isfinite(VT0) && std::isfinite(VT_max) && VT0 < VT_max, "VT0_V",
        "must be finite and below VTmax_V");
  check(std::isfinite(bo_scale) && bo_scale > 0.0, "bo_scale", "must be > 0");
  check(std::isfinite(to_sens), "to_sens", "must be finite");
  check(std::isfinite(ctl_sens), "ctl_sens", "must be finite");
  check(std::isfinite(detrap_width_exp), "detrap_width_exp", "must be finite");
}

double ModelParams::detrap_time(double pulse_width) const {
  if (detrap_width_exp == 0.0) return tau_detrap;
  return tau_detrap * std::pow(pulse_width / kDetrapReferenceWidth, detrap_width_exp);
}

Variant parse_variant(std::string_view name) {
  if (name == "deadzone") return Variant::deadzone;
  if (name == "ode") return Variant::ode;
  fail(ErrorKind::InvalidArgument, "unknown model variant '" + std::string(name) + "'");
}

std::string_view to_string(Variant v) {
  return v == Variant::deadzone ? "deadzone" : "ode";
}

double dead_time(double u0, const ModelParams& params) {
  const double tp = params.trap_time();
  if (u0 >= params.u_c || tp <= 0.0) return 0.0;
  return tp * std::log((1.0 - u0) / (1.0 - params.u_c));
}

DeviceState apply_pulse_deadzone(const DeviceState& state, const Pulse& pulse, double gap_after,
                                 const ModelParams& params) {
  const double width = pulse.width();
  DeviceState next = state;
  next.t_nv += effective_write(state.u, width, params);
  next.u = 1.0 - (1.0 - state.u) * charge_retention(width, params);
  next.u *= detrap_retention(gap_after, width, params);
  next.clock += width + gap_after;
  return next;
}

double vt_of(const DeviceState& state, const ModelParams& params, Variant variant) {
  const double shift = variant == Variant::deadzone
                           ? params.A * std::log1p(state.t_nv / params.t0)
                           : state.q_ctl;
  return std::min(params.VT_max, params.VT0 + shift);
}

VtTrace run_train(const PulseTrain& train, const ModelParams& params, Variant variant) {
  params.validate();
  if (variant == Variant::ode) {
    return run_train_ode(train, params, default_ode_params(), train.pulse().width() / 20.0);
  }
  VtTrace trace{{}, params, train};
  const auto& reads = train.read_points();
  trace.entries.reserve(reads.size() + 2);

  DeviceState state;
  auto next_read = reads.begin();
  if (next_read != reads.end() && *next_read == 0) ++next_read;
  trace.entries.push_back({0, vt_of(state, params)});
  for (std::int64_t n = 1; n <= train.count(); ++n) {
    state = apply_pulse_deadzone(state, train.pulse(), train.gap(), params);
    const bool is_read = next_read != reads.end() && *next_read == n;
    if (is_read) ++next_read;
    if (is_read || n == train.count()) trace.entries.push_back({n, vt_of(state, params)});
  }
  return trace;
}

DeviceState run_gapped_pulses(double width, std::span<const double> gaps,
                              const ModelParams& params) {
  const Pulse pulse(kProgramAmplitude, width);
  DeviceState state;
  for (std::size_t i = 0; i <= gaps.size(); ++i) {
    const double gap_after = i < gaps.size() ? gaps[i] : 0.0;
    state = apply_pulse_deadzone(state, pulse, gap_after, params);
  }
  return state;
}

double steady_entry_occupancy(double width, double gap, const ModelParams& params) {
  const double tp = params.trap_time();
  const double detrap_rate = gap / params.detrap_time(width);
  if (tp <= 0.0) return std::exp(-detrap_rate);
  const double charge_rate = width / tp;
  // e* = b (1 - a) / (1 - a b), written with expm1 for small rates.
  return std::exp(-detrap_rate) * -std::expm1(-charge_rate) /
         -std::expm1(-(charge_rate + detrap_rate));
}

double closed_form_tnv(std::int64_t count, double width, double gap, const ModelParams& params) {
  require(count >= 1, "count must be >= 1");
  require(width > 0.0 && gap >= 0.0, "width must be > 0 and gap >= 0");
  const double steady = steady_entry_occupancy(width, gap, params);
  const double decay = charge_retention(width, params) * detrap_retention(gap, width, params);

  double t_nv = 0.0;
  double decay_pow = 1.0;  // (ab)^i
  std::int64_t i = 0;
  for (; i < count; ++i) {
    const double entry = steady * (1.0 - decay_pow);
    if (entry == steady) break;
    t_nv += effective_write(entry, width, params);
    decay_pow *= decay;
  }
  if (i < count) t_nv += static_cast<double>(count - i) * effective_write(steady, width, params);
  return t_nv;
}

double closed_form_vtn(std::int64_t count, double width, double gap, const ModelParams& params) {
  DeviceState state;
  state.t_nv = closed_form_tnv(count, width, gap, params);
  return vt_of(state, params);
}

std::string VtTrace::to_csv(const std::string& timestamp) const {
  CsvDocument doc({"pulse_index", "vt_V"}, timestamp);
  for (const auto& e : entries) doc.row() << static_cast<long long>(e.pulse_index) << e.vt;
  return doc.str();
}

}  // namespace ctfsim
