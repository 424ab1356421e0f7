#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ctfsim/device_model.hpp"
#include "ctfsim/ode_model.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

struct ParamSet {
  ModelParams model;
  OdeParams ode;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

ParamSet default_param_set();

// Keys: tau_trap_s, tau_detrap_s, u_c, A_V, t0_s, VT0_V, VTmax_V, bo_scale,
// to_sens, ctl_sens (required); detrap_width_exp and an `ode:` map with
// J0_per_s, beta_V, kappa_V, eta (optional, defaults otherwise).
std::vector<Diagnostic> lint_params(const std::string& text, const std::string& file = {});
ParamSet parse_params(const std::string& text, const std::string& file = {});
ParamSet read_params(const std::filesystem::path& path);
std::string format_params(const ParamSet& params, const std::string& comment = {});

// Applies `key=value` where key is any document key (ode keys as `ode.J0_per_s`).
// Returns false when the key is not a parameter key.
bool set_param(ParamSet& params, const std::string& key, double value);

}  // namespace ctfsim
