#include "ctfsim/params_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <sstream>
#include <utility>

#include "ctfsim/error.hpp"

namespace ctfsim {

namespace {

struct Field {
  const char* key;
  double ModelParams::*member;
  bool required;
};

constexpr std::array kModelFields{
    Field{"tau_trap_s", &ModelParams::tau_trap, true},
    Field{"tau_detrap_s", &ModelParams::tau_detrap, true},
    Field{"u_c", &ModelParams::u_c, true},
    Field{"A_V", &ModelParams::A, true},
    Field{"t0_s", &ModelParams::t0, true},
    Field{"VT0_V", &ModelParams::VT0, true},
    Field{"VTmax_V", &ModelParams::VT_max, true},
    Field{"bo_scale", &ModelParams::bo_scale, true},
    Field{"to_sens", &ModelParams::to_sens, true},
    Field{"ctl_sens", &ModelParams::ctl_sens, true},
    Field{"detrap_width_exp", &ModelParams::detrap_width_exp, false},
};

struct OdeField {
  const char* key;
  double OdeParams::*member;
};

constexpr std::array kOdeFields{
    OdeField{"J0_per_s", &OdeParams::J0},
    OdeField{"beta_V", &OdeParams::beta},
    OdeField{"kappa_V", &OdeParams::kappa},
    OdeField{"eta", &OdeParams::eta},
};

std::vector<Diagnostic> lint_document(const std::string& text, const std::string& file,
                                      ParamSet* out) {
  std::vector<Diagnostic> diags;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    diags.push_back({file, e.mark.line + 1, "", std::string("malformed document: ") + e.msg});
    return diags;
  }
  if (!root.IsMap()) {
    diags.push_back({file, detail::line_of(root), "", "parameters must be a key/value document"});
    return diags;
  }

  ParamSet set;
  set.model.detrap_width_exp = 0.0;
  for (const auto& f : kModelFields) {
    if (auto v = detail::read_double(root, f.key, file, diags, f.required)) set.model.*f.member = *v;
  }
  if (const YAML::Node ode = root["ode"]) {
    if (!ode.IsMap()) {
      diags.push_back({file, detail::line_of(ode), "ode", "expected a key/value map"});
    } else {
      for (const auto& f : kOdeFields) {
        if (auto v = detail::read_double(ode, f.key, file, diags, false)) set.ode.*f.member = *v;
      }
      for (const auto& kv : ode) {
        const auto key = kv.first.Scalar();
        const bool known = std::any_of(kOdeFields.begin(), kOdeFields.end(),
                                       [&](const OdeField& f) { return key == f.key; });
        if (!known) diags.push_back({file, detail::line_of(kv.first), "ode." + key, "unknown key"});
      }
    }
  }
  for (const auto& kv : root) {
    const auto key = kv.first.Scalar();
    const bool known = key == "ode" ||
                       std::any_of(kModelFields.begin(), kModelFields.end(),
                                   [&](const Field& f) { return key == f.key; });
    if (!known) diags.push_back({file, detail::line_of(kv.first), key, "unknown key"});
  }
  if (!diags.empty()) return diags;

  // Range checks map back onto the offending key.
  try {
    set.model.validate();
  } catch (const Error& e) {
    std::string field;
    for (const auto& f : kModelFields) {
      if (std::string(e.what()).find(f.key) != std::string::npos) {
        field = f.key;
        break;
      }
    }
    diags.push_back({file, field.empty() ? 0 : detail::line_of(root[field]), field, e.what()});
  }
  try {
    set.ode.validate();
  } catch (const Error& e) {
    diags.push_back({file, detail::line_of(root["ode"]), "ode", e.what()});
  }
  if (diags.empty() && out != nullptr) *out = set;
  return diags;
}

}  // namespace

ParamSet default_param_set() { return ParamSet{default_params(), default_ode_params()}; }

std::vector<Diagnostic> lint_params(const std::string& text, const std::string& file) {
  return lint_document(text, file, nullptr);
}

ParamSet parse_params(const std::string& text, const std::string& file) {
  ParamSet set;
  const auto diags = lint_document(text, file, &set);
  if (!diags.empty()) fail(ErrorKind::InvalidArgument, diags.front().to_string());
  return set;
}

ParamSet read_params(const std::filesystem::path& path) {
  return parse_params(read_text_file(path), path.string());
}

std::string format_params(const ParamSet& params, const std::string& comment) {
  std::ostringstream os;
  if (!comment.empty()) os << "# " << comment << '\n';
  for (const auto& f : kModelFields) {
    os << f.key << ": " << format_double(params.model.*f.member) << '\n';
  }
  os << "ode:\n";
  for (const auto& f : kOdeFields) {
    os << "  " << f.key << ": " << format_double(params.ode.*f.member) << '\n';
  }
  return os.str();
}

bool set_param(ParamSet& params, const std::string& key, double value) {
  for (const auto& f : kModelFields) {
    if (key == f.key) {
      params.model.*f.member = value;
      return true;
    }
  }
  for (const auto& f : kOdeFields) {
    if (key == std::string("ode.") + f.key) {
      params.ode.*f.member = value;
      return true;
    }
  }
  return false;
}

}  // namespace ctfsim
