#include "ctfsim/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <sstream>

#include "ctfsim/calibration.hpp"
#include "ctfsim/csv.hpp"
#include "ctfsim/extraction.hpp"
#include "ctfsim/ode_model.hpp"
#include "ctfsim/parallel.hpp"
#include "ctfsim/params_io.hpp"
#include "ctfsim/pulse_protocol.hpp"
#include "ctfsim/rpu_error.hpp"
#include "ctfsim/splits.hpp"

namespace ctfsim {

namespace {

namespace fs = std::filesystem;

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::simulate, "simulate"}, {Command::sweep_n, "sweep-n"},
    {Command::sweep_gap, "sweep-gap"}, {Command::splits, "splits"},
    {Command::extract, "extract"},   {Command::calibrate, "calibrate"},
    {Command::rpu_error, "rpu-error"},
};

struct Options {
  std::optional<double> t_gap;
  double on_time = kTableOnTime;
  Variant variant = Variant::deadzone;
  double epsilon = kDefaultSaturationEpsilon;
  std::int64_t n_fix = kDefaultFixedNreq;
  double min_t_nv = kDefaultMinTnv;
  double target_t_nv = 2e-3;
  double p_x = 0.5;
  double p_d = 0.5;
  int trials = 1000;
  double base_gap = 1e-3;
  int budget = 400;
  double fall = 0.30;
  double knee = 2e-6;
};

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// Returns an error message, empty on success.
using Setter = std::function<std::string(Options&, const std::string&)>;

Setter real(double Options::*member, double lo, bool lo_inclusive, double hi = INFINITY) {
  return [=](Options& o, const std::string& text) -> std::string {
    const auto v = parse_number(text);
    if (!v) return "expected a number, got '" + text + "'";
    if (lo_inclusive ? *v < lo : *v <= lo) {
      return "must be " + std::string(lo_inclusive ? ">= " : "> ") + format_double(lo);
    }
    if (*v > hi) return "must be <= " + format_double(hi);
    o.*member = *v;
    return {};
  };
}

template <typename Int>
Setter integer(Int Options::*member, std::int64_t lo) {
  return [=](Options& o, const std::string& text) -> std::string {
    const auto v = parse_int(text);
    if (!v) return "expected an integer, got '" + text + "'";
    if (*v < lo) return "must be >= " + std::to_string(lo);
    o.*member = static_cast<Int>(*v);
    return {};
  };
}

const std::vector<std::pair<std::string_view, Setter>>& run_options() {
  static const std::vector<std::pair<std::string_view, Setter>> table{
      {"t_gap_s",
       [](Options& o, const std::string& text) -> std::string {
         const auto v = parse_number(text);
         if (!v) return "expected a number, got '" + text + "'";
         if (*v < 0.0) return "t_gap must be >= 0";
         o.t_gap = *v;
         return {};
       }},
      {"on_time_s", real(&Options::on_time, 0.0, false)},
      {"variant",
       [](Options& o, const std::string& text) -> std::string {
         try {
           o.variant = parse_variant(text);
         } catch (const Error& e) {
           return e.what();
         }
         return {};
       }},
      {"epsilon_V", real(&Options::epsilon, 0.0, false)},
      {"n_fix", integer(&Options::n_fix, 100)},
      {"min_T_NV_s", real(&Options::min_t_nv, 0.0, true)},
      {"target_T_NV_s", real(&Options::target_t_nv, 0.0, false)},
      {"p_x", real(&Options::p_x, 0.0, false, 1.0)},
      {"p_d", real(&Options::p_d, 0.0, false, 1.0)},
      {"trials", integer(&Options::trials, 100)},
      {"base_gap_s", real(&Options::base_gap, 0.0, false)},
      {"budget", integer(&Options::budget, 100)},
      {"d_vt_log_fall_V", real(&Options::fall, 0.0, true)},
      {"knee_tpw_s", real(&Options::knee, 0.0, false)},
  };
  return table;
}

bool uses_protocol(Command c) {
  return c == Command::simulate || c == Command::sweep_n || c == Command::sweep_gap;
}

struct Resolved {
  ParamSet params;
  std::string params_text;
  std::optional<ExperimentSchedule> schedule;
  Options options;
};

// Loads inputs and applies overrides, collecting diagnostics instead of throwing.
Resolved resolve(const RunConfig& config, std::vector<Diagnostic>& diags) {
  Resolved r;
  r.params = default_param_set();
  r.params_text = format_params(r.params, std::string(kDefaultParamsVersion));

  if (config.params_file) {
    const auto& path = *config.params_file;
    if (!fs::is_regular_file(path)) {
      diags.push_back({path.string(), 0, "params_file", "file not found"});
    } else {
      r.params_text = read_text_file(path);
      auto d = lint_params(r.params_text, path.string());
      if (d.empty()) {
        r.params = parse_params(r.params_text, path.string());
      } else {
        diags.insert(diags.end(), d.begin(), d.end());
      }
    }
  }
  if (config.protocol_file) {
    const auto& path = *config.protocol_file;
    if (!uses_protocol(config.command)) {
      diags.push_back({path.string(), 0, "protocol_file",
                       "command '" + std::string(to_string(config.command)) +
                           "' does not take a protocol"});
    } else if (!fs::is_regular_file(path)) {
      diags.push_back({path.string(), 0, "protocol_file", "file not found"});
    } else {
      const auto text = read_text_file(path);
      auto d = lint_protocol(text, path.string());
      if (d.empty()) {
        r.schedule = parse_protocol(text, path.string());
      } else {
        diags.insert(diags.end(), d.begin(), d.end());
      }
    }
  }

  bool param_override = false;
  for (const auto& [key, value] : config.overrides) {
    const auto& table = run_options();
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const auto& entry) { return entry.first == key; });
    if (it != table.end()) {
      if (auto msg = it->second(r.options, value); !msg.empty()) {
        diags.push_back({"--set", 0, key, msg});
      }
      continue;
    }
    const auto v = parse_number(value);
    ParamSet probe = r.params;
    if (!set_param(probe, key, 0.0)) {
      diags.push_back({"--set", 0, key, "unknown key"});
    } else if (!v) {
      diags.push_back({"--set", 0, key, "expected a number, got '" + value + "'"});
    } else {
      set_param(r.params, key, *v);
      param_override = true;
    }
  }
  if (param_override) {
    try {
      r.params.model.validate();
      r.params.ode.validate();
    } catch (const Error& e) {
      diags.push_back({"--set", 0, "params", e.what()});
    }
  }
  if (config.output_dir.empty()) {
    diags.push_back({"", 0, "output_dir", "output directory is required"});
  } else if (fs::exists(config.output_dir) && !fs::is_directory(config.output_dir)) {
    diags.push_back({config.output_dir.string(), 0, "output_dir", "not a directory"});
  }
  return r;
}

using Outputs = std::vector<std::pair<std::string, std::string>>;

VtTrace simulate_train(const PulseTrain& train, const ParamSet& ps, Variant variant) {
  if (variant == Variant::ode) {
    return run_train_ode(train, ps.model, ps.ode, train.pulse().width() / 20.0);
  }
  return run_train(train, ps.model);
}

std::vector<PulseTrain> base_trains(const Resolved& r, double default_gap) {
  if (r.schedule) {
    auto trains = r.schedule->trains();
    if (r.options.t_gap) {
      for (auto& t : trains) t = t.with_gap(*r.options.t_gap);
    }
    return trains;
  }
  const auto counts = table1_counts();
  return table1_trains(r.options.on_time, counts, r.options.t_gap.value_or(default_gap));
}

std::vector<VtTrace> run_all(std::span<const PulseTrain> trains, const ParamSet& ps,
                             Variant variant) {
  std::vector<VtTrace> traces(trains.size(), VtTrace{{}, ps.model, trains.front()});
  parallel_for(trains.size(),
               [&](std::size_t i) { traces[i] = simulate_train(trains[i], ps, variant); });
  return traces;
}

Outputs run_simulate(const Resolved& r, const std::string& stamp) {
  std::vector<PulseTrain> trains;
  if (r.schedule) {
    trains = base_trains(r, kLongGap);
  } else {
    for (const auto& t : base_trains(r, kLongGap)) {
      trains.push_back(with_intermediate_reads(t, log_read_points(t.count())));
    }
  }
  const auto traces = run_all(trains, r.params, r.options.variant);
  Outputs out;
  CsvDocument summary({"train", "N", "t_pw_s", "t_gap_s", "vt_N_V"}, stamp);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "trace_%03zu.csv", i);
    out.emplace_back(name, traces[i].to_csv(stamp));
    summary.row() << i << static_cast<long long>(trains[i].count()) << trains[i].pulse().width()
                  << trains[i].gap() << traces[i].final_vt();
  }
  out.emplace_back("simulate.csv", summary.str());
  return out;
}

Outputs run_sweep_n(const Resolved& r, const std::string& stamp) {
  const auto trains = base_trains(r, kLongGap);
  const auto traces = run_all(trains, r.params, r.options.variant);
  CsvDocument doc({"N", "t_pw_s", "t_gap_s", "vt_N_V", "delta_vt_V"}, stamp);
  for (std::size_t i = 0; i < trains.size(); ++i) {
    doc.row() << static_cast<long long>(trains[i].count()) << trains[i].pulse().width()
              << trains[i].gap() << traces[i].final_vt()
              << traces[i].final_vt() - r.params.model.VT0;
  }
  return {{"fig3a.csv", doc.str()}};
}

Outputs run_sweep_gap(const Resolved& r, const std::string& stamp) {
  const auto trains = base_trains(r, kLongGap);
  const auto gaps = default_gap_grid();
  std::vector<PulseTrain> grid;
  for (const auto& t : trains) {
    for (double g : gaps) grid.push_back(t.with_gap(g));
  }
  const auto traces = run_all(grid, r.params, r.options.variant);

  CsvDocument curves({"N", "t_pw_s", "t_gap_s", "vt_N_V"}, stamp);
  std::vector<std::pair<double, double>> t_crit;
  for (std::size_t i = 0; i < trains.size(); ++i) {
    std::vector<GapPoint> pts;
    for (std::size_t j = 0; j < gaps.size(); ++j) {
      const auto& tr = traces[i * gaps.size() + j];
      curves.row() << static_cast<long long>(trains[i].count()) << trains[i].pulse().width()
                   << gaps[j] << tr.final_vt();
      pts.push_back({gaps[j], tr.final_vt()});
    }
    if (trains[i].count() >= 100) {
      const GapCurve curve(std::move(pts), trains[i].count(), trains[i].pulse().width());
      t_crit.emplace_back(curve.width(), detect_t_crit(curve, r.options.epsilon));
    }
  }
  std::sort(t_crit.begin(), t_crit.end());
  CsvDocument crit({"t_pw_s", "t_crit_s"}, stamp);
  for (const auto& [w, tc] : t_crit) crit.row() << w << tc;
  return {{"fig3b.csv", curves.str()}, {"fig3c.csv", crit.str()}};
}

Outputs run_splits(const Resolved& r, const std::string& stamp) {
  const ModelParams& base = r.params.model;
  const double gap = r.options.t_gap.value_or(1e-3);
  const double on_time = r.options.on_time;
  const double vt1 = closed_form_vtn(1, on_time, gap, base);

  struct Spec {
    const char* label;
    StackLayer layer;
    double factor;
  };
  const Spec specs[] = {
      {"BO_12nm", StackLayer::BlockingOxide, 1.0},
      {"BO_15nm", StackLayer::BlockingOxide, 1.25},
      {"BO_20nm", StackLayer::BlockingOxide, 1.67},
      {"TO_thick", StackLayer::TunnelOxide, 1.25},
      {"CTL_anneal", StackLayer::ChargeTrapLayer, 2.0},
  };
  std::vector<Split> splits;
  for (const auto& s : specs) {
    splits.push_back({s.label, normalize_single_pulse(apply_split(base, s.layer, s.factor),
                                                      on_time, vt1, gap)});
  }
  const auto counts = table1_counts();
  const auto sweep = split_sweep(splits, counts, on_time, gap);

  CsvDocument curves({"split", "N", "t_pw_s", "t_gap_s", "vt_N_V"}, stamp);
  for (std::size_t s = 0; s < splits.size(); ++s) {
    for (std::size_t c = 0; c < counts.size(); ++c) {
      curves.row() << sweep.labels[s] << static_cast<long long>(counts[c]) << sweep.widths[c]
                   << gap << sweep.vt[s][c];
    }
  }
  CsvDocument summary({"split", "bo_scale", "tau_trap_s", "A_V", "vt_1_V", "delta_vt_ref_V",
                       "reduction_ref_V", "reference_N"},
                      stamp);
  for (std::size_t s = 0; s < splits.size(); ++s) {
    summary.row() << sweep.labels[s] << splits[s].params.bo_scale << splits[s].params.tau_trap
                  << splits[s].params.A << sweep.vt1[s] << sweep.delta_vt_reference[s]
                  << sweep.reduction_reference[s] << static_cast<long long>(sweep.reference_count);
  }
  return {{"fig4c.csv", curves.str()}, {"fig4d.csv", summary.str()}};
}

Outputs run_extract(const Resolved& r, const std::string& stamp) {
  const ModelParams& p = r.params.model;
  const auto inputs = synthesize_extraction_inputs(p, default_synthetic_spec());

  std::vector<double> targets;
  for (double t_nv : {100e-6, 200e-6, 500e-6, 1e-3, 2e-3}) {
    targets.push_back(vt_of(DeviceState{0.0, t_nv, 0.0, 0.0}, p));
  }
  ExtractionOptions opts;
  opts.n_fix = r.options.n_fix;
  opts.epsilon = r.options.epsilon;
  opts.min_t_nv = r.options.min_t_nv;
  const auto report = full_extraction(inputs.traces, inputs.one_shot, inputs.gap_curves, targets,
                                      opts);

  CsvDocument fig6a({"t_pw_s", "pulse_index", "vt_V"}, stamp);
  CsvDocument fig6b({"vt_tar_V", "t_pw_s", "n_req"}, stamp);
  for (const auto& trace : inputs.traces) {
    const auto reads = log_read_points(trace.train.count());
    for (const auto& e : trace.entries) {
      if (std::binary_search(reads.begin(), reads.end(), e.pulse_index)) {
        fig6a.row() << trace.train.pulse().width() << static_cast<long long>(e.pulse_index)
                    << e.vt;
      }
    }
  }
  for (double vt : targets) {
    for (const auto& trace : inputs.traces) {
      if (trace.final_vt() < vt) continue;
      fig6b.row() << vt << trace.train.pulse().width()
                  << static_cast<long long>(n_required(trace, vt));
    }
  }

  const double knee = cutoff_width(p, kTableOnTime);
  std::vector<double> widths;
  for (auto n : table1_counts()) {
    const double w = kTableOnTime / static_cast<double>(n);
    if (w > knee && w <= r.options.target_t_nv) widths.push_back(w);
  }
  std::sort(widths.begin(), widths.end());
  if (widths.empty()) {
    fail(ErrorKind::Uncompensatable, "no Table I width lies between the knee and the target");
  }
  const auto comp = compensation_study(widths, r.options.target_t_nv, p);

  std::ostringstream doc;
  doc << report.to_document();
  doc << "compensation:\n"
      << "  target_T_NV_s: " << format_double(comp.target_t_nv) << '\n'
      << "  knee_tpw_s: " << format_double(knee) << '\n'
      << "  improvement: " << format_double(comp.improvement) << '\n';
  doc << "reads: \"V_T sampled after every pulse; the read sees CTL charge only, so its "
         "position inside the gap does not matter\"\n";

  return {{"extraction_report.yaml", doc.str()},
          {"t_trap_vs_target.csv", report.t_trap_csv(stamp)},
          {"t_crit_vs_tpw.csv", report.t_crit_csv(stamp)},
          {"fig6a.csv", fig6a.str()},
          {"fig6b.csv", fig6b.str()},
          {"fig6e.csv", comp.to_csv(stamp)}};
}

Outputs run_calibrate(const Resolved& r, const std::string& stamp) {
  AnchorSet anchors;
  anchors.d_vt_log_fall = r.options.fall;
  anchors.knee_tpw = r.options.knee;
  anchors.vt0 = r.params.model.VT0;
  anchors.t_on = r.options.on_time;
  const auto result = fit(anchors, r.params.model, r.options.budget);

  const ParamSet fitted{result.params, r.params.ode};
  CsvDocument check({"N", "t_pw_s", "t_gap_s", "vt_N_V"}, stamp);
  for (auto n : table1_counts()) {
    const double w = anchors.t_on / static_cast<double>(n);
    check.row() << static_cast<long long>(n) << w << kLongGap
                << closed_form_vtn(n, w, kLongGap, result.params);
  }
  return {{"calibrated_params.yaml", format_params(fitted, "fitted by ctf_sim calibrate")},
          {"fit_report.yaml", result.to_document(anchors)},
          {"calibrated_sweep_n.csv", check.str()}};
}

Outputs run_rpu_error(const Resolved& r, const RunConfig& config, const std::string& stamp) {
  ErrorStudyConfig study;
  study.n_list = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  study.p_x = r.options.p_x;
  study.p_d = r.options.p_d;
  study.on_time = r.options.on_time;
  study.base_gap = r.options.base_gap;
  study.trials = r.options.trials;
  study.seed = config.seed;
  const auto reports = error_decomposition(study, r.params.model);
  return {{"fig7.csv", error_reports_csv(reports, stamp)},
          {"fig7_meta.yaml", error_study_metadata(study)}};
}

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string msg;
  for (const auto& d : diags) {
    if (!msg.empty()) msg += '\n';
    msg += d.to_string();
  }
  return msg;
}

std::string yaml_quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

Command parse_command(std::string_view name) {
  for (const auto& [c, n] : kCommandNames) {
    if (n == name) return c;
  }
  fail(ErrorKind::InvalidArgument, "unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command c) {
  for (const auto& [cmd, n] : kCommandNames) {
    if (cmd == c) return n;
  }
  return "unknown";
}

std::vector<std::string_view> command_names() {
  std::vector<std::string_view> names;
  for (const auto& entry : kCommandNames) names.push_back(entry.second);
  return names;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"fig3a", Command::sweep_n, {}, "V_T,N over the Table I trains at t_gap = 10 s"},
      {"fig3b", Command::sweep_gap, {}, "V_T,N against t_gap, and t_crit against t_pw"},
      {"fig4c", Command::splits, {{"t_gap_s", "0.001"}}, "BO/TO/CTL process splits"},
      {"fig6a", Command::extract, {}, "trapping-time extraction on synthetic data"},
      {"fig6e", Command::extract, {{"target_T_NV_s", "0.002"}}, "T_NV-compensated schedules"},
      {"fig7", Command::rpu_error, {{"base_gap_s", "0.001"}, {"trials", "1000"}},
       "stochastic-update error decomposition"},
  };
  return table;
}

RunConfig apply_preset(RunConfig config, std::string_view name) {
  const auto& table = presets();
  auto it = std::find_if(table.begin(), table.end(),
                         [&](const Preset& p) { return p.name == name; });
  if (it == table.end()) fail(ErrorKind::InvalidArgument, "unknown preset '" + std::string(name) + "'");
  config.command = it->command;
  config.preset = std::string(name);
  auto overrides = it->overrides;
  overrides.insert(overrides.end(), config.overrides.begin(), config.overrides.end());
  config.overrides = std::move(overrides);
  return config;
}

std::vector<std::string_view> run_option_keys() {
  std::vector<std::string_view> keys;
  for (const auto& entry : run_options()) keys.push_back(entry.first);
  return keys;
}

std::vector<Diagnostic> validate(const RunConfig& config) {
  std::vector<Diagnostic> diags;
  try {
    resolve(config, diags);
  } catch (const Error& e) {
    diags.push_back({"", 0, "", e.what()});
  }
  return diags;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::Io, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string resolve_timestamp(const std::string& explicit_stamp) {
  if (!explicit_stamp.empty()) return explicit_stamp;
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    if (auto v = parse_int(env)) t = static_cast<std::time_t>(*v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::PreconditionViolation:
      return 2;
    case ErrorKind::Io:
      return 3;
    default:
      return 4;
  }
}

std::string RunManifest::to_document() const {
  std::ostringstream os;
  os << "tool: " << yaml_quoted(tool_version) << '\n'
     << "command: " << to_string(config.command) << '\n'
     << "preset: " << yaml_quoted(config.preset) << '\n'
     << "params_file: " << yaml_quoted(config.params_file ? config.params_file->string() : "")
     << '\n'
     << "params_sha256: " << params_sha256 << '\n'
     << "protocol_file: " << yaml_quoted(config.protocol_file ? config.protocol_file->string() : "")
     << '\n'
     << "output_dir: " << yaml_quoted(config.output_dir.string()) << '\n'
     << "seed: " << config.seed << '\n'
     << "timestamp: " << yaml_quoted(config.timestamp) << '\n'
     << "overrides:" << (config.overrides.empty() ? " []\n" : "\n");
  for (const auto& [k, v] : config.overrides) os << "  - " << yaml_quoted(k + "=" + v) << '\n';
  os << "wall_seconds: " << format_double(wall_seconds) << '\n'
     << "files:" << (files.empty() ? " []\n" : "\n");
  for (const auto& f : files) {
    os << "  - name: " << yaml_quoted(f.name) << '\n' << "    sha256: " << f.sha256 << '\n';
  }
  if (!notes.empty()) {
    os << "notes:\n";
    for (const auto& n : notes) os << "  - " << yaml_quoted(n) << '\n';
  }
  return os.str();
}

RunManifest run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [path, field] : {std::pair{config.params_file, "params_file"},
                                    std::pair{config.protocol_file, "protocol_file"}}) {
    if (path && !fs::is_regular_file(*path)) {
      fail(ErrorKind::Io, std::string(field) + ": cannot open " + path->string());
    }
  }
  std::vector<Diagnostic> diags;
  const Resolved r = resolve(config, diags);
  if (!diags.empty()) fail(ErrorKind::InvalidArgument, join_diagnostics(diags));

  RunManifest manifest;
  manifest.config = config;
  manifest.config.timestamp = resolve_timestamp(config.timestamp);
  manifest.tool_version = std::string(kToolVersion);
  manifest.params_sha256 = sha256_hex(r.params_text);
  if (!config.params_file) {
    manifest.notes.push_back("parameters: shipped defaults " + std::string(kDefaultParamsVersion));
  }
  const std::string& stamp = manifest.config.timestamp;

  Outputs outputs;
  try {
    switch (config.command) {
      case Command::simulate: outputs = run_simulate(r, stamp); break;
      case Command::sweep_n: outputs = run_sweep_n(r, stamp); break;
      case Command::sweep_gap: outputs = run_sweep_gap(r, stamp); break;
      case Command::splits: outputs = run_splits(r, stamp); break;
      case Command::extract: outputs = run_extract(r, stamp); break;
      case Command::calibrate: outputs = run_calibrate(r, stamp); break;
      case Command::rpu_error: outputs = run_rpu_error(r, config, stamp); break;
    }
  } catch (const Error& e) {
    throw e.with_step(to_string(config.command));
  }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + config.output_dir.string() + ": " + ec.message());
  fs::remove(config.output_dir / kManifestName, ec);
  for (const auto& [name, text] : outputs) {
    write_text_file_atomic(config.output_dir / name, text);
    manifest.files.push_back({name, sha256_hex(text)});
  }
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text_file_atomic(config.output_dir / kManifestName, manifest.to_document());
  return manifest;
}

}  // namespace ctfsim
