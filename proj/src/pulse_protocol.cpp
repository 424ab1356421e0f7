#include "ctfsim/pulse_protocol.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctfsim/error.hpp"

namespace ctfsim {

namespace {

bool strictly_increasing(std::span<const std::int64_t> v) {
  return std::adjacent_find(v.begin(), v.end(),
                            [](auto a, auto b) { return b <= a; }) == v.end();
}

void check_read_points(std::span<const std::int64_t> reads, std::int64_t count) {
  require(strictly_increasing(reads), "read points must be strictly increasing");
  for (auto r : reads) {
    require(r >= 0 && r <= count, "read point " + std::to_string(r) + " outside [0, " +
                                      std::to_string(count) + "]");
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

}  // namespace

Pulse::Pulse(double amplitude, double width, double rise_fall)
    : amplitude_(amplitude), width_(width), rise_fall_(rise_fall) {
  require(std::isfinite(amplitude), "pulse amplitude must be finite");
  require(std::isfinite(width) && width > 0.0, "pulse width must be > 0");
  require(std::isfinite(rise_fall) && rise_fall >= 0.0, "rise/fall time must be >= 0");
}

PulseTrain::PulseTrain(Pulse pulse, std::int64_t count, double gap,
                       std::vector<std::int64_t> read_points)
    : pulse_(pulse), count_(count), gap_(gap), read_points_(std::move(read_points)) {
  require(count >= 1, "pulse count must be >= 1");
  require(std::isfinite(gap) && gap >= 0.0, "t_gap must be >= 0");
  if (read_points_.empty()) read_points_ = {0, count_};
  check_read_points(read_points_, count_);
}

PulseTrain PulseTrain::with_gap(double gap) const {
  return PulseTrain(pulse_, count_, gap, read_points_);
}

ExperimentSchedule::ExperimentSchedule(std::vector<ScheduleStep> steps, std::string label)
    : steps_(std::move(steps)), label_(std::move(label)) {
  bool initialized = false;
  for (const auto& step : steps_) {
    if (std::holds_alternative<InitMarker>(step)) {
      initialized = true;
    } else {
      require(initialized, "every pulse train must follow an initialization marker");
    }
  }
}

std::vector<PulseTrain> ExperimentSchedule::trains() const {
  std::vector<PulseTrain> out;
  for (const auto& step : steps_) {
    if (const auto* t = std::get_if<PulseTrain>(&step)) out.push_back(*t);
  }
  return out;
}

ExperimentSchedule ExperimentSchedule::from_trains(std::span<const PulseTrain> trains,
                                                   std::string label) {
  std::vector<ScheduleStep> steps;
  steps.reserve(2 * trains.size());
  for (const auto& t : trains) {
    steps.emplace_back(InitMarker{});
    steps.emplace_back(t);
  }
  return ExperimentSchedule(std::move(steps), std::move(label));
}

std::vector<PulseTrain> table1_trains(double on_time, std::span<const std::int64_t> counts,
                                      double gap, double amplitude) {
  require(std::isfinite(on_time) && on_time > 0.0, "T_ON must be > 0");
  require(!counts.empty(), "N list must not be empty");
  std::vector<PulseTrain> out;
  out.reserve(counts.size());
  for (auto n : counts) {
    require(n >= 1, "every N must be >= 1");
    out.emplace_back(Pulse(amplitude, on_time / static_cast<double>(n)), n, gap);
  }
  return out;
}

std::vector<PulseTrain> gap_sweep(const PulseTrain& train, std::span<const double> gaps) {
  require(!gaps.empty(), "gap list must not be empty");
  std::vector<PulseTrain> out;
  out.reserve(gaps.size());
  for (double g : gaps) out.push_back(train.with_gap(g));
  return out;
}

PulseTrain with_intermediate_reads(const PulseTrain& train, std::vector<std::int64_t> indices) {
  require(!indices.empty(), "read index list must not be empty");
  check_read_points(indices, train.count());
  return PulseTrain(train.pulse(), train.count(), train.gap(), std::move(indices));
}

std::vector<std::int64_t> table1_counts() {
  return {1, 10, 25, 50, 100, 500, 1000, 2000, 5000, 10000};
}

std::vector<double> default_gap_grid() {
  return {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
}

std::vector<std::int64_t> log_read_points(std::int64_t count) {
  require(count >= 1, "count must be >= 1");
  std::vector<std::int64_t> out{0};
  for (std::int64_t decade = 1; decade <= count; decade *= 10) {
    for (std::int64_t m : {1, 2, 5}) {
      const std::int64_t v = m * decade;
      if (v < count) out.push_back(v);
    }
  }
  out.push_back(count);
  return out;
}

// ---------------------------------------------------------------------------
// Protocol documents

namespace {

std::optional<PulseTrain> lint_train(const YAML::Node& node, const std::string& file,
                                     std::vector<Diagnostic>& diags) {
  const auto before = diags.size();
  const auto amplitude = detail::read_double(node, "amplitude_V", file, diags);
  const auto width = detail::read_double(node, "t_pw_s", file, diags);
  const auto count = detail::read_integer(node, "N", file, diags);
  const auto gap = detail::read_double(node, "t_gap_s", file, diags);
  const auto on_time = detail::read_double(node, "T_ON_s", file, diags, /*required=*/false);

  if (width && *width <= 0.0) {
    diags.push_back({file, detail::line_of(node["t_pw_s"]), "t_pw_s", "must be > 0"});
  }
  if (count && *count < 1) {
    diags.push_back({file, detail::line_of(node["N"]), "N", "must be >= 1"});
  }
  if (gap && *gap < 0.0) {
    diags.push_back({file, detail::line_of(node["t_gap_s"]), "t_gap_s", "must be >= 0"});
  }
  if (on_time && width && count && *count >= 1) {
    const double declared = *on_time;
    const double implied = static_cast<double>(*count) * *width;
    if (!(std::abs(implied - declared) <= 1e-9 * std::abs(declared))) {
      std::ostringstream msg;
      msg << "arithmetic mismatch: N x t_pw = " << format_double(implied)
          << " s but T_ON_s = " << format_double(declared) << " s";
      diags.push_back({file, detail::line_of(node["T_ON_s"]), "T_ON_s", msg.str()});
    }
  }

  std::vector<std::int64_t> reads;
  if (const YAML::Node r = node["reads"]) {
    if (!r.IsSequence()) {
      diags.push_back({file, detail::line_of(r), "reads", "expected a list of pulse indices"});
    } else {
      for (const auto& item : r) {
        try {
          reads.push_back(item.as<std::int64_t>());
        } catch (const YAML::Exception&) {
          diags.push_back({file, detail::line_of(item), "reads", "not an integer index"});
        }
      }
      if (!strictly_increasing(reads)) {
        diags.push_back({file, detail::line_of(r), "reads", "indices must be strictly increasing"});
      }
      if (count) {
        for (auto idx : reads) {
          if (idx < 0 || idx > *count) {
            diags.push_back({file, detail::line_of(r), "reads",
                             "index " + std::to_string(idx) + " outside [0, N]"});
          }
        }
      }
    }
  }

  if (diags.size() != before) return std::nullopt;
  return PulseTrain(Pulse(*amplitude, *width), *count, *gap, std::move(reads));
}

std::vector<Diagnostic> lint_document(const std::string& text, const std::string& file,
                                      std::optional<ExperimentSchedule>* out) {
  std::vector<Diagnostic> diags;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    diags.push_back({file, e.mark.line + 1, "", std::string("malformed document: ") + e.msg});
    return diags;
  }
  if (!root.IsMap()) {
    diags.push_back({file, detail::line_of(root), "", "protocol must be a key/value document"});
    return diags;
  }
  std::string label;
  if (const YAML::Node l = root["label"]; l && l.IsScalar()) {
    label = l.Scalar();
  } else {
    diags.push_back({file, detail::line_of(root), "label", "missing text label"});
  }
  const YAML::Node trains = root["trains"];
  if (!trains || !trains.IsSequence()) {
    diags.push_back({file, detail::line_of(root), "trains", "missing list of trains"});
    return diags;
  }
  std::vector<ScheduleStep> steps;
  bool initialized = false;
  for (const auto& item : trains) {
    if (item.IsScalar() && item.Scalar() == "init") {
      initialized = true;
      steps.emplace_back(InitMarker{});
      continue;
    }
    if (!item.IsMap()) {
      diags.push_back({file, detail::line_of(item), "trains",
                       "entry must be `init` or a pulse-train map"});
      continue;
    }
    if (!initialized) {
      diags.push_back({file, detail::line_of(item), "trains",
                       "pulse train is not preceded by an `init` marker"});
    }
    if (auto t = lint_train(item, file, diags)) steps.emplace_back(std::move(*t));
  }
  if (diags.empty() && out != nullptr) out->emplace(std::move(steps), std::move(label));
  return diags;
}

}  // namespace

std::vector<Diagnostic> lint_protocol(const std::string& text, const std::string& file) {
  return lint_document(text, file, nullptr);
}

ExperimentSchedule parse_protocol(const std::string& text, const std::string& file) {
  std::optional<ExperimentSchedule> schedule;
  const auto diags = lint_document(text, file, &schedule);
  if (!diags.empty()) fail(ErrorKind::InvalidArgument, diags.front().to_string());
  return std::move(*schedule);
}

ExperimentSchedule read_protocol(const std::filesystem::path& path) {
  return parse_protocol(read_text_file(path), path.string());
}

std::string format_protocol(const ExperimentSchedule& schedule) {
  std::ostringstream os;
  os << "label: " << quote(schedule.label()) << '\n';
  os << "trains:\n";
  for (const auto& step : schedule.steps()) {
    if (std::holds_alternative<InitMarker>(step)) {
      os << "  - init\n";
      continue;
    }
    const auto& t = std::get<PulseTrain>(step);
    os << "  - amplitude_V: " << format_double(t.pulse().amplitude()) << '\n';
    os << "    t_pw_s: " << format_double(t.pulse().width()) << '\n';
    os << "    N: " << t.count() << '\n';
    os << "    t_gap_s: " << format_double(t.gap()) << '\n';
    os << "    reads: [";
    for (std::size_t i = 0; i < t.read_points().size(); ++i) {
      if (i > 0) os << ", ";
      os << t.read_points()[i];
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace ctfsim
