#include "ctfsim/rpu_error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ctfsim/csv.hpp"
#include "ctfsim/error.hpp"
#include "ctfsim/parallel.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd sample_stats(std::span<const double> xs) {
  MeanStd s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return s;
}

double relative_spread(std::span<const double> xs) {
  if (!xs.empty() && std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; })) {
    return 0.0;
  }
  const auto s = sample_stats(xs);
  return s.mean > 0.0 ? s.stddev / s.mean : 0.0;
}

double t_pw_for(const ErrorStudyConfig& c, std::int64_t n) {
  return c.t_pw_of_n ? c.t_pw_of_n(n) : c.on_time / static_cast<double>(n);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform_at(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t r = splitmix64(seed + counter * kGolden);
  return static_cast<double>(r >> 11) * 0x1.0p-53;
}

std::int64_t BitStream::popcount() const {
  return std::count(bits.begin(), bits.end(), std::uint8_t{1});
}

BitStream encode(double p, std::int64_t n, std::uint64_t seed) {
  require(p >= 0.0 && p <= 1.0, "probability must be in [0, 1]");
  require(n >= 1, "stream length must be >= 1");
  BitStream s;
  s.p = p;
  s.seed = seed;
  s.bits.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    s.bits[static_cast<std::size_t>(i)] = uniform_at(seed, static_cast<std::uint64_t>(i)) < p;
  }
  return s;
}

std::int64_t coincidence_update(const BitStream& x, const BitStream& d) {
  require(x.size() == d.size(), "bit streams must have equal length");
  std::int64_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) count += x.bits[i] & d.bits[i];
  return count;
}

double device_update_slots(std::span<const std::int64_t> slots, double t_pw, double base_gap,
                           const ModelParams& params) {
  require(t_pw > 0.0 && base_gap > 0.0, "t_pw and base_gap must be > 0");
  if (slots.empty()) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(slots.size() - 1);
  for (std::size_t i = 1; i < slots.size(); ++i) {
    const auto idle = static_cast<double>(slots[i] - slots[i - 1] - 1);
    gaps.push_back(base_gap + idle * (t_pw + base_gap));
  }
  return vt_of(run_gapped_pulses(t_pw, gaps, params), params) - params.VT0;
}

double device_update(const BitStream& x, const BitStream& d, double t_pw, double base_gap,
                     const ModelParams& params) {
  require(x.size() == d.size(), "bit streams must have equal length");
  std::vector<std::int64_t> slots;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.bits[i] && d.bits[i]) slots.push_back(static_cast<std::int64_t>(i));
  }
  return device_update_slots(slots, t_pw, base_gap, params);
}

double random_error_mc(std::int64_t n, double p_x, double p_d, int trials, std::uint64_t seed) {
  require(trials >= 2, "at least 2 trials are required");
  std::vector<double> counts(static_cast<std::size_t>(trials));
  parallel_for(counts.size(), [&](std::size_t k) {
    const std::uint64_t s = seed + k;
    counts[k] = static_cast<double>(
        coincidence_update(encode(p_x, n, s), encode(p_d, n, splitmix64(s))));
  });
  return relative_spread(counts);
}

std::vector<UpdateErrorReport> error_decomposition(const ErrorStudyConfig& config,
                                                   const ModelParams& params) {
  require(config.trials >= 100, "error decomposition needs >= 100 trials");
  require(!config.n_list.empty(), "n list must not be empty");
  require(config.p_x >= 0.0 && config.p_x <= 1.0 && config.p_d >= 0.0 && config.p_d <= 1.0,
          "probabilities must be in [0, 1]");
  require(config.p_x * config.p_d > 0.0, "p_x p_d must be > 0");
  require(config.base_gap > 0.0, "base_gap must be > 0");
  params.validate();

  std::vector<UpdateErrorReport> out;
  for (auto n : config.n_list) {
    require(n >= 1, "every n must be >= 1");
    const double t_pw = t_pw_for(config, n);
    require(t_pw > 0.0, "t_pw(n) must be > 0");
    UpdateErrorReport r{n, 0.0, 0.0, 0.0};

    r.random_rel_err = random_error_mc(n, config.p_x, config.p_d, config.trials, config.seed);

    const double on_time = t_pw * static_cast<double>(n);
    const double ideal = closed_form_vtn(1, on_time, config.base_gap, params) - params.VT0;
    const double divided = closed_form_vtn(n, t_pw, config.base_gap, params) - params.VT0;
    r.systematic_rel_err = ideal > 0.0 ? std::clamp(1.0 - divided / ideal, 0.0, 1.0) : 1.0;

    const auto k = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(n) * config.p_x * config.p_d));
    std::vector<double> shifts(static_cast<std::size_t>(config.trials));
    parallel_for(shifts.size(), [&](std::size_t t) {
      const std::uint64_t s = splitmix64(splitmix64(config.seed + t));
      std::vector<std::int64_t> slots(static_cast<std::size_t>(n));
      std::iota(slots.begin(), slots.end(), 0);
      for (std::int64_t i = 0; i < k; ++i) {
        const auto remaining = static_cast<double>(n - i);
        const auto j = i + static_cast<std::int64_t>(uniform_at(s, static_cast<std::uint64_t>(i)) *
                                                     remaining);
        std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
      }
      slots.resize(static_cast<std::size_t>(k));
      std::sort(slots.begin(), slots.end());
      shifts[t] = device_update_slots(slots, t_pw, config.base_gap, params);
    });
    r.gap_noise_rel = relative_spread(shifts);
    out.push_back(r);
  }
  return out;
}

std::string error_reports_csv(std::span<const UpdateErrorReport> reports,
                              const std::string& timestamp) {
  CsvDocument doc({"n", "random_rel_err", "systematic_rel_err", "gap_noise_rel"}, timestamp);
  for (const auto& r : reports) {
    doc.row() << static_cast<long long>(r.n) << r.random_rel_err << r.systematic_rel_err
              << r.gap_noise_rel;
  }
  return doc.str();
}

std::string error_study_metadata(const ErrorStudyConfig& config) {
  std::ostringstream os;
  os << "generator: \"" << kGeneratorName << "\"\n"
     << "seed: " << config.seed << '\n'
     << "trials: " << config.trials << '\n'
     << "p_x: " << format_double(config.p_x) << '\n'
     << "p_d: " << format_double(config.p_d) << '\n'
     << "on_time_s: " << format_double(config.on_time) << '\n'
     << "base_gap_s: " << format_double(config.base_gap) << '\n'
     << "definitions:\n"
     << "  random_rel_err: \"sample sigma/mean of the coincidence count of x and d streams\"\n"
     << "  systematic_rel_err: \"1 - dVT(n pulses of T_ON/n, all coincident) / dVT(one T_ON "
        "pulse)\"\n"
     << "  gap_noise_rel: \"sample sigma/mean of dVT over random placements of "
        "round(n p_x p_d) pulses in n slots\"\n";
  return os.str();
}

PulseTrain compensated_schedule(double t_pw, double target_t_nv, const ModelParams& params,
                                double gap) {
  require(t_pw > 0.0 && target_t_nv > 0.0, "t_pw and target T_NV must be > 0");
  params.validate();
  const double steady_dead = dead_time(steady_entry_occupancy(t_pw, gap, params), params);
  if (t_pw <= steady_dead * (1.0 + 1e-9)) {
    fail(ErrorKind::Uncompensatable, "t_pw = " + format_double(t_pw) +
                                         " s does not exceed the steady dead time " +
                                         format_double(steady_dead) + " s");
  }
  if (target_t_nv / (t_pw - steady_dead) > kMaxCompensatedPulses) {
    fail(ErrorKind::Uncompensatable, "t_pw = " + format_double(t_pw) + " s would need more than " +
                                         format_double(kMaxCompensatedPulses) + " pulses");
  }
  const Pulse pulse(kProgramAmplitude, t_pw);
  DeviceState state;
  std::int64_t count = 0;
  while (state.t_nv < target_t_nv * (1.0 - 1e-12)) {
    state = apply_pulse_deadzone(state, pulse, gap, params);
    ++count;
  }
  return PulseTrain(pulse, count, gap);
}

CompensationStudy compensation_study(std::span<const double> widths, double target_t_nv,
                                     const ModelParams& params, double gap) {
  require(!widths.empty(), "width list must not be empty");
  CompensationStudy study;
  study.target_t_nv = target_t_nv;
  study.vt_reference = vt_of(DeviceState{0.0, target_t_nv, 0.0, 0.0}, params);
  double sum_unc = 0.0;
  double sum_comp = 0.0;
  for (double w : widths) {
    CompensationRow row{};
    row.t_pw = w;
    row.count_uncompensated =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(target_t_nv / w - 1e-9)));
    row.count_compensated = compensated_schedule(w, target_t_nv, params, gap).count();
    row.vt_uncompensated = closed_form_vtn(row.count_uncompensated, w, gap, params);
    row.vt_compensated = closed_form_vtn(row.count_compensated, w, gap, params);
    row.deficiency_uncompensated = std::abs(study.vt_reference - row.vt_uncompensated);
    row.deficiency_compensated = std::abs(study.vt_reference - row.vt_compensated);
    sum_unc += row.deficiency_uncompensated;
    sum_comp += row.deficiency_compensated;
    study.rows.push_back(row);
  }
  study.improvement = sum_comp > 0.0 ? sum_unc / sum_comp : INFINITY;
  return study;
}

std::string CompensationStudy::to_csv(const std::string& timestamp) const {
  CsvDocument doc({"t_pw_s", "n_uncompensated", "n_compensated", "vt_uncompensated_V",
                   "vt_compensated_V", "vt_reference_V", "deficiency_uncompensated_V",
                   "deficiency_compensated_V"},
                  timestamp);
  for (const auto& r : rows) {
    doc.row() << r.t_pw << static_cast<long long>(r.count_uncompensated)
              << static_cast<long long>(r.count_compensated) << r.vt_uncompensated
              << r.vt_compensated << vt_reference << r.deficiency_uncompensated
              << r.deficiency_compensated;
  }
  return doc.str();
}

}  // namespace ctfsim
