#pragma once

// Weight-update error of a stochastic-bitstream update executed on the
// device: random encoding error of the coincidence count, systematic loss
// from dividing T_ON into n pulses, and noise from the random gaps between
// fired pulses. Also the T_NV-compensated write schedule.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctfsim/device_model.hpp"

namespace ctfsim {

// Counter-based generator: SplitMix64 finaliser applied to seed + counter.
inline constexpr std::string_view kGeneratorName = "splitmix64-ctr/1";

std::uint64_t splitmix64(std::uint64_t x);
// Uniform in [0, 1) from the counter-th output of the stream `seed`.
double uniform_at(std::uint64_t seed, std::uint64_t counter);

struct BitStream {
  std::vector<std::uint8_t> bits;
  double p = 0.0;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return bits.size(); }
  [[nodiscard]] std::int64_t popcount() const;
};

// Bit i is set when uniform_at(seed, i) < p.
BitStream encode(double p, std::int64_t n, std::uint64_t seed);

std::int64_t coincidence_update(const BitStream& x, const BitStream& d);

// Slot i occupies t_pw + base_gap; a pulse fires where both bits are set and
// idle slots lengthen the gap to the next fired pulse. Returns Delta V_T.
double device_update(const BitStream& x, const BitStream& d, double t_pw, double base_gap,
                     const ModelParams& params);

// Delta V_T for pulses fired at the given (sorted, distinct) slot indices.
double device_update_slots(std::span<const std::int64_t> slots, double t_pw, double base_gap,
                           const ModelParams& params);

struct UpdateErrorReport {
  std::int64_t n;
  double random_rel_err;
  double systematic_rel_err;
  double gap_noise_rel;
};

struct ErrorStudyConfig {
  std::vector<std::int64_t> n_list;
  double p_x = 0.5;
  double p_d = 0.5;
  double on_time = kTableOnTime;           // t_pw(n) = on_time / n unless t_pw_of_n is set
  std::function<double(std::int64_t)> t_pw_of_n;
  double base_gap = 1e-3;                  // s
  int trials = 1000;
  std::uint64_t seed = 1;
};

// Sample sigma / mean of the coincidence count over `trials` stream pairs.
// Trial k uses seed + k for x and splitmix64(seed + k) for d.
double random_error_mc(std::int64_t n, double p_x, double p_d, int trials, std::uint64_t seed);

// systematic: 1 - Delta V_T(n pulses, all coincident) / Delta V_T(one pulse
// of the same T_ON). gap noise: sigma / mean of Delta V_T over random
// placements of k = max(1, round(n p_x p_d)) pulses among n slots.
std::vector<UpdateErrorReport> error_decomposition(const ErrorStudyConfig& config,
                                                   const ModelParams& params);

// Header `n,random_rel_err,systematic_rel_err,gap_noise_rel`.
std::string error_reports_csv(std::span<const UpdateErrorReport> reports,
                              const std::string& timestamp = {});
// Definitions and generator, for the run metadata.
std::string error_study_metadata(const ErrorStudyConfig& config);

inline constexpr double kMaxCompensatedPulses = 1e8;

// Smallest pulse count whose accumulated T_NV reaches target_t_nv (pulses
// separated by gap). Throws Error(Uncompensatable) when t_pw does not exceed
// the dead time at the steady entry occupancy, or the count would pass
// kMaxCompensatedPulses.
PulseTrain compensated_schedule(double t_pw, double target_t_nv, const ModelParams& params,
                                double gap = kLongGap);

struct CompensationRow {
  double t_pw;
  std::int64_t count_uncompensated;  // ceil(T_NV target / t_pw)
  std::int64_t count_compensated;
  double vt_uncompensated;
  double vt_compensated;
  double deficiency_uncompensated;  // V, |V_ref - V_T|
  double deficiency_compensated;
};

struct CompensationStudy {
  double target_t_nv;
  double vt_reference;  // single pulse reaching T_NV = target
  std::vector<CompensationRow> rows;
  // Mean uncompensated deficiency over mean compensated deficiency.
  double improvement = 0.0;

  [[nodiscard]] std::string to_csv(const std::string& timestamp = {}) const;
};

CompensationStudy compensation_study(std::span<const double> widths, double target_t_nv,
                                     const ModelParams& params, double gap = kLongGap);

}  // namespace ctfsim
