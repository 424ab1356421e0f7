#pragma once

// Program-pulse waveforms and experiment schedules: rectangular pulses of
// uniform width and gap, grouped into trains that follow an initialization
// (erase to V_T0).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctfsim/structured_text.hpp"

namespace ctfsim {

inline constexpr double kProgramAmplitude = 12.5;  // V
inline constexpr double kRiseFallTime = 150e-9;    // s, metadata only
inline constexpr double kTableOnTime = 2.5e-3;     // s
inline constexpr double kLongGap = 10.0;           // s

class Pulse {
 public:
  Pulse(double amplitude, double width, double rise_fall = kRiseFallTime);

  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] double width() const { return width_; }
  // Excluded from ON time.
  [[nodiscard]] double rise_fall() const { return rise_fall_; }

  friend bool operator==(const Pulse&, const Pulse&) = default;

 private:
  double amplitude_;
  double width_;
  double rise_fall_;
};

class PulseTrain {
 public:
  // Without explicit read points the train is read before and after (0, count).
  PulseTrain(Pulse pulse, std::int64_t count, double gap,
             std::vector<std::int64_t> read_points = {});

  [[nodiscard]] const Pulse& pulse() const { return pulse_; }
  [[nodiscard]] std::int64_t count() const { return count_; }
  [[nodiscard]] double gap() const { return gap_; }
  [[nodiscard]] const std::vector<std::int64_t>& read_points() const { return read_points_; }
  [[nodiscard]] double on_time() const { return static_cast<double>(count_) * pulse_.width(); }

  [[nodiscard]] PulseTrain with_gap(double gap) const;

  friend bool operator==(const PulseTrain&, const PulseTrain&) = default;

 private:
  Pulse pulse_;
  std::int64_t count_;
  double gap_;
  std::vector<std::int64_t> read_points_;
};

struct InitMarker {
  friend bool operator==(const InitMarker&, const InitMarker&) = default;
};

using ScheduleStep = std::variant<InitMarker, PulseTrain>;

class ExperimentSchedule {
 public:
  ExperimentSchedule(std::vector<ScheduleStep> steps, std::string label);

  [[nodiscard]] const std::vector<ScheduleStep>& steps() const { return steps_; }
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] std::vector<PulseTrain> trains() const;

  // Erase-then-program for every train.
  static ExperimentSchedule from_trains(std::span<const PulseTrain> trains, std::string label);

  friend bool operator==(const ExperimentSchedule&, const ExperimentSchedule&) = default;

 private:
  std::vector<ScheduleStep> steps_;
  std::string label_;
};

// Splits total ON time into N equal pulses for each N.
std::vector<PulseTrain> table1_trains(double on_time, std::span<const std::int64_t> counts,
                                      double gap, double amplitude = kProgramAmplitude);
std::vector<PulseTrain> gap_sweep(const PulseTrain& train, std::span<const double> gaps);
PulseTrain with_intermediate_reads(const PulseTrain& train,
                                   std::vector<std::int64_t> indices);

// N values of the fragmentation experiment: 1 ... 10000.
std::vector<std::int64_t> table1_counts();
// 100 ns, 1 us, ..., 10 s.
std::vector<double> default_gap_grid();
// 0, 1, 2, 5, 10, 20, 50, ... capped at count (always included).
std::vector<std::int64_t> log_read_points(std::int64_t count);

// Structured-text protocol documents. parse throws Error(InvalidArgument)
// carrying the first diagnostic; lint collects all of them.
std::vector<Diagnostic> lint_protocol(const std::string& text, const std::string& file = {});
ExperimentSchedule parse_protocol(const std::string& text, const std::string& file = {});
ExperimentSchedule read_protocol(const std::filesystem::path& path);
std::string format_protocol(const ExperimentSchedule& schedule);

}  // namespace ctfsim
