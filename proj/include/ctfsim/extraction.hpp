#pragma once

// Timescale extraction from pulse-train data.
//
// De-trapping: t_crit is the smallest gap beyond which V_T,N no longer depends
// on t_gap. Trapping: with n_req pulses of width t_pw needed to reach a target
// V_T, the total write time is T_tar = t_pw n_req, the effective non-volatile
// part is T_NV = T_tar - n_req t_trap, hence t_trap = t_pw - T_NV / n_req.
// T_NV comes from the single-pulse V_T,1 curve and t_pw from the intercept of
// the n_req(t_pw) curve with a fixed n_req (200 by default).
//
// All interpolation is linear in log(time).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctfsim/device_model.hpp"

namespace ctfsim {

struct GapPoint {
  double t_gap;
  double vt_n;
};

class GapCurve {
 public:
  // Requires >= 4 points, strictly increasing gaps spanning >= 3 decades.
  GapCurve(std::vector<GapPoint> points, std::int64_t count, double width);

  [[nodiscard]] const std::vector<GapPoint>& points() const { return points_; }
  [[nodiscard]] std::int64_t count() const { return count_; }
  [[nodiscard]] double width() const { return width_; }

 private:
  std::vector<GapPoint> points_;
  std::int64_t count_;
  double width_;
};

struct NreqPoint {
  double t_pw;
  std::int64_t n_req;
};

class NreqCurve {
 public:
  // Points are sorted by t_pw; n_req must be non-increasing in t_pw.
  NreqCurve(std::vector<NreqPoint> points, double vt_tar);

  [[nodiscard]] const std::vector<NreqPoint>& points() const { return points_; }
  [[nodiscard]] double vt_tar() const { return vt_tar_; }

 private:
  std::vector<NreqPoint> points_;
  double vt_tar_;
};

struct OneShotPoint {
  double t_pw;
  double vt_1;
};

inline constexpr double kDefaultSaturationEpsilon = 5e-3;  // V
inline constexpr std::int64_t kDefaultFixedNreq = 200;
inline constexpr double kDefaultMinTnv = 100e-6;            // s

// Throws Error(NotSaturated) when no point lies within epsilon of the
// plateau (the mean over the largest decade of gaps, >= 2 points).
double detect_t_crit(const GapCurve& curve, double epsilon = kDefaultSaturationEpsilon);

// Smallest read index with V_T >= vt_tar. Throws Error(TargetUnreachable).
std::int64_t n_required(const VtTrace& trace, double vt_tar);

// t_pw at which the curve crosses n_fix. Throws Error(OutOfRange).
double tpw_at_fixed_nreq(const NreqCurve& curve, std::int64_t n_fix = kDefaultFixedNreq);

// Pulse width whose single-pulse V_T equals vt_tar, reported as T_NV.
double tnv_from_one_shot(std::span<const OneShotPoint> one_shot, double vt_tar);

// t_pw - T_NV / n_req. Throws Error(InconsistentInputs) when negative.
double t_trap_from_write_times(double t_pw, double t_nv, std::int64_t n_req);

struct TargetExtraction {
  double vt_tar;
  std::int64_t n_fix;
  double t_pw_fixed;  // s, intercept t_pw at n_fix
  double t_tar;       // s, t_pw_fixed * n_fix
  double t_nv;        // s
  double t_trap;      // s
};

struct SkippedTarget {
  double vt_tar;
  std::string reason;
};

struct ExtractionOptions {
  std::int64_t n_fix = kDefaultFixedNreq;
  double epsilon = kDefaultSaturationEpsilon;
  double min_t_nv = kDefaultMinTnv;  // one-shot applicability guard
};

struct ExtractionReport {
  std::vector<TargetExtraction> targets;
  std::vector<SkippedTarget> skipped;
  std::vector<std::pair<double, double>> t_crit_by_tpw;  // (t_pw, t_crit)
  ExtractionOptions options;
  std::vector<std::string> provenance;

  [[nodiscard]] std::string to_document() const;
  [[nodiscard]] std::string t_trap_csv(const std::string& timestamp = {}) const;
  [[nodiscard]] std::string t_crit_csv(const std::string& timestamp = {}) const;
};

// Errors from each step are rethrown with the step label prefixed.
ExtractionReport full_extraction(std::span<const VtTrace> traces,
                                 std::span<const OneShotPoint> one_shot,
                                 std::span<const GapCurve> gap_curves,
                                 std::span<const double> vt_targets,
                                 const ExtractionOptions& options = {});

// Simulator-generated inputs for full_extraction.
struct ExtractionInputs {
  std::vector<VtTrace> traces;
  std::vector<OneShotPoint> one_shot;
  std::vector<GapCurve> gap_curves;
};

struct SyntheticDataSpec {
  std::vector<double> trace_widths;  // s, one fully-read train per width
  std::int64_t trace_count = 1000;
  double trace_gap = kLongGap;
  std::vector<double> one_shot_widths;
  std::vector<std::int64_t> gap_curve_counts;  // trains of T_ON / N
  double on_time = kTableOnTime;
  std::vector<double> gaps;
};

SyntheticDataSpec default_synthetic_spec();
ExtractionInputs synthesize_extraction_inputs(const ModelParams& params,
                                              const SyntheticDataSpec& spec);

}  // namespace ctfsim
