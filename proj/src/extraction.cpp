#include "ctfsim/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ctfsim/csv.hpp"
#include "ctfsim/error.hpp"
#include "ctfsim/parallel.hpp"
#include "ctfsim/structured_text.hpp"

namespace ctfsim {

namespace {

// Linear interpolation of log(x) against y, evaluated at y.
double log_interp(double x0, double y0, double x1, double y1, double y) {
  const double f = (y - y0) / (y1 - y0);
  return std::exp(std::log(x0) + f * (std::log(x1) - std::log(x0)));
}

std::string fmt(double v) { return format_double(v); }

template <typename F>
auto labelled(const std::string& step, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.with_step(step);
  }
}

}  // namespace

GapCurve::GapCurve(std::vector<GapPoint> points, std::int64_t count, double width)
    : points_(std::move(points)), count_(count), width_(width) {
  require(points_.size() >= 4, "gap curve needs at least 4 points");
  require(count_ >= 1 && width_ > 0.0, "gap curve needs N >= 1 and t_pw > 0");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(points_[i].t_gap > 0.0 && std::isfinite(points_[i].vt_n),
            "gap curve points need t_gap > 0 and finite V_T");
    if (i > 0) require(points_[i].t_gap > points_[i - 1].t_gap, "t_gap must be strictly increasing");
  }
  require(points_.back().t_gap >= 1e3 * points_.front().t_gap * (1.0 - 1e-12),
          "gap curve must span at least 3 decades");
}

NreqCurve::NreqCurve(std::vector<NreqPoint> points, double vt_tar)
    : points_(std::move(points)), vt_tar_(vt_tar) {
  require(!points_.empty(), "n_req curve must not be empty");
  std::sort(points_.begin(), points_.end(),
            [](const NreqPoint& a, const NreqPoint& b) { return a.t_pw < b.t_pw; });
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(points_[i].t_pw > 0.0 && points_[i].n_req >= 0, "n_req points need t_pw > 0, n >= 0");
    if (i > 0) {
      require(points_[i].t_pw > points_[i - 1].t_pw, "duplicate t_pw in n_req curve");
      require(points_[i].n_req <= points_[i - 1].n_req,
              "n_req must be non-increasing in t_pw");
    }
  }
}

double detect_t_crit(const GapCurve& curve, double epsilon) {
  require(epsilon > 0.0, "epsilon must be > 0");
  const auto& pts = curve.points();
  const double top_start = pts.back().t_gap / 10.0 * (1.0 - 1e-12);
  double sum = 0.0;
  int in_top = 0;
  for (const auto& p : pts) {
    if (p.t_gap >= top_start) {
      sum += p.vt_n;
      ++in_top;
    }
  }
  require(in_top >= 2, "largest decade of gaps needs at least 2 points");
  const double plateau = sum / in_top;

  std::vector<double> dev(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) dev[i] = std::abs(pts[i].vt_n - plateau);
  if (dev.back() >= epsilon) {
    fail(ErrorKind::NotSaturated, "V_T,N does not settle within " + fmt(epsilon) +
                                      " V of its plateau; extend the gap grid");
  }
  std::size_t first = pts.size() - 1;
  while (first > 0 && dev[first - 1] < epsilon) --first;
  if (first == 0) return pts.front().t_gap;
  // dev[first - 1] >= epsilon > dev[first]
  return log_interp(pts[first - 1].t_gap, dev[first - 1], pts[first].t_gap, dev[first], epsilon);
}

std::int64_t n_required(const VtTrace& trace, double vt_tar) {
  double best = -INFINITY;
  for (const auto& e : trace.entries) {
    if (e.vt >= vt_tar) return e.pulse_index;
    best = std::max(best, e.vt);
  }
  fail(ErrorKind::TargetUnreachable,
       "target " + fmt(vt_tar) + " V not reached; max V_T attained " + fmt(best) + " V");
}

double tpw_at_fixed_nreq(const NreqCurve& curve, std::int64_t n_fix) {
  require(n_fix >= 1, "n_fix must be >= 1");
  const auto& pts = curve.points();
  for (const auto& p : pts) {
    if (p.n_req == n_fix) return p.t_pw;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].n_req > n_fix && pts[i + 1].n_req < n_fix) {
      return log_interp(pts[i].t_pw, std::log(static_cast<double>(pts[i].n_req)),
                        pts[i + 1].t_pw, std::log(static_cast<double>(pts[i + 1].n_req)),
                        std::log(static_cast<double>(n_fix)));
    }
  }
  fail(ErrorKind::OutOfRange, "n_fix = " + std::to_string(n_fix) + " outside n_req range [" +
                                  std::to_string(pts.back().n_req) + ", " +
                                  std::to_string(pts.front().n_req) + "]");
}

double tnv_from_one_shot(std::span<const OneShotPoint> one_shot, double vt_tar) {
  require(one_shot.size() >= 2, "one-shot data needs at least 2 points");
  std::vector<OneShotPoint> pts(one_shot.begin(), one_shot.end());
  std::sort(pts.begin(), pts.end(),
            [](const OneShotPoint& a, const OneShotPoint& b) { return a.t_pw < b.t_pw; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    require(pts[i].vt_1 >= pts[i - 1].vt_1, "V_T,1 must be non-decreasing in t_pw");
  }
  if (vt_tar < pts.front().vt_1 || vt_tar > pts.back().vt_1) {
    fail(ErrorKind::OutOfRange, "target " + fmt(vt_tar) + " V outside one-shot range [" +
                                    fmt(pts.front().vt_1) + ", " + fmt(pts.back().vt_1) + "]");
  }
  for (const auto& p : pts) {
    if (p.vt_1 == vt_tar) return p.t_pw;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i].vt_1 < vt_tar && vt_tar < pts[i + 1].vt_1) {
      return log_interp(pts[i].t_pw, pts[i].vt_1, pts[i + 1].t_pw, pts[i + 1].vt_1, vt_tar);
    }
  }
  fail(ErrorKind::OutOfRange, "no bracketing one-shot samples");
}

double t_trap_from_write_times(double t_pw, double t_nv, std::int64_t n_req) {
  require(n_req >= 1, "n_req must be >= 1");
  require(t_pw > 0.0 && t_nv >= 0.0, "t_pw must be > 0 and T_NV >= 0");
  const double t_tar = t_pw * static_cast<double>(n_req);
  if (t_nv > t_tar) {
    fail(ErrorKind::InconsistentInputs,
         "T_NV = " + fmt(t_nv) + " s exceeds T_tar = t_pw n_req = " + fmt(t_tar) +
             " s; negative trapping time (model/extraction mismatch)");
  }
  return std::max(0.0, t_pw - t_nv / static_cast<double>(n_req));
}

ExtractionReport full_extraction(std::span<const VtTrace> traces,
                                 std::span<const OneShotPoint> one_shot,
                                 std::span<const GapCurve> gap_curves,
                                 std::span<const double> vt_targets,
                                 const ExtractionOptions& options) {
  require(options.n_fix >= 100, "n_fix must be >= 100 to keep pulse quantization small");
  std::vector<double> widths;
  for (const auto& t : traces) widths.push_back(t.train.pulse().width());
  std::sort(widths.begin(), widths.end());
  widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
  require(widths.size() >= 4, "traces must span at least 4 values of t_pw");

  ExtractionReport report;
  report.options = options;
  report.provenance = {
      "n_req: smallest read index with V_T >= target, no interpolation",
      "t_pw intercept: log-log interpolation of n_req(t_pw) at n_fix",
      "T_NV: one-shot V_T,1 curve inverted with log(t_pw) interpolation",
      "t_trap = t_pw - T_NV / n_req",
      "t_crit: plateau = mean over the largest gap decade; log(t_gap) interpolation",
  };

  for (double vt : vt_targets) {
    const std::string tag = "target " + fmt(vt) + " V";
    const NreqCurve curve = labelled(tag + ", step 1 (n_req)", [&] {
      std::map<double, std::int64_t> by_width;
      for (const auto& t : traces) {
        if (t.final_vt() < vt) continue;
        const auto n = n_required(t, vt);
        const double w = t.train.pulse().width();
        auto [it, inserted] = by_width.emplace(w, n);
        if (!inserted) it->second = std::min(it->second, n);
      }
      std::vector<NreqPoint> pts;
      for (auto [w, n] : by_width) pts.push_back({w, n});
      if (pts.empty()) fail(ErrorKind::TargetUnreachable, "no trace reaches the target");
      return NreqCurve(std::move(pts), vt);
    });
    const double t_pw_fixed = labelled(tag + ", step 2 (t_pw intercept)",
                                       [&] { return tpw_at_fixed_nreq(curve, options.n_fix); });
    const double t_nv = labelled(tag + ", step 3 (one-shot T_NV)",
                                 [&] { return tnv_from_one_shot(one_shot, vt); });
    if (t_nv < options.min_t_nv * (1.0 - 1e-12)) {
      report.skipped.push_back({vt, "T_NV = " + fmt(t_nv) + " s below applicability guard " +
                                        fmt(options.min_t_nv) + " s"});
      continue;
    }
    const double t_trap = labelled(tag + ", step 4 (t_trap)", [&] {
      return t_trap_from_write_times(t_pw_fixed, t_nv, options.n_fix);
    });
    const double n = static_cast<double>(options.n_fix);
    const double t_tar = t_pw_fixed * n;
    if (!(std::abs(t_tar - (t_nv + n * t_trap)) < 1e-12 * t_tar)) {
      fail(ErrorKind::NumericFailure, tag + ": T_tar != T_NV + n_req t_trap");
    }
    report.targets.push_back({vt, options.n_fix, t_pw_fixed, t_tar, t_nv, t_trap});
  }

  for (const auto& gc : gap_curves) {
    const double t_crit = labelled("t_crit (t_pw " + fmt(gc.width()) + " s)",
                                   [&] { return detect_t_crit(gc, options.epsilon); });
    report.t_crit_by_tpw.emplace_back(gc.width(), t_crit);
  }
  std::sort(report.t_crit_by_tpw.begin(), report.t_crit_by_tpw.end());
  return report;
}

std::string ExtractionReport::to_document() const {
  std::ostringstream os;
  os << "n_fix: " << options.n_fix << '\n';
  os << "epsilon_V: " << fmt(options.epsilon) << '\n';
  os << "min_T_NV_s: " << fmt(options.min_t_nv) << '\n';
  os << "targets:\n";
  for (const auto& t : targets) {
    os << "  - vt_tar_V: " << fmt(t.vt_tar) << '\n'
       << "    n_req: " << t.n_fix << '\n'
       << "    t_pw_fixed_s: " << fmt(t.t_pw_fixed) << '\n'
       << "    T_tar_s: " << fmt(t.t_tar) << '\n'
       << "    T_NV_s: " << fmt(t.t_nv) << '\n'
       << "    t_trap_s: " << fmt(t.t_trap) << '\n';
  }
  if (targets.empty()) os << "  []\n";
  os << "skipped:" << (skipped.empty() ? " []\n" : "\n");
  for (const auto& s : skipped) {
    os << "  - vt_tar_V: " << fmt(s.vt_tar) << '\n' << "    reason: \"" << s.reason << "\"\n";
  }
  os << "t_crit:" << (t_crit_by_tpw.empty() ? " []\n" : "\n");
  for (const auto& [w, tc] : t_crit_by_tpw) {
    os << "  - t_pw_s: " << fmt(w) << '\n' << "    t_crit_s: " << fmt(tc) << '\n';
  }
  os << "provenance:\n";
  for (const auto& p : provenance) os << "  - \"" << p << "\"\n";
  return os.str();
}

std::string ExtractionReport::t_trap_csv(const std::string& timestamp) const {
  CsvDocument doc({"vt_tar_V", "t_trap_s"}, timestamp);
  for (const auto& t : targets) doc.row() << t.vt_tar << t.t_trap;
  return doc.str();
}

std::string ExtractionReport::t_crit_csv(const std::string& timestamp) const {
  CsvDocument doc({"t_pw_s", "t_crit_s"}, timestamp);
  for (const auto& [w, tc] : t_crit_by_tpw) doc.row() << w << tc;
  return doc.str();
}

SyntheticDataSpec default_synthetic_spec() {
  SyntheticDataSpec spec;
  spec.trace_widths = {2.25e-6, 2.5e-6, 3e-6,  3.5e-6,  4e-6,  5e-6,  6e-6,
                       8e-6,    10e-6,  12.5e-6, 15e-6, 20e-6, 25e-6, 30e-6};
  for (int k = 0; k <= 80; ++k) spec.one_shot_widths.push_back(1e-6 * std::pow(10.0, k / 20.0));
  spec.gap_curve_counts = {100, 500, 1000, 2000, 5000, 10000};
  spec.gaps = default_gap_grid();
  return spec;
}

ExtractionInputs synthesize_extraction_inputs(const ModelParams& params,
                                              const SyntheticDataSpec& spec) {
  ExtractionInputs in;
  in.traces.resize(spec.trace_widths.size(), VtTrace{{}, params, PulseTrain(Pulse(1, 1), 1, 0)});
  std::vector<std::int64_t> every(static_cast<std::size_t>(spec.trace_count) + 1);
  std::iota(every.begin(), every.end(), 0);
  parallel_for(spec.trace_widths.size(), [&](std::size_t i) {
    const PulseTrain base(Pulse(kProgramAmplitude, spec.trace_widths[i]), spec.trace_count,
                          spec.trace_gap);
    in.traces[i] = run_train(with_intermediate_reads(base, every), params);
  });
  for (double w : spec.one_shot_widths) {
    in.one_shot.push_back({w, closed_form_vtn(1, w, spec.trace_gap, params)});
  }
  for (auto n : spec.gap_curve_counts) {
    const double w = spec.on_time / static_cast<double>(n);
    std::vector<GapPoint> pts;
    for (double g : spec.gaps) pts.push_back({g, closed_form_vtn(n, w, g, params)});
    in.gap_curves.emplace_back(std::move(pts), n, w);
  }
  return in;
}

}  // namespace ctfsim
