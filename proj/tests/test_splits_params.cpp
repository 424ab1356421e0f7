#include <gtest/gtest.h>

#include "ctfsim/params_io.hpp"
#include "ctfsim/splits.hpp"
#include "test_util.hpp"

using namespace ctfsim;
using ctfsim::testing::pin;

namespace {

std::vector<Split> bo_splits(double gap) {
  const ModelParams base = default_params();
  const double vt1 = closed_form_vtn(1, kTableOnTime, gap, base);
  std::vector<Split> out;
  for (double f : {1.0, 1.25, 1.67}) {
    out.push_back({"BO x" + std::to_string(f),
                   normalize_single_pulse(apply_split(base, StackLayer::BlockingOxide, f),
                                          kTableOnTime, vt1, gap)});
  }
  return out;
}

}  // namespace

TEST(Splits, LayerHooks) {
  ModelParams base = default_params();
  EXPECT_EQ(apply_split(base, StackLayer::BlockingOxide, 1.25).bo_scale, 1.25);
  EXPECT_EQ(apply_split(base, StackLayer::TunnelOxide, 1.25), base);
  EXPECT_EQ(apply_split(base, StackLayer::ChargeTrapLayer, 2.0), base);
  base.to_sens = 0.5;
  EXPECT_DOUBLE_EQ(apply_split(base, StackLayer::TunnelOxide, 2.0).tau_trap, 1.5 * base.tau_trap);
  EXPECT_ERROR_KIND(apply_split(base, StackLayer::BlockingOxide, 0.0), ErrorKind::InvalidArgument);
}

TEST(Splits, NormalizationHitsTarget) {
  const ModelParams p = apply_split(default_params(), StackLayer::BlockingOxide, 1.67);
  const auto n = normalize_single_pulse(p, kTableOnTime, 0.3, 1e-3);
  EXPECT_NEAR(closed_form_vtn(1, kTableOnTime, 1e-3, n), 0.3, 1e-12);
}

TEST(Splits, ThickerBlockingOxideReducesMore) {
  const auto splits = bo_splits(1e-3);
  const auto counts = table1_counts();
  const auto r = split_sweep(splits, counts, kTableOnTime, 1e-3);
  ASSERT_EQ(r.reference_count, 1000);
  EXPECT_LT(r.reduction_reference[0], r.reduction_reference[1]);
  EXPECT_LT(r.reduction_reference[1], r.reduction_reference[2]);
  for (std::size_t s = 1; s < splits.size(); ++s) EXPECT_NEAR(r.vt1[s], r.vt1[0], 5e-3);
}

TEST(Splits, InsensitiveLayersGiveIdenticalCurves) {
  const ModelParams base = default_params();
  const std::vector<Split> splits{
      {"base", base},
      {"TO", apply_split(base, StackLayer::TunnelOxide, 1.3)},
      {"CTL", apply_split(base, StackLayer::ChargeTrapLayer, 2.0)},
  };
  const auto counts = table1_counts();
  const auto r = split_sweep(splits, counts, kTableOnTime);
  EXPECT_EQ(r.vt[0], r.vt[1]);
  EXPECT_EQ(r.vt[0], r.vt[2]);
}

TEST(Splits, RejectsUnnormalizedSplit) {
  const ModelParams base = default_params();
  const std::vector<Split> splits{{"base", base},
                                  {"thick-bo", apply_split(base, StackLayer::BlockingOxide, 600)}};
  const std::int64_t counts[] = {1, 10};
  try {
    split_sweep(splits, counts, kTableOnTime);
    FAIL() << "expected a precondition violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolation);
    EXPECT_NE(std::string(e.what()).find("thick-bo"), std::string::npos);
  }
}

TEST(Splits, SingleSplitMatchesRunTrain) {
  const std::vector<Split> splits{{"only", pin()}};
  const auto counts = table1_counts();
  const auto r = split_sweep(splits, counts, kTableOnTime);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const PulseTrain t(Pulse(12.5, kTableOnTime / static_cast<double>(counts[c])), counts[c], 10.0);
    EXPECT_EQ(r.vt[0][c], run_train(t, pin()).final_vt());
  }
}

TEST(ParamsFile, RoundTrip) {
  ParamSet set = default_param_set();
  set.model.bo_scale = 1.25;
  set.ode.kappa = 3.5;
  EXPECT_EQ(parse_params(format_params(set, "note")), set);
}

TEST(ParamsFile, ShippedFileMatchesDefaults) {
  const auto set = read_params(std::filesystem::path(CTFSIM_DATA_DIR) / "default_params.yaml");
  EXPECT_EQ(set, default_param_set());
}

TEST(ParamsFile, LiteralKeysOnly) {
  const std::string doc = R"(tau_trap_s: 6.676e-7
tau_detrap_s: 1e-4
u_c: 0.95
A_V: 0.1864
t0_s: 1e-6
VT0_V: -1.2
VTmax_V: 3
bo_scale: 1
to_sens: 0
ctl_sens: 0
)";
  const auto set = parse_params(doc);
  EXPECT_EQ(set.model.detrap_width_exp, 0.0);
  EXPECT_EQ(set.ode, default_ode_params());
  EXPECT_EQ(set.model.u_c, 0.95);
}

TEST(ParamsFile, Diagnostics) {
  const std::string good = format_params(default_param_set());
  EXPECT_TRUE(lint_params(good).empty());

  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return lint_params(s, "p.yaml");
  };
  auto d = replace("u_c:", "uc:");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].field, "u_c");
  EXPECT_EQ(d[1].field, "uc");

  d = replace("u_c: ", "u_c: 1.5 #");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "u_c");
  EXPECT_EQ(d[0].line, 3);

  d = replace("eta:", "zeta:");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].field, "ode.zeta");

  EXPECT_ERROR_KIND(parse_params("a: [1"), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(read_params("/nonexistent/params.yaml"), ErrorKind::Io);
}

TEST(ParamsFile, SetParam) {
  ParamSet set = default_param_set();
  EXPECT_TRUE(set_param(set, "bo_scale", 2.0));
  EXPECT_EQ(set.model.bo_scale, 2.0);
  EXPECT_TRUE(set_param(set, "ode.J0_per_s", 1e7));
  EXPECT_EQ(set.ode.J0, 1e7);
  EXPECT_FALSE(set_param(set, "nope", 1.0));
}
