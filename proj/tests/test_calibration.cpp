#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include "ctfsim/calibration.hpp"
#include "test_util.hpp"

using namespace ctfsim;
using ctfsim::testing::pin;

TEST(Objective, IdealDeviceMissesFall) {
  ModelParams p = pin();
  p.tau_trap = 0.0;
  const auto t = objective_terms(p, AnchorSet{});
  EXPECT_NEAR(t.fall, 0.0, 1e-12);
  EXPECT_NEAR(t.residuals[0], -1.0, 1e-9);
  EXPECT_EQ(t.knee, 0.0);
  EXPECT_TRUE(t.monotone);
}

TEST(Objective, ShippedDefaultsSatisfyAnchors) {
  const auto t = objective_terms(default_params(), AnchorSet{});
  EXPECT_NEAR(t.fall, 0.30, 1e-3);
  EXPECT_NEAR(t.knee, 2e-6, 2e-8);
  EXPECT_LT(t.objective, kFitObjectiveTolerance);
}

TEST(Objective, CutoffWidthTracksDeadTime) {
  const ModelParams p = pin();
  const double knee = cutoff_width(p, kTableOnTime);
  EXPECT_GT(knee, 0.5 * dead_time(0.0, p));
  EXPECT_LT(knee, 2.0 * dead_time(0.0, p));
}

TEST(Fit, ConvergesFromPin) {
  const AnchorSet anchors;
  const auto r = fit(anchors, pin());
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.objective, kFitObjectiveTolerance);
  EXPECT_NEAR(r.terms.fall, anchors.d_vt_log_fall, 0.03);
  EXPECT_LE(r.evaluations, 400 + 10);
  EXPECT_GE(r.params.u_c, kUcLower);
  EXPECT_LE(r.params.u_c, kUcUpper);
}

TEST(Fit, ZeroFallDrivesTrapTimeDown) {
  AnchorSet anchors;
  anchors.d_vt_log_fall = 0.0;
  const ModelParams seed = pin();
  const auto r = fit(anchors, seed);
  EXPECT_LT(r.params.tau_trap, 0.1 * seed.tau_trap);
}

TEST(Fit, Deterministic) {
  const auto a = fit(AnchorSet{}, pin(), 150);
  const auto b = fit(AnchorSet{}, pin(), 150);
  EXPECT_EQ(a.params.tau_trap, b.params.tau_trap);
  EXPECT_EQ(a.params.u_c, b.params.u_c);
  EXPECT_EQ(a.params.A, b.params.A);
  EXPECT_EQ(a.to_document(AnchorSet{}), b.to_document(AnchorSet{}));
}

TEST(Fit, Validation) {
  EXPECT_ERROR_KIND(fit(AnchorSet{}, pin(), 99), ErrorKind::InvalidArgument);
  AnchorSet bad;
  bad.knee_tpw = 0.0;
  EXPECT_ERROR_KIND(fit(bad, pin()), ErrorKind::InvalidArgument);
}

TEST(Fit, ReportDocument) {
  const AnchorSet anchors;
  const auto r = fit(anchors, pin(), 120);
  const YAML::Node doc = YAML::Load(r.to_document(anchors));
  EXPECT_EQ(doc["evaluations"].as<int>(), r.evaluations);
  EXPECT_EQ(doc["converged"].as<bool>(), r.converged);
  EXPECT_EQ(doc["anchors"]["knee_tpw_s"].as<double>(), anchors.knee_tpw);
}
