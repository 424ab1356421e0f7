#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ctfsim/rpu_error.hpp"
#include "test_util.hpp"

using namespace ctfsim;
using ctfsim::testing::pin;

TEST(Encode, ExtremeProbabilities) {
  EXPECT_EQ(encode(0.0, 500, 3).popcount(), 0);
  EXPECT_EQ(encode(1.0, 500, 3).popcount(), 500);
  EXPECT_ERROR_KIND(encode(1.5, 10, 1), ErrorKind::InvalidArgument);
  EXPECT_ERROR_KIND(encode(0.5, 0, 1), ErrorKind::InvalidArgument);
}

TEST(Encode, Deterministic) {
  const auto a = encode(0.3, 4096, 99);
  const auto b = encode(0.3, 4096, 99);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_NE(a.bits, encode(0.3, 4096, 100).bits);
}

TEST(Encode, UniformInUnitInterval) {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = uniform_at(7, i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Coincidence, Symmetric) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto x = encode(0.4, 300, s);
    const auto d = encode(0.7, 300, s + 1000);
    EXPECT_EQ(coincidence_update(x, d), coincidence_update(d, x));
  }
  EXPECT_ERROR_KIND(coincidence_update(encode(0.5, 3, 1), encode(0.5, 4, 1)),
                    ErrorKind::InvalidArgument);
}

TEST(DeviceUpdate, AllCoincidentEqualsUniformTrain) {
  const ModelParams p = default_params();
  for (std::int64_t n : {1, 10, 100, 1000}) {
    const auto ones = encode(1.0, n, 1);
    const PulseTrain t(Pulse(kProgramAmplitude, 2.5e-6), n, 10.0);
    const double expected = run_train(t, p).final_vt() - p.VT0;
    EXPECT_NEAR(device_update(ones, ones, 2.5e-6, 10.0, p), expected, 1e-12) << n;
  }
}

TEST(DeviceUpdate, NoCoincidences) {
  const auto x = encode(1.0, 64, 1);
  const auto d = encode(0.0, 64, 2);
  EXPECT_EQ(device_update(x, d, 25e-6, 1e-3, default_params()), 0.0);
}

TEST(DeviceUpdate, ContiguousBeatsSpread) {
  const ModelParams p = default_params();
  const std::int64_t n = 1000;
  for (std::int64_t k : {10, 50, 250}) {
    std::vector<std::int64_t> contiguous(static_cast<std::size_t>(k));
    std::iota(contiguous.begin(), contiguous.end(), 0);
    std::vector<std::int64_t> spread;
    for (std::int64_t i = 0; i < k; ++i) spread.push_back(i * (n / k));
    for (double w : {2.5e-6, 5e-6, 25e-6}) {
      EXPECT_GE(device_update_slots(contiguous, w, 1e-6, p),
                device_update_slots(spread, w, 1e-6, p))
          << k << ' ' << w;
    }
  }
}

TEST(RandomError, MatchesBinomial) {
  for (std::int64_t n : {100, 1000}) {
    const double expected = std::sqrt((1.0 - 0.25) / (static_cast<double>(n) * 0.25));
    EXPECT_NEAR(random_error_mc(n, 0.5, 0.5, 1000, 1) / expected, 1.0, 0.05) << n;
  }
}

TEST(RandomError, HalvesWhenLengthQuadruples) {
  for (std::int64_t n : {100, 400, 1000}) {
    const double r = random_error_mc(4 * n, 0.5, 0.5, 1000, 11) / random_error_mc(n, 0.5, 0.5, 1000, 11);
    EXPECT_NEAR(r, 0.5, 0.05) << n;
  }
}

TEST(ErrorDecomposition, IdealDeviceHasNoSystematicError) {
  ModelParams p = default_params();
  p.tau_trap = 0.0;
  ErrorStudyConfig c;
  c.n_list = {1, 10, 100, 1000, 4000};
  c.trials = 400;
  const auto r = error_decomposition(c, p);
  for (const auto& e : r) {
    EXPECT_NEAR(e.systematic_rel_err, 0.0, 1e-9) << e.n;
    EXPECT_GE(e.random_rel_err, 0.0);
    EXPECT_GE(e.gap_noise_rel, 0.0);
  }
  EXPECT_NEAR(r[4].random_rel_err / r[2].random_rel_err, std::sqrt(100.0 / 4000.0), 0.02);
}

TEST(ErrorDecomposition, DisabledUpdateBelowDeadTime) {
  const ModelParams p = default_params();
  ErrorStudyConfig c;
  c.n_list = {1, 100, 1000, 2000, 5000};
  c.trials = 200;
  const auto r = error_decomposition(c, p);
  EXPECT_EQ(r[0].systematic_rel_err, 0.0);
  EXPECT_EQ(r[0].gap_noise_rel, 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) {
    EXPECT_GE(r[i].systematic_rel_err, r[i - 1].systematic_rel_err);
  }
  EXPECT_EQ(r[3].systematic_rel_err, 1.0);
  EXPECT_EQ(r[4].systematic_rel_err, 1.0);
}

TEST(ErrorDecomposition, Validation) {
  ErrorStudyConfig c;
  c.n_list = {10};
  c.trials = 99;
  EXPECT_ERROR_KIND(error_decomposition(c, default_params()), ErrorKind::InvalidArgument);
  c.trials = 100;
  c.n_list = {0};
  EXPECT_ERROR_KIND(error_decomposition(c, default_params()), ErrorKind::InvalidArgument);
}

TEST(ErrorDecomposition, Deterministic) {
  ErrorStudyConfig c;
  c.n_list = {10, 100};
  c.trials = 200;
  c.seed = 5;
  const auto a = error_reports_csv(error_decomposition(c, default_params()));
  const auto b = error_reports_csv(error_decomposition(c, default_params()));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("n,random_rel_err,systematic_rel_err,gap_noise_rel\n", 0), 0u);
}

TEST(CompensatedSchedule, Counts) {
  EXPECT_EQ(compensated_schedule(25e-6, 2e-3, pin()).count(), 87);
  ModelParams ideal = pin();
  ideal.tau_trap = 0.0;
  EXPECT_EQ(compensated_schedule(25e-6, 2e-3, ideal).count(), 80);
  EXPECT_EQ(compensated_schedule(5e-6, 2e-3, ideal).count(), 400);
  EXPECT_ERROR_KIND(compensated_schedule(2e-6, 2e-3, pin()), ErrorKind::Uncompensatable);
  EXPECT_ERROR_KIND(compensated_schedule(1e-6, 2e-3, pin()), ErrorKind::Uncompensatable);
}

TEST(CompensatedSchedule, ReachesTargetWithinOnePulse) {
  const ModelParams p = default_params();
  for (double w : {2.5e-6, 5e-6, 12.5e-6, 25e-6, 250e-6}) {
    const auto train = compensated_schedule(w, 2e-3, p);
    const double reached = closed_form_tnv(train.count(), w, train.gap(), p);
    const double before = closed_form_tnv(train.count() - 1, w, train.gap(), p);
    EXPECT_GE(reached, 2e-3 * (1.0 - 1e-12)) << w;
    EXPECT_LT(before, 2e-3) << w;
  }
}

TEST(CompensationStudy, ImprovesDeficiency) {
  const ModelParams p = default_params();
  const double widths[] = {2.5e-6, 5e-6, 12.5e-6, 25e-6};
  const auto s = compensation_study(widths, 2e-3, p);
  ASSERT_EQ(s.rows.size(), 4u);
  for (const auto& r : s.rows) {
    EXPECT_GE(r.count_compensated, r.count_uncompensated);
    EXPECT_LE(r.deficiency_compensated, r.deficiency_uncompensated);
  }
  EXPECT_GE(s.improvement, 4.0);
}
