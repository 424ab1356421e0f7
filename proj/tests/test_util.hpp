#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <optional>

#include "ctfsim/device_model.hpp"
#include "ctfsim/error.hpp"

namespace ctfsim::testing {

inline std::optional<ErrorKind> error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// Analytic pin with the literal de-trap law (no width dependence):
// u_c = 0.95, tau_trap = 2 us / ln 20, A = 0.3 / ln 5, t0 = 1 us.
inline ModelParams pin() { return ModelParams{}; }

inline double cold_dead_time(const ModelParams& p) { return dead_time(0.0, p); }

}  // namespace ctfsim::testing

#define EXPECT_ERROR_KIND(stmt, expected_kind) \
  EXPECT_EQ(::ctfsim::testing::error_kind([&] { (void)(stmt); }), (expected_kind))
