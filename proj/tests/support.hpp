#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "plasmo/types.hpp"

namespace plasmo::testing {

/// Runs `fn`, expecting a plasmo::Error carrying `tag`.
inline ::testing::AssertionResult throws_tag(const std::function<void()>& fn, const std::string& tag) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.tag() == tag) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "got tag '" << e.tag() << "' (" << e.what() << "), wanted '" << tag << "'";
  } catch (const std::exception& e) {
    return ::testing::AssertionFailure() << "non-library exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "nothing thrown, wanted '" << tag << "'";
}

template <class A, class B>
double rel_diff(const A& a, const B& b) {
  const double scale = std::max(std::abs(b), 1e-300);
  return std::abs(a - b) / scale;
}

template <class M>
double max_abs(const M& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace plasmo::testing
