#pragma once

// Digit-set fixtures small enough to enumerate at depth 22 (at most 2^11
// points, so kernel matrices stay cached). Shared by the capacity suite and
// the acceptance binary.

#include <string>
#include <vector>

#include "dimprof/dimprof.hpp"

namespace fixtures {

struct Fixture {
  std::string name;
  dimprof::DigitProduct product;
};

inline constexpr int kProfileDepth = 22;

/// Scales at which the profile ladder is checked.
inline dimprof::ScaleSchedule profile_schedule() { return dimprof::ScaleSchedule::parse("8:22:2"); }

inline std::vector<Fixture> profile_fixtures() {
  using namespace dimprof;
  const int K = kProfileDepth;
  return {
      {"evens", {periodic_set(2, {0}, K), 1}},
      {"thirds", {periodic_set(3, {0}, K), 1}},
      {"two_of_five", {periodic_set(5, {0, 1}, K), 1}},
      {"two_of_four", {periodic_set(4, {0, 1}, K), 1}},
      {"three_of_six", {periodic_set(6, {0, 1, 2}, K), 1}},
      {"quarters_square", {periodic_set(4, {0}, K), 2}},
      {"two_of_eight_square", {periodic_set(8, {0, 1}, K), 2}},
      {"sharpness_square", {sharpness_set(2, 1, 2, {4, 64, 4096}, K), 2}},
      {"front_loaded", {explicit_set({1, 2, 3, 4, 5, 6, 9, 13}, K), 1}},
      {"back_loaded", {explicit_set({2, 9, 15, 16, 17, 18, 19, 20, 21, 22}, K), 1}},
  };
}

}  // namespace fixtures
