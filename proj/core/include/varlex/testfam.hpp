#pragma once

#include <cstdint>
#include <vector>

#include "varlex/grid.hpp"

namespace varlex {

struct TestFamilyOptions {
  int count = 20;
  std::uint64_t seed = 2026;
  // restrict to profiles of |y| about the origin; needed when the family is
  // probed under maps that only preserve the radius
  bool radialOnly = false;
  bool allowSpikes = true;
  double spikeBetaMax = 0.0;  // <= 0 picks 0.3 * dim
  int maxComponents = 3;
};

// Seeded nonnegative mixtures of indicator balls/boxes, truncated power
// spikes and smooth bumps, supported in the middle half of the box so that
// moderate linear images stay inside. Every member is guaranteed nonzero on
// the grid.
std::vector<GridFunction> make_test_family(const DomainBox& box,
                                           const TestFamilyOptions& opts = {});

}  // namespace varlex
