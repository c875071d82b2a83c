#pragma once

// Seeded invariant suites shared by `hsb check` and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hsb/geometry.hpp"

namespace hsb::cli {

struct SuiteResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

// One to three disjoint star-shaped polygons with random Fourier radii.
geometry::BubbleSystem random_star_system(std::mt19937_64& rng);

// |grad Pi| <= sqrt(S / pi) at random probes (inside, near and outside the
// bubbles) over `systems` random systems.
SuiteResult gradient_bound_suite(int systems, int probes_per_system, std::uint64_t seed);
// Closed-form ellipse Hessian at the center against the quadrature.
SuiteResult ellipse_oracle_suite();
// Q_n(u) > 0 on [0, 1] for n = 0..8.
SuiteResult qn_positivity_suite();
// Free run through `fraction` of the area: relative area-law error.
SuiteResult area_law_suite(const geometry::BubbleSystem& system, double fraction, double h_factor);

}  // namespace hsb::cli
