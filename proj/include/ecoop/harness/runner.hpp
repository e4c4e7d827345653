#pragma once

#include <cstdint>
#include <initializer_list>

#include "ecoop/harness/profile.hpp"
#include "ecoop/harness/results.hpp"
#include "ecoop/harness/scenario.hpp"

namespace ecoop::harness {

struct RunOptions {
  int threads = 0;  // 0: ECOOP_THREADS if set, else 1
};

/// Parallelism width from the ECOOP_THREADS environment variable (default 1).
int threads_from_env();

/// Mixes a base seed with stream coordinates through std::seed_seq.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint32_t> coords);

/// Monte-Carlo run of every (sweep point, slot, scheme, beta) combination.
/// hex_profile scenarios use `profile` when given, otherwise the file named by
/// the scenario (or the bundled profile). Solver failures are counted per row.
ResultTable run_scenario(const Scenario& scenario, const EnergyProfile* profile = nullptr,
                         const RunOptions& options = {});

/// Uniform MT drop inside the hexagon around `center` with circumradius
/// `radius` (vertices at 30 + 60j degrees), at least `min_distance` from it.
template <class Rng>
Point2 sample_hexagon(Rng& rng, Point2 center, double radius, double min_distance);

}  // namespace ecoop::harness

#include <cmath>
#include <random>

template <class Rng>
ecoop::Point2 ecoop::harness::sample_hexagon(Rng& rng, Point2 center, double radius, double min_distance) {
  const double half_w = radius * std::sqrt(3.0) / 2.0;
  std::uniform_real_distribution<double> ux(-half_w, half_w);
  std::uniform_real_distribution<double> uy(-radius, radius);
  for (;;) {
    const double x = ux(rng);
    const double y = uy(rng);
    if (std::abs(y) > radius - std::abs(x) / std::sqrt(3.0)) continue;
    if (std::hypot(x, y) < min_distance) continue;
    return {center.x + x, center.y + y};
  }
}
