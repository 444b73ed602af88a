#pragma once

#include <cstdint>
#include <vector>

namespace muslx {

/// Standard normal variate determined solely by (seed, path, mode, step):
/// SplitMix64 mixing of the key into two uniforms, then Box-Muller.
double keyed_normal(std::uint64_t seed, std::uint64_t path, int mode, std::int64_t step);

/// Brownian increments for modes 1..modes over `steps` steps. Step m of the
/// draw is global step first_step + m, so a draw for a later time window
/// reproduces the increments of a draw over the whole horizon.
struct WienerDraw {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  int steps = 0;
  int modes = 0;
  double dt = 0.0;
  std::int64_t first_step = 0;
  std::vector<double> increments;  // increments[m * modes + (j - 1)]

  double operator()(int j, int m) const {
    return increments[static_cast<std::size_t>(m) * static_cast<std::size_t>(modes) + static_cast<std::size_t>(j - 1)];
  }
};

WienerDraw sample_increments(std::uint64_t seed, std::uint64_t path, int steps, int modes, double dt,
                             std::int64_t first_step = 0);

}  // namespace muslx
