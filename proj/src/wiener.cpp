#include <muslx/wiener.hpp>

#include <muslx/error.hpp>

#include <cmath>
#include <numbers>

namespace muslx {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// uniform in (0, 1]
double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

double keyed_normal(std::uint64_t seed, std::uint64_t path, int mode, std::int64_t step) {
  std::uint64_t key = mix(seed + kGolden);
  key = mix(key ^ mix(path + 2 * kGolden));
  key = mix(key ^ mix(static_cast<std::uint64_t>(mode) + 3 * kGolden));
  key = mix(key ^ mix(static_cast<std::uint64_t>(step) + 4 * kGolden));
  const double u1 = to_unit(mix(key + kGolden));
  const double u2 = to_unit(mix(key + 2 * kGolden));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

WienerDraw sample_increments(std::uint64_t seed, std::uint64_t path, int steps, int modes, double dt,
                             std::int64_t first_step) {
  if (steps < 0 || modes < 0) throw Error(ErrorCode::invalid_argument, "negative step or mode count");
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
  WienerDraw d{seed, path, steps, modes, dt, first_step, {}};
  d.increments.resize(static_cast<std::size_t>(steps) * static_cast<std::size_t>(modes));
  const double scale = std::sqrt(dt);
  for (int m = 0; m < steps; ++m) {
    for (int j = 1; j <= modes; ++j) {
      d.increments[static_cast<std::size_t>(m) * static_cast<std::size_t>(modes) + static_cast<std::size_t>(j - 1)] =
          scale * keyed_normal(seed, path, j, first_step + m);
    }
  }
  return d;
}

}  // namespace muslx
