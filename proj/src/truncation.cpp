#include <muslx/truncation.hpp>

#include <muslx/error.hpp>

#include <cmath>

namespace muslx {

Truncated truncate(const TruncationFamily& family, double z) {
  const double k = family.k;
  if (!(k > 0.0)) throw Error(ErrorCode::invalid_argument, "truncation level must be positive");
  const double a = std::abs(z);
  if (a <= k) return {z, 1.0, 0.5 * z * z};
  return {std::copysign(k, z), 0.0, k * a - 0.5 * k * k};
}

Truncated truncate_smooth(const TruncationFamily& family, double z) {
  const double k = family.k;
  const double d = family.delta;
  if (!(k > 0.0) || !(d > 0.0)) throw Error(ErrorCode::invalid_argument, "smooth truncation needs k > 0 and delta > 0");
  const double a = std::abs(z);
  if (a <= k) return {z, 1.0, 0.5 * z * z};
  if (a >= k + d) {
    const double g_end = 0.5 * k * k + k * d + 0.35 * d * d;
    return {std::copysign(k + 0.5 * d, z), 0.0, g_end + (k + 0.5 * d) * (a - k - d)};
  }
  const double s = a - k;
  const double r = s / d;
  const double r2 = r * r;
  const double value = k + s - d * (r2 * r - 0.5 * r2 * r2);
  const double slope = 1.0 - (3.0 * r2 - 2.0 * r2 * r);
  const double primitive = 0.5 * k * k + k * s + 0.5 * s * s - d * d * (0.25 * r2 * r2 - 0.1 * r2 * r2 * r);
  return {std::copysign(value, z), slope, primitive};
}

double truncate_smooth_second(const TruncationFamily& family, double z) {
  const double k = family.k;
  const double d = family.delta;
  const double a = std::abs(z);
  if (a <= k || a >= k + d) return 0.0;
  const double r = (a - k) / d;
  return -std::copysign((6.0 * r - 6.0 * r * r) / d, z);
}

}  // namespace muslx
