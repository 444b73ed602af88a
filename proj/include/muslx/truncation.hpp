#pragma once

namespace muslx {

/// Truncation level k > 0 and smoothing width delta >= 0.
struct TruncationFamily {
  double k = 1.0;
  double delta = 0.0;
};

struct Truncated {
  double value;      // T_k(z)
  double slope;      // T_k'(z), taken as 1 on |z| <= k
  double primitive;  // G_k(z) = int_0^z T_k
};

/// Clamp to [-k, k] and its primitive.
Truncated truncate(const TruncationFamily& family, double z);

/// C^2 truncation: identity on |z| <= k, constant sign(z)(k + delta/2) beyond
/// k + delta, and on the band T'(k + s) = 1 - S(s/delta) with the smoothstep
/// S(r) = 3r^2 - 2r^3, so |T''| <= 1.5/delta.
Truncated truncate_smooth(const TruncationFamily& family, double z);
double truncate_smooth_second(const TruncationFamily& family, double z);

}  // namespace muslx
