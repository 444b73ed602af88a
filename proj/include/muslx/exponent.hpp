#pragma once

#include <muslx/types.hpp>

#include <cstddef>
#include <vector>

namespace muslx {

/// p(x) = constant + slope_x * x + slope_y * y on one time interval.
struct ExponentPiece {
  double constant = 2.0;
  double slope_x = 0.0;
  double slope_y = 0.0;

  double at(const Point& x) const { return constant + slope_x * x[0] + slope_y * x[1]; }
};

/// Exponent p(t, x), piecewise in time. Piece i covers (b_{i-1}, b_i]; the
/// first piece also covers t = 0 and the last one extends to +inf.
class ExponentField {
 public:
  explicit ExponentField(double constant = 2.0);
  ExponentField(std::vector<double> breakpoints, std::vector<ExponentPiece> pieces);

  double operator()(double t, const Point& x) const { return pieces_[piece_index(t)].at(x); }
  std::size_t piece_index(double t) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<ExponentPiece>& pieces() const { return pieces_; }
  /// Time-independent field equal to piece i everywhere.
  ExponentField piece_only(std::size_t i) const;

  /// Extremes over [lo, hi]^dim (attained at corners since pieces are affine).
  double min_over(double lo, double hi, int dim) const;
  double max_over(double lo, double hi, int dim) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<ExponentPiece> pieces_;
};

}  // namespace muslx
