#include <muslx/exponent.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <limits>

namespace muslx {

ExponentField::ExponentField(double constant) : pieces_{ExponentPiece{constant, 0.0, 0.0}} {}

ExponentField::ExponentField(std::vector<double> breakpoints, std::vector<ExponentPiece> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.size() != breakpoints_.size() + 1) {
    throw Error(ErrorCode::invalid_argument, "exponent table needs exactly one more piece than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "exponent breakpoints must be strictly increasing");
    }
  }
}

std::size_t ExponentField::piece_index(double t) const {
  // first breakpoint with t <= b, i.e. intervals closed on the right
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin());
}

ExponentField ExponentField::piece_only(std::size_t i) const {
  return ExponentField({}, {pieces_.at(i)});
}

namespace {

template <typename Pick>
double corner_extreme(const std::vector<ExponentPiece>& pieces, double lo, double hi, int dim, double init,
                      Pick pick) {
  double best = init;
  for (const auto& p : pieces) {
    for (double x : {lo, hi}) {
      for (double y : {lo, hi}) {
        best = pick(best, p.at({x, dim == 2 ? y : 0.0}));
      }
    }
  }
  return best;
}

}  // namespace

double ExponentField::min_over(double lo, double hi, int dim) const {
  return corner_extreme(pieces_, lo, hi, dim, std::numeric_limits<double>::infinity(),
                        [](double a, double b) { return std::min(a, b); });
}

double ExponentField::max_over(double lo, double hi, int dim) const {
  return corner_extreme(pieces_, lo, hi, dim, -std::numeric_limits<double>::infinity(),
                        [](double a, double b) { return std::max(a, b); });
}

}  // namespace muslx
