#include <muslx/conjugate.hpp>

#include <muslx/error.hpp>

// pchip.hpp in Boost 1.74 calls isnan unqualified; this brings boost::math::isnan into scope.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace muslx {

namespace {

constexpr double kRelTol = 1e-10;

/// Maximum of a concave phi on [0, cap) with phi(0) = 0 known.
double concave_sup(const std::function<double(double)>& phi, double cap) {
  double b = std::min(1.0, cap);
  double fb = phi(b);
  double hi = 0.0;
  for (;;) {
    const double nb = std::min(2.0 * b, cap);
    if (nb <= b) {
      // reached the end of the admissible range while still climbing
      const double back = b * (1.0 - 1e-6);
      if (fb >= phi(back)) {
        throw Error(ErrorCode::bracket_exhausted, "supremum not attained below the domain limit");
      }
      hi = b;
      break;
    }
    const double fnb = phi(nb);
    if (!(fnb > fb)) {
      hi = nb;
      break;
    }
    b = nb;
    fb = fnb;
    if (b > 1e300) throw Error(ErrorCode::bracket_exhausted, "supremum diverges; m is not superlinear enough");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = phi(c);
  double fd = phi(d);
  double best = std::max({0.0, fc, fd});
  for (int it = 0; it < 2000 && (hi - lo) > kRelTol * (std::abs(lo) + std::abs(hi)) + 1e-300; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = phi(c);
      best = std::max(best, fc);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = phi(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

}  // namespace

double conjugate_at(const YoungFunction& m, double x) {
  if (x < 0.0 || !std::isfinite(x)) throw Error(ErrorCode::invalid_argument, "conjugate argument must be >= 0");
  if (x == 0.0) return 0.0;
  return concave_sup([&](double s) { return s * x - m(s); }, m.domain_max());
}

std::vector<double> default_dual_grid() {
  constexpr int count = 512;
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = std::pow(10.0, -4.0 + 8.0 * i / (count - 1));
  return g;
}

struct ConjugateTable::Interp {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

ConjugateTable::ConjugateTable(std::vector<double> nodes, std::vector<double> values, std::string label)
    : nodes_(std::move(nodes)), values_(std::move(values)), label_(std::move(label)) {
  if (nodes_.size() != values_.size() || nodes_.size() < 4) {
    throw Error(ErrorCode::invalid_argument, "conjugate table needs matching node/value arrays of length >= 4");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw Error(ErrorCode::invalid_argument, "table nodes must increase");
  }
  auto x = nodes_;
  auto y = values_;
  interp_ = std::make_shared<const Interp>(Interp{{std::move(x), std::move(y)}});
}

double ConjugateTable::operator()(double x) const {
  if (x < nodes_.front() || x > nodes_.back()) {
    std::ostringstream os;
    os << "x = " << x << " outside conjugate table coverage [" << nodes_.front() << ", " << nodes_.back() << "]";
    throw std::out_of_range(os.str());
  }
  return interp_->spline(x);
}

double ConjugateTable::deriv(double x) const {
  if (x < nodes_.front() || x > nodes_.back()) throw std::out_of_range("outside conjugate table coverage");
  return interp_->spline.prime(x);
}

YoungFunction ConjugateTable::as_young() const {
  const ConjugateTable self = *this;
  return YoungFunction(
      label_.empty() ? "conjugate_table" : label_ + "*", [self](double x) { return self(x); },
      [self](double x) { return self.deriv(x); }, {}, std::nullopt, max_node());
}

void ConjugateTable::write_csv(std::ostream& os) const {
  os << "x,conjugate\n" << std::setprecision(17);
  for (std::size_t i = 0; i < nodes_.size(); ++i) os << nodes_[i] << ',' << values_[i] << '\n';
}

ConjugateTable conjugate(const YoungFunction& m, std::span<const double> dual_grid) {
  if (dual_grid.empty()) throw Error(ErrorCode::empty_input, "dual grid is empty");
  std::vector<double> nodes{0.0};
  std::vector<double> values{0.0};
  for (double x : dual_grid) {
    if (!(x > nodes.back())) throw Error(ErrorCode::invalid_argument, "dual grid must be positive and increasing");
    nodes.push_back(x);
    values.push_back(conjugate_at(m, x));
  }
  return ConjugateTable(std::move(nodes), std::move(values), m.label());
}

double fenchel_young_gap(const YoungFunction& m, const ConjugateTable& mstar, double s, double x) {
  if (!(x >= 0.0) || x > mstar.max_node()) throw std::out_of_range("x outside the conjugate table");
  return m(s) + conjugate_at(m, x) - s * x;
}

DualFunction pointwise_conjugate(const NFunction& M) {
  return [M](double t, const Point& x, double eta) {
    if (eta == 0.0) return 0.0;
    return concave_sup([&](double r) { return r * eta - M(t, x, r); },
                       std::numeric_limits<double>::infinity());
  };
}

DualFunction table_dual(const ConjugateTable& table) {
  return [table](double, const Point&, double eta) { return table(eta); };
}

}  // namespace muslx
