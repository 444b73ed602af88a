#pragma once

#include <muslx/young.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace muslx {

/// sup over s in [0, m.domain_max()] of (s x - phi(s)) for convex phi, found by
/// bracketing followed by golden-section search to relative tolerance 1e-10.
/// Throws bracket_exhausted when the supremum escapes every finite bracket.
double conjugate_at(const YoungFunction& m, double x);

/// 512 log-spaced nodes on [1e-4, 1e4].
std::vector<double> default_dual_grid();

/// Tabulated convex conjugate m*, with x = 0 prepended and monotone cubic
/// (PCHIP) interpolation between nodes.
class ConjugateTable {
 public:
  ConjugateTable(std::vector<double> nodes, std::vector<double> values, std::string label = "");

  /// Throws std::out_of_range outside [0, max_node()].
  double operator()(double x) const;
  double deriv(double x) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double max_node() const { return nodes_.back(); }
  const std::string& label() const { return label_; }

  /// The table viewed as a Young function on [0, max_node()].
  YoungFunction as_young() const;

  /// Two columns with header "x,conjugate".
  void write_csv(std::ostream& os) const;

 private:
  struct Interp;
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::string label_;
  std::shared_ptr<const Interp> interp_;
};

ConjugateTable conjugate(const YoungFunction& m, std::span<const double> dual_grid);

/// m(s) + m*(x) - s x for x inside the table's coverage. m*(x) is recomputed
/// by golden section: PCHIP interpolation between nodes is accurate to about
/// 1e-7 relative, too coarse for a gap that must stay above -1e-9.
double fenchel_young_gap(const YoungFunction& m, const ConjugateTable& mstar, double s, double x);

/// Conjugate of an isotropic N-function evaluated at |eta|.
using DualFunction = std::function<double(double, const Point&, double)>;

/// Exact-to-tolerance pointwise route: one golden-section search per call.
DualFunction pointwise_conjugate(const NFunction& M);
/// Table route for (t, x)-independent functions.
DualFunction table_dual(const ConjugateTable& table);

}  // namespace muslx
