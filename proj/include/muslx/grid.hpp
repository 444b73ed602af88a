#pragma once

#include <muslx/types.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace muslx {

/// Uniform grid on the cube [lo, hi]^d, d in {1, 2}, with homogeneous
/// Dirichlet data. Only interior nodes carry unknowns.
///
/// Gradients live on elements: the n cells of the 1-D grid, or the two
/// triangles of each square cell in 2-D (lower-left and upper-right halves),
/// so that every element gradient is a forward difference.
class Domain {
 public:
  Domain(int dim, int cells, double lo = 0.0, double hi = 1.0);

  int dim() const { return dim_; }
  int cells() const { return cells_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double spacing() const { return h_; }
  double measure() const;

  int interior_per_axis() const { return cells_ - 1; }
  std::size_t node_count() const;
  /// Lumped quadrature weight of one interior node (h^d).
  double node_weight() const;
  Point node(std::size_t index) const;

  std::size_t element_count() const;
  /// Measure of one element (h in 1-D, h^2/2 in 2-D).
  double element_weight() const;
  Point element_centroid(std::size_t element) const;

  /// Stencil entry: gradient on an element is sum_k coeff_k * u[node_k].
  /// Boundary vertices are omitted since u vanishes there.
  struct StencilEntry {
    std::size_t node;
    Vec2 coeff;
  };
  /// Writes up to three entries into `out`, returns how many were written.
  int element_stencil(std::size_t element, std::array<StencilEntry, 3>& out) const;

  bool operator==(const Domain& other) const = default;

 private:
  std::ptrdiff_t interior_index(int i, int j) const;

  int dim_;
  int cells_;
  double lo_;
  double hi_;
  double h_;
};

/// Nodal field with implicit zero boundary trace.
class GridFunction {
 public:
  explicit GridFunction(const Domain& domain);
  GridFunction(const Domain& domain, std::vector<double> values);

  static GridFunction sample(const Domain& domain, const std::function<double(const Point&)>& fn);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double max_abs() const;

  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction scaled(double factor) const;

 private:
  Domain domain_;
  std::vector<double> values_;
};

/// Element-wise vector field, d components per element.
class GradientField {
 public:
  explicit GradientField(const Domain& domain);
  GradientField(const Domain& domain, std::vector<Vec2> values);

  const Domain& domain() const { return domain_; }
  std::size_t size() const { return values_.size(); }
  std::span<const Vec2> values() const { return values_; }
  const Vec2& operator[](std::size_t e) const { return values_[e]; }

 private:
  Domain domain_;
  std::vector<Vec2> values_;
};

GradientField gradient(const GridFunction& u);
/// Negative adjoint of `gradient` under the discrete inner products.
GridFunction divergence(const GradientField& field);

double l2_inner(const GridFunction& u, const GridFunction& v);
double l2_norm_sq(const GridFunction& u);
double l2_inner(const GradientField& a, const GradientField& b);
double l2_norm_sq(const GradientField& a);

/// Quadrature-weighted samples of a scalar or vector field over Q_T.
struct SampledField {
  std::vector<double> t;
  std::vector<Point> x;
  std::vector<double> weight;
  std::vector<Vec2> value;  // scalar fields use value[i][0]

  std::size_t size() const { return t.size(); }
  double magnitude(std::size_t i) const { return norm(value[i]); }
  double total_measure() const;
  SampledField scaled(double factor) const;

  /// Midpoint in time, cell centres in space: `time_cells` slabs of (0, T)
  /// times the domain's cells.
  static SampledField sample(const Domain& domain, double horizon, int time_cells,
                             const std::function<double(double, const Point&)>& fn);
  /// Nodal field at a single instant with lumped spatial weights, scaled by
  /// `time_weight`.
  static SampledField from_grid(const GridFunction& u, double t = 0.0, double time_weight = 1.0);
  static SampledField from_gradient(const GradientField& g, double t = 0.0,
                                    double time_weight = 1.0);
  /// Trapezoid rule in time over nodal snapshots u^0..u^M spaced by dt.
  static SampledField from_trajectory(std::span<const GridFunction> states, double dt,
                                      double t0 = 0.0);
};

/// Integral of the first component over Q_T.
double qt_integral(const SampledField& field);

}  // namespace muslx
