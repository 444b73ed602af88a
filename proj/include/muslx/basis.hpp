#pragma once

#include <muslx/grid.hpp>

#include <array>
#include <span>
#include <vector>

namespace muslx {

/// Orthonormal Dirichlet sine basis of L^2(D): e_j(x) = sqrt(2/L) sin(j pi x / L)
/// in 1-D, tensor products ordered by Laplacian eigenvalue in 2-D. Modes are
/// numbered from 1. The sampled modes are exactly orthonormal under the lumped
/// nodal inner product as long as every axis index stays below the cell count.
class SineBasis {
 public:
  SineBasis(const Domain& domain, int modes);

  const Domain& domain() const { return domain_; }
  int modes() const { return static_cast<int>(indices_.size()); }
  /// Per-axis wave numbers of mode j (second entry 0 in 1-D).
  std::array<int, 2> wave_numbers(int j) const { return indices_.at(static_cast<std::size_t>(j - 1)); }

  double operator()(int j, const Point& x) const;
  double sup_norm(int j) const;
  GridFunction mode(int j) const;
  /// Eigenvalue of the discrete Dirichlet Laplacian belonging to mode j.
  double discrete_eigenvalue(int j) const;

 private:
  Domain domain_;
  std::vector<std::array<int, 2>> indices_;
};

/// Coefficients <u, e_j> for j = 1..modes.
std::vector<double> project_modes(const GridFunction& u, const SineBasis& basis, int modes);
GridFunction lift_modes(std::span<const double> coefficients, const SineBasis& basis);

}  // namespace muslx
