#include <muslx/basis.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace muslx {

SineBasis::SineBasis(const Domain& domain, int modes) : domain_(domain) {
  if (modes < 0) throw Error(ErrorCode::invalid_argument, "negative mode count");
  if (domain.dim() == 1) {
    for (int j = 1; j <= modes; ++j) indices_.push_back({j, 0});
  } else {
    // enough candidates to pick the `modes` lowest eigenvalues
    const int reach = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(modes)))) + modes;
    std::vector<std::array<int, 2>> all;
    for (int a = 1; a <= reach; ++a)
      for (int b = 1; b <= reach; ++b) all.push_back({a, b});
    std::stable_sort(all.begin(), all.end(), [](const auto& p, const auto& q) {
      const int lp = p[0] * p[0] + p[1] * p[1];
      const int lq = q[0] * q[0] + q[1] * q[1];
      return lp != lq ? lp < lq : p[0] < q[0];
    });
    indices_.assign(all.begin(), all.begin() + modes);
  }
}

double SineBasis::operator()(int j, const Point& x) const {
  const auto& k = indices_.at(static_cast<std::size_t>(j - 1));
  const double len = domain_.hi() - domain_.lo();
  const double amp = std::sqrt(2.0 / len);
  double v = amp * std::sin(k[0] * std::numbers::pi * (x[0] - domain_.lo()) / len);
  if (domain_.dim() == 2) v *= amp * std::sin(k[1] * std::numbers::pi * (x[1] - domain_.lo()) / len);
  return v;
}

double SineBasis::sup_norm(int j) const {
  (void)wave_numbers(j);
  const double len = domain_.hi() - domain_.lo();
  return std::pow(std::sqrt(2.0 / len), domain_.dim());
}

GridFunction SineBasis::mode(int j) const {
  return GridFunction::sample(domain_, [&](const Point& x) { return (*this)(j, x); });
}

double SineBasis::discrete_eigenvalue(int j) const {
  const auto& k = indices_.at(static_cast<std::size_t>(j - 1));
  const double h = domain_.spacing();
  const double len = domain_.hi() - domain_.lo();
  double mu = 0.0;
  for (int a = 0; a < domain_.dim(); ++a) {
    const double s = std::sin(k[a] * std::numbers::pi * h / (2.0 * len));
    mu += 4.0 / (h * h) * s * s;
  }
  return mu;
}

std::vector<double> project_modes(const GridFunction& u, const SineBasis& basis, int modes) {
  if (modes > basis.modes()) {
    throw Error(ErrorCode::invalid_argument, "requested " + std::to_string(modes) +
                                                 " modes from a basis of " + std::to_string(basis.modes()));
  }
  if (!(u.domain() == basis.domain())) throw Error(ErrorCode::shape_mismatch, "basis and field grids differ");
  std::vector<double> c(static_cast<std::size_t>(modes));
  for (int j = 1; j <= modes; ++j) c[static_cast<std::size_t>(j - 1)] = l2_inner(u, basis.mode(j));
  return c;
}

GridFunction lift_modes(std::span<const double> coefficients, const SineBasis& basis) {
  if (coefficients.size() > static_cast<std::size_t>(basis.modes())) {
    throw Error(ErrorCode::invalid_argument, "more coefficients than basis modes");
  }
  const Domain& dom = basis.domain();
  std::vector<double> v(dom.node_count(), 0.0);
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (coefficients[j] == 0.0) continue;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += coefficients[j] * basis(static_cast<int>(j + 1), dom.node(i));
  }
  return {dom, std::move(v)};
}

}  // namespace muslx
