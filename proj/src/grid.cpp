#include <muslx/grid.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace muslx {

Domain::Domain(int dim, int cells, double lo, double hi)
    : dim_(dim), cells_(cells), lo_(lo), hi_(hi), h_((hi - lo) / cells) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorCode::invalid_argument, "grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (cells < 4) {
    throw Error(ErrorCode::invalid_argument, "grid needs at least 4 cells per axis, got " + std::to_string(cells));
  }
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::invalid_argument, "grid extent must satisfy lo < hi");
  }
}

double Domain::measure() const { return std::pow(hi_ - lo_, dim_); }

std::size_t Domain::node_count() const {
  const auto m = static_cast<std::size_t>(cells_ - 1);
  return dim_ == 1 ? m : m * m;
}

double Domain::node_weight() const { return dim_ == 1 ? h_ : h_ * h_; }

Point Domain::node(std::size_t index) const {
  const auto m = static_cast<std::size_t>(cells_ - 1);
  if (dim_ == 1) {
    return {lo_ + static_cast<double>(index + 1) * h_, 0.0};
  }
  const std::size_t i = index % m;
  const std::size_t j = index / m;
  return {lo_ + static_cast<double>(i + 1) * h_, lo_ + static_cast<double>(j + 1) * h_};
}

std::size_t Domain::element_count() const {
  const auto n = static_cast<std::size_t>(cells_);
  return dim_ == 1 ? n : 2 * n * n;
}

double Domain::element_weight() const { return dim_ == 1 ? h_ : 0.5 * h_ * h_; }

Point Domain::element_centroid(std::size_t element) const {
  if (dim_ == 1) {
    return {lo_ + (static_cast<double>(element) + 0.5) * h_, 0.0};
  }
  const auto n = static_cast<std::size_t>(cells_);
  const std::size_t cell = element / 2;
  const double i = static_cast<double>(cell % n);
  const double j = static_cast<double>(cell / n);
  const double shift = (element % 2 == 0) ? 1.0 / 3.0 : 2.0 / 3.0;
  return {lo_ + (i + shift) * h_, lo_ + (j + shift) * h_};
}

std::ptrdiff_t Domain::interior_index(int i, int j) const {
  // vertex (i, j) with 0..cells on each axis; boundary vertices map to -1
  if (i <= 0 || i >= cells_) return -1;
  if (dim_ == 1) return i - 1;
  if (j <= 0 || j >= cells_) return -1;
  return static_cast<std::ptrdiff_t>(j - 1) * (cells_ - 1) + (i - 1);
}

int Domain::element_stencil(std::size_t element, std::array<StencilEntry, 3>& out) const {
  const double inv_h = 1.0 / h_;
  int count = 0;
  auto push = [&](std::ptrdiff_t node, Vec2 coeff) {
    if (node >= 0) out[count++] = {static_cast<std::size_t>(node), coeff};
  };
  if (dim_ == 1) {
    const int e = static_cast<int>(element);
    push(interior_index(e, 0), {-inv_h, 0.0});
    push(interior_index(e + 1, 0), {inv_h, 0.0});
    return count;
  }
  const int cell = static_cast<int>(element / 2);
  const int i = cell % cells_;
  const int j = cell / cells_;
  if (element % 2 == 0) {
    push(interior_index(i, j), {-inv_h, -inv_h});
    push(interior_index(i + 1, j), {inv_h, 0.0});
    push(interior_index(i, j + 1), {0.0, inv_h});
  } else {
    push(interior_index(i + 1, j + 1), {inv_h, inv_h});
    push(interior_index(i, j + 1), {-inv_h, 0.0});
    push(interior_index(i + 1, j), {0.0, -inv_h});
  }
  return count;
}

GridFunction::GridFunction(const Domain& domain)
    : domain_(domain), values_(domain.node_count(), 0.0) {}

GridFunction::GridFunction(const Domain& domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.node_count()) {
    throw Error(ErrorCode::shape_mismatch, "grid function has " + std::to_string(values_.size()) +
                                               " values, domain has " +
                                               std::to_string(domain_.node_count()) + " nodes");
  }
}

GridFunction GridFunction::sample(const Domain& domain,
                                  const std::function<double(const Point&)>& fn) {
  std::vector<double> v(domain.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(domain.node(i));
  return {domain, std::move(v)};
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

void require_same(const Domain& a, const Domain& b) {
  if (!(a == b)) throw Error(ErrorCode::shape_mismatch, "operands live on different grids");
}

}  // namespace

GridFunction GridFunction::operator+(const GridFunction& other) const {
  require_same(domain_, other.domain_);
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return {domain_, std::move(v)};
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
  require_same(domain_, other.domain_);
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
  return {domain_, std::move(v)};
}

GridFunction GridFunction::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return {domain_, std::move(v)};
}

GradientField::GradientField(const Domain& domain)
    : domain_(domain), values_(domain.element_count(), Vec2{0.0, 0.0}) {}

GradientField::GradientField(const Domain& domain, std::vector<Vec2> values)
    : domain_(domain), values_(std::move(values)) {
  if (values_.size() != domain_.element_count()) {
    throw Error(ErrorCode::shape_mismatch, "gradient field size does not match element count");
  }
}

GradientField gradient(const GridFunction& u) {
  const Domain& dom = u.domain();
  std::vector<Vec2> g(dom.element_count());
  std::array<Domain::StencilEntry, 3> st{};
  for (std::size_t e = 0; e < g.size(); ++e) {
    const int n = dom.element_stencil(e, st);
    Vec2 acc{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      acc[0] += st[k].coeff[0] * u[st[k].node];
      acc[1] += st[k].coeff[1] * u[st[k].node];
    }
    g[e] = acc;
  }
  return {dom, std::move(g)};
}

GridFunction divergence(const GradientField& field) {
  const Domain& dom = field.domain();
  std::vector<double> d(dom.node_count(), 0.0);
  std::array<Domain::StencilEntry, 3> st{};
  const double ratio = dom.element_weight() / dom.node_weight();
  for (std::size_t e = 0; e < field.size(); ++e) {
    const int n = dom.element_stencil(e, st);
    for (int k = 0; k < n; ++k) d[st[k].node] -= ratio * dot(st[k].coeff, field[e]);
  }
  return {dom, std::move(d)};
}

double l2_inner(const GridFunction& u, const GridFunction& v) {
  require_same(u.domain(), v.domain());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s * u.domain().node_weight();
}

double l2_norm_sq(const GridFunction& u) { return l2_inner(u, u); }

double l2_inner(const GradientField& a, const GradientField& b) {
  require_same(a.domain(), b.domain());
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) s += dot(a[e], b[e]);
  return s * a.domain().element_weight();
}

double l2_norm_sq(const GradientField& a) { return l2_inner(a, a); }

double SampledField::total_measure() const {
  double s = 0.0;
  for (double w : weight) s += w;
  return s;
}

SampledField SampledField::scaled(double factor) const {
  SampledField out = *this;
  for (auto& v : out.value) v = factor * v;
  return out;
}

SampledField SampledField::sample(const Domain& domain, double horizon, int time_cells,
                                  const std::function<double(double, const Point&)>& fn) {
  if (time_cells < 1 || !(horizon > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "space-time sampling needs T > 0 and at least one time cell");
  }
  SampledField f;
  const double dt = horizon / time_cells;
  const int n = domain.cells();
  const double h = domain.spacing();
  const double cell_w = std::pow(h, domain.dim());
  const int ny = domain.dim() == 1 ? 1 : n;
  for (int m = 0; m < time_cells; ++m) {
    const double t = (m + 0.5) * dt;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < n; ++i) {
        const Point x{domain.lo() + (i + 0.5) * h, domain.dim() == 1 ? 0.0 : domain.lo() + (j + 0.5) * h};
        f.t.push_back(t);
        f.x.push_back(x);
        f.weight.push_back(dt * cell_w);
        f.value.push_back({fn(t, x), 0.0});
      }
    }
  }
  return f;
}

SampledField SampledField::from_grid(const GridFunction& u, double t, double time_weight) {
  SampledField f;
  const Domain& dom = u.domain();
  const double w = dom.node_weight() * time_weight;
  for (std::size_t i = 0; i < u.size(); ++i) {
    f.t.push_back(t);
    f.x.push_back(dom.node(i));
    f.weight.push_back(w);
    f.value.push_back({u[i], 0.0});
  }
  return f;
}

SampledField SampledField::from_gradient(const GradientField& g, double t, double time_weight) {
  SampledField f;
  const Domain& dom = g.domain();
  const double w = dom.element_weight() * time_weight;
  for (std::size_t e = 0; e < g.size(); ++e) {
    f.t.push_back(t);
    f.x.push_back(dom.element_centroid(e));
    f.weight.push_back(w);
    f.value.push_back(g[e]);
  }
  return f;
}

SampledField SampledField::from_trajectory(std::span<const GridFunction> states, double dt, double t0) {
  if (states.size() < 2) {
    throw Error(ErrorCode::empty_input, "trajectory quadrature needs at least two snapshots");
  }
  SampledField f;
  const std::size_t last = states.size() - 1;
  for (std::size_t m = 0; m <= last; ++m) {
    const double tw = (m == 0 || m == last) ? 0.5 * dt : dt;
    SampledField slice = from_grid(states[m], t0 + static_cast<double>(m) * dt, tw);
    f.t.insert(f.t.end(), slice.t.begin(), slice.t.end());
    f.x.insert(f.x.end(), slice.x.begin(), slice.x.end());
    f.weight.insert(f.weight.end(), slice.weight.begin(), slice.weight.end());
    f.value.insert(f.value.end(), slice.value.begin(), slice.value.end());
  }
  return f;
}

double qt_integral(const SampledField& field) {
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field.weight[i] * field.value[i][0];
  return s;
}

}  // namespace muslx
