#include <muslx/solver.hpp>

#include <muslx/error.hpp>
#include <muslx/parallel.hpp>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace muslx {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

}  // namespace

struct ImplicitStepper::Impl {
  struct Element {
    std::array<Domain::StencilEntry, 3> st{};
    int count = 0;
    Point centroid{};
    std::array<std::ptrdiff_t, 9> slot{};  // position of (k, l) in the matrix values
  };

  Domain domain;
  NewtonOptions options;
  std::vector<Element> elements;
  std::vector<std::ptrdiff_t> diag_slot;
  SpMat H;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool ldlt_analyzed = false;
  bool lu_analyzed = false;

  // scratch
  std::vector<Vec2> grads;
  std::vector<double> residual;
  std::vector<double> trial;
  std::vector<double> trial_residual;
  std::vector<double> spare;
  std::vector<double> spare_residual;

  Impl(const Domain& d, NewtonOptions o) : domain(d), options(o) {
    const std::size_t n = d.node_count();
    elements.resize(d.element_count());
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      Element& el = elements[e];
      el.count = d.element_stencil(e, el.st);
      el.centroid = d.element_centroid(e);
      for (int k = 0; k < el.count; ++k) {
        for (int l = 0; l < el.count; ++l) {
          trip.emplace_back(static_cast<int>(el.st[k].node), static_cast<int>(el.st[l].node), 1.0);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    H.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    H.setFromTriplets(trip.begin(), trip.end());
    H.makeCompressed();
    const double* base = H.valuePtr();
    for (Element& el : elements) {
      for (int k = 0; k < el.count; ++k) {
        for (int l = 0; l < el.count; ++l) {
          el.slot[static_cast<std::size_t>(k * 3 + l)] =
              &H.coeffRef(static_cast<Eigen::Index>(el.st[k].node), static_cast<Eigen::Index>(el.st[l].node)) - base;
        }
      }
    }
    diag_slot.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      diag_slot[i] = &H.coeffRef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) - base;
    }
    grads.resize(elements.size());
    residual.resize(n);
    trial.resize(n);
    trial_residual.resize(n);
    spare.resize(n);
    spare_residual.resize(n);
  }

  void element_gradients(std::span<const double> u) {
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      Vec2 g{0.0, 0.0};
      for (int k = 0; k < el.count; ++k) {
        g[0] += el.st[k].coeff[0] * u[el.st[k].node];
        g[1] += el.st[k].coeff[1] * u[el.st[k].node];
      }
      grads[e] = g;
    }
  }

  // Strong residual R = u - rhs - dt div A(grad u) into `r`; returns the
  // objective (NaN when A has no potential).
  double evaluate(const Flux& A, double t, double dt, std::span<const double> rhs, std::span<const double> u,
                  std::vector<double>& r) {
    element_gradients(u);
    const double wn = domain.node_weight();
    const double we = domain.element_weight();
    const double scale = dt * we / wn;
    double obj = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double d = u[i] - rhs[i];
      r[i] = d;
      obj += d * d;
    }
    obj *= 0.5 * wn;
    const bool pot = A.has_potential();
    double phi = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      const Vec2 a = A.eval(t, el.centroid, grads[e]);
      for (int k = 0; k < el.count; ++k) r[el.st[k].node] += scale * dot(el.st[k].coeff, a);
      if (pot) phi += A.potential(t, el.centroid, grads[e]);
    }
    return pot ? obj + dt * we * phi : std::numeric_limits<double>::quiet_NaN();
  }

  double norm(const std::vector<double>& r) const {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s * domain.node_weight());
  }

  // Newton matrix scaled by 1/node_weight: I + dt/w_n sum_e w_e C^T J C.
  void assemble(const Flux& A, double t, double dt) {
    double* val = H.valuePtr();
    std::fill(val, val + H.nonZeros(), 0.0);
    const double scale = dt * domain.element_weight() / domain.node_weight();
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      const Mat2 J = A.jacobian(t, el.centroid, grads[e]);
      for (int k = 0; k < el.count; ++k) {
        const Vec2& ck = el.st[k].coeff;
        for (int l = 0; l < el.count; ++l) {
          const Vec2& cl = el.st[l].coeff;
          const double v = ck[0] * (J[0] * cl[0] + J[1] * cl[1]) + ck[1] * (J[2] * cl[0] + J[3] * cl[1]);
          val[el.slot[static_cast<std::size_t>(k * 3 + l)]] += scale * v;
        }
      }
    }
    for (std::ptrdiff_t s : diag_slot) val[s] += 1.0;
  }

  Eigen::VectorXd newton_direction(bool symmetric) {
    Eigen::Map<const Eigen::VectorXd> r(residual.data(), static_cast<Eigen::Index>(residual.size()));
    if (symmetric) {
      if (!ldlt_analyzed) {
        ldlt.analyzePattern(H);
        ldlt_analyzed = true;
      }
      ldlt.factorize(H);
      if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd d = ldlt.solve(-r);
        if (ldlt.info() == Eigen::Success && d.allFinite()) return d;
      }
    }
    if (!lu_analyzed) {
      lu.analyzePattern(H);
      lu_analyzed = true;
    }
    lu.factorize(H);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::newton_diverged, "singular Newton matrix");
    return lu.solve(-r);
  }

  StepStats solve(const Flux& A, double t, double dt, std::span<const double> rhs, double ref, std::vector<double>& u) {
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
    if (rhs.size() != residual.size() || u.size() != residual.size()) {
      throw Error(ErrorCode::shape_mismatch, "state size does not match the grid");
    }
    const double tol = options.tol * (1.0 + ref);
    const bool pot = A.has_potential();
    double obj = evaluate(A, t, dt, rhs, u, residual);
    double rn = norm(residual);
    if (!std::isfinite(rn) || (pot && !std::isfinite(obj))) {
      throw Error(ErrorCode::nonfinite_state, "non-finite residual at the initial guess");
    }
    StepStats stats;
    while (rn > tol) {
      if (stats.iterations >= options.max_iter) {
        std::ostringstream os;
        os << "residual " << rn << " above " << tol << " after " << options.max_iter << " Newton steps";
        throw Error(ErrorCode::newton_diverged, os.str());
      }
      ++stats.iterations;
      assemble(A, t, dt);
      const Eigen::VectorXd d = newton_direction(pot);
      double lambda = 1.0;
      double accepted_obj = obj;
      bool accepted = false;
      bool saw_finite = false;
      for (int halving = 0; halving <= options.max_halvings; ++halving, lambda *= 0.5) {
        for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + lambda * d[static_cast<Eigen::Index>(i)];
        const double tobj = evaluate(A, t, dt, rhs, trial, trial_residual);
        const double trn = norm(trial_residual);
        if (!std::isfinite(trn) || (pot && !std::isfinite(tobj))) continue;
        saw_finite = true;
        // Near the minimizer the objective stalls at roundoff; a smaller
        // residual then decides.
        const bool better = pot ? (tobj < obj || (tobj <= obj + 1e-13 * (std::abs(obj) + 1e-300) && trn < rn))
                                : trn < rn;
        if (better) {
          accepted_obj = tobj;
          accepted = true;
          break;
        }
      }
      // Singular fluxes overestimate curvature near zero gradients, so a
      // full step can be far too short. When it barely moves the residual,
      // keep doubling while the objective drops clearly.
      if (accepted && pot && lambda == 1.0 && norm(trial_residual) > 0.5 * rn) {
        for (double grow = 2.0; grow <= 1048576.0; grow *= 2.0) {
          for (std::size_t i = 0; i < u.size(); ++i) spare[i] = u[i] + grow * d[static_cast<Eigen::Index>(i)];
          const double gobj = evaluate(A, t, dt, rhs, spare, spare_residual);
          if (!(gobj < accepted_obj - 1e-12 * std::abs(accepted_obj))) break;
          accepted_obj = gobj;
          trial.swap(spare);
          trial_residual.swap(spare_residual);
          lambda = grow;
        }
      }
      if (!accepted) {
        if (!saw_finite) throw Error(ErrorCode::nonfinite_state, "every damped Newton trial overflowed");
        std::ostringstream os;
        os << "residual " << rn << " not reduced after " << options.max_halvings << " halvings";
        throw Error(ErrorCode::newton_diverged, os.str());
      }
      u.swap(trial);
      residual.swap(trial_residual);
      obj = accepted_obj;
      rn = norm(residual);
    }
    stats.residual = rn;
    return stats;
  }
};

ImplicitStepper::ImplicitStepper(const Domain& domain, NewtonOptions options)
    : impl_(std::make_unique<Impl>(domain, options)) {
  if (!(options.tol > 0.0) || options.max_iter < 1 || options.max_halvings < 0) {
    throw Error(ErrorCode::invalid_argument, "Newton tolerances must be positive");
  }
}

ImplicitStepper::~ImplicitStepper() = default;
ImplicitStepper::ImplicitStepper(ImplicitStepper&&) noexcept = default;
ImplicitStepper& ImplicitStepper::operator=(ImplicitStepper&&) noexcept = default;

StepStats ImplicitStepper::solve(const Flux& A, double t_next, double dt, std::span<const double> rhs,
                                 double reference_norm, std::vector<double>& u) {
  return impl_->solve(A, t_next, dt, rhs, reference_norm, u);
}

GridFunction step_implicit(const GridFunction& u_prev, double t_next, double dt, const Flux& A,
                           const GridFunction& forcing, const NewtonOptions& options) {
  if (!(u_prev.domain() == forcing.domain())) throw Error(ErrorCode::shape_mismatch, "forcing on a different grid");
  const GridFunction rhs = u_prev + forcing;
  std::vector<double> u(rhs.values().begin(), rhs.values().end());
  ImplicitStepper stepper(u_prev.domain(), options);
  stepper.solve(A, t_next, dt, rhs.values(), std::sqrt(l2_norm_sq(u_prev)), u);
  return {u_prev.domain(), std::move(u)};
}

double weak_residual(const GridFunction& u, const GridFunction& rhs, double t_next, double dt, const Flux& A,
                     const GridFunction& v) {
  const Domain& dom = u.domain();
  const GradientField gu = gradient(u);
  const GradientField gv = gradient(v);
  double flux_term = 0.0;
  for (std::size_t e = 0; e < gu.size(); ++e) {
    flux_term += dot(A.eval(t_next, dom.element_centroid(e), gu[e]), gv[e]);
  }
  flux_term *= dom.element_weight();
  return l2_inner(u, v) + dt * flux_term - l2_inner(rhs, v);
}

// ---------------------------------------------------------------- config

int SolverConfig::steps() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error(ErrorCode::invalid_argument, "T must be positive");
  const double ratio = horizon / dt;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "T = " << horizon << " is not a whole number of steps dt = " << dt;
    throw Error(ErrorCode::invalid_argument, os.str());
  }
  if (m > 1e9) throw Error(ErrorCode::invalid_argument, "too many time steps");
  return static_cast<int>(m);
}

GridFunction SolverConfig::initial_state() const {
  if (!initial) return GridFunction(domain);
  if (!(initial->domain() == domain)) throw Error(ErrorCode::shape_mismatch, "initial datum on a different grid");
  return *initial;
}

Flux SolverConfig::effective_flux() const {
  if (eps < 0.0 || !std::isfinite(eps)) throw Error(ErrorCode::invalid_argument, "eps must be >= 0");
  if (eps == 0.0) return flux;
  if (!eps_young) throw Error(ErrorCode::invalid_argument, "eps > 0 needs a regularizing Young function");
  return regularize(flux, eps, *eps_young);
}

void SolverConfig::validate() const {
  const int m = steps();
  if (!(newton.tol > 0.0) || newton.max_iter < 1) throw Error(ErrorCode::invalid_argument, "Newton tolerances must be positive");
  if (paths < 1) throw Error(ErrorCode::invalid_argument, "paths must be >= 1");
  if (!flux.eval || !flux.jacobian) throw Error(ErrorCode::invalid_argument, "flux is missing eval or jacobian");
  effective_flux();
  initial_state();
  const double t0 = start_time();
  const double t1 = static_cast<double>(start_step + m) * dt;
  for (double b : flux.breakpoints) {
    if (b <= t0 || b >= t1) continue;
    const double r = b / dt;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
      std::ostringstream os;
      os << "breakpoint " << b << " is not a multiple of dt = " << dt;
      throw Error(ErrorCode::misaligned_breakpoint, os.str());
    }
  }
}

// ---------------------------------------------------------------- paths

WienerDraw draw_for(const SolverConfig& config, std::uint64_t path_index) {
  return sample_increments(config.seed, path_index, config.steps(), config.noise.modes(), config.dt, config.start_step);
}

PathResult solve_with_draw(const SolverConfig& config, const WienerDraw& draw, std::span<const GridFunction> frozen) {
  config.validate();
  const int M = config.steps();
  if (draw.steps != M || draw.first_step != config.start_step) {
    throw Error(ErrorCode::shape_mismatch, "draw does not cover the configured time window");
  }
  if (!frozen.empty() && frozen.size() < static_cast<std::size_t>(M)) {
    throw Error(ErrorCode::shape_mismatch, "frozen path shorter than the step count");
  }
  const Domain& dom = config.domain;
  const Flux A = config.effective_flux();
  const NoiseModel& h = config.noise;
  const double dt = config.dt;
  const double wn = dom.node_weight();

  PathResult res(dom);
  res.path_index = draw.path;
  res.dt = dt;
  res.initial = config.initial_state();
  res.ledger.reserve(static_cast<std::size_t>(M) + 1);
  if (config.store_trajectory) {
    res.trajectory.reserve(static_cast<std::size_t>(M) + 1);
    res.trajectory.push_back(res.initial);
  }

  std::vector<double> u(res.initial.values().begin(), res.initial.values().end());
  std::vector<double> rhs(u.size());
  std::vector<double> next(u.size());
  ImplicitStepper stepper(dom, config.newton);

  auto sq = [wn](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s * wn;
  };

  LedgerRow row;
  row.step = config.start_step;
  row.t = config.start_time();
  row.norm_sq = sq(u);
  res.ledger.push_back(row);

  for (int m = 0; m < M; ++m) {
    const std::int64_t g = config.start_step + m;
    const double t = static_cast<double>(g) * dt;
    const double t_next = static_cast<double>(g + 1) * dt;
    const double ref = std::sqrt(row.norm_sq);

    double stoch = 0.0;
    double qv = 0.0;
    double hs = 0.0;
    if (h.is_zero()) {
      rhs = u;
    } else {
      const GridFunction lam = frozen.empty() ? GridFunction(dom, u) : frozen[static_cast<std::size_t>(m)];
      const GridFunction xi = apply_noise(h, lam, t, draw, m);
      hs = hs_norm_sq(h, t, lam);
      for (std::size_t i = 0; i < u.size(); ++i) {
        rhs[i] = u[i] + xi[i];
        stoch += u[i] * xi[i];
        qv += xi[i] * xi[i];
      }
      stoch *= wn;
      qv *= wn;
    }
    next = rhs;
    StepStats st;
    try {
      st = stepper.solve(A, t_next, dt, rhs, ref, next);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(g) + ": " + e.what());
    }
    res.newton_iterations += st.iterations;
    res.max_newton_residual = std::max(res.max_newton_residual, st.residual);

    double numdiss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = next[i] - rhs[i];
      numdiss += d * d;
    }
    const GradientField gn = gradient(GridFunction(dom, next));
    double diss = 0.0;
    for (std::size_t e = 0; e < gn.size(); ++e) diss += dot(A.eval(t_next, dom.element_centroid(e), gn[e]), gn[e]);
    diss *= dom.element_weight();

    row.step = g + 1;
    row.t = t_next;
    row.norm_sq = sq(next);
    row.dissipation_acc += dt * diss;
    row.hs_acc += dt * hs;
    row.stoch_acc += stoch;
    row.numdiss_acc += 0.5 * wn * numdiss;
    row.qv_acc += qv;
    if (!std::isfinite(row.norm_sq) || !std::isfinite(row.dissipation_acc)) {
      throw Error(ErrorCode::nonfinite_state, "step " + std::to_string(g) + ": non-finite ledger entry");
    }
    res.ledger.push_back(row);
    u.swap(next);
    if (config.store_trajectory) res.trajectory.emplace_back(dom, u);
  }
  res.final_state = GridFunction(dom, u);
  return res;
}

PathResult solve_path(const SolverConfig& config, std::uint64_t path_index) {
  config.validate();
  return solve_with_draw(config, draw_for(config, path_index));
}

std::vector<PathResult> solve_ensemble(const SolverConfig& config) {
  config.validate();
  std::vector<std::optional<PathResult>> slots(static_cast<std::size_t>(config.paths));
  parallel_for(slots.size(), [&](std::size_t p) { slots[p].emplace(solve_path(config, p)); });
  std::vector<PathResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- Picard

FixedPointResult solve_multiplicative(const SolverConfig& config, std::uint64_t path_index,
                                      const FixedPointOptions& options) {
  config.validate();
  if (!(options.alpha >= 0.0) || !(options.tol > 0.0) || options.max_iter < 1) {
    throw Error(ErrorCode::invalid_argument, "fixed point needs alpha >= 0, tol > 0, max_iter >= 1");
  }
  SolverConfig cfg = config;
  cfg.store_trajectory = true;
  const int M = cfg.steps();
  const WienerDraw draw = draw_for(cfg, path_index);
  std::vector<GridFunction> current(static_cast<std::size_t>(M) + 1, cfg.initial_state());

  auto weighted_gap = [&](const std::vector<GridFunction>& a, const std::vector<GridFunction>& b) {
    double worst = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      const double w = std::exp(-options.alpha * static_cast<double>(m) * cfg.dt);
      worst = std::max(worst, w * std::sqrt(l2_norm_sq(a[m] - b[m])));
    }
    return worst;
  };

  FixedPointResult out(cfg.domain);
  for (int k = 0; k < options.max_iter; ++k) {
    PathResult next = solve_with_draw(cfg, draw, current);
    const double d = weighted_gap(next.trajectory, current);
    if (!std::isfinite(d)) throw Error(ErrorCode::nonfinite_state, "Picard iterate overflowed");
    out.defects.push_back(d);
    if (k > 0 && out.defects[k - 1] > 1e-13) out.max_ratio = std::max(out.max_ratio, d / out.defects[k - 1]);
    current = next.trajectory;
    if (d <= options.tol) {
      out.iterations = k;
      if (!config.store_trajectory) next.trajectory.clear();
      out.path = std::move(next);
      return out;
    }
  }
  std::ostringstream os;
  os << "defect " << out.defects.back() << " after " << options.max_iter << " Picard iterations (alpha = "
     << options.alpha << ")";
  throw Error(ErrorCode::no_contraction, os.str());
}

// ---------------------------------------------------------------- cascades

namespace {

struct MeanVar {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanVar summarize(const std::vector<double>& x) {
  MeanVar r;
  const double n = static_cast<double>(x.size());
  for (double v : x) r.mean += v;
  r.mean /= n;
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - r.mean) * (v - r.mean);
    r.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

double sup_gap_sq(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b) {
  double worst = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) worst = std::max(worst, l2_norm_sq(a[m] - b[m]));
  return worst;
}

// Runs `variant(i)` for every list entry on every path and fills the lhs
// columns; per-path extras go through `extra(i, path, trajectories)`.
template <class Configure, class Extra>
CascadeTable run_cascade(const SolverConfig& base, const std::string& dial, std::vector<double> values,
                         Configure configure, Extra extra, bool with_rhs) {
  base.validate();
  const std::size_t n = values.size();
  const auto P = static_cast<std::size_t>(base.paths);
  // gaps[i][p] for i >= 1
  std::vector<std::vector<double>> gaps(n, std::vector<double>(P, 0.0));
  std::vector<std::vector<double>> rhs(n, std::vector<double>(P, 0.0));
  parallel_for(P, [&](std::size_t p) {
    std::vector<std::vector<GridFunction>> traj;
    traj.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      SolverConfig cfg = configure(i);
      cfg.store_trajectory = true;
      traj.push_back(solve_path(cfg, p).trajectory);
      if (i > 0) {
        gaps[i][p] = sup_gap_sq(traj[i - 1], traj[i]);
        rhs[i][p] = extra(i, traj[i]);
        traj[i - 1].clear();
      }
    }
  });
  CascadeTable table;
  table.dial = dial;
  for (std::size_t i = 0; i < n; ++i) {
    CascadeRow row;
    row.value = values[i];
    if (i > 0) {
      const MeanVar g = summarize(gaps[i]);
      row.lhs = g.mean;
      row.lhs_stderr = g.stderr_;
      if (with_rhs) {
        const MeanVar r = summarize(rhs[i]);
        row.rhs = r.mean;
        if (r.mean > 0.0) row.ratio = g.mean / r.mean;
      }
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace

CascadeTable epsilon_cascade(const SolverConfig& config, std::span<const double> eps_list) {
  if (eps_list.empty()) throw Error(ErrorCode::empty_input, "epsilon cascade needs at least one value");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "eps values must be >= 0");
    if (i > 0 && eps_list[i] > eps_list[i - 1]) throw Error(ErrorCode::invalid_argument, "eps list must be descending");
  }
  std::vector<double> values(eps_list.begin(), eps_list.end());
  return run_cascade(
      config, "eps", values,
      [&](std::size_t i) {
        SolverConfig cfg = config;
        cfg.eps = values[i];
        return cfg;
      },
      [](std::size_t, const std::vector<GridFunction>&) { return 0.0; }, false);
}

CascadeTable noise_mode_cascade(const SolverConfig& config, std::span<const int> modes) {
  if (modes.empty()) throw Error(ErrorCode::empty_input, "mode cascade needs at least one value");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] < 0 || modes[i] > config.noise.modes()) {
      throw Error(ErrorCode::mode_mismatch, "mode count " + std::to_string(modes[i]) + " outside 0.." +
                                                std::to_string(config.noise.modes()));
    }
    if (i > 0 && modes[i] < modes[i - 1]) throw Error(ErrorCode::invalid_argument, "mode list must be ascending");
  }
  std::vector<double> values(modes.begin(), modes.end());
  const double dt = config.dt;
  return run_cascade(
      config, "modes", values,
      [&](std::size_t i) {
        SolverConfig cfg = config;
        cfg.noise = config.noise.truncated(modes[i]);
        return cfg;
      },
      [&](std::size_t i, const std::vector<GridFunction>& traj) {
        // left-point rule in time, matching the ledger's HS accumulator
        double s = 0.0;
        for (std::size_t m = 0; m + 1 < traj.size(); ++m) {
          const double t = static_cast<double>(config.start_step + static_cast<std::int64_t>(m)) * dt;
          s += dt * hs_norm_sq(config.noise, t, traj[m], modes[i - 1] + 1, modes[i]);
        }
        return s;
      },
      true);
}

void CascadeTable::write_csv(std::ostream& out) const {
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream os;
    os << std::setprecision(17) << *v;
    return os.str();
  };
  out << dial << ",lhs,lhs_stderr,rhs,ratio\n";
  for (const CascadeRow& r : rows) {
    std::ostringstream v;
    v << std::setprecision(17) << r.value;
    out << v.str() << ',' << opt(r.lhs) << ',' << opt(r.lhs_stderr) << ',' << opt(r.rhs) << ',' << opt(r.ratio)
        << '\n';
  }
}

}  // namespace muslx
