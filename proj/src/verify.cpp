#include <muslx/verify.hpp>

#include <muslx/error.hpp>
#include <muslx/modular.hpp>
#include <muslx/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace muslx {

namespace {

struct Moments {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments r;
  if (x.empty()) return r;
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

std::size_t row_at(const PathResult& p, double t) {
  for (std::size_t i = 0; i < p.ledger.size(); ++i) {
    if (std::abs(p.ledger[i].t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return i;
  }
  std::ostringstream os;
  os << "t = " << t << " is not a ledger node of path " << p.path_index;
  throw Error(ErrorCode::invalid_argument, os.str());
}

template <class F>
GridFunction map_nodes(const GridFunction& u, F f) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(u[i]);
  return {u.domain(), std::move(v)};
}

}  // namespace

EnergyReport energy_residual_expectation(std::span<const PathResult> ensemble, double t_check,
                                         const EnergyOptions& options) {
  if (ensemble.empty()) throw Error(ErrorCode::empty_input, "energy check needs at least one path");
  const std::size_t P = ensemble.size();
  std::vector<double> lhs(P), rhs(P), res(P), disc(P);
  std::vector<double> half_t(P), half_0(P), diss(P), half_hs(P), stoch(P), half_qv(P), numdiss(P);
  double slack = 0.0;
  double dt = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    const PathResult& path = ensemble[p];
    const std::size_t r = row_at(path, t_check);
    const LedgerRow& end = path.ledger[r];
    const LedgerRow& start = path.ledger.front();
    dt = std::max(dt, path.dt);
    half_t[p] = 0.5 * end.norm_sq;
    half_0[p] = 0.5 * start.norm_sq;
    diss[p] = end.dissipation_acc - start.dissipation_acc;
    half_hs[p] = 0.5 * (end.hs_acc - start.hs_acc);
    stoch[p] = end.stoch_acc - start.stoch_acc;
    half_qv[p] = 0.5 * (end.qv_acc - start.qv_acc);
    numdiss[p] = end.numdiss_acc - start.numdiss_acc;
    lhs[p] = half_t[p] - half_0[p];
    rhs[p] = -diss[p] + half_hs[p];
    res[p] = lhs[p] - rhs[p];
    disc[p] = lhs[p] - (-diss[p] + stoch[p] + half_qv[p] - numdiss[p]);
    // each step's identity holds up to |R| ||u^{m+1}|| <= tol (1 + ||u^m||) ||u^{m+1}||
    double s = 0.0;
    for (std::size_t m = 0; m < r; ++m) {
      s += options.newton_tol * (1.0 + std::sqrt(path.ledger[m].norm_sq)) * std::sqrt(path.ledger[m + 1].norm_sq);
    }
    slack = std::max(slack, s);
  }
  EnergyReport rep;
  rep.paths = static_cast<int>(P);
  rep.lhs = moments(lhs).mean;
  rep.rhs = moments(rhs).mean;
  rep.residual = rep.lhs - rep.rhs;
  rep.mc_stderr = moments(res).stderr_;
  rep.discrete_residual = moments(disc).mean;
  rep.allowance = options.stderr_factor * rep.mc_stderr + options.c_bias * dt + slack;
  rep.passed = std::isfinite(rep.residual) && std::abs(rep.residual) <= rep.allowance;
  rep.breakdown = {
      {"half_norm_sq_t", moments(half_t).mean},
      {"half_norm_sq_0", moments(half_0).mean},
      {"dissipation", moments(diss).mean},
      {"half_hs", moments(half_hs).mean},
      {"stochastic", moments(stoch).mean},
      {"half_quadratic_variation", moments(half_qv).mean},
      {"numerical_dissipation", moments(numdiss).mean},
      {"newton_slack", slack},
  };
  return rep;
}

EnergyReport energy_residual_truncated_pathwise(const PathResult& path, const SolverConfig& config,
                                                const TruncationFamily& k, const WienerDraw& draw) {
  if (!(k.k > 0.0)) throw Error(ErrorCode::invalid_argument, "truncation level must be positive");
  const std::size_t M = path.ledger.size() - 1;
  if (path.trajectory.size() != M + 1) {
    throw Error(ErrorCode::invalid_argument, "truncated energy check needs the stored trajectory");
  }
  const Domain& dom = path.trajectory.front().domain();
  const Flux A = config.effective_flux();
  const NoiseModel& h = config.noise;
  const double wn = dom.node_weight();
  const double we = dom.element_weight();

  auto integral = [wn](const GridFunction& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
    return s * wn;
  };
  auto primitive = [&k](double z) { return truncate(k, z).primitive; };
  auto clamp = [&k](double z) { return truncate(k, z).value; };
  const double g_end = integral(map_nodes(path.trajectory[M], primitive));
  const double g_start = integral(map_nodes(path.trajectory[0], primitive));

  double diss = 0.0;
  double stoch = 0.0;
  double ito = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const GridFunction& u = path.trajectory[m];
    const GridFunction& un = path.trajectory[m + 1];
    const double t_next = path.ledger[m + 1].t;
    const GradientField gu = gradient(un);
    const GradientField gt = gradient(map_nodes(un, clamp));
    double d = 0.0;
    for (std::size_t e = 0; e < gu.size(); ++e) d += dot(A.eval(t_next, dom.element_centroid(e), gu[e]), gt[e]);
    diss += path.dt * d * we;
    if (h.is_zero()) continue;
    const GridFunction xi = apply_noise(h, u, path.ledger[m].t, draw, static_cast<int>(m));
    double s = 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Truncated tr = truncate(k, u[i]);
      s += tr.value * xi[i];
      c += tr.slope * xi[i] * xi[i];
    }
    stoch += s * wn;
    ito += 0.5 * c * wn;
  }
  EnergyReport rep;
  rep.paths = 1;
  rep.lhs = g_end - g_start;
  rep.rhs = -diss + stoch + ito;
  rep.residual = rep.lhs - rep.rhs;
  rep.discrete_residual = rep.residual;
  rep.passed = std::isfinite(rep.residual);
  rep.breakdown = {{"G_k_t", g_end}, {"G_k_0", g_start}, {"dissipation", diss}, {"stochastic", stoch},
                   {"ito_correction", ito}};
  return rep;
}

IsometryReport ito_isometry_check(const NoiseModel& h, const Domain& domain, double T, int steps, int paths,
                                  std::uint64_t seed) {
  if (!h.is_additive()) throw Error(ErrorCode::invalid_argument, "Ito isometry check needs additive noise");
  if (!(T > 0.0) || steps < 1 || paths < 1) throw Error(ErrorCode::invalid_argument, "need T > 0, steps >= 1, paths >= 1");
  const double dt = T / steps;
  const GridFunction zero(domain);
  IsometryReport rep;
  rep.paths = paths;
  for (int m = 0; m < steps; ++m) rep.exact += dt * hs_norm_sq(h, m * dt, zero);
  std::vector<double> values(static_cast<std::size_t>(paths), 0.0);
  if (!h.is_zero()) {
    parallel_for(values.size(), [&](std::size_t p) {
      const WienerDraw draw = sample_increments(seed, p, steps, h.modes(), dt);
      std::vector<double> acc(domain.node_count(), 0.0);
      for (int m = 0; m < steps; ++m) {
        const GridFunction xi = apply_noise(h, zero, m * dt, draw, m);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += xi[i];
      }
      values[p] = l2_norm_sq(GridFunction(domain, std::move(acc)));
    });
  }
  const Moments mo = moments(values);
  rep.estimate = mo.mean;
  rep.mc_stderr = mo.stderr_;
  rep.passed = std::abs(rep.estimate - rep.exact) <= 3.0 * rep.mc_stderr;
  return rep;
}

ModularConvergenceReport modular_convergence_check(std::span<const GridFunction> sequence,
                                                   const GridFunction& limit, const NFunction& M,
                                                   std::span<const double> lambda_grid) {
  if (sequence.empty()) throw Error(ErrorCode::empty_input, "modular convergence needs a nonempty sequence");
  ModularConvergenceReport rep;
  rep.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
  std::sort(rep.lambdas.begin(), rep.lambdas.end());
  for (double lam : rep.lambdas) {
    if (!(lam > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
    std::vector<double> row;
    row.reserve(sequence.size());
    for (const GridFunction& f : sequence) {
      double v;
      try {
        v = modular(M, SampledField::from_grid((f - limit).scaled(1.0 / lam)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::modular_overflow) throw;
        v = std::numeric_limits<double>::infinity();
      }
      row.push_back(v);
    }
    const std::size_t half = row.size() / 2;
    bool ok = true;
    for (std::size_t n = half; n < row.size(); ++n) {
      if (!(row[n] <= 1e-3)) ok = false;
      if (n > half && row[n] > row[n - 1]) ok = false;
    }
    if (ok && !(row.back() == 0.0 || row.back() <= 0.5 * row[half])) ok = false;
    if (ok && !rep.smallest_lambda) rep.smallest_lambda = lam;
    rep.table.push_back(std::move(row));
  }
  return rep;
}

bool GaussianModularReport::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const GaussianModularRow& r) {
    return !r.diverged && std::isfinite(r.estimate) && r.stable;
  });
}

GaussianModularReport gaussian_modular_finiteness(const NoiseModel& h, const Domain& domain, const YoungFunction& m,
                                                  std::span<const double> lambdas, double T, double dt, int paths,
                                                  std::uint64_t seed) {
  if (!h.is_additive()) throw Error(ErrorCode::invalid_argument, "Gaussian modular check needs additive noise");
  if (m.growth() && !(m.growth()->beta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "Gaussian modular check needs beta < 1");
  }
  if (lambdas.empty()) throw Error(ErrorCode::empty_input, "no lambda values");
  if (paths < 1) throw Error(ErrorCode::invalid_argument, "paths must be >= 1");
  const int steps = static_cast<int>(std::round(T / dt));
  if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * T) {
    throw Error(ErrorCode::invalid_argument, "T must be a whole number of steps dt");
  }
  const NFunction M = NFunction::from_young(m);
  const std::size_t L = lambdas.size();
  const std::size_t P = 2 * static_cast<std::size_t>(paths);
  // values[p * L + l]; NaN marks an overflow
  std::vector<double> values(P * L, 0.0);
  if (!h.is_zero()) {
    parallel_for(P, [&](std::size_t p) {
      const WienerDraw draw = sample_increments(seed, p, steps, h.modes(), dt);
      const GridFunction zero(domain);
      std::vector<GridFunction> states;
      states.reserve(static_cast<std::size_t>(steps) + 1);
      states.push_back(zero);
      for (int s = 0; s < steps; ++s) states.push_back(states.back() + apply_noise(h, zero, s * dt, draw, s));
      const SampledField field = SampledField::from_trajectory(states, dt);
      for (std::size_t l = 0; l < L; ++l) {
        try {
          values[p * L + l] = modular(M, field.scaled(1.0 / lambdas[l]));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::modular_overflow) throw;
          values[p * L + l] = std::numeric_limits<double>::quiet_NaN();
        }
      }
    });
  }
  GaussianModularReport rep;
  rep.paths = paths;
  for (std::size_t l = 0; l < L; ++l) {
    GaussianModularRow row;
    row.lambda = lambdas[l];
    std::vector<double> col(P);
    for (std::size_t p = 0; p < P; ++p) col[p] = values[p * L + l];
    if (std::any_of(col.begin(), col.end(), [](double v) { return !std::isfinite(v); })) {
      row.diverged = true;
      rep.rows.push_back(row);
      continue;
    }
    const Moments first = moments(std::span<const double>(col).first(static_cast<std::size_t>(paths)));
    const Moments all = moments(col);
    row.estimate = first.mean;
    row.mc_stderr = first.stderr_;
    row.doubled = all.mean;
    row.relative_change = row.estimate == 0.0 && row.doubled == 0.0
                              ? 0.0
                              : std::abs(row.doubled - row.estimate) / std::abs(row.estimate);
    row.stable = row.relative_change <= 0.2;
    rep.rows.push_back(row);
  }
  return rep;
}

PiecewiseReport piecewise_consistency(const SolverConfig& config, std::span<const Flux> piece_fluxes,
                                      std::uint64_t path_index) {
  config.validate();
  const int M = config.steps();
  const std::int64_t first = config.start_step;
  const std::int64_t last = first + M;
  std::vector<std::int64_t> cuts{first};
  for (double b : config.flux.breakpoints) {
    const auto s = static_cast<std::int64_t>(std::llround(b / config.dt));
    if (s > first && s < last) cuts.push_back(s);
  }
  cuts.push_back(last);
  const std::size_t windows = cuts.size() - 1;
  if (!piece_fluxes.empty() && piece_fluxes.size() != windows) {
    throw Error(ErrorCode::shape_mismatch, "expected " + std::to_string(windows) + " piece fluxes, got " +
                                               std::to_string(piece_fluxes.size()));
  }

  SolverConfig global = config;
  global.store_trajectory = true;
  const PathResult whole = solve_path(global, path_index);

  std::vector<GridFunction> chain{config.initial_state()};
  for (std::size_t w = 0; w < windows; ++w) {
    SolverConfig part = config;
    part.store_trajectory = true;
    part.start_step = cuts[w];
    part.horizon = static_cast<double>(cuts[w + 1] - cuts[w]) * config.dt;
    part.initial = chain.back();
    if (!piece_fluxes.empty()) part.flux = piece_fluxes[w];
    const PathResult piece = solve_path(part, path_index);
    chain.insert(chain.end(), piece.trajectory.begin() + 1, piece.trajectory.end());
  }

  PiecewiseReport rep;
  rep.windows = static_cast<int>(windows);
  for (std::size_t m = 0; m < chain.size(); ++m) {
    rep.max_gap = std::max(rep.max_gap, std::sqrt(l2_norm_sq(whole.trajectory[m] - chain[m])));
  }
  rep.passed = rep.max_gap <= 1e-12;
  return rep;
}

double ou_second_moment(double a0, double sigma, double mu, double t) {
  const double decay = std::exp(-2.0 * mu * t);
  return a0 * a0 * decay + sigma * sigma * (1.0 - decay) / (2.0 * mu);
}

double ou_recurrence_second_moment(double a0, double sigma, double mu, double dt, int steps) {
  const double damp = 1.0 / ((1.0 + mu * dt) * (1.0 + mu * dt));
  double s = a0 * a0;
  for (int m = 0; m < steps; ++m) s = (s + sigma * sigma * dt) * damp;
  return s;
}

double ou_expectation_bias(double a0, double sigma, double mu, double dt, int steps) {
  const double damp = 1.0 / ((1.0 + mu * dt) * (1.0 + mu * dt));
  double s = a0 * a0;
  double diss = 0.0;
  for (int m = 0; m < steps; ++m) {
    s = (s + sigma * sigma * dt) * damp;
    diss += dt * mu * s;
  }
  return 0.5 * (s - a0 * a0) + diss - 0.5 * sigma * sigma * dt * steps;
}

}  // namespace muslx
