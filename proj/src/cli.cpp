#include <muslx/cli.hpp>

#include <muslx/basis.hpp>
#include <muslx/conjugate.hpp>
#include <muslx/error.hpp>
#include <muslx/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace muslx {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
  throw Error(ErrorCode::config, field + ": " + msg);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  if (!v->is_number()) bad(where + "." + key, "expected a number");
  return v->get<double>();
}

int integer(const json& obj, const char* key, const std::string& where, std::optional<int> fallback = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  if (!v->is_number_integer()) bad(where + "." + key, "expected an integer");
  return v->get<int>();
}

std::string text(const json& obj, const char* key, const std::string& where,
                 std::optional<std::string> fallback = {}) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    bad(where + "." + key, "missing");
  }
  if (!v->is_string()) bad(where + "." + key, "expected a string");
  return v->get<std::string>();
}

const json& object(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (!v) bad(where + "." + key, "missing");
  if (!v->is_object()) bad(where + "." + key, "expected an object");
  return *v;
}

std::vector<double> parse_number_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      bad(where, "not a number: '" + item + "'");
    }
  }
  return out;
}

// Rewraps library validation errors as configuration errors for `field`.
template <class F>
auto as_config(const std::string& field, F f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    bad(field, e.what());
  }
}

Domain parse_grid(const json& doc) {
  const json* g = find(doc, "grid");
  if (!g) return Domain(1, 64);
  if (!g->is_object()) bad("grid", "expected an object");
  const int dim = integer(*g, "dim", "grid", 1);
  const int cells = integer(*g, "cells", "grid", 64);
  double lo = 0.0;
  double hi = 1.0;
  if (const json* e = find(*g, "extent")) {
    if (!e->is_array() || e->size() != 2 || !(*e)[0].is_number() || !(*e)[1].is_number()) {
      bad("grid.extent", "expected [lo, hi]");
    }
    lo = (*e)[0].get<double>();
    hi = (*e)[1].get<double>();
  }
  return as_config("grid", [&] { return Domain(dim, cells, lo, hi); });
}

ExponentField parse_exponent(const json& e, const std::string& where) {
  if (!e.is_object()) bad(where, "expected an object");
  std::vector<double> breaks;
  if (const json* b = find(e, "breakpoints")) {
    if (!b->is_array()) bad(where + ".breakpoints", "expected an array");
    for (const json& v : *b) {
      if (!v.is_number()) bad(where + ".breakpoints", "expected numbers");
      breaks.push_back(v.get<double>());
    }
  }
  const json* ps = find(e, "pieces");
  if (!ps || !ps->is_array()) bad(where + ".pieces", "expected an array");
  std::vector<ExponentPiece> pieces;
  for (std::size_t i = 0; i < ps->size(); ++i) {
    const json& p = (*ps)[i];
    const std::string pw = where + ".pieces[" + std::to_string(i) + "]";
    if (!p.is_object()) bad(pw, "expected an object");
    ExponentPiece piece;
    if (find(p, "constant")) {
      piece.constant = number(p, "constant", pw);
    } else if (const json* a = find(p, "affine")) {
      if (!a->is_array() || a->size() != 3) bad(pw + ".affine", "expected [c, ax, ay]");
      piece.constant = (*a)[0].get<double>();
      piece.slope_x = (*a)[1].get<double>();
      piece.slope_y = (*a)[2].get<double>();
    } else {
      bad(pw, "expected 'constant' or 'affine'");
    }
    pieces.push_back(piece);
  }
  return as_config(where, [&] { return ExponentField(breaks, pieces); });
}

void parse_flux(const json& doc, const Domain& dom, ExperimentConfig& cfg) {
  const json& f = object(doc, "flux", "config");
  const std::string type = text(f, "type", "flux");
  if (type == "linear") {
    cfg.solver.flux = linear_flux();
  } else if (type == "plaplace") {
    const double delta = number(f, "delta", "flux", 0.0);
    ExponentField p(2.0);
    if (find(f, "exponent")) {
      p = parse_exponent(f["exponent"], "flux.exponent");
    } else {
      p = ExponentField(number(f, "p", "flux"));
    }
    cfg.solver.flux = as_config("flux", [&] { return plaplace_flux(p, delta, dom.lo(), dom.hi(), dom.dim()); });
    if (p.pieces().size() > 1) {
      for (std::size_t i = 0; i < p.pieces().size(); ++i) {
        cfg.piece_fluxes.push_back(plaplace_flux(p.piece_only(i), delta, dom.lo(), dom.hi(), dom.dim()));
      }
    }
  } else if (type == "double_phase") {
    const double p = number(f, "p", "flux");
    const double q = number(f, "q", "flux");
    const double a = number(f, "a", "flux", 1.0);
    if (a < 0.0) bad("flux.a", "weight must be >= 0");
    cfg.solver.flux = as_config("flux", [&] { return double_phase_flux(p, q, [a](double, const Point&) { return a; }); });
  } else {
    bad("flux.type", "unknown flux '" + type + "' (expected plaplace, double_phase or linear)");
  }
}

std::vector<double> parse_amplitudes(const json& n) {
  const json* a = find(n, "amplitudes");
  if (!a) bad("noise.amplitudes", "missing");
  std::vector<double> amps;
  if (a->is_array()) {
    for (const json& v : *a) {
      if (!v.is_number()) bad("noise.amplitudes", "expected numbers");
      amps.push_back(v.get<double>());
    }
    return amps;
  }
  if (!a->is_string()) bad("noise.amplitudes", "expected an array or a named family");
  const std::string s = a->get<std::string>();
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  const std::vector<double> args =
      colon == std::string::npos ? std::vector<double>{} : parse_number_list(s.substr(colon + 1), "noise.amplitudes");
  if (kind == "single") {
    if (args.size() != 1) bad("noise.amplitudes", "single takes one argument");
    return {args[0]};
  }
  if (kind != "constant" && kind != "geometric") bad("noise.amplitudes", "unknown family '" + kind + "'");
  const int modes = integer(n, "modes", "noise");
  if (modes < 1) bad("noise.modes", "must be >= 1");
  if (kind == "constant") {
    if (args.size() != 1) bad("noise.amplitudes", "constant takes one argument");
    return std::vector<double>(static_cast<std::size_t>(modes), args[0]);
  }
  if (args.size() != 2) bad("noise.amplitudes", "geometric takes scale,ratio");
  for (int j = 1; j <= modes; ++j) amps.push_back(args[0] * std::pow(args[1], j));
  return amps;
}

void parse_noise(const json& doc, const Domain& dom, ExperimentConfig& cfg) {
  const json* n = find(doc, "noise");
  if (!n) {
    cfg.solver.noise = NoiseModel::zero();
    return;
  }
  if (!n->is_object()) bad("noise", "expected an object");
  const std::string kind = text(*n, "kind", "noise");
  if (kind == "zero") {
    cfg.solver.noise = NoiseModel::zero();
    return;
  }
  if (kind != "additive" && kind != "multiplicative") {
    bad("noise.kind", "unknown noise '" + kind + "' (expected additive, multiplicative or zero)");
  }
  cfg.noise_amplitudes = parse_amplitudes(*n);
  const auto modes = static_cast<int>(cfg.noise_amplitudes.size());
  if (modes < 1) bad("noise.amplitudes", "empty");
  const SineBasis basis = as_config("noise.amplitudes", [&] { return SineBasis(dom, modes); });
  cfg.solver.noise = kind == "additive" ? NoiseModel::additive(basis, cfg.noise_amplitudes)
                                        : NoiseModel::multiplicative(basis, cfg.noise_amplitudes);
}

std::optional<GridFunction> parse_initial(const json& doc, const Domain& dom, const fs::path& base_dir) {
  const json* u = find(doc, "initial");
  if (!u) return std::nullopt;
  if (!u->is_object()) bad("initial", "expected an object");
  if (const json* m = find(*u, "modes")) {
    if (!m->is_array() || m->empty()) bad("initial.modes", "expected a nonempty array");
    std::vector<double> c;
    for (const json& v : *m) {
      if (!v.is_number()) bad("initial.modes", "expected numbers");
      c.push_back(v.get<double>());
    }
    const SineBasis basis = as_config("initial.modes", [&] { return SineBasis(dom, static_cast<int>(c.size())); });
    return lift_modes(c, basis);
  }
  if (find(*u, "expression")) {
    const std::string e = text(*u, "expression", "initial");
    if (e == "zero") return GridFunction(dom);
    if (e.rfind("mode:", 0) == 0) {
      int k = 0;
      try {
        k = std::stoi(e.substr(5));
      } catch (const std::exception&) {
        bad("initial.expression", "bad mode index in '" + e + "'");
      }
      if (k < 1) bad("initial.expression", "mode index must be >= 1");
      return as_config("initial.expression", [&] { return SineBasis(dom, k).mode(k); });
    }
    bad("initial.expression", "unknown expression '" + e + "' (expected zero or mode:k)");
  }
  if (find(*u, "csv")) {
    const fs::path p = base_dir / text(*u, "csv", "initial");
    std::ifstream in(p);
    if (!in) bad("initial.csv", "cannot open " + p.string());
    return as_config("initial.csv", [&] { return read_field_csv(dom, in); });
  }
  bad("initial", "expected modes, expression or csv");
}

const std::vector<std::string> kKnownChecks = {"energy", "ou_moment", "truncated_energy", "piecewise",
                                               "ito_isometry"};

bool is_linear(const ExperimentConfig& cfg) {
  const json& f = cfg.raw["flux"];
  const std::string type = f.value("type", "");
  if (type == "linear") return true;
  return type == "plaplace" && !f.contains("exponent") && f.value("p", 0.0) == 2.0 && f.value("delta", 0.0) == 0.0;
}

// ------------------------------------------------------------------ output

void write_ledger_csv(const std::vector<PathResult>& paths, int stride, std::ostream& out) {
  out << "path,step,t,norm_sq,dissipation_acc,hs_acc,stoch_acc,numdiss_acc,qv_acc\n";
  for (const PathResult& p : paths) {
    const std::size_t last = p.ledger.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
      if (i != last && i % static_cast<std::size_t>(stride) != 0) continue;
      const LedgerRow& r = p.ledger[i];
      out << p.path_index << ',' << r.step << ',' << num(r.t) << ',' << num(r.norm_sq) << ','
          << num(r.dissipation_acc) << ',' << num(r.hs_acc) << ',' << num(r.stoch_acc) << ',' << num(r.numdiss_acc)
          << ',' << num(r.qv_acc) << '\n';
    }
  }
}

void write_trajectory_csv(const PathResult& p, std::ostream& out) {
  const Domain& dom = p.initial.domain();
  out << (dom.dim() == 1 ? "step,t,x,value\n" : "step,t,x,y,value\n");
  for (std::size_t m = 0; m < p.trajectory.size(); ++m) {
    const GridFunction& u = p.trajectory[m];
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = dom.node(i);
      out << p.ledger[m].step << ',' << num(p.ledger[m].t) << ',' << num(x[0]) << ',';
      if (dom.dim() == 2) out << num(x[1]) << ',';
      out << num(u[i]) << '\n';
    }
  }
}

json energy_json(const EnergyReport& r) {
  json j = {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"residual", r.residual},
            {"mc_stderr", r.mc_stderr},
            {"paths", r.paths},
            {"allowance", r.allowance},
            {"discrete_residual", r.discrete_residual},
            {"passed", r.passed}};
  json b = json::object();
  for (const auto& [k, v] : r.breakdown) b[k] = v;
  j["breakdown"] = b;
  return j;
}

struct CheckLine {
  std::string name;
  bool passed;
  std::string detail;
};

void print_lines(const std::vector<CheckLine>& lines, std::ostream& out) {
  std::size_t width = 0;
  for (const auto& l : lines) width = std::max(width, l.name.size());
  for (const auto& l : lines) {
    out << (l.passed ? "PASS " : "FAIL ") << std::left << std::setw(static_cast<int>(width)) << l.name << "  "
        << l.detail << '\n';
  }
}

std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Applies CLI overrides and re-validates.
void apply_options(ExperimentConfig& cfg, const CliOptions& o) {
  if (o.seed) cfg.solver.seed = *o.seed;
  if (o.paths) {
    if (*o.paths < 1) bad("--paths", "must be >= 1");
    cfg.solver.paths = *o.paths;
  }
  if (o.out) cfg.output_dir = *o.out;
}

int report_error(const std::exception& e, std::ostream& err) {
  if (const auto* me = dynamic_cast<const Error*>(&e)) {
    err << "error: " << me->what() << '\n';
    return me->code() == ErrorCode::config ? exit_config : exit_runtime;
  }
  if (dynamic_cast<const json::exception*>(&e)) {
    err << "error: config: " << e.what() << '\n';
    return exit_config;
  }
  err << "error: " << e.what() << '\n';
  return exit_runtime;
}

}  // namespace

// ------------------------------------------------------------------ config

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) bad("config", "top level must be an object");
  ExperimentConfig cfg;
  cfg.raw = doc;
  const Domain dom = parse_grid(doc);
  cfg.solver.domain = dom;
  parse_flux(doc, dom, cfg);
  parse_noise(doc, dom, cfg);
  cfg.solver.initial = parse_initial(doc, dom, base_dir);

  const json& s = object(doc, "solver", "config");
  cfg.solver.horizon = number(s, "T", "solver");
  cfg.solver.dt = number(s, "dt", "solver");
  cfg.solver.eps = number(s, "eps", "solver", 0.0);
  const std::string reg = text(s, "regularizer", "solver", std::string("power:4"));
  cfg.solver.eps_young = as_config("solver.regularizer", [&] { return YoungFunction::parse(reg); });
  cfg.solver.newton.tol = number(s, "newton_tol", "solver", NewtonOptions{}.tol);
  cfg.solver.newton.max_iter = integer(s, "newton_max", "solver", NewtonOptions{}.max_iter);
  cfg.solver.paths = integer(s, "paths", "solver", 1);
  const std::string mode = text(s, "mode", "solver", std::string("direct"));
  if (mode == "fixed_point") {
    cfg.fixed_point = true;
  } else if (mode != "direct") {
    bad("solver.mode", "unknown mode '" + mode + "' (expected direct or fixed_point)");
  }
  if (const json* fp = find(s, "fixed_point")) {
    if (!fp->is_object()) bad("solver.fixed_point", "expected an object");
    cfg.fixed_point_options.alpha = number(*fp, "alpha", "solver.fixed_point", cfg.fixed_point_options.alpha);
    cfg.fixed_point_options.tol = number(*fp, "tol", "solver.fixed_point", cfg.fixed_point_options.tol);
    cfg.fixed_point_options.max_iter = integer(*fp, "max_iter", "solver.fixed_point", cfg.fixed_point_options.max_iter);
  }

  if (const json* seed = find(doc, "seed")) {
    if (!seed->is_number_unsigned()) bad("seed", "expected a non-negative integer");
    cfg.solver.seed = seed->get<std::uint64_t>();
  }

  if (const json* c = find(doc, "checks")) {
    if (!c->is_object()) bad("checks", "expected an object");
    for (const auto& [name, v] : c->items()) {
      if (std::find(kKnownChecks.begin(), kKnownChecks.end(), name) == kKnownChecks.end()) {
        bad("checks." + name, "unknown check");
      }
      if (!v.is_object()) bad("checks." + name, "expected an object");
    }
    cfg.checks = *c;
    if (c->contains("ou_moment")) {
      if (!is_linear(cfg) || cfg.solver.eps != 0.0) bad("checks.ou_moment", "needs a linear flux and eps = 0");
      if (!cfg.solver.noise.is_additive()) bad("checks.ou_moment", "needs additive noise");
    }
    if (c->contains("ito_isometry") && !cfg.solver.noise.is_additive()) {
      bad("checks.ito_isometry", "needs additive noise");
    }
    if (c->contains("truncated_energy") && !(number((*c)["truncated_energy"], "k", "checks.truncated_energy") > 0.0)) {
      bad("checks.truncated_energy.k", "must be positive");
    }
  }

  if (const json* o = find(doc, "output")) {
    if (!o->is_object()) bad("output", "expected an object");
    cfg.output_dir = text(*o, "dir", "output", std::string("out"));
    if (const json* t = find(*o, "trajectory")) {
      if (!t->is_boolean()) bad("output.trajectory", "expected a boolean");
      cfg.write_trajectory = t->get<bool>();
    }
    cfg.ledger_stride = integer(*o, "ledger_stride", "output", 0);
    if (cfg.ledger_stride < 0) bad("output.ledger_stride", "must be >= 0");
  }

  as_config("solver", [&] {
    cfg.solver.validate();
    return 0;
  });
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

void write_field_csv(const GridFunction& u, std::ostream& out) {
  const Domain& dom = u.domain();
  out << (dom.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = dom.node(i);
    out << num(x[0]) << ',';
    if (dom.dim() == 2) out << num(x[1]) << ',';
    out << num(u[i]) << '\n';
  }
}

GridFunction read_field_csv(const Domain& domain, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::config, "empty field CSV");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    try {
      values.push_back(std::stod(line.substr(comma == std::string::npos ? 0 : comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::config, "bad field CSV line '" + line + "'");
    }
  }
  if (values.size() != domain.node_count()) {
    throw Error(ErrorCode::config, "field CSV has " + std::to_string(values.size()) + " nodes, grid has " +
                                       std::to_string(domain.node_count()));
  }
  return {domain, std::move(values)};
}

// ------------------------------------------------------------------ commands

int run_command(const fs::path& config_path, const CliOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_options(cfg, options);
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_config;
  }
  const SolverConfig& sc = cfg.solver;
  json report;
  std::vector<CheckLine> lines;
  bool all_passed = true;
  std::vector<PathResult> paths;
  try {
    const int M = sc.steps();
    report["config"] = cfg.raw;
    report["seed"] = sc.seed;
    report["paths"] = sc.paths;
    report["steps"] = M;
    report["dt"] = sc.dt;
    report["T"] = sc.horizon;
    report["newton_tol"] = sc.newton.tol;

    if (cfg.fixed_point) {
      std::vector<std::optional<FixedPointResult>> slots(static_cast<std::size_t>(sc.paths));
      parallel_for(slots.size(), [&](std::size_t p) { slots[p].emplace(solve_multiplicative(sc, p, cfg.fixed_point_options)); });
      int max_it = 0;
      double max_ratio = 0.0;
      for (auto& s : slots) {
        max_it = std::max(max_it, s->iterations);
        max_ratio = std::max(max_ratio, s->max_ratio);
        paths.push_back(std::move(s->path));
      }
      report["fixed_point"] = {{"alpha", cfg.fixed_point_options.alpha},
                               {"max_iterations", max_it},
                               {"max_defect_ratio", max_ratio}};
    } else {
      paths = solve_ensemble(sc);
    }
    int iters = 0;
    double worst = 0.0;
    for (const PathResult& p : paths) {
      iters += p.newton_iterations;
      worst = std::max(worst, p.max_newton_residual);
    }
    report["newton"] = {{"iterations", iters}, {"max_residual", worst}};

    json checks = json::object();
    const double T_end = static_cast<double>(sc.start_step + M) * sc.dt;
    if (cfg.checks.contains("energy")) {
      EnergyOptions eo;
      eo.c_bias = number(cfg.checks["energy"], "c_bias", "checks.energy", kDefaultBiasConstant);
      eo.newton_tol = sc.newton.tol;
      const EnergyReport r = energy_residual_expectation(paths, T_end, eo);
      checks["energy"] = energy_json(r);
      checks["energy"]["c_bias"] = eo.c_bias;
      lines.push_back({"energy", r.passed, fmt("residual=%.3e allowance=%.3e", r.residual, r.allowance)});
    }
    if (cfg.checks.contains("ou_moment")) {
      // closed form over the complete sine basis of the grid
      const Domain& dom = sc.domain;
      const int full = dom.dim() == 1 ? dom.interior_per_axis() : dom.interior_per_axis() * dom.interior_per_axis();
      const SineBasis basis(dom, full);
      const std::vector<double> c = project_modes(sc.initial_state(), basis, full);
      double exact = 0.0;
      for (int j = 1; j <= full; ++j) {
        const double a = j <= static_cast<int>(cfg.noise_amplitudes.size()) && !sc.noise.is_zero()
                             ? cfg.noise_amplitudes[static_cast<std::size_t>(j - 1)]
                             : 0.0;
        exact += ou_second_moment(c[static_cast<std::size_t>(j - 1)], a, basis.discrete_eigenvalue(j), sc.horizon);
      }
      std::vector<double> v;
      for (const PathResult& p : paths) v.push_back(p.ledger.back().norm_sq);
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0.0;
      const double tol = 3.0 * se + 1e-12 * (1.0 + exact);
      const bool ok = std::abs(mean - exact) <= tol;
      checks["ou_moment"] = {{"estimate", mean}, {"mc_stderr", se}, {"exact", exact}, {"passed", ok}};
      lines.push_back({"ou_moment", ok, fmt("E|u(T)|^2=%.6g closed_form=%.6g", mean, exact)});
    }
    if (cfg.checks.contains("truncated_energy")) {
      const TruncationFamily k{cfg.checks["truncated_energy"]["k"].get<double>(), 0.0};
      SolverConfig one = sc;
      one.store_trajectory = true;
      const WienerDraw draw = draw_for(one, 0);
      const PathResult p0 = solve_with_draw(one, draw);
      const EnergyReport r = energy_residual_truncated_pathwise(p0, one, k, draw);
      checks["truncated_energy"] = energy_json(r);
      checks["truncated_energy"]["k"] = k.k;
      lines.push_back({"truncated_energy", r.passed, fmt("residual=%.3e dt=%.3e", r.residual, sc.dt)});
    }
    if (cfg.checks.contains("piecewise")) {
      const PiecewiseReport r = piecewise_consistency(sc, cfg.piece_fluxes);
      checks["piecewise"] = {{"max_gap", r.max_gap}, {"windows", r.windows}, {"passed", r.passed}};
      lines.push_back({"piecewise", r.passed, fmt("max_gap=%.3e windows=%.0f", r.max_gap, r.windows)});
    }
    if (cfg.checks.contains("ito_isometry")) {
      const IsometryReport r = ito_isometry_check(sc.noise, sc.domain, sc.horizon, M, sc.paths, sc.seed);
      checks["ito_isometry"] = {{"estimate", r.estimate}, {"mc_stderr", r.mc_stderr}, {"exact", r.exact},
                                {"paths", r.paths},      {"passed", r.passed}};
      lines.push_back({"ito_isometry", r.passed, fmt("estimate=%.6g exact=%.6g", r.estimate, r.exact)});
    }
    for (const auto& l : lines) all_passed = all_passed && l.passed;
    report["checks"] = checks;
    report["passed"] = all_passed;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }

  try {
    fs::create_directories(cfg.output_dir);
    const int M = sc.steps();
    const int stride = cfg.ledger_stride > 0 ? cfg.ledger_stride : (sc.paths <= 32 ? 1 : M);
    {
      std::ofstream f(cfg.output_dir / "ledger.csv");
      write_ledger_csv(paths, stride, f);
    }
    {
      std::ofstream f(cfg.output_dir / "report.json");
      f << report.dump(2) << '\n';
    }
    if (cfg.write_trajectory) {
      SolverConfig one = sc;
      one.store_trajectory = true;
      const PathResult p0 = cfg.fixed_point ? solve_multiplicative(one, 0, cfg.fixed_point_options).path
                                            : solve_path(one, 0);
      std::ofstream f(cfg.output_dir / "trajectory_0.csv");
      write_trajectory_csv(p0, f);
    }
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  if (!options.quiet) {
    print_lines(lines, out);
    out << (all_passed ? "all checks passed" : "some checks failed") << " (" << lines.size() << " selected, output in "
        << cfg.output_dir.string() << ")\n";
  }
  return all_passed ? exit_ok : exit_check_failed;
}

int cascade_command(const fs::path& config_path, const std::string& dial, const std::vector<std::string>& values,
                    const CliOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  std::vector<double> eps;
  std::vector<int> modes;
  try {
    cfg = load_config(config_path);
    apply_options(cfg, options);
    if (dial != "eps" && dial != "modes") bad("--dial", "expected eps or modes");
    std::vector<double> list;
    for (const std::string& v : values) {
      const std::vector<double> part = parse_number_list(v, "--values");
      list.insert(list.end(), part.begin(), part.end());
    }
    if (list.empty()) bad("--values", "empty list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (dial == "eps") {
        if (!(list[i] >= 0.0)) bad("--values", "eps must be >= 0");
        if (i > 0 && list[i] > list[i - 1]) bad("--values", "eps list must be descending");
        eps.push_back(list[i]);
      } else {
        if (list[i] != std::floor(list[i]) || list[i] < 0 || list[i] > cfg.solver.noise.modes()) {
          bad("--values", "mode counts must be integers in 0.." + std::to_string(cfg.solver.noise.modes()));
        }
        if (i > 0 && list[i] < list[i - 1]) bad("--values", "mode list must be ascending");
        modes.push_back(static_cast<int>(list[i]));
      }
    }
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_config;
  }
  try {
    const CascadeTable table = dial == "eps" ? epsilon_cascade(cfg.solver, eps) : noise_mode_cascade(cfg.solver, modes);
    fs::create_directories(cfg.output_dir);
    std::ofstream f(cfg.output_dir / "cascade.csv");
    table.write_csv(f);
    if (!options.quiet) table.write_csv(out);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return exit_ok;
}

int conjugate_table_command(const std::string& young_name, const CliOptions& options, std::ostream& out,
                            std::ostream& err) {
  std::optional<YoungFunction> m;
  try {
    m = YoungFunction::parse(young_name);
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_config;
  }
  try {
    const std::vector<double> grid = default_dual_grid();
    const ConjugateTable table = conjugate(*m, grid);
    if (options.out) {
      if (options.out->has_parent_path()) fs::create_directories(options.out->parent_path());
      std::ofstream f(*options.out);
      if (!f) throw Error(ErrorCode::invalid_argument, "cannot write " + options.out->string());
      table.write_csv(f);
      if (!options.quiet) out << "wrote " << table.nodes().size() << " rows to " << options.out->string() << '\n';
    } else {
      table.write_csv(out);
    }
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
  return exit_ok;
}

int verify_command(const fs::path& run_dir, const CliOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<PathResult> paths;
  EnergyOptions eo;
  double T_end = 0.0;
  try {
    std::ifstream rf(run_dir / "report.json");
    if (!rf) bad("report.json", "cannot open " + (run_dir / "report.json").string());
    json report;
    try {
      report = json::parse(rf);
    } catch (const json::parse_error& e) {
      bad("report.json", e.what());
    }
    const double dt = number(report, "dt", "report");
    T_end = number(report, "T", "report");
    eo.newton_tol = number(report, "newton_tol", "report");
    if (report.contains("checks") && report["checks"].contains("energy")) {
      eo.c_bias = number(report["checks"]["energy"], "c_bias", "report.checks.energy", kDefaultBiasConstant);
    }
    std::ifstream lf(run_dir / "ledger.csv");
    if (!lf) bad("ledger.csv", "cannot open " + (run_dir / "ledger.csv").string());
    std::string line;
    std::getline(lf, line);
    std::map<std::uint64_t, std::size_t> index;
    const Domain stub(1, 4);
    while (std::getline(lf, line)) {
      if (line.empty()) continue;
      const std::vector<double> f = parse_number_list(line, "ledger.csv");
      if (f.size() != 9) bad("ledger.csv", "expected 9 columns in '" + line + "'");
      const auto id = static_cast<std::uint64_t>(f[0]);
      auto [it, fresh] = index.emplace(id, paths.size());
      if (fresh) {
        paths.emplace_back(stub);
        paths.back().path_index = id;
        paths.back().dt = dt;
      }
      paths[it->second].ledger.push_back(
          {static_cast<std::int64_t>(f[1]), f[2], f[3], f[4], f[5], f[6], f[7], f[8]});
    }
    if (paths.empty()) bad("ledger.csv", "no rows");
  } catch (const std::exception& e) {
    report_error(e, err);
    return exit_config;
  }
  try {
    const EnergyReport r = energy_residual_expectation(paths, T_end, eo);
    if (!options.quiet) {
      print_lines({{"energy", r.passed, fmt("residual=%.3e allowance=%.3e", r.residual, r.allowance)}}, out);
    }
    return r.passed ? exit_ok : exit_check_failed;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

}  // namespace muslx
