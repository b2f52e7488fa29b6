/*
 * Copyright 2026 The ndham Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ndham/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "ndham/dynamics.hpp"
#include "ndham/field.hpp"
#include "ndham/helmholtz.hpp"
#include "ndham/qderiv.hpp"
#include "ndham/report.hpp"
#include "ndham/signals.hpp"

namespace ndham::cli {

namespace {

constexpr const char* kExtractionLabel = "numerical extraction";

// ---------------------------------------------------------------- parsing helpers

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

std::size_t parse_count(const std::string& text) {
  const double v = parse_double(text);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) throw InvalidArgument("not a positive integer: '" + text + "'");
  return static_cast<std::size_t>(v);
}

std::pair<std::string, std::string> split_prefix(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {"", spec};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

/// geo:start,ratio,count | list:e1,e2,... | grid:m1,m2,... (multiples of the step).
EpsilonSweep parse_sweep(const std::string& spec, std::optional<double> step) {
  const auto [kind, body] = split_prefix(spec);
  if (kind == "geo") {
    const auto v = parse_list(body);
    if (v.size() != 3) throw InvalidArgument("geo sweep needs start,ratio,count");
    return EpsilonSweep::geometric(v[0], v[1], parse_count(body.substr(body.rfind(',') + 1)));
  }
  if (kind == "list") return EpsilonSweep(parse_list(body));
  if (kind == "grid") {
    if (!step) throw InvalidArgument("grid sweep needs a sampled path");
    std::vector<std::size_t> m;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) m.push_back(parse_count(item));
    return EpsilonSweep::grid(*step, m);
  }
  throw InvalidArgument("unknown epsilon sweep '" + spec + "' (expected geo:, list: or grid:)");
}

Constants parse_constants(const std::vector<std::string>& items) {
  Constants c;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("constant '" + item + "' must be name=value");
    c[item.substr(0, eq)] = parse_double(item.substr(eq + 1));
  }
  return c;
}

// ---------------------------------------------------------------- json helpers

Json real_array(const std::vector<Complex>& v, bool imag) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(imag ? c.imag() : c.real());
  return a;
}

bool any_imag(const std::vector<Complex>& v) {
  return std::any_of(v.begin(), v.end(), [](Complex c) { return c.imag() != 0.0; });
}

Json point_json(const PhasePoint& z) {
  Json j;
  j["q"] = real_array(z.q, false);
  j["p"] = real_array(z.p, false);
  if (any_imag(z.q)) j["q_im"] = real_array(z.q, true);
  if (any_imag(z.p)) j["p_im"] = real_array(z.p, true);
  return j;
}

Json extraction_json(const ExtractionResult& r) {
  return Json{{"value_re", r.value.real()},
              {"value_im", r.value.imag()},
              {"converged", r.converged},
              {"fit_residual", r.fit_residual},
              {"divergent_slope_re", r.divergent_slope.real()},
              {"divergent_slope_im", r.divergent_slope.imag()},
              {"label", kExtractionLabel}};
}

Json failures_json(const std::vector<PointFailure>& failures) {
  Json a = Json::array();
  for (const auto& f : failures) a.push_back(Json{{"point", point_json(f.point)}, {"reason", f.reason}});
  return a;
}

Json envelope(const std::string& command, const Json& config, std::uint64_t seed) {
  return Json{{"tool", "ndham"}, {"version", kVersion}, {"command", command}, {"seed", seed}, {"config", config}};
}

// ---------------------------------------------------------------- options

struct Common {
  std::string output = "-";
  std::string format = "json";
  std::uint64_t seed = 0;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
};

void emit(const Context& ctx, const Common& common, const std::string& text) {
  if (common.output == "-") {
    ctx.out << text;
    return;
  }
  std::ofstream f(common.output, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + common.output + "'");
  f << text;
}

void add_common(CLI::App* sub, Common& c, bool csv_allowed) {
  sub->add_option("-o,--output", c.output, "Report path, '-' for standard output");
  auto* fmt = sub->add_option("--format", c.format, "Output format");
  fmt->check(csv_allowed ? CLI::IsMember({"json", "csv"}) : CLI::IsMember({"json"}));
  sub->add_option("--seed", c.seed, "Seed for every random draw");
}

// ---------------------------------------------------------------- derive

struct DeriveOptions {
  Common common;
  std::string function;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n = 11;
  std::string eps = "geo:1e-2,0.5,8";
  std::string mu = "1";
  double tol = kDefaultExtractionTol;
  std::vector<std::string> constants;
};

Signal make_signal(const std::string& spec, const Constants& constants) {
  const auto [kind, body] = split_prefix(spec);
  if (kind == "weierstrass") {
    const auto v = parse_list(body);
    if (v.size() != 2 || v[1] != std::floor(v[1])) throw InvalidArgument("weierstrass needs a,b with integer b");
    const double a = v[0];
    const int b = static_cast<int>(v[1]);
    weierstrass(a, b, 0.0);  // validates the parameters up front
    return Signal([a, b](double t) { return weierstrass(a, b, t); });
  }
  const Expr e = Expr::parse(spec);
  const CompiledExpr code = e.compile(SlotMap{{"t", 0}}, constants);
  return Signal([code](double t) {
    const Complex slot[1] = {Complex(t)};
    return code.eval(slot);
  });
}

int run_derive(const DeriveOptions& o, const Context& ctx) {
  const Constants constants = parse_constants(o.constants);
  const Signal f = make_signal(o.function, constants);
  const EpsilonSweep sweep = parse_sweep(o.eps, std::nullopt);
  const Mu mu = parse_mu(o.mu);
  if (o.n < 1) throw InvalidArgument("--n must be positive");
  std::vector<double> ts;
  if (o.n == 1)
    ts.push_back(o.t0);
  else
    for (std::size_t k = 0; k < o.n; ++k) ts.push_back(UniformGrid(o.t0, o.t1, o.n).node(k));

  std::ostringstream csv;
  csv << "t,epsilon,mu,re,im\n";
  Json rows = Json::array();
  Json extractions = Json::array();
  std::size_t nonconverged = 0;
  for (double t : ts) {
    for (double e : sweep.values()) {
      const Complex v = scale_derivative(f, t, ScaleParams(e, mu));
      csv << format_double(t) << "," << format_double(e) << "," << to_string(mu) << "," << format_double(v.real())
          << "," << format_double(v.imag()) << "\n";
      rows.push_back(Json{{"t", t}, {"epsilon", e}, {"re", v.real()}, {"im", v.imag()}});
    }
    const ExtractionResult r = extract_scale_derivative(f, t, sweep, mu, o.tol);
    if (!r.converged) ++nonconverged;
    Json ej{{"t", t}};
    const Json body = extraction_json(r);
    for (const auto& [k, v] : body.items()) ej[k] = v;
    extractions.push_back(std::move(ej));
  }
  if (o.common.format == "csv") {
    emit(ctx, o.common, csv.str());
    return kOk;
  }
  Json config{{"function", o.function}, {"t0", o.t0},      {"t1", o.t1},  {"n", o.n},
              {"eps", o.eps},           {"epsilons", sweep.values()}, {"mu", to_string(mu)}, {"tol", o.tol},
              {"constants", constants}};
  Json rep = envelope("derive", config, o.common.seed);
  rep["rows"] = std::move(rows);
  rep["extractions"] = std::move(extractions);
  rep["nonconverged"] = nonconverged;
  emit(ctx, o.common, dump_json(rep));
  return kOk;
}

// ---------------------------------------------------------------- check

struct CheckCliOptions {
  Common common;
  std::string field;
  std::size_t points = 256;
  double box = 1.0;
  double tol = kDefaultHelmholtzTol;
  bool complex_p = false;
  std::size_t samples = 5;
};

Json helmholtz_json(const HelmholtzReport& r) {
  return Json{{"hc1_residual", r.hc1_residual},
              {"hc2_residual", r.hc2_residual},
              {"jacobian_scale", r.jacobian_scale},
              {"hc1_normalized", r.hc1_normalized},
              {"hc2_normalized", r.hc2_normalized},
              {"tol", r.tol},
              {"verdict", r.verdict},
              {"points_checked", r.points_checked},
              {"worst_point", point_json(r.worst_point)},
              {"failures", failures_json(r.failures)}};
}

Json sample_values(const ReconstructedHamiltonian& h, std::span<const PhasePoint> points) {
  Json a = Json::array();
  for (const auto& z : points) {
    const Complex v = h(z);
    Json j = point_json(z);
    j["H_re"] = v.real();
    j["H_im"] = v.imag();
    a.push_back(std::move(j));
  }
  return a;
}

int run_check(const CheckCliOptions& o, const Context& ctx) {
  const PhaseVectorField field = load_field_file(o.field);
  const CheckOptions opts{o.points, o.box, o.tol, o.common.seed, o.complex_p};
  const auto points = sample_phase_points(field.dim(), opts.points, opts.box, opts.seed, opts.complex_p);
  const HelmholtzReport r = check_conditions(field, points, opts.tol);
  Json config{{"field", o.field}, {"points", o.points}, {"box", o.box}, {"tol", o.tol}, {"complex_p", o.complex_p}};
  Json rep = envelope("check", config, o.common.seed);
  const Json hc = helmholtz_json(r);
  for (const auto& [k, v] : hc.items()) rep[k] = v;
  Json recon{{"available", r.verdict}, {"sample_values", Json::array()}};
  if (r.verdict) {
    const ReconstructedHamiltonian h(field, 64, false);
    const std::size_t n = std::min(o.samples, points.size());
    recon["sample_values"] = sample_values(h, std::span(points).first(n));
  }
  rep["reconstruction"] = std::move(recon);
  emit(ctx, o.common, dump_json(rep));
  if (!r.failures.empty()) {
    ctx.err << "ndham: evaluation failed at " << r.failures.size() << " point(s): " << r.failures.front().reason << "\n";
    return kNumerical;
  }
  return r.verdict ? kOk : kVerdictFalse;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructCliOptions {
  Common common;
  std::string field;
  std::string nodes = "64";
  std::string at;
  std::string grid;
  bool force = false;
};

int run_reconstruct(const ReconstructCliOptions& o, const Context& ctx) {
  const PhaseVectorField field = load_field_file(o.field);
  const std::size_t d = field.dim();
  ReconstructOptions ro;
  ro.force = o.force;
  ro.check.seed = o.common.seed;
  if (o.nodes == "auto") {
    ro.auto_nodes = true;
    ro.nodes = 16;
  } else {
    ro.nodes = parse_count(o.nodes);
  }
  std::vector<PhasePoint> points;
  if (!o.at.empty()) {
    const auto v = parse_list(o.at);
    if (v.size() != 2 * d) throw InvalidArgument("--at needs " + std::to_string(2 * d) + " values q..., p...");
    std::vector<Complex> z(v.begin(), v.end());
    points.push_back(PhasePoint::from_flat(z));
  } else {
    const auto v = parse_list(o.grid);
    if (v.size() != 2) throw InvalidArgument("--grid needs per_axis,box");
    points = phase_grid(d, parse_count(o.grid.substr(0, o.grid.find(','))), v[1]);
  }
  const ReconstructedHamiltonian h = reconstruct_hamiltonian(field, ro);
  Json config{{"field", o.field}, {"nodes", o.nodes}, {"at", o.at}, {"grid", o.grid}, {"force", o.force}};
  if (o.common.format == "csv") {
    std::ostringstream csv;
    for (std::size_t i = 0; i < d; ++i) csv << (i ? "," : "") << q_name(i);
    for (std::size_t i = 0; i < d; ++i) csv << "," << p_name(i);
    csv << ",H_re,H_im\n";
    for (const auto& z : points) {
      const Complex v = h(z);
      for (std::size_t i = 0; i < d; ++i) csv << (i ? "," : "") << format_double(z.q[i].real());
      for (std::size_t i = 0; i < d; ++i) csv << "," << format_double(z.p[i].real());
      csv << "," << format_double(v.real()) << "," << format_double(v.imag()) << "\n";
    }
    emit(ctx, o.common, csv.str());
    return kOk;
  }
  Json values = Json::array();
  for (const auto& z : points) {
    const auto v = h.evaluate(z);
    Json j = point_json(z);
    j["H_re"] = v.h.real();
    j["H_im"] = v.h.imag();
    j["nodes"] = v.nodes;
    values.push_back(std::move(j));
  }
  Json rep = envelope("reconstruct", config, o.common.seed);
  rep["normalization"] = "H(0) = 0";
  rep["values"] = std::move(values);
  emit(ctx, o.common, dump_json(rep));
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyCliOptions {
  Common common;
  std::string field;
  std::size_t points = 256;
  double box = 1.0;
  double tol = kDefaultHelmholtzTol;
  double grad_tol = 1e-6;
  double sa_tol = 1e-6;
  std::size_t trials = 16;
  std::size_t n = 2001;
};

/// Straight segment between two seeded points of the box, sampled on [0, 1].
PhasePath segment_path(std::size_t d, std::size_t n, double box, std::uint64_t seed) {
  const auto ends = sample_phase_points(d, 2, box, seed);
  const auto za = ends[0].flat();
  const auto zb = ends[1].flat();
  return PhasePath::from_function(UniformGrid(0.0, 1.0, n), [&](double s) {
    std::vector<Complex> z(za.size());
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = za[j] + s * (zb[j] - za[j]);
    return PhasePoint::from_flat(z);
  });
}

int run_verify(const VerifyCliOptions& o, const Context& ctx) {
  const PhaseVectorField field = load_field_file(o.field);
  const std::size_t d = field.dim();
  const HelmholtzReport hc = check_conditions(field, CheckOptions{o.points, o.box, o.tol, o.common.seed, false});

  Json gradients{{"available", false}};
  bool grad_ok = false;
  if (hc.verdict) {
    ReconstructOptions ro;
    ro.force = true;  // already checked above with the same cloud
    const ReconstructedHamiltonian h = reconstruct_hamiltonian(field, ro);
    const auto pts = d <= 2 ? phase_grid(d, 5, o.box) : sample_phase_points(d, 64, o.box, o.common.seed + 1);
    const GradientResiduals g = verify_gradients(h, field, pts);
    grad_ok = g.failures.empty() && g.p_residual <= o.grad_tol && g.q_residual <= o.grad_tol;
    gradients = Json{{"available", true},      {"p_residual", g.p_residual}, {"q_residual", g.q_residual},
                     {"tol", o.grad_tol},      {"points_checked", g.points_checked},
                     {"failures", failures_json(g.failures)}};
  }

  SelfAdjointOptions so;
  so.trials = o.trials;
  so.seed = o.common.seed;
  const SelfAdjointReport sa = self_adjointness_residual(field, segment_path(d, o.n, o.box, o.common.seed), so);
  const bool sa_ok = sa.residual <= o.sa_tol;

  const bool verdict = hc.verdict && grad_ok && sa_ok;
  Json config{{"field", o.field},       {"points", o.points}, {"box", o.box},       {"tol", o.tol},
              {"grad_tol", o.grad_tol}, {"sa_tol", o.sa_tol}, {"trials", o.trials}, {"n", o.n}};
  Json rep = envelope("verify", config, o.common.seed);
  rep["check"] = helmholtz_json(hc);
  rep["gradients"] = std::move(gradients);
  rep["self_adjointness"] = Json{{"residual", sa.residual},
                                 {"fixed_scale_residual", sa.fixed_scale_residual},
                                 {"adjoint_identity_residual", sa.adjoint_identity_residual},
                                 {"fixed_adjoint_identity_residual", sa.fixed_adjoint_identity_residual},
                                 {"tol", o.sa_tol},
                                 {"trials", sa.trials},
                                 {"window", Json::array({sa.window_lo, sa.window_hi})},
                                 {"epsilon_min", sa.epsilon_min},
                                 {"nonconverged", sa.nonconverged},
                                 {"label", kExtractionLabel}};
  rep["verdict"] = verdict;
  emit(ctx, o.common, dump_json(rep));
  if (!hc.failures.empty()) return kNumerical;
  return verdict ? kOk : kVerdictFalse;
}

// ---------------------------------------------------------------- simulate

struct SimulateCliOptions {
  Common common;
  std::string field;
  std::string z0;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::string trajectory;
  bool force = false;
};

int run_simulate(const SimulateCliOptions& o, const Context& ctx) {
  const PhaseVectorField field = load_field_file(o.field);
  const auto v = parse_list(o.z0);
  if (v.size() != 2 * field.dim()) throw InvalidArgument("--z0 needs " + std::to_string(2 * field.dim()) + " values");
  const std::vector<Complex> flat(v.begin(), v.end());
  const PhasePoint z0 = PhasePoint::from_flat(flat);
  const Trajectory traj = integrate_symplectic(field, z0, o.dt, o.steps, o.force);
  const PhasePath path = traj.path();

  auto csv = [&] {
    std::ostringstream s;
    write_trajectory_csv(s, path);
    return s.str();
  };
  if (o.common.format == "csv") {
    emit(ctx, o.common, csv());
    return kOk;
  }
  if (!o.trajectory.empty()) {
    std::ofstream f(o.trajectory, std::ios::binary);
    if (!f) throw InvalidArgument("cannot write '" + o.trajectory + "'");
    f << csv();
  }
  const ReconstructedHamiltonian h(field, 64, false);
  const Complex e0 = h(z0);
  double drift = 0.0;
  for (const auto& z : traj.states) drift = std::max(drift, std::abs(h(z) - e0));
  const Eigen::MatrixXcd jac = step_jacobian(field, z0, o.dt);
  Json config{{"field", o.field}, {"z0", v},           {"dt", o.dt},
              {"steps", o.steps}, {"trajectory", o.trajectory}, {"force", o.force}};
  Json rep = envelope("simulate", config, o.common.seed);
  rep["integrator"] = traj.integrator == Integrator::Leapfrog ? "leapfrog" : "implicit_midpoint";
  rep["t_end"] = traj.grid.b;
  rep["energy_initial_re"] = e0.real();
  rep["energy_initial_im"] = e0.imag();
  rep["energy_drift"] = drift;
  rep["step_determinant_deviation"] = std::abs(jac.determinant() - 1.0);
  rep["final_state"] = point_json(traj.states.back());
  emit(ctx, o.common, dump_json(rep));
  return kOk;
}

// ---------------------------------------------------------------- el

struct ElCliOptions {
  Common common;
  std::string lagrangian;
  std::string path;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n = 1025;
  std::string eps = "grid:8,4,2,1";
  std::string mu = "1";
  double tol = kDefaultExtractionTol;
  std::vector<std::string> constants;
};

int run_el(const ElCliOptions& o, const Context& ctx) {
  const Constants constants = parse_constants(o.constants);
  const Expr lag = Expr::parse(o.lagrangian);
  std::optional<SampledPath> path;
  const bool is_file = std::filesystem::is_regular_file(o.path);
  if (is_file) {
    std::ifstream in(o.path);
    path.emplace(read_path_csv(in));
  } else {
    const CompiledExpr code = Expr::parse(o.path).compile(SlotMap{{"t", 0}}, constants);
    path.emplace(sample(
        [&](double t) {
          const Complex slot[1] = {Complex(t)};
          return code.eval(slot);
        },
        o.t0, o.t1, o.n));
  }
  const EpsilonSweep sweep = parse_sweep(o.eps, path->step());
  try {
    for (double e : sweep.values()) (void)grid_multiple(path->grid(), e);
  } catch (const StencilError& ex) {
    throw InvalidArgument(std::string("--eps: ") + ex.what());
  }
  const Mu mu = parse_mu(o.mu);
  const ElReport r = el_residual(lag, *path, sweep, mu, o.tol, constants);
  Json config{{"lagrangian", o.lagrangian}, {"path", o.path}, {"path_source", is_file ? "csv" : "expr"},
              {"t0", path->grid().a},       {"t1", path->grid().b}, {"n", path->size()},
              {"eps", o.eps},               {"epsilons", sweep.values()}, {"mu", to_string(mu)},
              {"tol", o.tol},               {"constants", constants}};
  Json rep = envelope("el", config, o.common.seed);
  rep["residual"] = r.residual;
  rep["worst_t"] = r.worst_t;
  rep["points"] = r.points;
  rep["nonconverged"] = r.nonconverged;
  rep["flagged"] = r.flagged;
  rep["window"] = Json::array({r.window_lo, r.window_hi});
  rep["dt"] = path->step();
  rep["label"] = kExtractionLabel;
  emit(ctx, o.common, dump_json(rep));
  return r.flagged ? kNumerical : kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scale-calculus Hamiltonian toolkit", "ndham"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  DeriveOptions derive;
  auto* d = app.add_subcommand("derive", "Scale derivatives of a function over an epsilon sweep");
  add_common(d, derive.common, true);
  d->add_option("--function", derive.function, "Expression in t, or weierstrass:a,b")->required();
  d->add_option("--t0", derive.t0);
  d->add_option("--t1", derive.t1);
  d->add_option("--n", derive.n, "Number of evaluation times");
  d->add_option("--eps", derive.eps, "geo:start,ratio,count or list:e1,e2,...");
  d->add_option("--mu", derive.mu)->check(CLI::IsMember({"-1", "1", "+1", "0", "-i", "i", "+i"}));
  d->add_option("--tol", derive.tol, "Extraction tolerance");
  d->add_option("--const", derive.constants, "name=value");

  CheckCliOptions check;
  auto* c = app.add_subcommand("check", "Helmholtz conditions on a seeded point cloud");
  add_common(c, check.common, false);
  c->add_option("--field", check.field)->required();
  c->add_option("--points", check.points);
  c->add_option("--box", check.box);
  c->add_option("--tol", check.tol);
  c->add_flag("--complex-p", check.complex_p, "Sample imaginary parts of p too");

  ReconstructCliOptions recon;
  auto* r = app.add_subcommand("reconstruct", "Evaluate the reconstructed Hamiltonian");
  add_common(r, recon.common, true);
  r->add_option("--field", recon.field)->required();
  r->add_option("--nodes", recon.nodes, "Quadrature nodes or 'auto'");
  auto* at = r->add_option("--at", recon.at, "q1,...,qd,p1,...,pd");
  auto* grid = r->add_option("--grid", recon.grid, "per_axis,box");
  at->excludes(grid);
  r->add_flag("--force", recon.force, "Skip the Helmholtz gate");

  VerifyCliOptions verify;
  auto* v = app.add_subcommand("verify", "Check, reconstruct, gradients and self-adjointness");
  add_common(v, verify.common, false);
  v->add_option("--field", verify.field)->required();
  v->add_option("--points", verify.points);
  v->add_option("--box", verify.box);
  v->add_option("--tol", verify.tol);
  v->add_option("--grad-tol", verify.grad_tol);
  v->add_option("--sa-tol", verify.sa_tol);
  v->add_option("--trials", verify.trials);
  v->add_option("--n", verify.n, "Nodes of the trajectory grid");

  SimulateCliOptions sim;
  auto* s = app.add_subcommand("simulate", "Symplectic integration");
  add_common(s, sim.common, true);
  s->add_option("--field", sim.field)->required();
  s->add_option("--z0", sim.z0, "q1,...,qd,p1,...,pd")->required();
  s->add_option("--dt", sim.dt);
  s->add_option("--steps", sim.steps);
  s->add_option("--trajectory", sim.trajectory, "Also write the trajectory CSV here");
  s->add_flag("--force", sim.force, "Skip the Helmholtz gate");

  ElCliOptions el;
  auto* e = app.add_subcommand("el", "Scale Euler-Lagrange residual along a path");
  add_common(e, el.common, false);
  e->add_option("--lagrangian", el.lagrangian, "Expression in t, x, v")->required();
  e->add_option("--path", el.path, "CSV file (t,re,im) or expression in t")->required();
  e->add_option("--t0", el.t0);
  e->add_option("--t1", el.t1);
  e->add_option("--n", el.n);
  e->add_option("--eps", el.eps, "grid:m1,m2,..., geo:... or list:...");
  e->add_option("--mu", el.mu)->check(CLI::IsMember({"-1", "1", "+1", "0", "-i", "i", "+i"}));
  e->add_option("--tol", el.tol);
  e->add_option("--const", el.constants, "name=value");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const Context ctx{out, err};
  try {
    if (d->parsed()) return run_derive(derive, ctx);
    if (c->parsed()) return run_check(check, ctx);
    if (r->parsed()) {
      if (recon.at.empty() == recon.grid.empty()) throw InvalidArgument("reconstruct needs exactly one of --at, --grid");
      return run_reconstruct(recon, ctx);
    }
    if (v->parsed()) return run_verify(verify, ctx);
    if (s->parsed()) return run_simulate(sim, ctx);
    if (e->parsed()) return run_el(el, ctx);
  } catch (const NotHamiltonian& ex) {
    err << "ndham: " << ex.what() << "\n";
    return kVerdictFalse;
  } catch (const InvalidArgument& ex) {
    err << "ndham: " << ex.what() << "\n";
    return kUsage;
  } catch (const NumericalError& ex) {
    err << "ndham: " << ex.what() << "\n";
    return kNumerical;
  } catch (const std::exception& ex) {
    err << "ndham: internal error: " << ex.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace ndham::cli
