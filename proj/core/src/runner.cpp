#include "degpar/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "degpar/carleman.hpp"
#include "degpar/control.hpp"
#include "degpar/evolution.hpp"
#include "degpar/weights.hpp"

namespace degpar {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// Single sink for all artifact files of a run; keeps writes serialized and
/// the directory handling in one place.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name,
           const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(dir_ / name, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    for (size_t i = 0; i < header.size(); ++i)
      out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
  }

  void summary(const json& j) {
    std::ofstream out(dir_ / "summary.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << j.dump(2) << "\n";
  }

 private:
  std::filesystem::path dir_;
};

json resolved_config_json(const ExperimentConfig& cfg,
                          const ResolvedConstants& rc) {
  json j;
  j["model"] = {{"x0", cfg.x0}, {"K", cfg.K}, {"form", to_string(cfg.form)}};
  j["discretization"] = {
      {"n", cfg.n}, {"nt", cfg.nt}, {"grading", cfg.grading}, {"T", cfg.T}};
  j["weights"] = {{"c1", rc.c1}, {"c2", rc.c2}, {"d1", rc.d1},
                  {"d2", rc.d2}, {"R", rc.R},
                  {"provenance", rc.provenance},
                  {"s_min", cfg.s_min}, {"s_max", cfg.s_max},
                  {"s_count", cfg.s_count}};
  j["carleman"] = {{"ensemble", cfg.ensemble}, {"seed", cfg.seed},
                   {"max_mode", cfg.max_mode}};
  if (cfg.carleman_omega)
    j["carleman"]["omega"] = {cfg.carleman_omega->lo, cfg.carleman_omega->hi};
  j["control"] = {{"omega", {cfg.omega.lo, cfg.omega.hi}},
                  {"epsilon", cfg.epsilons}};
  j["rng"] = "mt19937_64/v1";
  return j;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "unverifiable";
  }
}

void append_report(std::vector<std::vector<std::string>>& rows,
                   const std::string& scope, const HypothesisReport& rep) {
  for (const auto& c : rep.clauses)
    rows.push_back({scope, c.name, verdict_name(c.verdict), c.note});
  for (const auto& [k, v] : rep.constants)
    rows.push_back({scope, k, fmt(v), "constant"});
}

int cmd_classify(const ExperimentConfig& cfg, ArtifactWriter& out,
                 std::ostream& log) {
  const auto model = cfg.model();
  const auto cls = classify(model);
  if (!cls.accepted()) {
    log << "refused: " << cls.note << "\n";
    return exit_theory_refusal;
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"classify", "kind", to_string(*cls.kind), ""});
  append_report(rows, "degeneracy_bound",
                check_degeneracy_bound(model, probe_points(model.x0)));
  append_report(rows, "carleman_hypotheses", check_carleman_hypotheses(model));
  append_report(rows, "observability_hypotheses",
                check_observability_hypotheses(model));
  out.csv("classify.csv", {"scope", "item", "value", "note"}, rows);

  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["kind"] = to_string(*cls.kind);
  j["theta"] = cfg.K;
  out.summary(j);
  return exit_ok;
}

int cmd_solve(const ExperimentConfig& cfg, ArtifactWriter& out, std::ostream&) {
  const auto model = cfg.model();
  const auto p = EvolutionProblem::make(model, cfg.n, cfg.nt, cfg.T, cfg.grading);
  std::vector<double> u0(p.grid.n());
  for (int i = 0; i < p.grid.n(); ++i)
    u0[i] = std::cos(M_PI * p.grid.nodes[i]);
  const auto traj = solve_forward(p, u0);
  const auto energy = energy_report(p, traj, u0);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(size_t(traj.levels()) * p.grid.n());
  for (int k = 0; k < traj.levels(); ++k)
    for (int i = 0; i < p.grid.n(); ++i)
      rows.push_back({fmt(traj.times[k]), fmt(p.grid.nodes[i]),
                      fmt(traj.at(k)[i])});
  out.csv("solve.csv", {"t", "x", "u"}, rows);

  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["energy"] = {{"sup_norm_sq", energy.sup_norm_sq},
                 {"dirichlet_integral", energy.dirichlet_integral},
                 {"rhs_bound", energy.rhs_bound},
                 {"mass_drift_per_step", energy.mass_drift_per_step},
                 {"monotone_when_free", energy.monotone_when_free},
                 {"pass", energy.pass}};
  out.summary(j);
  return energy.pass ? exit_ok : exit_numerical_failure;
}

int cmd_weights(const ExperimentConfig& cfg, ArtifactWriter& out, std::ostream&) {
  const auto model = cfg.model();
  const auto rc = resolve_constants(cfg);
  DivergenceWeights dw{model, rc.c1, rc.c2};
  NonDivergenceWeights nw{model, rc.d1, rc.d2, rc.R};

  const auto grid = build_grid(cfg.n, model, cfg.grading);
  std::vector<std::vector<std::string>> wrows, trows, grows;
  for (double x : grid.nodes)
    wrows.push_back({fmt(x), fmt(dw.psi(x)), fmt(nw.mu(x))});
  out.csv("weights.csv", {"x", "psi", "mu"}, wrows);
  for (int k = 1; k < cfg.nt; ++k) {
    const double t = cfg.T * double(k) / cfg.nt;
    trows.push_back({fmt(t), fmt(theta(t, cfg.T))});
  }
  out.csv("theta.csv", {"t", "theta"}, trows);
  const auto op = assemble_operator(model, grid);
  for (int i = 0; i < grid.n(); ++i)
    grows.push_back({fmt(grid.nodes[i]), fmt(model.a(grid.nodes[i])),
                     fmt(op.ip.w[i])});
  out.csv("grid.csv", {"node", "a", "weight"}, grows);

  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["min_c2"] = min_c2(model);
  j["min_d2"] = min_d2(model, rc.R);
  out.summary(j);
  return exit_ok;
}

int cmd_carleman_scan(const ExperimentConfig& cfg, ArtifactWriter& out,
                      std::ostream& log, int threads) {
  const auto model = cfg.model();
  const auto rc = resolve_constants(cfg);
  const auto p = EvolutionProblem::make(model, cfg.n, cfg.nt, cfg.T, cfg.grading);
  WeightsVariant w;
  if (cfg.form == Form::divergence)
    w = DivergenceWeights{model, rc.c1, rc.c2};
  else
    w = NonDivergenceWeights{model, rc.d1, rc.d2, rc.R};

  EnsembleSpec spec;
  spec.count = cfg.ensemble;
  spec.seed = cfg.seed;
  spec.max_mode = cfg.max_mode;
  const auto rep = s_scan(p, w, spec, cfg.s_grid(), cfg.carleman_omega, threads);
  if (rep.skipped_members == spec.count) {
    log << "every ensemble member produced a vanishing right-hand side\n";
    return exit_numerical_failure;
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows)
    rows.push_back({fmt(r.s), std::to_string(r.member), fmt(r.lhs), fmt(r.rhs),
                    fmt(r.ratio)});
  rows.push_back({"summary", "", "", fmt(rep.empirical_C), fmt(rep.s0)});
  out.csv("carleman.csv", {"s", "member", "lhs", "rhs", "ratio"}, rows);

  json j;
  j["config"] = resolved_config_json(cfg, rc);
  j["empirical_C"] = rep.empirical_C;
  j["s0"] = rep.s0;
  j["plateau_found"] = rep.plateau_found;
  j["skipped_members"] = rep.skipped_members;
  j["max_ratio"] = rep.max_ratio;
  out.summary(j);
  return exit_ok;
}

int cmd_observability(const ExperimentConfig& cfg, ArtifactWriter& out,
                      std::ostream&) {
  const auto model = cfg.model();
  const auto p = EvolutionProblem::make(model, cfg.n, cfg.nt, cfg.T, cfg.grading);
  PowerIterationParams params;
  params.seed = cfg.seed == 0 ? params.seed : cfg.seed;
  const auto rep = estimate_CT(p, cfg.omega, params);

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < rep.history.size(); ++i)
    rows.push_back({std::to_string(i + 1), fmt(rep.history[i])});
  out.csv("observability.csv", {"iteration", "lambda"}, rows);

  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["C_T"] = rep.C_T;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  out.summary(j);
  return rep.converged ? exit_ok : exit_numerical_failure;
}

int cmd_control(const ExperimentConfig& cfg, ArtifactWriter& out,
                std::ostream& log) {
  const auto model = cfg.model();
  const auto p = EvolutionProblem::make(model, cfg.n, cfg.nt, cfg.T, cfg.grading);
  std::vector<double> u0(p.grid.n());
  for (int i = 0; i < p.grid.n(); ++i)
    u0[i] = std::cos(M_PI * p.grid.nodes[i]);

  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["runs"] = json::array();
  bool all_ok = true;
  for (size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e];
    const auto res = hum_control(p, u0, cfg.omega, eps);
    const auto ver = verify_null_control(p, u0, res, cfg.omega);
    all_ok = all_ok && res.converged;

    std::vector<std::vector<std::string>> rows;
    for (int k = 0; k < int(res.times.size()); ++k)
      for (int i = 0; i < p.grid.n(); ++i)
        rows.push_back({fmt(res.times[k]), fmt(p.grid.nodes[i]),
                        fmt(res.control[k][i])});
    rows.push_back({"summary", fmt(res.final_norm), fmt(res.cost),
                    fmt(res.epsilon) + ";iterations=" +
                        std::to_string(res.cg_iterations)});
    out.csv("control_" + std::to_string(e) + ".csv", {"t", "x", "h"}, rows);

    j["runs"].push_back({{"epsilon", eps},
                         {"final_norm", res.final_norm},
                         {"cost", res.cost},
                         {"cg_iterations", res.cg_iterations},
                         {"converged", res.converged},
                         {"final_over_initial", ver.final_over_initial},
                         {"cost_over_initial_sq", ver.cost_over_initial_sq}});
    log << "epsilon=" << eps << " final/initial=" << ver.final_over_initial
        << " iterations=" << res.cg_iterations << "\n";
  }
  out.summary(j);
  return all_ok ? exit_ok : exit_numerical_failure;
}

int cmd_suite(const ExperimentConfig& cfg, ArtifactWriter& out,
              std::ostream& log) {
  std::vector<std::vector<std::string>> rows;
  bool all_pass = true;
  auto check = [&](const std::string& name, bool ok, double value) {
    rows.push_back({name, ok ? "pass" : "fail", fmt(value)});
    all_pass = all_pass && ok;
    if (!ok) log << "suite check failed: " << name << "\n";
  };

  for (Form form : {Form::divergence, Form::nondivergence}) {
    const std::string tag = to_string(form);
    const auto model = DegeneracyModel::power_law(cfg.x0, cfg.K, form);
    const auto p = EvolutionProblem::make(model, 101, 100, cfg.T, cfg.grading);
    const int n = p.grid.n();

    // Green residual on a smooth pair
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
      const double x = p.grid.nodes[i];
      u[i] = std::cos(M_PI * x);
      v[i] = std::cos(2.0 * M_PI * x) / 4.0;
    }
    check(tag + ".green_residual",
          green_residual(p.op, p.grid, model, u, v) <= 1e-12,
          green_residual(p.op, p.grid, model, u, v));

    // symmetry of the operator in its inner product
    const auto Au = p.op.apply(u);
    const auto Av = p.op.apply(v);
    const double sym = std::fabs(p.op.ip.dot(Au, v) - p.op.ip.dot(u, Av));
    check(tag + ".operator_symmetry", sym <= 1e-12, sym);
    check(tag + ".operator_nonpositive", p.op.ip.dot(Au, u) <= 1e-12,
          p.op.ip.dot(Au, u));

    // energy inequality for the free evolution
    const auto traj = solve_forward(p, u);
    const auto energy = energy_report(p, traj, u);
    check(tag + ".energy_bound", energy.pass, energy.sup_norm_sq);

    // weight admissibility: psi/mu strictly negative away from the constants
    const auto rc = resolve_constants(cfg);
    if (form == Form::divergence) {
      DivergenceWeights dw{model, rc.c1, rc.c2};
      double worst = -1e300;
      for (double x : p.grid.nodes) worst = std::max(worst, dw.psi(x));
      check(tag + ".weight_negative", worst < 0.0, worst);
    } else {
      NonDivergenceWeights nw{model, rc.d1, rc.d2, rc.R};
      double worst = -1e300;
      for (double x : p.grid.nodes) worst = std::max(worst, nw.mu(x));
      check(tag + ".weight_negative", worst < 0.0, worst);
    }

    // Gramian symmetry in the X inner product
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      const double x = p.grid.nodes[i];
      a[i] = std::cos(M_PI * x) + 0.25 * std::cos(3.0 * M_PI * x);
      b[i] = 1.0 - 0.5 * std::cos(2.0 * M_PI * x);
    }
    const auto Ga = detail::observation_gramian(p, cfg.omega, a, false);
    const auto Gb = detail::observation_gramian(p, cfg.omega, b, false);
    const double gsym = std::fabs(p.op.ip.dot(Ga, b) - p.op.ip.dot(a, Gb));
    check(tag + ".gramian_symmetry", gsym <= 1e-12, gsym);

    // penalized duality: the forward state satisfies u(T) = -eps vT exactly
    const double eps = 1e-4;
    const auto res = hum_control(p, u, cfg.omega, eps);
    double dual_res = 0.0;
    {
      std::vector<double> uT(u), tmp(n);
      for (int k = 0; k < p.nt; ++k) {
        for (int i = 0; i < n; ++i) tmp[i] = uT[i] + p.dt() * res.control[k][i];
        implicit_step(p.op, p.dt(), tmp, uT);
      }
      std::vector<double> diff(n);
      for (int i = 0; i < n; ++i) diff[i] = uT[i] + eps * res.vT[i];
      dual_res = p.op.ip.norm(diff) / std::max(1e-300, p.op.ip.norm(u));
    }
    check(tag + ".duality_residual", dual_res <= 1e-6, dual_res);
  }

  out.csv("suite.csv", {"check", "verdict", "value"}, rows);
  json j;
  j["config"] = resolved_config_json(cfg, resolve_constants(cfg));
  j["all_pass"] = all_pass;
  out.summary(j);
  return all_pass ? exit_ok : exit_numerical_failure;
}

}  // namespace

int run(const RunOptions& opts, std::ostream& log) {
  ExperimentConfig cfg;
  try {
    if (!opts.config_path.empty()) cfg = parse_config_file(opts.config_path);
    if (opts.seed_override) cfg.seed = *opts.seed_override;
    if (opts.out_override) cfg.out_dir = *opts.out_override;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return exit_config_error;
  }

  try {
    const auto cls = classify(cfg.model());
    if (!cls.accepted()) {
      log << "refused: " << cls.note << "\n";
      return exit_theory_refusal;
    }

    ArtifactWriter out(cfg.out_dir);
    if (opts.subcommand == "classify") return cmd_classify(cfg, out, log);
    if (opts.subcommand == "solve") return cmd_solve(cfg, out, log);
    if (opts.subcommand == "weights") return cmd_weights(cfg, out, log);
    if (opts.subcommand == "carleman-scan")
      return cmd_carleman_scan(cfg, out, log, std::max(1, opts.threads));
    if (opts.subcommand == "observability")
      return cmd_observability(cfg, out, log);
    if (opts.subcommand == "control") return cmd_control(cfg, out, log);
    if (opts.subcommand == "suite") return cmd_suite(cfg, out, log);
    log << "unknown subcommand '" << opts.subcommand << "'\n";
    return exit_config_error;
  } catch (const std::domain_error& e) {
    log << "refused: " << e.what() << "\n";
    return exit_theory_refusal;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_numerical_failure;
  }
}

}  // namespace degpar
