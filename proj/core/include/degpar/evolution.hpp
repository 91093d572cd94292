#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "degpar/mesh.hpp"

namespace degpar {

enum class Scheme { implicit_euler, crank_nicolson };

/// Forward problem u_t = Au + h chi_omega with Neumann closure, or its
/// backward adjoint counterpart.
struct EvolutionProblem {
  DegeneracyModel model;
  Grid grid;
  DiscreteOperator op;
  double T = 1.0;
  int nt = 400;
  Scheme scheme = Scheme::implicit_euler;

  double dt() const { return T / nt; }
  static EvolutionProblem make(const DegeneracyModel& model, int n, int nt,
                               double T, double grading = 1.0,
                               Scheme scheme = Scheme::implicit_euler);
};

enum class Direction { forward, backward };

struct Trajectory {
  std::vector<double> times;                // uniform, 0..T
  std::vector<std::vector<double>> fields;  // one spatial field per time level
  Direction direction = Direction::forward;

  const std::vector<double>& at(int k) const { return fields[k]; }
  int levels() const { return int(times.size()); }
};

using SpaceTimeSource = std::function<double(double t, double x)>;

/// Solve u' = Au + h chi_omega from u0. The source is sampled at the target
/// time level of each implicit step.
Trajectory solve_forward(const EvolutionProblem& p, std::span<const double> u0,
                         const SpaceTimeSource& h = nullptr,
                         const std::optional<Interval>& omega = std::nullopt);

/// Integrate v_t + Av = 0 backward from v(T) = vT.
Trajectory solve_adjoint(const EvolutionProblem& p, std::span<const double> vT);

/// One implicit step: solve (I - dt A) out = rhs (Thomas elimination).
void implicit_step(const DiscreteOperator& op, double dt,
                   std::span<const double> rhs, std::span<double> out);

struct EnergyReport {
  double sup_norm_sq = 0.0;       // sup_t ||u(t)||_X^2
  double dirichlet_integral = 0.0;  // int_0^T B(u,u) dt
  double rhs_bound = 0.0;         // e^T (||u0||^2 + ||h||^2)
  double mass_drift_per_step = 0.0;  // divergence form only
  bool monotone_when_free = true;
  bool pass = false;
};

EnergyReport energy_report(const EvolutionProblem& p, const Trajectory& traj,
                           std::span<const double> u0,
                           const SpaceTimeSource& h = nullptr,
                           const std::optional<Interval>& omega = std::nullopt);

}  // namespace degpar
