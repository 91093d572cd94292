#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "degpar/evolution.hpp"
#include "degpar/weights.hpp"

namespace degpar {

using WeightsVariant = std::variant<DivergenceWeights, NonDivergenceWeights>;

/// Largest value of 2 s phi over the space-time grid. Both Carleman sides are
/// quadratic forms under the same exponential, so shifting the exponent by
/// this amount keeps every integrand representable without changing ratios.
double carleman_log_shift(const WeightsVariant& w, const Grid& grid, double s,
                          double T);

/// psi (divergence form) or mu (non-divergence form) sampled at every grid
/// node. mu has no closed form and costs a quadrature per evaluation, so the
/// scan drivers tabulate it once per grid instead of once per space-time point.
std::vector<double> tabulate_spatial_weight(const WeightsVariant& w,
                                            const Grid& grid);

/// Centered differences at interior nodes, one-sided at the boundary.
std::vector<double> gradient(const Grid& grid, std::span<const double> u);

// Divergence-form functionals (weight phi = theta psi):
//   lhs: s Theta a v_x^2 + s^3 Theta^3 (x-x0)^2/a v^2
//   rhs: (h^2 + v^2), globally or h^2 + v^2 restricted to omega
// `w_nodes`, when given, must be tabulate_spatial_weight(w, grid); passing it
// skips the per-point weight evaluation without changing any value.
double lhs_div(const Trajectory& traj, const Grid& grid,
               const DivergenceWeights& w, double s, double T,
               double log_shift = 0.0,
               const std::vector<double>* w_nodes = nullptr);
double rhs_div_global(const Trajectory& traj, const Grid& grid,
                      const DivergenceWeights& w, const SpaceTimeSource& h,
                      double s, double T, double log_shift = 0.0,
                      const std::vector<double>* w_nodes = nullptr);
double rhs_div_localized(const Trajectory& traj, const Grid& grid,
                         const DivergenceWeights& w, const SpaceTimeSource& h,
                         double s, double T, Interval omega,
                         double log_shift = 0.0,
                         const std::vector<double>* w_nodes = nullptr);

// Non-divergence analogues (weight gamma = theta mu, h carries 1/a):
double lhs_nondiv(const Trajectory& traj, const Grid& grid,
                  const NonDivergenceWeights& w, double s, double T,
                  double log_shift = 0.0,
                  const std::vector<double>* w_nodes = nullptr);
double rhs_nondiv_global(const Trajectory& traj, const Grid& grid,
                         const NonDivergenceWeights& w, const SpaceTimeSource& h,
                         double s, double T, double log_shift = 0.0,
                         const std::vector<double>* w_nodes = nullptr);
double rhs_nondiv_localized(const Trajectory& traj, const Grid& grid,
                            const NonDivergenceWeights& w,
                            const SpaceTimeSource& h, double s, double T,
                            Interval omega, double log_shift = 0.0,
                            const std::vector<double>* w_nodes = nullptr);

struct EnsembleSpec {
  int count = 20;
  std::uint64_t seed = 0;
  int max_mode = 8;     // highest cosine frequency in the final data
  bool rough = false;   // allow white-noise final data (stress testing)
};

/// Smooth Neumann-compatible final datum (seeded, deterministic).
std::vector<double> ensemble_member(const Grid& grid, const EnsembleSpec& spec,
                                    int member);

struct CarlemanRow {
  double s;
  int member;
  double lhs, rhs, ratio;
};

struct CarlemanReport {
  std::vector<double> s_values;
  std::vector<CarlemanRow> rows;
  std::vector<double> max_ratio;  // per s, over the ensemble
  double empirical_C = 0.0;
  double s0 = 0.0;
  bool plateau_found = false;
  bool localized = false;
  Interval omega{};
  int skipped_members = 0;
};

/// Solve the adjoint problem for each ensemble member and tabulate both sides
/// of the Carleman inequality over the s grid. The plateau is the earliest
/// tail of the s grid (at least three points) on which the max ratio varies
/// by less than 5%.
/// `threads` parallelizes over ensemble members; the report is assembled in
/// member order, so the output is independent of the thread count.
CarlemanReport s_scan(const EvolutionProblem& p, const WeightsVariant& w,
                      const EnsembleSpec& spec,
                      const std::vector<double>& s_grid,
                      const std::optional<Interval>& omega = std::nullopt,
                      int threads = 1);

struct CaccioppoliReport {
  double grad_integral = 0.0;  // int int_{I'} v_x^2 e^{2s phi}
  double zero_integral = 0.0;  // int int_I v^2 (1/a in the non-div case)
  double ratio = 0.0;
  double weight_condition_sup = 0.0;  // sup |Upsilon'| sqrt(a)
};

CaccioppoliReport caccioppoli_check(const Trajectory& traj, const Grid& grid,
                                    const WeightsVariant& w, Interval inner,
                                    Interval outer, double s, double T);

struct HardyPoincareReport {
  double weighted_zero_order = 0.0;  // int p/(x-x0)^2 u^2
  double weighted_gradient = 0.0;    // int p (u')^2
  double quotient = 0.0;
  bool skipped = false;  // u identically zero
};

/// u must vanish at the node nearest x0 (enforced by the caller or here).
HardyPoincareReport hardy_poincare_check(const Grid& grid,
                                         const DegeneracyModel& model,
                                         std::span<const double> u);

}  // namespace degpar
