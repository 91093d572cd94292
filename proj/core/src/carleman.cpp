#include "degpar/carleman.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace degpar {

namespace {

double spatial_weight(const WeightsVariant& w, double x) {
  return std::visit(
      [x](const auto& ww) {
        if constexpr (std::is_same_v<std::decay_t<decltype(ww)>, DivergenceWeights>)
          return ww.psi(x);
        else
          return ww.mu(x);
      },
      w);
}

const DegeneracyModel& weight_model(const WeightsVariant& w) {
  return std::visit([](const auto& ww) -> const DegeneracyModel& { return ww.model; }, w);
}

// (x-x0)^2 / a, with the K<2 limit 0 at the degeneracy point.
double dist_sq_over_a(const DegeneracyModel& model, double x) {
  const double d = std::fabs(x - model.x0);
  if (model.is_power_law()) {
    const double p = 2.0 - *model.exponent;
    return p > 0.0 && d == 0.0 ? 0.0 : std::pow(d, p);
  }
  const double av = model.a(x);
  return av == 0.0 ? 0.0 : d * d / av;
}

}  // namespace

double carleman_log_shift(const WeightsVariant& w, const Grid& grid, double s,
                          double T) {
  // phi = theta(t) psi(x) with psi < 0: the max over Q_T sits at t = T/2 and
  // at the node where psi is closest to zero.
  double psi_max = -std::numeric_limits<double>::infinity();
  for (double x : grid.nodes) psi_max = std::max(psi_max, spatial_weight(w, x));
  return 2.0 * s * theta(0.5 * T, T) * psi_max;
}

std::vector<double> tabulate_spatial_weight(const WeightsVariant& w,
                                            const Grid& grid) {
  std::vector<double> table(grid.n());
  for (int i = 0; i < grid.n(); ++i) table[i] = spatial_weight(w, grid.nodes[i]);
  return table;
}

std::vector<double> gradient(const Grid& grid, std::span<const double> u) {
  const int n = grid.n();
  std::vector<double> g(n);
  g[0] = (u[1] - u[0]) / (grid.nodes[1] - grid.nodes[0]);
  for (int i = 1; i < n - 1; ++i)
    g[i] = (u[i + 1] - u[i - 1]) / (grid.nodes[i + 1] - grid.nodes[i - 1]);
  g[n - 1] = (u[n - 1] - u[n - 2]) / (grid.nodes[n - 1] - grid.nodes[n - 2]);
  return g;
}

namespace {

// Space-time quadrature driver: trapezoid on the open time grid (the weight
// limits vanish at t = 0, T), dual-cell weights in x.
template <typename Integrand>
double spacetime_integral(const Trajectory& traj, const Grid& grid,
                          Integrand&& f) {
  const int nt = traj.levels() - 1;
  const double dt = traj.times[1] - traj.times[0];
  double total = 0.0;
  for (int k = 1; k < nt; ++k) {
    const double t = traj.times[k];
    double slice = 0.0;
    for (int i = 0; i < grid.n(); ++i)
      slice += grid.cell_widths[i] * f(k, t, i);
    total += dt * slice;
  }
  return total;
}

}  // namespace

double lhs_div(const Trajectory& traj, const Grid& grid,
               const DivergenceWeights& w, double s, double T,
               double log_shift, const std::vector<double>* w_nodes) {
  std::vector<std::vector<double>> grads(traj.levels());
  for (int k = 1; k < traj.levels() - 1; ++k) grads[k] = gradient(grid, traj.at(k));
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double th = theta(t, T);
    const double wx = w_nodes ? (*w_nodes)[i] : w.psi(x);
    const double ew = std::exp(2.0 * s * th * wx - log_shift);
    const double v = traj.at(k)[i];
    const double vx = grads[k][i];
    return (s * th * w.model.a(x) * vx * vx +
            s * s * s * th * th * th * dist_sq_over_a(w.model, x) * v * v) *
           ew;
  });
}

double rhs_div_global(const Trajectory& traj, const Grid& grid,
                      const DivergenceWeights& w, const SpaceTimeSource& h,
                      double s, double T, double log_shift,
                      const std::vector<double>* w_nodes) {
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double wx = w_nodes ? (*w_nodes)[i] : w.psi(x);
    const double ew = std::exp(2.0 * s * theta(t, T) * wx - log_shift);
    const double v = traj.at(k)[i];
    const double hv = h ? h(t, x) : 0.0;
    return (hv * hv + v * v) * ew;
  });
}

double rhs_div_localized(const Trajectory& traj, const Grid& grid,
                         const DivergenceWeights& w, const SpaceTimeSource& h,
                         double s, double T, Interval omega, double log_shift,
                         const std::vector<double>* w_nodes) {
  if (!omega.contains(grid.x0))
    throw std::invalid_argument("localized variant requires x0 in omega");
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double wx = w_nodes ? (*w_nodes)[i] : w.psi(x);
    const double ew = std::exp(2.0 * s * theta(t, T) * wx - log_shift);
    const double v = traj.at(k)[i];
    const double hv = h ? h(t, x) : 0.0;
    return (hv * hv + (omega.contains(x) ? v * v : 0.0)) * ew;
  });
}

double lhs_nondiv(const Trajectory& traj, const Grid& grid,
                  const NonDivergenceWeights& w, double s, double T,
                  double log_shift, const std::vector<double>* w_nodes) {
  std::vector<std::vector<double>> grads(traj.levels());
  for (int k = 1; k < traj.levels() - 1; ++k) grads[k] = gradient(grid, traj.at(k));
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double th = theta(t, T);
    const double wx = w_nodes ? (*w_nodes)[i] : w.mu(x);
    const double ew = std::exp(2.0 * s * th * wx - log_shift);
    const double v = traj.at(k)[i];
    const double vx = grads[k][i];
    const double q = (x - grid.x0) / w.model.a(x);
    return (s * th * vx * vx + s * s * s * th * th * th * q * q * v * v) * ew;
  });
}

double rhs_nondiv_global(const Trajectory& traj, const Grid& grid,
                         const NonDivergenceWeights& w, const SpaceTimeSource& h,
                         double s, double T, double log_shift,
                         const std::vector<double>* w_nodes) {
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double wx = w_nodes ? (*w_nodes)[i] : w.mu(x);
    const double ew = std::exp(2.0 * s * theta(t, T) * wx - log_shift);
    const double v = traj.at(k)[i];
    const double hv = h ? h(t, x) : 0.0;
    return (hv * hv / w.model.a(x) + v * v) * ew;
  });
}

double rhs_nondiv_localized(const Trajectory& traj, const Grid& grid,
                            const NonDivergenceWeights& w,
                            const SpaceTimeSource& h, double s, double T,
                            Interval omega, double log_shift,
                            const std::vector<double>* w_nodes) {
  if (!omega.contains(grid.x0))
    throw std::invalid_argument("localized variant requires x0 in omega");
  return spacetime_integral(traj, grid, [&](int k, double t, int i) {
    const double x = grid.nodes[i];
    const double wx = w_nodes ? (*w_nodes)[i] : w.mu(x);
    const double ew = std::exp(2.0 * s * theta(t, T) * wx - log_shift);
    const double v = traj.at(k)[i];
    const double hv = h ? h(t, x) : 0.0;
    return (hv * hv / w.model.a(x) + (omega.contains(x) ? v * v : 0.0)) * ew;
  });
}

std::vector<double> ensemble_member(const Grid& grid, const EnsembleSpec& spec,
                                    int member) {
  std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + member + 1);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = grid.n();
  std::vector<double> v(n, 0.0);
  if (spec.rough) {
    for (int i = 0; i < n; ++i) v[i] = unif(rng);
    // symmetrize the ends so the discrete Neumann derivative vanishes
    v[0] = v[1];
    v[n - 1] = v[n - 2];
    return v;
  }
  for (int m = 0; m <= spec.max_mode; ++m) {
    const double c = unif(rng) / (1.0 + m * m);
    for (int i = 0; i < n; ++i)
      v[i] += c * std::cos(m * M_PI * grid.nodes[i]);
  }
  return v;
}

CarlemanReport s_scan(const EvolutionProblem& p, const WeightsVariant& w,
                      const EnsembleSpec& spec,
                      const std::vector<double>& s_grid,
                      const std::optional<Interval>& omega, int threads) {
  CarlemanReport rep;
  rep.s_values = s_grid;
  rep.localized = omega.has_value();
  if (omega) rep.omega = *omega;
  rep.max_ratio.assign(s_grid.size(), 0.0);

  const bool div = std::holds_alternative<DivergenceWeights>(w);
  // mu costs a quadrature per evaluation; sample it once for the whole scan
  const std::vector<double> w_table = tabulate_spatial_weight(w, p.grid);
  double w_table_max = -std::numeric_limits<double>::infinity();
  for (double v : w_table) w_table_max = std::max(w_table_max, v);
  const double theta_mid = theta(0.5 * p.T, p.T);

  auto scan_member = [&](int member) {
    std::vector<CarlemanRow> rows;
    rows.reserve(s_grid.size());
    const auto vT = ensemble_member(p.grid, spec, member);
    const auto traj = solve_adjoint(p, vT);
    for (size_t j = 0; j < s_grid.size(); ++j) {
      const double s = s_grid[j];
      const double shift = 2.0 * s * theta_mid * w_table_max;
      double lhs, rhs;
      if (div) {
        const auto& dw = std::get<DivergenceWeights>(w);
        lhs = lhs_div(traj, p.grid, dw, s, p.T, shift, &w_table);
        rhs = omega ? rhs_div_localized(traj, p.grid, dw, nullptr, s, p.T,
                                        *omega, shift, &w_table)
                    : rhs_div_global(traj, p.grid, dw, nullptr, s, p.T, shift,
                                     &w_table);
      } else {
        const auto& nw = std::get<NonDivergenceWeights>(w);
        lhs = lhs_nondiv(traj, p.grid, nw, s, p.T, shift, &w_table);
        rhs = omega ? rhs_nondiv_localized(traj, p.grid, nw, nullptr, s, p.T,
                                           *omega, shift, &w_table)
                    : rhs_nondiv_global(traj, p.grid, nw, nullptr, s, p.T,
                                        shift, &w_table);
      }
      rows.push_back({s, member, lhs, rhs, rhs > 0.0 ? lhs / rhs : 0.0});
    }
    return rows;
  };

  std::vector<std::vector<CarlemanRow>> per_member(spec.count);
  if (threads <= 1 || spec.count <= 1) {
    for (int member = 0; member < spec.count; ++member)
      per_member[member] = scan_member(member);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int m; (m = next.fetch_add(1)) < spec.count;)
        per_member[m] = scan_member(m);
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(threads, spec.count);
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int member = 0; member < spec.count; ++member) {
    bool any_rhs = false;
    for (size_t j = 0; j < s_grid.size(); ++j) {
      const CarlemanRow& row = per_member[member][j];
      rep.rows.push_back(row);
      if (row.rhs > 0.0) {
        any_rhs = true;
        rep.max_ratio[j] = std::max(rep.max_ratio[j], row.ratio);
      }
    }
    if (!any_rhs) ++rep.skipped_members;
  }

  // plateau: earliest tail (>= 3 points) where the max ratio varies < 5%
  const int ns = int(s_grid.size());
  for (int i = 0; i + 3 <= ns; ++i) {
    double lo = rep.max_ratio[i], hi = rep.max_ratio[i];
    for (int j = i; j < ns; ++j) {
      lo = std::min(lo, rep.max_ratio[j]);
      hi = std::max(hi, rep.max_ratio[j]);
    }
    if (lo > 0.0 && (hi - lo) / lo < 0.05) {
      rep.plateau_found = true;
      rep.s0 = s_grid[i];
      rep.empirical_C = hi;
      break;
    }
  }
  if (!rep.plateau_found) {
    rep.s0 = s_grid.empty() ? 0.0 : s_grid.back();
    for (double r : rep.max_ratio) rep.empirical_C = std::max(rep.empirical_C, r);
  }
  return rep;
}

CaccioppoliReport caccioppoli_check(const Trajectory& traj, const Grid& grid,
                                    const WeightsVariant& w, Interval inner,
                                    Interval outer, double s, double T) {
  const auto& model = weight_model(w);
  if (!(outer.lo <= inner.lo && inner.hi <= outer.hi))
    throw std::invalid_argument("inner interval must sit inside the outer one");
  if (grid.x0 >= outer.lo && grid.x0 <= outer.hi)
    throw std::invalid_argument("outer interval must avoid x0");

  CaccioppoliReport rep;
  const bool div = model.form == Form::divergence;
  std::vector<std::vector<double>> grads(traj.levels());
  for (int k = 1; k < traj.levels() - 1; ++k) grads[k] = gradient(grid, traj.at(k));

  const int nt = traj.levels() - 1;
  const double dt = traj.times[1] - traj.times[0];
  for (int k = 1; k < nt; ++k) {
    const double t = traj.times[k];
    const double th = theta(t, T);
    for (int i = 0; i < grid.n(); ++i) {
      const double x = grid.nodes[i];
      const double cw = grid.cell_widths[i];
      if (inner.contains(x)) {
        const double ew = std::exp(2.0 * s * th * spatial_weight(w, x));
        const double vx = grads[k][i];
        rep.grad_integral += dt * cw * vx * vx * ew;
      }
      if (outer.contains(x)) {
        const double v = traj.at(k)[i];
        rep.zero_integral += dt * cw * v * v * (div ? 1.0 : 1.0 / model.a(x));
      }
    }
  }
  rep.ratio = rep.zero_integral > 0.0 ? rep.grad_integral / rep.zero_integral : 0.0;

  // |Upsilon'| sqrt(a) must stay bounded; for the weight prototypes
  // Upsilon' = c1 (x-x0)/a (times the Gaussian factor in the non-div case)
  for (double x : probe_points(model.x0, 501, 1e-3)) {
    const double d = x - model.x0;
    double deriv;
    if (std::holds_alternative<DivergenceWeights>(w)) {
      const auto& dw = std::get<DivergenceWeights>(w);
      deriv = dw.c1 * d / model.a(x);
    } else {
      const auto& nw = std::get<NonDivergenceWeights>(w);
      deriv = nw.d1 * d / model.a(x) * std::exp(nw.R * d * d);
    }
    rep.weight_condition_sup = std::max(rep.weight_condition_sup,
                                        std::fabs(deriv) * std::sqrt(model.a(x)));
  }
  return rep;
}

HardyPoincareReport hardy_poincare_check(const Grid& grid,
                                         const DegeneracyModel& model,
                                         std::span<const double> u) {
  HardyPoincareReport rep;
  const int n = grid.n();
  std::vector<double> uu(u.begin(), u.end());

  // enforce the vanishing condition at the node nearest x0
  int nearest = 0;
  double best = 1e30;
  for (int i = 0; i < n; ++i) {
    const double d = std::fabs(grid.nodes[i] - grid.x0);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }
  uu[nearest] = 0.0;

  bool all_zero = true;
  for (double v : uu)
    if (v != 0.0) all_zero = false;
  if (all_zero) {
    rep.skipped = true;
    return rep;
  }

  auto p_weight = [&](double x) {
    const double d = std::fabs(x - grid.x0);
    return std::cbrt(model.a(x) * d * d * d * d);
  };
  for (int i = 0; i < n; ++i) {
    const double x = grid.nodes[i];
    const double d = x - grid.x0;
    if (uu[i] == 0.0) continue;  // covers the x0 node where p/(x-x0)^2 -> inf
    rep.weighted_zero_order += grid.cell_widths[i] * p_weight(x) / (d * d) * uu[i] * uu[i];
  }
  for (int f = 1; f < n; ++f) {
    const double h = grid.nodes[f] - grid.nodes[f - 1];
    const double du = (uu[f] - uu[f - 1]) / h;
    rep.weighted_gradient += p_weight(grid.faces[f]) * du * du * h;
  }
  rep.quotient = rep.weighted_gradient > 0.0
                     ? rep.weighted_zero_order / rep.weighted_gradient
                     : 0.0;
  return rep;
}

}  // namespace degpar
