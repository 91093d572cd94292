#include "degpar/control.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace degpar {

ObservabilityConfig make_observability_config(const DegeneracyModel& model,
                                              Interval omega, double T) {
  if (!(omega.lo >= 0.0 && omega.hi <= 1.0 && omega.lo < omega.hi))
    throw std::invalid_argument("omega must be a nonempty subinterval of (0,1)");
  ObservabilityConfig cfg;
  cfg.omega = omega;
  cfg.T = T;
  cfg.form = model.form;
  cfg.omega_contains_x0 = omega.contains(model.x0);
  return cfg;
}

namespace detail {

std::vector<double> omega_mask(const Grid& grid, Interval omega) {
  std::vector<double> mask(grid.n(), 0.0);
  for (int i = 0; i < grid.n(); ++i)
    if (omega.contains(grid.nodes[i])) mask[i] = 1.0;
  return mask;
}

std::vector<double> observation_gramian(const EvolutionProblem& p,
                                        Interval omega,
                                        std::span<const double> vT,
                                        bool trapezoid) {
  const int n = p.op.n();
  const double dt = p.dt();
  const auto mask = omega_mask(p.grid, omega);
  const auto traj = solve_adjoint(p, vT);

  // g accumulates sum_k w_k (M^{-1})^{nt-k} (chi_omega v^k); applying one more
  // inverse per level keeps the map self-adjoint in X.
  std::vector<double> g(n, 0.0), tmp(n);
  for (int k = 0; k <= (trapezoid ? p.nt : p.nt - 1); ++k) {
    const double wk = trapezoid ? ((k == 0 || k == p.nt) ? 0.5 * dt : dt) : dt;
    for (int i = 0; i < n; ++i) g[i] += wk * mask[i] * traj.at(k)[i];
    if (k < p.nt) {
      implicit_step(p.op, dt, g, tmp);
      g.swap(tmp);
    }
  }
  return g;
}

std::vector<double> initial_energy_form(const EvolutionProblem& p,
                                        std::span<const double> vT) {
  const int n = p.op.n();
  const double dt = p.dt();
  std::vector<double> v(vT.begin(), vT.end()), tmp(n);
  for (int k = 0; k < 2 * p.nt; ++k) {
    implicit_step(p.op, dt, v, tmp);
    v.swap(tmp);
  }
  return v;
}

namespace {

// CG in the X inner product for A z = b with A an X-self-adjoint PSD map.
template <typename ApplyFn>
int conjugate_gradient(const InnerProduct& ip, ApplyFn&& apply,
                       std::span<const double> b, std::vector<double>& z,
                       double rel_tol, int max_iter) {
  const int n = int(b.size());
  z.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end()), d = r, ad(n);
  double rr = ip.dot(r, r);
  const double b_norm = std::sqrt(ip.dot(b, b));
  if (b_norm == 0.0) return 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (std::sqrt(rr) <= rel_tol * b_norm) break;
    ad = apply(d);
    const double dad = ip.dot(d, ad);
    if (dad <= 0.0) break;  // PSD breakdown: accept current iterate
    const double alpha = rr / dad;
    for (int i = 0; i < n; ++i) {
      z[i] += alpha * d[i];
      r[i] -= alpha * ad[i];
    }
    const double rr_new = ip.dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
  }
  return it;
}

}  // namespace

}  // namespace detail

double observation_energy(const EvolutionProblem& p, const Trajectory& traj,
                          Interval omega) {
  const int n = p.op.n();
  const double dt = p.dt();
  const auto mask = detail::omega_mask(p.grid, omega);
  double total = 0.0;
  for (int k = 0; k <= p.nt; ++k) {
    const double wk = (k == 0 || k == p.nt) ? 0.5 * dt : dt;
    double slice = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = traj.at(k)[i];
      slice += p.op.ip.w[i] * mask[i] * v * v;
    }
    total += wk * slice;
  }
  return total;
}

double observability_quotient(const EvolutionProblem& p,
                              std::span<const double> vT, Interval omega) {
  const auto traj = solve_adjoint(p, vT);
  const double num = p.op.ip.dot(traj.at(0), traj.at(0));
  const double den = observation_energy(p, traj, omega);
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();  // observability violation
  }
  return num / den;
}

ObservabilityReport estimate_CT(const EvolutionProblem& p, Interval omega,
                                const PowerIterationParams& params) {
  const int n = p.op.n();
  ObservabilityReport rep;

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    // smooth start: low cosine modes only
    v[i] = 0.0;
  }
  for (int m = 0; m <= 6; ++m) {
    const double c = unif(rng) / (1.0 + m * m);
    for (int i = 0; i < n; ++i) v[i] += c * std::cos(m * M_PI * p.grid.nodes[i]);
  }

  auto apply_E = [&](std::span<const double> x) {
    return detail::observation_gramian(p, omega, x, /*trapezoid=*/true);
  };

  std::vector<double> z;
  for (int it = 0; it < params.max_iter; ++it) {
    const auto nv = detail::initial_energy_form(p, v);
    detail::conjugate_gradient(p.op.ip, apply_E, nv, z, params.cg_tol,
                               params.cg_max_iter);
    const double norm = p.op.ip.norm(z);
    if (norm == 0.0) break;
    for (int i = 0; i < n; ++i) v[i] = z[i] / norm;

    // Rayleigh quotient of the pencil at the current iterate
    const auto nv2 = detail::initial_energy_form(p, v);
    const auto ev2 = apply_E(v);
    const double lambda = p.op.ip.dot(nv2, v) / p.op.ip.dot(ev2, v);
    rep.history.push_back(lambda);
    rep.iterations = it + 1;
    if (int(rep.history.size()) >= params.window + 1) {
      const double ref = rep.history[rep.history.size() - params.window - 1];
      bool stable = true;
      for (int j = 0; j < params.window; ++j) {
        const double h = rep.history[rep.history.size() - 1 - j];
        if (std::fabs(h - ref) > params.rel_tol * std::fabs(ref)) stable = false;
      }
      if (stable) {
        rep.converged = true;
        break;
      }
    }
  }
  rep.C_T = rep.history.empty() ? 0.0 : rep.history.back();
  rep.extremal_vT = v;
  return rep;
}

ControlResult hum_control(const EvolutionProblem& p, std::span<const double> u0,
                          Interval omega, double epsilon,
                          const HumParams& params) {
  if (epsilon <= 0.0)
    throw std::invalid_argument("epsilon must be positive (the unregularized "
                                "discrete problem is ill-posed)");
  const int n = p.op.n();
  const auto& ip = p.op.ip;

  // b = (M^{-1})^{nt} u0, the X-adjoint transport of u0 to time T
  std::vector<double> b(u0.begin(), u0.end()), tmp(n);
  for (int k = 0; k < p.nt; ++k) {
    implicit_step(p.op, p.dt(), b, tmp);
    b.swap(tmp);
  }
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = -b[i];

  auto apply = [&](std::span<const double> x) {
    auto gx = detail::observation_gramian(p, omega, x, /*trapezoid=*/false);
    for (int i = 0; i < n; ++i) gx[i] += epsilon * x[i];
    return gx;
  };

  ControlResult res;
  res.epsilon = epsilon;
  std::vector<double> vT;
  res.cg_iterations = detail::conjugate_gradient(ip, apply, rhs, vT,
                                                 params.cg_tol, params.cg_max_iter);
  res.converged = res.cg_iterations < params.cg_max_iter;
  res.vT = vT;

  const auto traj = solve_adjoint(p, vT);
  const auto mask = detail::omega_mask(p.grid, omega);
  res.times = traj.times;
  res.control.assign(p.nt + 1, std::vector<double>(n, 0.0));
  for (int k = 0; k <= p.nt; ++k)
    for (int i = 0; i < n; ++i) res.control[k][i] = mask[i] * traj.at(k)[i];

  // cost with the left-sum quadrature that makes the discrete duality exact
  for (int k = 0; k < p.nt; ++k)
    res.cost += p.dt() * ip.dot(res.control[k], res.control[k]);
  res.j_value = 0.5 * res.cost + 0.5 * epsilon * ip.dot(vT, vT) +
                ip.dot(u0, traj.at(0));

  // forward solve with the synthesized control; source at step k -> k+1 is
  // the adjoint state at level k
  std::vector<double> u(u0.begin(), u0.end());
  for (int k = 0; k < p.nt; ++k) {
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + p.dt() * res.control[k][i];
    implicit_step(p.op, p.dt(), tmp, u);
  }
  res.final_norm = ip.norm(u);
  return res;
}

NullControlVerification verify_null_control(const EvolutionProblem& p,
                                            std::span<const double> u0,
                                            const ControlResult& result,
                                            Interval omega) {
  (void)omega;  // the stored control is already masked
  const int n = p.op.n();
  const double dt = p.dt();

  // independent stepping path: fresh assembly of the step matrix rows and a
  // reversed-order (bottom-up) elimination
  std::vector<double> lower(n), diag(n), upper(n);
  for (int i = 0; i < n; ++i) {
    lower[i] = -dt * p.op.sub[i];
    diag[i] = 1.0 - dt * p.op.diag[i];
    upper[i] = -dt * p.op.sup[i];
  }
  auto solve_reversed = [&](std::vector<double>& rhs) {
    // eliminate from the last row upward, then substitute downward
    std::vector<double> d(diag), r(rhs);
    for (int i = n - 2; i >= 0; --i) {
      const double m = upper[i] / d[i + 1];
      d[i] -= m * lower[i + 1];
      r[i] -= m * r[i + 1];
    }
    rhs[0] = r[0] / d[0];
    for (int i = 1; i < n; ++i) rhs[i] = (r[i] - lower[i] * rhs[i - 1]) / d[i];
  };

  std::vector<double> u(u0.begin(), u0.end()), rhs(n);
  for (int k = 0; k < p.nt; ++k) {
    for (int i = 0; i < n; ++i) rhs[i] = u[i] + dt * result.control[k][i];
    solve_reversed(rhs);
    u = rhs;
  }

  NullControlVerification ver;
  ver.final_norm = p.op.ip.norm(u);
  const double u0_norm = p.op.ip.norm(u0);
  if (u0_norm == 0.0 && ver.final_norm == 0.0) {
    ver.exact_null = true;
    return ver;
  }
  ver.final_over_initial = ver.final_norm / u0_norm;
  ver.cost_over_initial_sq = result.cost / (u0_norm * u0_norm);
  return ver;
}

}  // namespace degpar
