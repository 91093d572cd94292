#include "degpar/evolution.hpp"

#include <cmath>
#include <stdexcept>

namespace degpar {

EvolutionProblem EvolutionProblem::make(const DegeneracyModel& model, int n,
                                        int nt, double T, double grading,
                                        Scheme scheme) {
  EvolutionProblem p;
  p.model = model;
  p.grid = build_grid(n, model, grading);
  p.op = assemble_operator(model, p.grid);
  p.T = T;
  p.nt = nt;
  p.scheme = scheme;
  return p;
}

void implicit_step(const DiscreteOperator& op, double dt,
                   std::span<const double> rhs, std::span<double> out) {
  const int n = op.n();
  // rows of I - dt A
  static thread_local std::vector<double> c_prime, d_prime;
  c_prime.assign(n, 0.0);
  d_prime.assign(n, 0.0);

  double beta = 1.0 - dt * op.diag[0];
  if (beta == 0.0) throw std::runtime_error("singular step matrix");
  c_prime[0] = -dt * op.sup[0] / beta;
  d_prime[0] = rhs[0] / beta;
  for (int i = 1; i < n; ++i) {
    const double a_i = -dt * op.sub[i];
    beta = (1.0 - dt * op.diag[i]) - a_i * c_prime[i - 1];
    if (beta == 0.0) throw std::runtime_error("singular step matrix");
    if (i < n - 1) c_prime[i] = -dt * op.sup[i] / beta;
    d_prime[i] = (rhs[i] - a_i * d_prime[i - 1]) / beta;
  }
  out[n - 1] = d_prime[n - 1];
  for (int i = n - 2; i >= 0; --i) out[i] = d_prime[i] - c_prime[i] * out[i + 1];
}

namespace {

void cn_step(const EvolutionProblem& p, std::span<const double> u,
             std::span<double> out, std::span<const double> src) {
  const int n = p.op.n();
  const double dt = p.dt();
  std::vector<double> rhs(n);
  p.op.apply(u, rhs);
  for (int i = 0; i < n; ++i) rhs[i] = u[i] + 0.5 * dt * rhs[i] + dt * src[i];
  implicit_step(p.op, 0.5 * dt, rhs, out);
}

}  // namespace

Trajectory solve_forward(const EvolutionProblem& p, std::span<const double> u0,
                         const SpaceTimeSource& h,
                         const std::optional<Interval>& omega) {
  const int n = p.op.n();
  const double dt = p.dt();
  Trajectory traj;
  traj.direction = Direction::forward;
  traj.times.resize(p.nt + 1);
  for (int k = 0; k <= p.nt; ++k) traj.times[k] = dt * k;
  traj.fields.assign(p.nt + 1, std::vector<double>(n));
  traj.fields[0].assign(u0.begin(), u0.end());

  std::vector<double> src(n, 0.0), rhs(n);
  for (int k = 0; k < p.nt; ++k) {
    if (h) {
      const double t_next = traj.times[k + 1];
      for (int i = 0; i < n; ++i) {
        const double x = p.grid.nodes[i];
        src[i] = (!omega || omega->contains(x)) ? h(t_next, x) : 0.0;
      }
    }
    if (p.scheme == Scheme::implicit_euler) {
      for (int i = 0; i < n; ++i) rhs[i] = traj.fields[k][i] + dt * src[i];
      implicit_step(p.op, dt, rhs, traj.fields[k + 1]);
    } else {
      cn_step(p, traj.fields[k], traj.fields[k + 1], src);
    }
  }
  return traj;
}

Trajectory solve_adjoint(const EvolutionProblem& p, std::span<const double> vT) {
  const int n = p.op.n();
  const double dt = p.dt();
  Trajectory traj;
  traj.direction = Direction::backward;
  traj.times.resize(p.nt + 1);
  for (int k = 0; k <= p.nt; ++k) traj.times[k] = dt * k;
  traj.fields.assign(p.nt + 1, std::vector<double>(n));
  traj.fields[p.nt].assign(vT.begin(), vT.end());

  // v_t + Av = 0 backward in time is the forward heat flow in reversed time
  std::vector<double> zero(n, 0.0);
  for (int k = p.nt; k > 0; --k) {
    if (p.scheme == Scheme::implicit_euler) {
      implicit_step(p.op, dt, traj.fields[k], traj.fields[k - 1]);
    } else {
      cn_step(p, traj.fields[k], traj.fields[k - 1], zero);
    }
  }
  return traj;
}

EnergyReport energy_report(const EvolutionProblem& p, const Trajectory& traj,
                           std::span<const double> u0, const SpaceTimeSource& h,
                           const std::optional<Interval>& omega) {
  if (traj.direction != Direction::forward)
    throw std::invalid_argument("energy_report expects a forward trajectory");
  const int n = p.op.n();
  const double dt = p.dt();
  const auto& ip = p.op.ip;

  EnergyReport rep;
  double h_norm_sq = 0.0;
  std::vector<double> src(n, 0.0);
  double prev_norm_sq = -1.0;
  const bool free_run = !h;
  for (int k = 0; k <= p.nt; ++k) {
    const double nsq = ip.dot(traj.at(k), traj.at(k));
    rep.sup_norm_sq = std::max(rep.sup_norm_sq, nsq);
    if (free_run && prev_norm_sq >= 0.0 &&
        nsq > prev_norm_sq * (1.0 + 1e-12) + 1e-12)
      rep.monotone_when_free = false;
    prev_norm_sq = nsq;
    if (k >= 1) {
      rep.dirichlet_integral +=
          dt * dirichlet_form(p.op, p.grid, p.model, traj.at(k), traj.at(k));
      if (h) {
        const double t = traj.times[k];
        for (int i = 0; i < n; ++i) {
          const double x = p.grid.nodes[i];
          src[i] = (!omega || omega->contains(x)) ? h(t, x) : 0.0;
        }
        h_norm_sq += dt * ip.dot(src, src);
      }
    }
  }

  if (p.model.form == Form::divergence) {
    double mass0 = 0.0, drift = 0.0;
    for (int i = 0; i < n; ++i) mass0 += ip.w[i] * traj.at(0)[i];
    double prev = mass0;
    for (int k = 1; k <= p.nt && !h; ++k) {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m += ip.w[i] * traj.at(k)[i];
      drift = std::max(drift, std::fabs(m - prev));
      prev = m;
    }
    rep.mass_drift_per_step = drift;
  }

  const double u0_sq = ip.dot(u0, u0);
  rep.rhs_bound = std::exp(p.T) * (u0_sq + h_norm_sq);
  rep.pass = rep.sup_norm_sq <= rep.rhs_bound * (1.0 + 1e-8);
  return rep;
}

}  // namespace degpar
