#include "degpar/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "degpar/quadrature.hpp"

namespace degpar {

double theta(double t, double T) {
  if (t <= 0.0 || t >= T) throw std::domain_error("theta defined on (0,T) only");
  const double p = t * (T - t);
  return 1.0 / (p * p * p * p);
}

double min_c2(const DegeneracyModel& model) {
  const double K = model.is_power_law() ? *model.exponent : model.k_bound;
  if (K >= 2.0) throw std::domain_error("min_c2 undefined for K >= 2");
  const double x0 = model.x0;
  const double right = (1.0 - x0) * (1.0 - x0) / (model.a(1.0) * (2.0 - K));
  const double left = x0 * x0 / (model.a(0.0) * (2.0 - K));
  return std::max(right, left);
}

double min_d2(const DegeneracyModel& model, double R) {
  const double K = model.is_power_law() ? *model.exponent : model.k_bound;
  if (K >= 2.0) throw std::domain_error("min_d2 undefined for K >= 2");
  const double x0 = model.x0;
  const double dr = 1.0 - x0;
  const double right = dr * dr * std::exp(R * dr * dr) / ((2.0 - K) * model.a(1.0));
  const double left = x0 * x0 * std::exp(R * x0 * x0) / ((2.0 - K) * model.a(0.0));
  return std::max(right, left);
}

namespace {

// int_{x0}^x (y-x0)/a(y) dy, always >= 0; closed form for the power law.
double psi_integral(const DegeneracyModel& model, double x) {
  const double d = std::fabs(x - model.x0);
  if (d == 0.0) return 0.0;
  if (model.is_power_law()) {
    const double K = *model.exponent;
    return std::pow(d, 2.0 - K) / (2.0 - K);
  }
  const double x0 = model.x0;
  return std::fabs(integrate(
      [&](double y) { return (y - x0) / model.a(y); }, x0, x, 1e-12));
}

// int_{x0}^x (y-x0)/a(y) e^{R(y-x0)^2} dy for the power law, by the
// substitution v = |y-x0|^{2-K} which removes the endpoint singularity.
double mu_integral(const DegeneracyModel& model, double x, double R) {
  const double d = std::fabs(x - model.x0);
  if (d == 0.0) return 0.0;
  if (model.is_power_law()) {
    const double K = *model.exponent;
    const double p = 2.0 - K;
    return (1.0 / p) * integrate(
        [R, p](double v) { return std::exp(R * std::pow(v, 2.0 / p)); },
        0.0, std::pow(d, p), 1e-12);
  }
  const double x0 = model.x0;
  return std::fabs(integrate(
      [&](double y) {
        const double dy = y - x0;
        return dy / model.a(y) * std::exp(R * dy * dy);
      },
      x0, x, 1e-12));
}

}  // namespace

double DivergenceWeights::psi(double x) const {
  if (!(c2 > min_c2(model)))
    throw std::invalid_argument("c2 must strictly exceed min_c2");
  return c1 * (psi_integral(model, x) - c2);
}

double NonDivergenceWeights::mu(double x) const {
  if (!(d2 > min_d2(model, R)))
    throw std::invalid_argument("d2 must strictly exceed min_d2");
  return d1 * (mu_integral(model, x, R) - d2);
}

DivergenceWeights DivergenceWeights::with_defaults(const DegeneracyModel& model,
                                                   double c1_floor) {
  DivergenceWeights w;
  w.model = model;
  w.c2 = 1.5 * min_c2(model);
  w.c1 = std::max(1.0, c1_floor);
  return w;
}

NonDivergenceWeights NonDivergenceWeights::with_defaults(
    const DegeneracyModel& model, double R) {
  NonDivergenceWeights w;
  w.model = model;
  w.R = R;
  w.d2 = 1.5 * min_d2(model, R);
  w.d1 = 1.0;
  return w;
}

double c1_lower_bound_observability(const DegeneracyModel& model, double c2,
                                    double r, double frak_c, double lambda2) {
  const double K = model.is_power_law() ? *model.exponent : model.k_bound;
  const double x0 = model.x0;
  const double denom = c2 - (1.0 - x0) * (1.0 - x0) / (model.a(1.0) * (2.0 - K));
  if (denom <= 0.0)
    throw std::invalid_argument("c2 inadmissible for the observability bound");
  const auto cls = classify(model);
  if (!cls.accepted())
    throw std::invalid_argument("model outside the degeneracy range");
  if (cls.kind == Degeneracy::strong) return (frak_c - 1.0) / denom;

  // weak case: prototype g == 1, h0 = 1
  const double inner = integrate(
      [&](double t) { return (1.0 - t) / std::sqrt(model.a(t)); }, lambda2, 1.0,
      1e-12);
  const double outer = integrate(
      [&](double t) { return 1.0 / std::sqrt(model.a(t)); }, lambda2, 1.0, 1e-12);
  return (r * (inner + outer) + frak_c) / denom;
}

double reflect_coordinate(double x) {
  if (x < 0.0) return -x;
  if (x > 1.0) return 2.0 - x;
  return x;
}

ExtendedWeights reflect(const DegeneracyModel& model) {
  return ExtendedWeights{model, {}};
}

double ExtendedWeights::a_tilde(double x) const {
  return model.a(reflect_coordinate(x));
}

double reflect_psi(const DivergenceWeights& w, double x) {
  return w.psi(reflect_coordinate(x));
}

double reflect_mu(const NonDivergenceWeights& w, double x) {
  return w.mu(reflect_coordinate(x));
}

ExtendedField reflect_field(const Grid& grid, std::span<const double> field) {
  const int n = grid.n();
  ExtendedField ext;
  ext.nodes.reserve(3 * n - 2);
  ext.values.reserve(3 * n - 2);
  // left mirror (about 0), interior node order reversed
  for (int i = n - 1; i >= 1; --i) {
    ext.nodes.push_back(-grid.nodes[i]);
    ext.values.push_back(field[i]);
  }
  for (int i = 0; i < n; ++i) {
    ext.nodes.push_back(grid.nodes[i]);
    ext.values.push_back(field[i]);
  }
  // right mirror (about 1)
  for (int i = n - 2; i >= 0; --i) {
    ext.nodes.push_back(2.0 - grid.nodes[i]);
    ext.values.push_back(field[i]);
  }
  return ext;
}

namespace {

// quintic smoothstep and derivatives on [0,1]
double smooth5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smooth5_d1(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
double smooth5_d2(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

}  // namespace

double Cutoff::value(double x) const {
  if (x <= support.lo || x >= support.hi) return 0.0;
  if (x >= plateau.lo && x <= plateau.hi) return 1.0;
  if (x < plateau.lo) return smooth5((x - support.lo) / (plateau.lo - support.lo));
  return smooth5((support.hi - x) / (support.hi - plateau.hi));
}

double Cutoff::d1(double x) const {
  if (x <= support.lo || x >= support.hi) return 0.0;
  if (x >= plateau.lo && x <= plateau.hi) return 0.0;
  if (x < plateau.lo) {
    const double b = plateau.lo - support.lo;
    return smooth5_d1((x - support.lo) / b) / b;
  }
  const double b = support.hi - plateau.hi;
  return -smooth5_d1((support.hi - x) / b) / b;
}

double Cutoff::d2(double x) const {
  if (x <= support.lo || x >= support.hi) return 0.0;
  if (x >= plateau.lo && x <= plateau.hi) return 0.0;
  if (x < plateau.lo) {
    const double b = plateau.lo - support.lo;
    return smooth5_d2((x - support.lo) / b) / (b * b);
  }
  const double b = support.hi - plateau.hi;
  return smooth5_d2((support.hi - x) / b) / (b * b);
}

Cutoff build_cutoff(Interval plateau, Interval support) {
  if (!(support.lo < plateau.lo && plateau.lo < plateau.hi &&
        plateau.hi < support.hi))
    throw std::invalid_argument("cutoff plateau must be strictly inside support");
  return Cutoff{plateau, support};
}

bool monotone_quotient_scan(const DegeneracyModel& model, int points) {
  const double x0 = model.x0;
  auto q = [&](double x) {
    const double d = x - x0;
    return model.a(x) / (d * d);
  };
  const double margin = 1e-6;
  for (int side = 0; side < 2; ++side) {
    const double lo = side == 0 ? 0.0 : x0 + margin;
    const double hi = side == 0 ? x0 - margin : 1.0;
    double prev = q(lo);
    for (int i = 1; i < points; ++i) {
      const double x = lo + (hi - lo) * double(i) / double(points - 1);
      const double val = q(x);
      const double slack = 1e-9 * (std::fabs(prev) + std::fabs(val));
      if (side == 0 ? val < prev - slack : val > prev + slack) return false;
      prev = val;
    }
  }
  return true;
}

}  // namespace degpar
