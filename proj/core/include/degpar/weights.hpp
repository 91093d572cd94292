#pragma once

#include <vector>

#include "degpar/coefficients.hpp"
#include "degpar/mesh.hpp"

namespace degpar {

/// Time weight 1/[t(T-t)]^4; domain error outside (0,T).
double theta(double t, double T);

/// Admissibility floor for c2 (divergence form); c2 must strictly exceed it.
double min_c2(const DegeneracyModel& model);

/// Admissibility floor for d2 (non-divergence form) at Gaussian rate R.
double min_d2(const DegeneracyModel& model, double R);

/// Divergence-form Carleman weight: phi(t,x) = theta(t) psi(x), psi < 0.
struct DivergenceWeights {
  DegeneracyModel model;
  double c1 = 1.0, c2 = 1.0;

  double psi(double x) const;
  double phi(double t, double x, double T) const { return theta(t, T) * psi(x); }

  static DivergenceWeights with_defaults(const DegeneracyModel& model,
                                         double c1_floor = 1.0);
};

/// Non-divergence weight: gamma(t,x) = theta(t) mu(x), mu < 0.
struct NonDivergenceWeights {
  DegeneracyModel model;
  double d1 = 1.0, d2 = 1.0, R = 1.0;

  double mu(double x) const;
  double gamma(double t, double x, double T) const { return theta(t, T) * mu(x); }

  static NonDivergenceWeights with_defaults(const DegeneracyModel& model,
                                            double R = 1.0);
};

/// Lower bound the observability argument imposes on c1. The weak-degeneracy
/// branch instantiates the prototype pair g == 1, h0 = 1; lambda2 is the left
/// end of the non-degenerate window, r and frak_c the free constants of the
/// auxiliary weight.
double c1_lower_bound_observability(const DegeneracyModel& model, double c2,
                                    double r, double frak_c, double lambda2);

/// Even reflection about x=0 and x=1 extending [0,1] data to [-1,2].
double reflect_coordinate(double x);  // maps [-1,2] into [0,1]

struct ExtendedWeights {
  DegeneracyModel model;
  std::vector<double> psi_table;  // unused placeholder when built from callables

  double a_tilde(double x) const;  // reflected coefficient on [-1,2]
};

ExtendedWeights reflect(const DegeneracyModel& model);
double reflect_psi(const DivergenceWeights& w, double x);     // psi tilde on [-1,2]
double reflect_mu(const NonDivergenceWeights& w, double x);   // mu tilde on [-1,2]

/// Reflected field on [-1,2]: mirrored nodes and values; zero discrete
/// Neumann derivative at 0 and 1 by construction.
struct ExtendedField {
  std::vector<double> nodes;
  std::vector<double> values;
};
ExtendedField reflect_field(const Grid& grid, std::span<const double> field);

/// C^2 cutoff: 1 on the plateau, 0 outside the support, quintic smoothstep
/// transitions.
struct Cutoff {
  Interval plateau, support;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
};

Cutoff build_cutoff(Interval plateau, Interval support);

/// Scan of the companion-lemma monotone structure: a(x)/(x-x0)^2 nondecreasing
/// on [0,x0), nonincreasing on (x0,1].
bool monotone_quotient_scan(const DegeneracyModel& model, int points = 1001);

}  // namespace degpar
