#pragma once

#include <span>
#include <vector>

#include "degpar/coefficients.hpp"

namespace degpar {

struct Interval {
  double lo = 0.0, hi = 1.0;
  bool contains(double x) const { return x > lo && x < hi; }
  double length() const { return hi - lo; }
};

/// 1-D mesh on [0,1] with the degeneracy point placed on a node (divergence
/// form) or on a face (non-divergence form), so that the scheme never samples
/// a where it vanishes.
struct Grid {
  enum class Placement { on_node, on_face };

  std::vector<double> nodes;        // ascending, nodes.front()=0, nodes.back()=1
  std::vector<double> faces;        // endpoints plus cell midlines, size n+1
  std::vector<double> cell_widths;  // dual-cell widths, faces[i+1]-faces[i]
  Placement placement = Placement::on_node;
  int x0_index = 0;  // node index (on_node) or face index (on_face)
  double x0 = 0.5;

  int n() const { return int(nodes.size()); }
};

Grid build_grid(int n, const DegeneracyModel& model, double grading = 1.0);

/// Diagonal quadrature weights defining the discrete X inner product:
/// plain (w_i = cell width) or 1/a-weighted (w_i = cell integral of 1/a).
struct InnerProduct {
  enum class Kind { plain, inv_a };
  Kind kind = Kind::plain;
  std::vector<double> w;

  double dot(std::span<const double> u, std::span<const double> v) const;
  double norm(std::span<const double> u) const;
};

/// Tridiagonal discrete operator with zero-flux Neumann closure, self-adjoint
/// and nonpositive in its declared inner product.
struct DiscreteOperator {
  std::vector<double> sub, diag, sup;  // sub[0] and sup[n-1] unused
  std::vector<double> cond;            // face conductances, zero at boundaries
  InnerProduct ip;
  Form form = Form::divergence;

  int n() const { return int(diag.size()); }
  void apply(std::span<const double> u, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> u) const;
};

DiscreteOperator assemble_operator(const DegeneracyModel& model, const Grid& grid);

/// |<Au,v>_X + B(u,v)| where B is the discrete weighted Dirichlet form.
double green_residual(const DiscreteOperator& op, const Grid& grid,
                      const DegeneracyModel& model, std::span<const double> u,
                      std::span<const double> v);

/// The Dirichlet form itself: sum over faces of a_f (du/h)(dv/h) h in the
/// divergence case, the unweighted analogue in the non-divergence one.
double dirichlet_form(const DiscreteOperator& op, const Grid& grid,
                      const DegeneracyModel& model, std::span<const double> u,
                      std::span<const double> v);

}  // namespace degpar
