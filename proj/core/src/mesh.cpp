#include "degpar/mesh.hpp"

#include <cmath>
#include <stdexcept>

#include "degpar/quadrature.hpp"

namespace degpar {

namespace {

// Graded map of [0,1] onto [lo,hi], concentrating points toward `toward_hi`
// (power-law stretching, endpoints fixed).
double stretch(double xi, double lo, double hi, double grading, bool toward_hi) {
  const double t = toward_hi ? 1.0 - std::pow(1.0 - xi, grading) : std::pow(xi, grading);
  return lo + (hi - lo) * t;
}

// Exact cell integral of 1/a for the power law |x-x0|^{-K}, endpoints on one
// side of x0 (cells never straddle x0: it sits on a face).
double inv_a_integral_power(double lo, double hi, double x0, double K) {
  const double dl = std::fabs(lo - x0), dh = std::fabs(hi - x0);
  if (K == 1.0) return std::fabs(std::log(dh) - std::log(dl));
  const double p = 1.0 - K;
  return std::fabs(std::pow(dh, p) - std::pow(dl, p)) / std::fabs(p);
}

}  // namespace

Grid build_grid(int n, const DegeneracyModel& model, double grading) {
  if (n < 16) throw std::invalid_argument("build_grid: n must be at least 16");
  if (grading < 1.0) throw std::invalid_argument("build_grid: grading must be >= 1");
  const double x0 = model.x0;

  Grid g;
  g.x0 = x0;
  g.nodes.reserve(n);

  if (model.form == Form::divergence) {
    g.placement = Grid::Placement::on_node;
    // x0 is a node: split node budget proportionally across the two sides
    int nl = int(std::lround(x0 * (n - 1)));
    nl = std::max(1, std::min(n - 2, nl));
    const int nr = n - 1 - nl;
    for (int i = 0; i < nl; ++i)
      g.nodes.push_back(stretch(double(i) / nl, 0.0, x0, grading, true));
    g.nodes.push_back(x0);
    for (int i = 1; i <= nr; ++i)
      g.nodes.push_back(stretch(double(i) / nr, x0, 1.0, grading, false));
    g.x0_index = nl;
  } else {
    g.placement = Grid::Placement::on_face;
    // x0 is the midpoint of the central cell pair
    int nl = int(std::lround(x0 * n));
    nl = std::max(1, std::min(n - 1, nl));
    const int nr = n - nl;
    const double hc = 0.5 * (x0 / nl + (1.0 - x0) / nr);  // central gap
    const double l_end = x0 - 0.5 * hc;
    const double r_start = x0 + 0.5 * hc;
    for (int i = 0; i < nl; ++i)
      g.nodes.push_back(stretch(double(i) / (nl - 1 > 0 ? nl - 1 : 1), 0.0,
                                l_end, grading, true));
    for (int i = 0; i < nr; ++i)
      g.nodes.push_back(stretch(double(i) / (nr - 1 > 0 ? nr - 1 : 1), r_start,
                                1.0, grading, false));
    g.x0_index = nl;  // face index: midpoint of nodes nl-1 and nl equals x0
  }

  g.faces.resize(n + 1);
  g.faces[0] = 0.0;
  g.faces[n] = 1.0;
  for (int i = 1; i < n; ++i) g.faces[i] = 0.5 * (g.nodes[i - 1] + g.nodes[i]);
  g.cell_widths.resize(n);
  for (int i = 0; i < n; ++i) g.cell_widths[i] = g.faces[i + 1] - g.faces[i];
  return g;
}

double InnerProduct::dot(std::span<const double> u, std::span<const double> v) const {
  double s = 0.0;
  for (size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * v[i];
  return s;
}

double InnerProduct::norm(std::span<const double> u) const {
  return std::sqrt(dot(u, u));
}

void DiscreteOperator::apply(std::span<const double> u, std::span<double> out) const {
  // flux form: dividing the net flux difference (small) by w keeps the Green
  // identity exact to rounding, unlike applying the pre-divided rows
  const int m = n();
  double flux_prev = 0.0;  // zero Neumann flux through the boundary
  for (int i = 0; i < m; ++i) {
    const double flux_next =
        i + 1 < m ? cond[i + 1] * (u[i + 1] - u[i]) : 0.0;
    out[i] = (flux_next - flux_prev) / ip.w[i];
    flux_prev = flux_next;
  }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u) const {
  std::vector<double> out(u.size());
  apply(u, out);
  return out;
}

DiscreteOperator assemble_operator(const DegeneracyModel& model, const Grid& grid) {
  const int n = grid.n();
  const bool div = model.form == Form::divergence;
  if (div && grid.placement != Grid::Placement::on_node)
    throw std::invalid_argument("divergence form requires x0 on a node");
  if (!div && grid.placement != Grid::Placement::on_face)
    throw std::invalid_argument("non-divergence form requires x0 on a face");

  DiscreteOperator op;
  op.form = model.form;
  op.sub.assign(n, 0.0);
  op.diag.assign(n, 0.0);
  op.sup.assign(n, 0.0);

  // inner product weights
  op.ip.kind = div ? InnerProduct::Kind::plain : InnerProduct::Kind::inv_a;
  op.ip.w.resize(n);
  if (div) {
    op.ip.w = grid.cell_widths;
  } else {
    const double K = model.is_power_law() ? *model.exponent : model.k_bound;
    for (int i = 0; i < n; ++i) {
      const double lo = grid.faces[i], hi = grid.faces[i + 1];
      const bool touches_x0 = (lo == grid.x0) || (hi == grid.x0) ||
                              std::fabs(lo - grid.x0) < 1e-15 ||
                              std::fabs(hi - grid.x0) < 1e-15;
      if (touches_x0 && K >= 1.0) {
        // 1/a is non-integrable across the cell for strong degeneracy;
        // fall back to the midpoint value, which keeps the weight finite
        op.ip.w[i] = grid.cell_widths[i] / model.a(grid.nodes[i]);
      } else if (model.is_power_law()) {
        op.ip.w[i] = inv_a_integral_power(lo, hi, grid.x0, K);
      } else {
        op.ip.w[i] = integrate([&](double x) { return 1.0 / model.a(x); }, lo,
                               hi, 1e-12);
      }
      if (!(op.ip.w[i] >= 0.0) || !std::isfinite(op.ip.w[i]))
        throw std::runtime_error("non-finite 1/a quadrature weight");
    }
  }

  // interior face conductances; boundary fluxes vanish (Neumann closure)
  op.cond.assign(n + 1, 0.0);
  for (int f = 1; f < n; ++f) {
    const double h = grid.nodes[f] - grid.nodes[f - 1];
    const double c = div ? model.a(grid.faces[f]) / h : 1.0 / h;
    op.cond[f] = c;
    // flux through face f couples rows f-1 and f
    op.diag[f - 1] -= c;
    op.sup[f - 1] += c;
    op.diag[f] -= c;
    op.sub[f] += c;
  }
  for (int i = 0; i < n; ++i) {
    const double wi = op.ip.w[i];
    op.sub[i] /= wi;
    op.diag[i] /= wi;
    op.sup[i] /= wi;
  }
  return op;
}

double dirichlet_form(const DiscreteOperator& op, const Grid& grid,
                      const DegeneracyModel& model, std::span<const double> u,
                      std::span<const double> v) {
  const int n = grid.n();
  const bool div = op.form == Form::divergence;
  double b = 0.0;
  for (int f = 1; f < n; ++f) {
    const double h = grid.nodes[f] - grid.nodes[f - 1];
    const double du = (u[f] - u[f - 1]) / h;
    const double dv = (v[f] - v[f - 1]) / h;
    b += (div ? model.a(grid.faces[f]) : 1.0) * du * dv * h;
  }
  return b;
}

double green_residual(const DiscreteOperator& op, const Grid& grid,
                      const DegeneracyModel& model, std::span<const double> u,
                      std::span<const double> v) {
  const auto au = op.apply(u);
  return std::fabs(op.ip.dot(au, v) + dirichlet_form(op, grid, model, u, v));
}

}  // namespace degpar
