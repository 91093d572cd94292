#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "degpar/quadrature.hpp"
#include "degpar/weights.hpp"

using namespace degpar;

TEST_CASE("time weight") {
  CHECK(theta(0.5, 1.0) == doctest::Approx(256.0).epsilon(1e-15));
  CHECK(theta(0.1, 1.0) == doctest::Approx(15241.5790275872580).epsilon(1e-14));
  CHECK(theta(0.25, 1.0) == theta(0.75, 1.0));
  CHECK_THROWS_AS(theta(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(theta(1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(theta(-0.1, 1.0), std::domain_error);
}

TEST_CASE("admissibility floors against independently computed values") {
  const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
  CHECK(min_c2(model) == doctest::Approx(0.23570226039551584).epsilon(1e-14));
  CHECK(min_d2(model, 1.0) ==
        doctest::Approx(0.30264769311859478).epsilon(1e-14));

  const auto off = DegeneracyModel::power_law(0.3, 1.5, Form::divergence);
  // larger side dominates: (1-0.3)^2/(a(1)(2-K)) with a(1)=0.7^1.5
  const double expect = 0.49 / (std::pow(0.7, 1.5) * 0.5);
  CHECK(min_c2(off) == doctest::Approx(expect).epsilon(1e-14));

  CHECK(min_c2(DegeneracyModel::power_law(0.5, 1.99, Form::divergence)) > 0.0);
  CHECK_THROWS_AS(
      min_c2(DegeneracyModel::custom(
          0.5, Form::divergence, [](double x) { return std::fabs(x - 0.5); },
          nullptr, 2.5)),
      std::domain_error);
}

TEST_CASE("divergence weight psi") {
  const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
  const auto w = DivergenceWeights::with_defaults(model);
  CHECK(w.c2 == doctest::Approx(1.5 * min_c2(model)).epsilon(1e-15));
  CHECK(w.psi(1.0) == doctest::Approx(-0.11785113019775792).epsilon(1e-13));
  CHECK(w.psi(model.x0) == doctest::Approx(-w.c1 * w.c2).epsilon(1e-15));

  SUBCASE("band -c1 c2 <= psi < 0 on a dense scan") {
    for (int i = 0; i <= 10000; ++i) {
      const double x = double(i) / 10000.0;
      const double v = w.psi(x);
      CHECK(v < 0.0);
      CHECK(v >= -w.c1 * w.c2 - 1e-15);
    }
  }

  SUBCASE("inadmissible c2 is rejected") {
    DivergenceWeights bad{model, 1.0, 0.9 * min_c2(model)};
    CHECK_THROWS_AS(bad.psi(0.7), std::invalid_argument);
  }

  SUBCASE("closed form matches the generic quadrature path") {
    const auto generic = DegeneracyModel::custom(
        0.5, Form::divergence,
        [](double x) { return std::sqrt(std::fabs(x - 0.5)); },
        [](double x) {
          const double d = x - 0.5;
          return 0.5 * std::pow(std::fabs(d), -0.5) * (d >= 0 ? 1.0 : -1.0);
        },
        0.5);
    DivergenceWeights wg{generic, w.c1, w.c2};
    for (double x : {0.0, 0.2, 0.49, 0.51, 0.8, 1.0})
      CHECK(wg.psi(x) == doctest::Approx(w.psi(x)).epsilon(1e-10));
  }
}

TEST_CASE("non-divergence weight mu") {
  const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::nondivergence);
  const auto w = NonDivergenceWeights::with_defaults(model, 1.0);
  CHECK(w.mu(0.0) == doctest::Approx(-0.19087756131834593).epsilon(1e-12));
  CHECK(w.mu(model.x0) == doctest::Approx(-w.d1 * w.d2).epsilon(1e-15));
  for (int i = 0; i <= 2000; ++i) {
    const double x = double(i) / 2000.0;
    const double v = w.mu(x);
    CHECK(v < 0.0);
    CHECK(v >= -w.d1 * w.d2 - 1e-15);
  }
  DivergenceWeights psi_ref{
      DegeneracyModel::power_law(0.5, 0.5, Form::divergence), 1.0,
      1.5 * min_c2(model)};
  // R -> 0 collapses mu onto psi for matched constants
  NonDivergenceWeights flat{model, 1.0, psi_ref.c2, 0.0};
  for (double x : {0.1, 0.5, 0.9})
    CHECK(flat.mu(x) == doctest::Approx(psi_ref.psi(x)).epsilon(1e-11));
}

TEST_CASE("observability lower bound for c1") {
  const auto weak = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
  const double c2 = 1.5 * min_c2(weak);
  const double b1 = c1_lower_bound_observability(weak, c2, 1.0, 2.0, 0.75);
  const double b2 = c1_lower_bound_observability(weak, c2, 1.0, 3.0, 0.75);
  CHECK(b1 > 0.0);
  CHECK(b2 > b1);  // increasing in frak_c

  const auto strong = DegeneracyModel::power_law(0.5, 1.5, Form::divergence);
  const double denom =
      1.5 * min_c2(strong) - 0.25 / (std::pow(0.5, 1.5) * 0.5);
  CHECK(c1_lower_bound_observability(strong, 1.5 * min_c2(strong), 1.0, 2.0,
                                     0.75) ==
        doctest::Approx(1.0 / denom).epsilon(1e-12));

  CHECK_THROWS_AS(
      c1_lower_bound_observability(weak, 0.5 * min_c2(weak), 1.0, 2.0, 0.75),
      std::invalid_argument);
}

TEST_CASE("reflection extends weights and fields evenly") {
  const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
  CHECK(reflect_coordinate(-0.3) == doctest::Approx(0.3));
  CHECK(reflect_coordinate(1.2) == doctest::Approx(0.8));
  CHECK(reflect_coordinate(0.4) == 0.4);

  const auto w = DivergenceWeights::with_defaults(model);
  for (double x : {0.05, 0.3, 0.45}) {
    CHECK(reflect_psi(w, -x) == doctest::Approx(reflect_psi(w, x)).epsilon(1e-15));
    CHECK(reflect_psi(w, 1.0 + x) ==
          doctest::Approx(reflect_psi(w, 1.0 - x)).epsilon(1e-15));
  }

  const auto g = build_grid(33, model);
  std::vector<double> field(g.n());
  for (int i = 0; i < g.n(); ++i) field[i] = std::sin(3.0 * g.nodes[i]);
  const auto ext = reflect_field(g, field);
  CHECK(ext.nodes.size() == size_t(3 * g.n() - 2));
  CHECK(ext.values.size() == ext.nodes.size());
  for (size_t i = 1; i < ext.nodes.size(); ++i) CHECK(ext.nodes[i] > ext.nodes[i - 1]);
  CHECK(ext.nodes.front() == doctest::Approx(-1.0));
  CHECK(ext.nodes.back() == doctest::Approx(2.0));
  // evenness across both mirrors
  const int n = g.n();
  for (int i = 1; i < n; ++i) {
    CHECK(ext.values[n - 1 - i] == field[i]);           // about x = 0
    CHECK(ext.values[(2 * n - 2) + i] == field[n - 1 - i]);  // about x = 1
  }
}

TEST_CASE("C2 cutoff") {
  const auto cut = build_cutoff({0.4, 0.6}, {0.3, 0.7});
  CHECK(cut.value(0.5) == 1.0);
  CHECK(cut.value(0.41) == 1.0);
  CHECK(cut.value(0.2) == 0.0);
  CHECK(cut.value(0.75) == 0.0);
  CHECK(cut.value(0.35) > 0.0);
  CHECK(cut.value(0.35) < 1.0);

  // finite-difference agreement of the supplied derivatives
  const double fd_h = 1e-6;
  for (double x : {0.33, 0.36, 0.63, 0.67}) {
    const double d1_fd = (cut.value(x + fd_h) - cut.value(x - fd_h)) / (2 * fd_h);
    CHECK(cut.d1(x) == doctest::Approx(d1_fd).epsilon(1e-6));
    const double d2_fd =
        (cut.d1(x + fd_h) - cut.d1(x - fd_h)) / (2 * fd_h);
    CHECK(cut.d2(x) == doctest::Approx(d2_fd).epsilon(1e-5));
  }
  // derivatives vanish where the cutoff is flat
  CHECK(cut.d1(0.5) == 0.0);
  CHECK(cut.d2(0.25) == 0.0);

  CHECK_THROWS_AS(build_cutoff({0.3, 0.6}, {0.35, 0.7}), std::invalid_argument);
}

TEST_CASE("companion monotone-quotient structure") {
  CHECK(monotone_quotient_scan(DegeneracyModel::power_law(0.5, 1.5, Form::divergence)));
  CHECK(monotone_quotient_scan(DegeneracyModel::power_law(0.3, 0.5, Form::divergence)));
  const auto wiggly = DegeneracyModel::custom(
      0.5, Form::divergence,
      [](double x) {
        const double d = x - 0.5;
        return d * d * (2.0 + std::sin(40.0 * x));
      },
      nullptr, 1.9);
  CHECK_FALSE(monotone_quotient_scan(wiggly));
}
