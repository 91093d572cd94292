#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "degpar/coefficients.hpp"

using namespace degpar;

TEST_CASE("power-law classification") {
  CHECK(*classify(DegeneracyModel::power_law(0.5, 0.5, Form::divergence)).kind ==
        Degeneracy::weak);
  CHECK(*classify(DegeneracyModel::power_law(0.3, 1.0, Form::divergence)).kind ==
        Degeneracy::strong);
  CHECK(*classify(DegeneracyModel::power_law(0.5, 1.9, Form::nondivergence)).kind ==
        Degeneracy::strong);

  SUBCASE("out-of-range exponents are rejected with a note") {
    const auto r2 = classify(DegeneracyModel::power_law(0.5, 2.0, Form::divergence));
    CHECK_FALSE(r2.accepted());
    CHECK_FALSE(r2.note.empty());
    CHECK_THROWS_AS(DegeneracyModel::power_law(0.5, -0.5, Form::divergence),
                    std::invalid_argument);
    CHECK_THROWS_AS(DegeneracyModel::power_law(0.5, 0.0, Form::divergence),
                    std::invalid_argument);
  }
}

TEST_CASE("structural degeneracy bound") {
  const auto probes = probe_points(0.5);
  CHECK(probes.size() >= 900);
  for (double x : probes) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    CHECK(std::fabs(x - 0.5) >= 1e-6 * 0.999);
  }

  SUBCASE("power law saturates its own bound") {
    const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
    CHECK(check_degeneracy_bound(model, probes).all_pass());
  }

  SUBCASE("understated k_bound is caught with witnesses") {
    // a = |x-x0|^{0.8} claims K = 0.3: (x-x0)a' = 0.8 a > 0.3 a everywhere
    const auto model = DegeneracyModel::custom(
        0.5, Form::divergence,
        [](double x) { return std::pow(std::fabs(x - 0.5), 0.8); },
        [](double x) {
          const double d = x - 0.5;
          return 0.8 * std::pow(std::fabs(d), -0.2) * (d >= 0 ? 1.0 : -1.0);
        },
        0.3);
    const auto rep = check_degeneracy_bound(model, probes);
    CHECK_FALSE(rep.all_pass());
    bool witnessed = false;
    for (const auto& c : rep.clauses)
      if (c.verdict == Verdict::fail && !c.witnesses.empty()) witnessed = true;
    CHECK(witnessed);
  }
}

TEST_CASE("Carleman hypothesis reports") {
  SUBCASE("weak power law passes and records theta = K") {
    const auto model = DegeneracyModel::power_law(0.5, 0.5, Form::divergence);
    const auto rep = check_carleman_hypotheses(model);
    CHECK(rep.all_pass());
    REQUIRE(rep.constants.count("theta") == 1);
    CHECK(rep.constants.at("theta") == doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("strong power law passes the extra structure clauses") {
    const auto rep = check_carleman_hypotheses(
        DegeneracyModel::power_law(0.3, 1.6, Form::divergence));
    CHECK(rep.all_pass());
  }

  SUBCASE("custom model without derivative bound has an unverifiable clause") {
    const auto model = DegeneracyModel::custom(
        0.5, Form::nondivergence,
        [](double x) { return std::fabs(x - 0.5); }, nullptr, 1.0);
    const auto rep = check_carleman_hypotheses(model);
    bool unverifiable = false;
    for (const auto& c : rep.clauses)
      if (c.verdict == Verdict::unverifiable) unverifiable = true;
    CHECK(unverifiable);
  }
}

TEST_CASE("observability prototype identity") {
  SUBCASE("weak power law, both forms, residual at 1e-10") {
    for (Form form : {Form::divergence, Form::nondivergence}) {
      const auto model = DegeneracyModel::power_law(0.5, 0.5, form);
      const auto rep = check_observability_hypotheses(model);
      CHECK(rep.all_pass());
      REQUIRE(rep.constants.count("max_residual") == 1);
      CHECK(rep.constants.at("max_residual") <= 1e-10);
    }
  }

  SUBCASE("strong degeneracy is vacuous") {
    const auto rep = check_observability_hypotheses(
        DegeneracyModel::power_law(0.5, 1.5, Form::divergence));
    CHECK(rep.all_pass());
  }

  SUBCASE("weak custom coefficient without a supplied pair is unverifiable") {
    const auto model = DegeneracyModel::custom(
        0.5, Form::divergence,
        [](double x) { return std::sqrt(std::fabs(x - 0.5)) * (1.0 + x); },
        [](double x) {
          const double d = x - 0.5;
          const double s = d >= 0 ? 1.0 : -1.0;
          return 0.5 * std::pow(std::fabs(d), -0.5) * s * (1.0 + x) +
                 std::sqrt(std::fabs(d));
        },
        0.9);
    const auto rep = check_observability_hypotheses(model);
    bool unverifiable = false;
    for (const auto& c : rep.clauses)
      if (c.verdict == Verdict::unverifiable) unverifiable = true;
    CHECK(unverifiable);
  }
}
