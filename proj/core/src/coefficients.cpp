#include "degpar/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degpar {

std::string to_string(Form f) {
  return f == Form::divergence ? "divergence" : "nondivergence";
}

std::string to_string(Degeneracy d) {
  return d == Degeneracy::weak ? "weak" : "strong";
}

DegeneracyModel DegeneracyModel::power_law(double x0, double K, Form form) {
  if (x0 <= 0.0 || x0 >= 1.0) throw std::invalid_argument("x0 must lie in (0,1)");
  if (K <= 0.0) throw std::invalid_argument("power-law exponent must be positive");
  DegeneracyModel m;
  m.x0 = x0;
  m.form = form;
  m.exponent = K;
  m.k_bound = K;
  return m;
}

DegeneracyModel DegeneracyModel::custom(double x0, Form form,
                                        std::function<double(double)> a,
                                        std::function<double(double)> a_prime,
                                        double k_bound) {
  if (x0 <= 0.0 || x0 >= 1.0) throw std::invalid_argument("x0 must lie in (0,1)");
  if (!a) throw std::invalid_argument("custom model requires a coefficient");
  DegeneracyModel m;
  m.x0 = x0;
  m.form = form;
  m.a_fn = std::move(a);
  m.a_prime_fn = std::move(a_prime);
  m.k_bound = k_bound;
  return m;
}

double DegeneracyModel::a(double x) const {
  if (exponent) return std::pow(std::fabs(x - x0), *exponent);
  return a_fn(x);
}

double DegeneracyModel::a_prime(double x) const {
  if (exponent) {
    const double d = x - x0;
    if (d == 0.0) return 0.0;
    const double K = *exponent;
    return K * std::pow(std::fabs(d), K - 1.0) * (d > 0 ? 1.0 : -1.0);
  }
  if (!a_prime_fn) throw std::logic_error("custom model has no derivative");
  return a_prime_fn(x);
}

bool HypothesisReport::all_pass() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) {
    return c.verdict == Verdict::pass;
  });
}

const ClauseResult* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : clauses)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<double> probe_points(double x0, int count, double margin) {
  std::vector<double> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double x = double(i) / double(count - 1);
    if (std::fabs(x - x0) > margin) pts.push_back(x);
  }
  return pts;
}

ClassifyResult classify(const DegeneracyModel& model) {
  const double K = model.is_power_law() ? *model.exponent : model.k_bound;
  if (K <= 0.0)
    return {std::nullopt, "K <= 0: not a degenerate operator in the sense used here"};
  if (K >= 2.0)
    return {std::nullopt, "K >= 2: outside the controllable range (null controllability fails)"};
  return {K < 1.0 ? Degeneracy::weak : Degeneracy::strong, ""};
}

HypothesisReport check_degeneracy_bound(const DegeneracyModel& model,
                                        const std::vector<double>& probes,
                                        double tol_rel) {
  HypothesisReport rep;
  ClauseResult clause{"degeneracy_bound", Verdict::pass, {}, ""};
  if (!model.has_derivative()) {
    clause.verdict = Verdict::unverifiable;
    clause.note = "custom model without derivative";
    rep.clauses.push_back(clause);
    return rep;
  }
  for (double x : probes) {
    const double av = model.a(x);
    const double lhs = (x - model.x0) * model.a_prime(x) - model.k_bound * av;
    if (lhs > tol_rel * av) {
      clause.verdict = Verdict::fail;
      clause.witnesses.push_back(x);
    }
  }
  rep.clauses.push_back(clause);
  return rep;
}

namespace {

// Scan monotonicity of x -> a(x)/|x-x0|^theta on each side of x0.
bool side_monotone(const DegeneracyModel& model, double theta, bool left,
                   std::vector<double>& witnesses) {
  const int count = 1001;
  const double margin = 1e-6;
  const double lo = left ? 0.0 : model.x0 + margin;
  const double hi = left ? model.x0 - margin : 1.0;
  double prev = 0.0;
  bool ok = true, have_prev = false;
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * double(i) / double(count - 1);
    const double val = model.a(x) / std::pow(std::fabs(x - model.x0), theta);
    if (have_prev) {
      // nonincreasing on the left, nondecreasing on the right
      const double slack = 1e-9 * (std::fabs(prev) + std::fabs(val));
      const bool bad = left ? (val > prev + slack) : (val < prev - slack);
      if (bad) {
        ok = false;
        witnesses.push_back(x);
      }
    }
    prev = val;
    have_prev = true;
  }
  return ok;
}

}  // namespace

HypothesisReport check_carleman_hypotheses(const DegeneracyModel& model) {
  HypothesisReport rep;
  const auto cls = classify(model);

  {
    ClauseResult c{"degenerate_in_range", Verdict::pass, {}, cls.note};
    if (!cls.accepted()) c.verdict = Verdict::fail;
    rep.clauses.push_back(c);
    if (!cls.accepted()) return rep;
  }

  const double K = model.is_power_law() ? *model.exponent : model.k_bound;
  const double theta = K;  // for the prototype the monotonicity exponent is K
  rep.constants["theta"] = theta;

  if (model.form == Form::divergence) {
    // regularity clause: W^{1,1} (weak) / W^{1,infty} (strong)
    ClauseResult reg{"regularity", Verdict::pass, {}, ""};
    if (!model.is_power_law()) {
      reg.verdict = Verdict::unverifiable;
      reg.note = "regularity class not verifiable numerically for non-closed-form a";
    }
    rep.clauses.push_back(reg);

    ClauseResult mono{"a_over_dist_theta_monotone", Verdict::pass, {}, ""};
    if (cls.kind == Degeneracy::strong && K > 4.0 / 3.0) {
      if (model.is_power_law()) {
        // a/|x-x0|^theta is identically 1
      } else {
        if (!side_monotone(model, theta, true, mono.witnesses) ||
            !side_monotone(model, theta, false, mono.witnesses))
          mono.verdict = Verdict::fail;
      }
    } else {
      mono.note = "only required for strong degeneracy with K > 4/3";
    }
    rep.clauses.push_back(mono);

    ClauseResult sig{"aprime_sigma_bound", Verdict::pass, {}, ""};
    if (cls.kind == Degeneracy::strong && K > 1.5) {
      if (!model.has_derivative()) {
        sig.verdict = Verdict::unverifiable;
        sig.note = "custom model without derivative";
      } else {
        // |a'| <= Sigma |x-x0|^{2 theta - 3}; record the tightest Sigma
        double sigma = 0.0;
        for (double x : probe_points(model.x0)) {
          const double bound = std::pow(std::fabs(x - model.x0), 2.0 * theta - 3.0);
          sigma = std::max(sigma, std::fabs(model.a_prime(x)) / bound);
        }
        if (std::isfinite(sigma)) {
          rep.constants["Sigma"] = sigma;
        } else {
          sig.verdict = Verdict::fail;
        }
      }
    } else {
      sig.note = "only required for strong degeneracy with K > 3/2";
    }
    rep.clauses.push_back(sig);
  } else {
    // (x-x0) a'/a bounded with bounded derivative
    ClauseResult q{"quotient_w1inf", Verdict::pass, {}, ""};
    if (model.is_power_law()) {
      // (x-x0) a'/a is identically K
      rep.constants["quotient_sup"] = K;
    } else if (!model.has_derivative()) {
      q.verdict = Verdict::unverifiable;
      q.note = "custom model without derivative";
    } else {
      double sup = 0.0;
      for (double x : probe_points(model.x0)) {
        const double val = (x - model.x0) * model.a_prime(x) / model.a(x);
        if (!std::isfinite(val) || std::fabs(val) > 1e8) {
          q.verdict = Verdict::fail;
          q.witnesses.push_back(x);
        }
        sup = std::max(sup, std::fabs(val));
      }
      rep.constants["quotient_sup"] = sup;
      if (q.verdict == Verdict::pass) {
        q.verdict = Verdict::unverifiable;
        q.note = "quotient bounded on probes; derivative regularity not checked numerically";
      }
    }
    rep.clauses.push_back(q);

    ClauseResult mono{"a_over_dist_theta_monotone", Verdict::pass, {}, ""};
    if (K >= 0.5) {
      if (!model.is_power_law()) {
        if (!side_monotone(model, theta, true, mono.witnesses) ||
            !side_monotone(model, theta, false, mono.witnesses))
          mono.verdict = Verdict::fail;
      }
    } else {
      mono.note = "only required for K >= 1/2";
    }
    rep.clauses.push_back(mono);
  }
  return rep;
}

HypothesisReport check_observability_hypotheses(
    const DegeneracyModel& model, const std::optional<ObservabilityPair>& pair) {
  HypothesisReport rep;
  const auto cls = classify(model);
  if (!cls.accepted()) {
    rep.clauses.push_back({"degenerate_in_range", Verdict::fail, {}, cls.note});
    return rep;
  }
  if (cls.kind == Degeneracy::strong) {
    rep.clauses.push_back(
        {"prototype_identity", Verdict::pass, {}, "vacuous for strong degeneracy"});
    return rep;
  }

  ObservabilityPair gh;
  const double sign_flip = (model.form == Form::divergence) ? -1.0 : +1.0;
  if (pair) {
    gh = *pair;
  } else if (model.is_power_law()) {
    const double alpha = *model.exponent;
    const double x0 = model.x0;
    gh.g = [](double) { return 1.0; };
    gh.g0 = gh.h0 = 1.0;
    gh.h = [alpha, x0, sign_flip](double x, double B) {
      const double d = std::fabs(x - x0);
      const double sgn = (x > x0) ? 1.0 : -1.0;
      return std::pow(d, alpha / 2.0 - 1.0) *
             (sign_flip * (alpha / 2.0) * sgn * (B + 1.0 - x) + d);
    };
  } else {
    rep.clauses.push_back({"prototype_identity", Verdict::unverifiable, {},
                           "weak custom model with no supplied (g,h) pair"});
    return rep;
  }
  rep.constants["g0"] = gh.g0;
  rep.constants["h0"] = gh.h0;

  // residual of the identity  sign * a'/(2 sqrt a) (int_x^B g + h0) + sqrt(a) g = h(x,B)
  ClauseResult c{"prototype_identity", Verdict::pass, {}, ""};
  const int pairs = 200;
  double max_res = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const bool left = (i % 2 == 0);
    const double u = (0.5 + double(i / 2)) / double(pairs / 2);
    double x, B;
    if (left) {
      x = (model.x0 - 1e-3) * 0.5 * u;           // x < B < x0
      B = x + (model.x0 - 1e-3 - x) * 0.75;
    } else {
      B = 1.0 - (1.0 - model.x0 - 1e-3) * 0.5 * u;  // x0 < x < B
      x = B - (B - model.x0 - 1e-3) * 0.75;
    }
    // int_x^B g with g == 1 unless a custom pair supplies otherwise
    double int_g = 0.0;
    {
      const int nq = 64;
      const double hq = (B - x) / nq;
      for (int k = 0; k < nq; ++k) int_g += gh.g(x + (k + 0.5) * hq) * hq;
    }
    const double av = model.a(x);
    const double lhs = sign_flip * model.a_prime(x) / (2.0 * std::sqrt(av)) *
                           (int_g + gh.h0) +
                       std::sqrt(av) * gh.g(x);
    const double res = std::fabs(lhs - gh.h(x, B));
    max_res = std::max(max_res, res);
    if (res > 1e-10) {
      c.verdict = Verdict::fail;
      c.witnesses.push_back(x);
    }
  }
  rep.constants["max_residual"] = max_res;
  rep.clauses.push_back(c);
  return rep;
}

}  // namespace degpar
