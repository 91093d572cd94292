#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degpar {

enum class Form { divergence, nondivergence };

/// Weak: K < 1 with (x-x0) a' <= K a; strong: K in [1,2).
enum class Degeneracy { weak, strong };

std::string to_string(Form f);
std::string to_string(Degeneracy d);

/// Diffusion coefficient vanishing at a single interior point x0.
///
/// The prototype is a(x) = |x-x0|^K; custom coefficients must supply the
/// derivative explicitly (no numerical differentiation is ever applied to a).
struct DegeneracyModel {
  double x0 = 0.5;
  Form form = Form::divergence;
  double k_bound = 0.5;  // the K of the structural bound (x-x0) a' <= K a

  // power-law prototype when `exponent` is set, custom callables otherwise
  std::optional<double> exponent;
  std::function<double(double)> a_fn;
  std::function<double(double)> a_prime_fn;

  static DegeneracyModel power_law(double x0, double K, Form form);
  static DegeneracyModel custom(double x0, Form form,
                                std::function<double(double)> a,
                                std::function<double(double)> a_prime,
                                double k_bound);

  bool is_power_law() const { return exponent.has_value(); }
  bool has_derivative() const { return is_power_law() || bool(a_prime_fn); }

  double a(double x) const;
  double a_prime(double x) const;  // undefined at x0 for K<1; callers avoid x0
};

enum class Verdict { pass, fail, unverifiable };

struct ClauseResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::vector<double> witnesses;  // points violating the clause (fail only)
  std::string note;
};

struct HypothesisReport {
  std::vector<ClauseResult> clauses;
  std::map<std::string, double> constants;  // theta, Sigma, g0, h0, ...

  bool all_pass() const;
  const ClauseResult* find(const std::string& name) const;
};

/// Probe set on [0,1] excluding a symmetric window of half-width `margin`
/// around x0.
std::vector<double> probe_points(double x0, int count = 1001,
                                 double margin = 1e-6);

struct ClassifyResult {
  std::optional<Degeneracy> kind;
  std::string note;  // set when rejected (K <= 0 or K >= 2)
  bool accepted() const { return kind.has_value(); }
};

ClassifyResult classify(const DegeneracyModel& model);

HypothesisReport check_degeneracy_bound(const DegeneracyModel& model,
                                        const std::vector<double>& probes,
                                        double tol_rel = 1e-9);

HypothesisReport check_carleman_hypotheses(const DegeneracyModel& model);

/// Optional prototype pair (g, h) for the observability identities; when
/// absent and the model is a weak power law, the closed-form pair is used.
struct ObservabilityPair {
  std::function<double(double)> g;
  std::function<double(double, double)> h;  // h(x, B)
  double g0 = 1.0;
  double h0 = 1.0;
};

HypothesisReport check_observability_hypotheses(
    const DegeneracyModel& model,
    const std::optional<ObservabilityPair>& pair = std::nullopt);

}  // namespace degpar
