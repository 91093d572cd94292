#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degpar/coefficients.hpp"
#include "degpar/mesh.hpp"

namespace degpar {

/// Parse failure with the 1-based line where it happened.
struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

/// A weight constant that is either fixed or resolved from the model
/// ("auto" in the file).
struct AutoOrValue {
  bool automatic = true;
  double value = 0.0;

  static AutoOrValue fixed(double v) { return {false, v}; }
};

/// Fully typed experiment description. Defaults reproduce the reference
/// configuration; every field is overridable from the TOML file.
struct ExperimentConfig {
  // [model]
  double x0 = 0.5;
  double K = 0.5;
  Form form = Form::divergence;

  // [discretization]
  int n = 201;
  int nt = 400;
  double grading = 1.0;
  double T = 1.0;

  // [weights]
  AutoOrValue c1, c2, d1, d2;
  double R = 1.0;
  double s_min = 10.0, s_max = 1000.0;
  int s_count = 20;

  // [carleman]
  int ensemble = 20;
  std::uint64_t seed = 0;
  int max_mode = 8;
  std::optional<Interval> carleman_omega;

  // [control]
  Interval omega{0.4, 0.6};
  std::vector<double> epsilons{1e-6};

  // [output]
  std::string out_dir = "out";

  DegeneracyModel model() const;
  std::vector<double> s_grid() const;  // logarithmic from s_min to s_max
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Weight constants with every "auto" replaced by its numeric value
/// (c2 = 1.5 min_c2, d2 = 1.5 min_d2, c1/d1 = 1 unless pinned). Reports embed
/// these, never the "auto" markers.
struct ResolvedConstants {
  double c1 = 1.0, c2 = 0.0, d1 = 1.0, d2 = 0.0, R = 1.0;
  std::map<std::string, std::string> provenance;  // constant -> "auto"/"fixed"
};

ResolvedConstants resolve_constants(const ExperimentConfig& cfg);

}  // namespace degpar
