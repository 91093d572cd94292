#include "degpar/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "degpar/weights.hpp"

namespace degpar {

DegeneracyModel ExperimentConfig::model() const {
  return DegeneracyModel::power_law(x0, K, form);
}

std::vector<double> ExperimentConfig::s_grid() const {
  std::vector<double> s(s_count);
  if (s_count == 1) {
    s[0] = s_min;
    return s;
  }
  const double la = std::log10(s_min), lb = std::log10(s_max);
  for (int i = 0; i < s_count; ++i)
    s[i] = std::pow(10.0, la + (lb - la) * double(i) / double(s_count - 1));
  return s;
}

namespace {

struct RawValue {
  enum class Kind { number, string, boolean, array } kind;
  double num = 0.0;
  std::string str;
  bool flag = false;
  std::vector<double> arr;
  int line = 0;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

double parse_number(const std::string& tok, int line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ConfigError(line, "trailing characters after number '" + tok + "'");
  return v;
}

RawValue parse_value(const std::string& raw, int line) {
  RawValue v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError(line, "unterminated string");
    v.kind = RawValue::Kind::string;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = RawValue::Kind::boolean;
    v.flag = s == "true";
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(line, "unterminated array");
    v.kind = RawValue::Kind::array;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) v.arr.push_back(parse_number(tok, line));
    }
    return v;
  }
  v.kind = RawValue::Kind::number;
  v.num = parse_number(s, line);
  return v;
}

using Table = std::map<std::string, RawValue>;

std::map<std::string, Table> parse_toml_subset(const std::string& text) {
  std::map<std::string, Table> sections;
  std::string current;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(lineno, "unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty()) throw ConfigError(lineno, "empty section name");
      sections[current];
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (sections[current].count(key))
      throw ConfigError(lineno, "duplicate key '" + key + "'");
    sections[current][key] = parse_value(s.substr(eq + 1), lineno);
  }
  return sections;
}

double get_number(const Table& t, const std::string& key, double fallback) {
  auto it = t.find(key);
  if (it == t.end()) return fallback;
  if (it->second.kind != RawValue::Kind::number)
    throw ConfigError(it->second.line, "'" + key + "' must be a number");
  return it->second.num;
}

AutoOrValue get_auto(const Table& t, const std::string& key) {
  auto it = t.find(key);
  if (it == t.end()) return {};
  if (it->second.kind == RawValue::Kind::string) {
    if (it->second.str != "auto")
      throw ConfigError(it->second.line,
                        "'" + key + "' must be a number or \"auto\"");
    return {};
  }
  if (it->second.kind != RawValue::Kind::number)
    throw ConfigError(it->second.line, "'" + key + "' must be a number or \"auto\"");
  return AutoOrValue::fixed(it->second.num);
}

Interval get_interval(const RawValue& v, const std::string& key) {
  if (v.kind != RawValue::Kind::array || v.arr.size() != 2 || v.arr[0] >= v.arr[1])
    throw ConfigError(v.line, "'" + key + "' must be [lo, hi] with lo < hi");
  return {v.arr[0], v.arr[1]};
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  const auto sections = parse_toml_subset(text);
  static const std::map<std::string, std::vector<std::string>> known = {
      {"model", {"x0", "K", "form"}},
      {"discretization", {"n", "nt", "grading", "T"}},
      {"weights", {"c1", "c2", "d1", "d2", "R", "s_min", "s_max", "s_count"}},
      {"carleman", {"ensemble", "seed", "max_mode", "omega"}},
      {"control", {"omega", "epsilon"}},
      {"output", {"dir"}},
  };
  for (const auto& [name, table] : sections) {
    auto it = known.find(name);
    if (it == known.end()) {
      int line = table.empty() ? 0 : table.begin()->second.line;
      throw ConfigError(line, "unknown section [" + name + "]");
    }
    for (const auto& [key, val] : table) {
      bool ok = false;
      for (const auto& k : it->second) ok = ok || k == key;
      if (!ok)
        throw ConfigError(val.line, "unknown key '" + key + "' in [" + name + "]");
    }
  }

  ExperimentConfig cfg;
  auto section = [&](const std::string& name) -> const Table& {
    static const Table empty;
    auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
  };

  {
    const Table& t = section("model");
    cfg.x0 = get_number(t, "x0", cfg.x0);
    cfg.K = get_number(t, "K", cfg.K);
    auto it = t.find("form");
    if (it != t.end()) {
      if (it->second.kind != RawValue::Kind::string)
        throw ConfigError(it->second.line, "'form' must be a string");
      if (it->second.str == "divergence")
        cfg.form = Form::divergence;
      else if (it->second.str == "nondivergence")
        cfg.form = Form::nondivergence;
      else
        throw ConfigError(it->second.line,
                          "'form' must be \"divergence\" or \"nondivergence\"");
    }
    if (!(cfg.x0 > 0.0 && cfg.x0 < 1.0))
      throw ConfigError(0, "x0 must lie strictly inside (0,1)");
  }
  {
    const Table& t = section("discretization");
    cfg.n = int(get_number(t, "n", cfg.n));
    cfg.nt = int(get_number(t, "nt", cfg.nt));
    cfg.grading = get_number(t, "grading", cfg.grading);
    cfg.T = get_number(t, "T", cfg.T);
    if (cfg.n < 16) throw ConfigError(0, "n must be at least 16");
    if (cfg.nt < 2) throw ConfigError(0, "nt must be at least 2");
    if (cfg.T <= 0.0) throw ConfigError(0, "T must be positive");
  }
  {
    const Table& t = section("weights");
    cfg.c1 = get_auto(t, "c1");
    cfg.c2 = get_auto(t, "c2");
    cfg.d1 = get_auto(t, "d1");
    cfg.d2 = get_auto(t, "d2");
    cfg.R = get_number(t, "R", cfg.R);
    cfg.s_min = get_number(t, "s_min", cfg.s_min);
    cfg.s_max = get_number(t, "s_max", cfg.s_max);
    cfg.s_count = int(get_number(t, "s_count", cfg.s_count));
    if (!(cfg.s_min > 0.0 && cfg.s_max >= cfg.s_min) || cfg.s_count < 1)
      throw ConfigError(0, "s grid must satisfy 0 < s_min <= s_max, s_count >= 1");
  }
  {
    const Table& t = section("carleman");
    cfg.ensemble = int(get_number(t, "ensemble", cfg.ensemble));
    cfg.seed = std::uint64_t(get_number(t, "seed", double(cfg.seed)));
    cfg.max_mode = int(get_number(t, "max_mode", cfg.max_mode));
    auto it = t.find("omega");
    if (it != t.end()) cfg.carleman_omega = get_interval(it->second, "omega");
    if (cfg.ensemble < 1) throw ConfigError(0, "ensemble must be at least 1");
  }
  {
    const Table& t = section("control");
    auto it = t.find("omega");
    if (it != t.end()) cfg.omega = get_interval(it->second, "omega");
    it = t.find("epsilon");
    if (it != t.end()) {
      if (it->second.kind == RawValue::Kind::number)
        cfg.epsilons = {it->second.num};
      else if (it->second.kind == RawValue::Kind::array && !it->second.arr.empty())
        cfg.epsilons = it->second.arr;
      else
        throw ConfigError(it->second.line,
                          "'epsilon' must be a number or a nonempty array");
      for (double e : cfg.epsilons)
        if (e <= 0.0)
          throw ConfigError(it->second.line, "epsilon values must be positive");
    }
  }
  {
    const Table& t = section("output");
    auto it = t.find("dir");
    if (it != t.end()) {
      if (it->second.kind != RawValue::Kind::string)
        throw ConfigError(it->second.line, "'dir' must be a string");
      cfg.out_dir = it->second.str;
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ResolvedConstants resolve_constants(const ExperimentConfig& cfg) {
  const auto model = cfg.model();
  ResolvedConstants rc;
  rc.R = cfg.R;
  rc.c1 = cfg.c1.automatic ? 1.0 : cfg.c1.value;
  rc.c2 = cfg.c2.automatic ? 1.5 * min_c2(model) : cfg.c2.value;
  rc.d1 = cfg.d1.automatic ? 1.0 : cfg.d1.value;
  rc.d2 = cfg.d2.automatic ? 1.5 * min_d2(model, cfg.R) : cfg.d2.value;
  rc.provenance["c1"] = cfg.c1.automatic ? "auto" : "fixed";
  rc.provenance["c2"] = cfg.c2.automatic ? "auto" : "fixed";
  rc.provenance["d1"] = cfg.d1.automatic ? "auto" : "fixed";
  rc.provenance["d2"] = cfg.d2.automatic ? "auto" : "fixed";
  return rc;
}

}  // namespace degpar
