#include "czlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "czlab/errors.hpp"
#include "czlab/rng.hpp"

namespace czlab {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names{
      {Experiment::lemma, "lemma"},   {Experiment::ek, "ek"},         {Experiment::size, "size"},
      {Experiment::holder, "holder"}, {Experiment::single_shift, "single-shift"},
      {Experiment::fubini, "fubini"}, {Experiment::norm, "norm"}};
  return names;
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for '" + key + "': " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for '" + key + "': " + v);
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v[0] == '-') throw ConfigError("bad unsigned integer for '" + key + "': " + v);
  try {
    std::size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("bad unsigned integer for '" + key + "': " + v);
  }
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += f(xs[i]);
  }
  return s;
}

std::string table_text(const ShiftFamilySpec& spec) {
  std::string s;
  for (const auto& [mn, v] : spec.lambda_table) {
    if (!s.empty()) s += ",";
    s += std::to_string(mn.first) + ":" + std::to_string(mn.second) + ":" + fmt_double(v);
  }
  return s;
}

std::map<std::pair<int, int>, double> parse_table(const std::string& v) {
  std::map<std::pair<int, int>, double> table;
  for (const auto& entry : split(v, ',')) {
    const auto parts = split(entry, ':');
    if (parts.size() != 3) throw ConfigError("lambda_table entries are m:n:value, got " + entry);
    table[{static_cast<int>(to_int("lambda_table", parts[0])), static_cast<int>(to_int("lambda_table", parts[1]))}] =
        to_double("lambda_table", parts[2]);
  }
  return table;
}

using Entry = std::pair<std::string, std::string>;

void spec_entries(std::vector<Entry>& out, const ShiftFamilySpec& spec) {
  out.emplace_back("delta", fmt_double(spec.delta));
  out.emplace_back("complexity_cap", std::to_string(spec.complexity_cap));
  out.emplace_back("lambda_rule", to_string(spec.lambda_rule));
  out.emplace_back("lambda_table", table_text(spec));
  out.emplace_back("family", to_string(spec.family));
  out.emplace_back("coeff_seed", std::to_string(spec.coeff_seed));
}

std::string render(const std::vector<Entry>& entries) {
  std::string s;
  for (const auto& [k, v] : entries) s += k + " = " + v + "\n";
  return s;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [x, name] : experiment_names())
    if (x == e) return name;
  throw ConfigError("unknown experiment");
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [x, n] : experiment_names())
    if (n == name || (name == "single_shift" && x == Experiment::single_shift)) return x;
  throw ConfigError("unknown experiment '" + name + "' (lemma, ek, size, holder, single-shift, fubini, norm)");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all{Experiment::lemma,  Experiment::ek,     Experiment::size,
                                           Experiment::holder, Experiment::single_shift, Experiment::fubini,
                                           Experiment::norm};
  return all;
}

double Thresholds::growth(double delta) const { return growth_factor > 0.0 ? growth_factor : std::exp2(delta); }

ScaleWindow default_window(Experiment e, int dim) {
  ScaleWindow w;
  w.dim = dim;
  switch (e) {
    case Experiment::fubini:
      w.k_min = dim == 1 ? -7 : -4;
      w.k_max = 0;
      break;
    case Experiment::norm:
      w.k_min = dim == 1 ? -8 : -4;
      w.k_max = 0;
      break;
    default:
      break;
  }
  return w;
}

ScaleWindow RunConfig::window() const {
  ScaleWindow w = default_window(experiment, dim);
  if (k_min) w.k_min = *k_min;
  if (k_max) w.k_max = *k_max;
  return w;
}

void RunConfig::validate() const {
  const ScaleWindow w = window();
  w.validate();
  spec.validate();
  if (n_samples == 0 && experiment != Experiment::fubini && experiment != Experiment::norm &&
      experiment != Experiment::single_shift)
    throw ConfigError("n_samples must be positive");
  if (!(thresholds.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (thresholds.slope_slack < 0.0) throw ConfigError("slope_slack must be non-negative");
  if (thresholds.growth_window < 1) throw ConfigError("growth_window must be at least 1");
  for (double t : taus)
    if (t < 0.0 || t > 0.5) throw ConfigError("tau must lie in [0, 1/2]");
  if (size_pairs < 2) throw ConfigError("size_pairs must be at least 2");
  if (!(size_decades > 0.0)) throw ConfigError("size_decades must be positive");
  if (ek_offset_units <= 0) throw ConfigError("ek_offset_units must be positive");
  if (!(holder_separation > 0.0)) throw ConfigError("holder_separation must be positive");
  if (instances < 1) throw ConfigError("instances must be positive");
  if (shift_m < 0 || shift_n < 0) throw ConfigError("shift_m and shift_n must be non-negative");
  if (experiment == Experiment::single_shift && !admits(w, shift_m, shift_n))
    throw ConfigError("window cannot hold a shift of complexity (" + std::to_string(shift_m) + ", " +
                      std::to_string(shift_n) + ")");
  if (complexity_pairs(spec, w).empty()) throw ConfigError("window admits no complexity pair under the cap");
}

std::string canonical_spec_text(const ScaleWindow& window, const ShiftFamilySpec& spec) {
  std::vector<Entry> e{{"dim", std::to_string(window.dim)},
                       {"k_min", std::to_string(window.k_min)},
                       {"k_max", std::to_string(window.k_max)}};
  spec_entries(e, spec);
  return render(e);
}

std::string spec_digest(const ScaleWindow& window, const ShiftFamilySpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_spec_text(window, spec))));
  return buf;
}

std::string serialize(const RunConfig& c) {
  std::vector<Entry> e;
  e.emplace_back("experiment", to_string(c.experiment));
  e.emplace_back("dim", std::to_string(c.dim));
  e.emplace_back("k_min", c.k_min ? std::to_string(*c.k_min) : "");
  e.emplace_back("k_max", c.k_max ? std::to_string(*c.k_max) : "");
  spec_entries(e, c.spec);
  e.emplace_back("n_samples", std::to_string(c.n_samples));
  e.emplace_back("seed", std::to_string(c.seed));
  e.emplace_back("output", c.output);
  e.emplace_back("threads", std::to_string(c.threads));
  e.emplace_back("sigma", fmt_double(c.thresholds.sigma));
  e.emplace_back("slope_slack", fmt_double(c.thresholds.slope_slack));
  e.emplace_back("growth_factor", fmt_double(c.thresholds.growth_factor));
  e.emplace_back("growth_window", std::to_string(c.thresholds.growth_window));
  e.emplace_back("holder_ratio_budget", fmt_double(c.thresholds.holder_ratio_budget));
  e.emplace_back("lemma_scale", std::to_string(c.lemma_scale));
  e.emplace_back("taus", join(c.taus, fmt_double));
  e.emplace_back("ek_offset_units", std::to_string(c.ek_offset_units));
  e.emplace_back("ek_scales", join(c.ek_scales, [](int k) { return std::to_string(k); }));
  e.emplace_back("size_pairs", std::to_string(c.size_pairs));
  e.emplace_back("size_decades", fmt_double(c.size_decades));
  e.emplace_back("holder_scales", join(c.holder_scales, [](int k) { return std::to_string(k); }));
  e.emplace_back("holder_separation", fmt_double(c.holder_separation));
  e.emplace_back("shift_m", std::to_string(c.shift_m));
  e.emplace_back("shift_n", std::to_string(c.shift_n));
  e.emplace_back("boundary_scale", std::to_string(c.boundary_scale));
  e.emplace_back("instances", std::to_string(c.instances));
  return render(e);
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  auto ints = [](const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(to_int(key, s)));
    return out;
  };
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"experiment", [&](auto&, auto& v) { c.experiment = parse_experiment(v); }},
      {"dim", [&](auto& k, auto& v) { c.dim = static_cast<int>(to_int(k, v)); }},
      {"k_min", [&](auto& k, auto& v) { c.k_min = v.empty() ? std::nullopt : std::optional<int>(to_int(k, v)); }},
      {"k_max", [&](auto& k, auto& v) { c.k_max = v.empty() ? std::nullopt : std::optional<int>(to_int(k, v)); }},
      {"delta", [&](auto& k, auto& v) { c.spec.delta = to_double(k, v); }},
      {"complexity_cap", [&](auto& k, auto& v) { c.spec.complexity_cap = static_cast<int>(to_int(k, v)); }},
      {"lambda_rule", [&](auto&, auto& v) { c.spec.lambda_rule = parse_lambda_rule(v); }},
      {"lambda_table", [&](auto&, auto& v) { c.spec.lambda_table = parse_table(v); }},
      {"family", [&](auto&, auto& v) { c.spec.family = parse_coefficient_family(v); }},
      {"coeff_seed", [&](auto& k, auto& v) { c.spec.coeff_seed = to_uint(k, v); }},
      {"n_samples", [&](auto& k, auto& v) { c.n_samples = to_uint(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_uint(k, v); }},
      {"output", [&](auto&, auto& v) { c.output = v; }},
      {"threads", [&](auto& k, auto& v) { c.threads = static_cast<unsigned>(to_uint(k, v)); }},
      {"sigma", [&](auto& k, auto& v) { c.thresholds.sigma = to_double(k, v); }},
      {"slope_slack", [&](auto& k, auto& v) { c.thresholds.slope_slack = to_double(k, v); }},
      {"growth_factor", [&](auto& k, auto& v) { c.thresholds.growth_factor = to_double(k, v); }},
      {"growth_window", [&](auto& k, auto& v) { c.thresholds.growth_window = static_cast<int>(to_int(k, v)); }},
      {"holder_ratio_budget", [&](auto& k, auto& v) { c.thresholds.holder_ratio_budget = to_double(k, v); }},
      {"lemma_scale", [&](auto& k, auto& v) { c.lemma_scale = static_cast<int>(to_int(k, v)); }},
      {"taus",
       [&](auto& k, auto& v) {
         c.taus.clear();
         for (const auto& s : split(v, ',')) c.taus.push_back(to_double(k, s));
       }},
      {"ek_offset_units", [&](auto& k, auto& v) { c.ek_offset_units = to_int(k, v); }},
      {"ek_scales", [&](auto& k, auto& v) { c.ek_scales = ints(k, v); }},
      {"size_pairs", [&](auto& k, auto& v) { c.size_pairs = static_cast<int>(to_int(k, v)); }},
      {"size_decades", [&](auto& k, auto& v) { c.size_decades = to_double(k, v); }},
      {"holder_scales", [&](auto& k, auto& v) { c.holder_scales = ints(k, v); }},
      {"holder_separation", [&](auto& k, auto& v) { c.holder_separation = to_double(k, v); }},
      {"shift_m", [&](auto& k, auto& v) { c.shift_m = static_cast<int>(to_int(k, v)); }},
      {"shift_n", [&](auto& k, auto& v) { c.shift_n = static_cast<int>(to_int(k, v)); }},
      {"boundary_scale", [&](auto& k, auto& v) { c.boundary_scale = static_cast<int>(to_int(k, v)); }},
      {"instances", [&](auto& k, auto& v) { c.instances = static_cast<int>(to_int(k, v)); }},
  };
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(key, value);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace czlab
