#include "czlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"
#include "czlab/stats.hpp"

namespace czlab {

void SweepReport::seal() {
  for (auto& row : rows) {
    row.seed = seed;
    row.spec_digest = spec_digest;
  }
}

nlohmann::json to_json(const SweepReport& report) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json extra = nlohmann::json::object();
    for (const auto& [k, v] : r.extra) extra[k] = num(v);
    rows.push_back({{"parameter", r.parameter},
                    {"value", num(r.value)},
                    {"estimate", num(r.estimate)},
                    {"stderr", num(r.std_error)},
                    {"reference", num(r.reference)},
                    {"pass", r.pass},
                    {"seed", r.seed},
                    {"spec_digest", r.spec_digest},
                    {"extra", extra}});
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, v] : report.summary) summary[k] = num(v);
  return {{"schema", 1},         {"experiment", report.name}, {"seed", report.seed},
          {"spec_digest", report.spec_digest}, {"pass", report.pass}, {"summary", summary},
          {"notes", report.notes}, {"rows", rows}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv(const SweepReport& report) {
  std::set<std::string> keys;
  for (const auto& r : report.rows)
    for (const auto& [k, v] : r.extra) keys.insert(k);
  std::string out = "experiment,parameter,value,estimate,stderr,reference,pass,seed,spec_digest";
  for (const auto& k : keys) out += "," + csv_field(k);
  out += "\r\n";
  for (const auto& r : report.rows) {
    out += csv_field(report.name) + "," + csv_field(r.parameter) + "," + csv_number(r.value) + "," +
           csv_number(r.estimate) + "," + csv_number(r.std_error) + "," + csv_number(r.reference) + "," +
           (r.pass ? "true" : "false") + "," + std::to_string(r.seed) + "," + csv_field(r.spec_digest);
    for (const auto& k : keys) {
      auto it = r.extra.find(k);
      out += ",";
      if (it != r.extra.end()) out += csv_number(it->second);
    }
    out += "\r\n";
  }
  return out;
}

// ---------------------------------------------------------------- lemma

double boundary_probability(double tau, int dim) {
  if (!(tau >= 0.0 && tau <= 0.5)) throw DomainError("tau must lie in [0, 1/2]");
  return 1.0 - std::pow(1.0 - 2.0 * tau, dim);
}

double boundary_probability_discrete(double tau, int dim, std::int64_t side) {
  if (!(tau >= 0.0 && tau <= 0.5)) throw DomainError("tau must lie in [0, 1/2]");
  // Cell j has center distance min(2j + 1, 2S - 2j - 1) / 2 to the boundary.
  const double t = 2.0 * tau * static_cast<double>(side);
  const std::int64_t a = std::min<std::int64_t>(side - 1, static_cast<std::int64_t>(std::floor((t - 1.0) / 2.0)));
  const std::int64_t b = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((2.0 * side - 1.0 - t) / 2.0)));
  const std::int64_t low = std::max<std::int64_t>(0, a + 1);
  const std::int64_t high = std::max<std::int64_t>(0, side - b);
  const std::int64_t overlap = std::max<std::int64_t>(0, a - b + 1);
  const double p = static_cast<double>(low + high - overlap) / static_cast<double>(side);
  return 1.0 - std::pow(1.0 - p, dim);
}

SweepReport boundary_lemma_check(const ScaleWindow& window, int k, const std::vector<double>& taus,
                                 std::uint64_t n_samples, std::uint64_t seed, const Thresholds& thresholds,
                                 unsigned threads) {
  window.validate();
  if (!window.contains_scale(k)) throw WindowError("scale " + std::to_string(k) + " outside the window");
  if (taus.empty()) throw DomainError("empty tau list");
  for (double t : taus) boundary_probability(t, window.dim);
  if (n_samples == 0) throw DomainError("boundary_lemma_check needs samples");

  DyadicPoint x;
  for (int i = 0; i < window.dim; ++i) x.coords[i] = 12345 + 1000 * i;
  const std::int64_t side = window.side_units(k);
  const auto stats = monte_carlo(n_samples, taus.size(), threads, [&](std::uint64_t s, std::span<double> out) {
    const GridShift omega = sample_grid(window, seed, s);
    const double h = static_cast<double>(center_boundary_distance_half_units(x, cube_at(x, k, omega)));
    for (std::size_t j = 0; j < taus.size(); ++j) out[j] = h <= 2.0 * taus[j] * static_cast<double>(side) ? 1.0 : 0.0;
  });

  SweepReport report;
  report.name = "lemma";
  report.seed = seed;
  report.spec_digest = spec_digest(window, ShiftFamilySpec{});
  double max_dev = 0.0;
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const double exact = boundary_probability(taus[j], window.dim);
    const double freq = stats[j].mean();
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(n_samples));
    SweepRow row;
    row.parameter = "tau";
    row.value = taus[j];
    row.estimate = freq;
    row.std_error = se;
    row.reference = exact;
    row.pass = se > 0.0 ? std::abs(freq - exact) <= thresholds.sigma * se : freq == exact;
    row.extra["exact"] = exact;
    row.extra["discrete_exact"] = boundary_probability_discrete(taus[j], window.dim, side);
    row.extra["z"] = se > 0.0 ? (freq - exact) / se : 0.0;
    row.extra["d"] = window.dim;
    row.extra["k"] = k;
    max_dev = std::max(max_dev, std::abs(freq - exact));
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  report.summary["max_deviation"] = max_dev;
  report.summary["n_samples"] = static_cast<double>(n_samples);
  report.seal();
  return report;
}

// ---------------------------------------------------------------- E_k

int ek_scale(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime, int k) {
  if (k < 0) throw DomainError("E_k needs k >= 0");
  const std::int64_t d2 = distance_squared_units(x, x_prime, window.dim);
  if (d2 == 0) throw DomainError("E_k needs x != x'");
  const __int128 target = (static_cast<__int128>(1) << (2 * k)) * d2;
  for (int i = window.k_min; i <= window.k_max; ++i) {
    const __int128 side = window.side_units(i);
    if (side * side >= target) return i;
  }
  throw WindowError("window too shallow: no scale with 2^i >= 2^" + std::to_string(k) + " |x - x'|");
}

namespace {

bool in_ek(const DyadicPoint& x, const DyadicCube& q, std::int64_t d2) {
  const __int128 bd = boundary_distance_units(x, q);
  return bd * bd < 4 * static_cast<__int128>(d2);
}

}  // namespace

double ek_probability_exact(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime, int k) {
  const int i = ek_scale(window, x, x_prime, k);
  const std::int64_t side = window.side_units(i);
  const __int128 t = 4 * static_cast<__int128>(distance_squared_units(x, x_prime, window.dim));
  // c = #{u >= 0 : u^2 < t}
  std::int64_t c = static_cast<std::int64_t>(std::sqrt(static_cast<double>(t)));
  while (static_cast<__int128>(c) * c >= t && c > 0) --c;
  while (static_cast<__int128>(c + 1) * (c + 1) < t) ++c;
  ++c;
  // Offset j in [0, S): near the lower face if j < c, near the upper if S - j < c.
  const std::int64_t low = std::min(side, c);
  const std::int64_t high = std::min(side, c - 1);
  const std::int64_t overlap =
      std::max<std::int64_t>(0, std::min(c - 1, side - 1) - std::max<std::int64_t>(0, side - c + 1) + 1);
  const double p = static_cast<double>(low + high - overlap) / static_cast<double>(side);
  return 1.0 - std::pow(1.0 - p, window.dim);
}

SweepReport ek_decay_check(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime,
                           const std::vector<int>& ks, std::uint64_t n_samples, std::uint64_t seed,
                           const Thresholds& thresholds, unsigned threads) {
  window.validate();
  if (ks.empty()) throw DomainError("empty k list");
  if (n_samples == 0) throw DomainError("ek_decay_check needs samples");
  std::vector<int> scales;
  for (int k : ks) scales.push_back(ek_scale(window, x, x_prime, k));
  const std::int64_t d2 = distance_squared_units(x, x_prime, window.dim);

  const auto stats = monte_carlo(n_samples, ks.size(), threads, [&](std::uint64_t s, std::span<double> out) {
    const GridShift omega = sample_grid(window, seed, s);
    for (std::size_t j = 0; j < ks.size(); ++j) out[j] = in_ek(x, cube_at(x, scales[j], omega), d2) ? 1.0 : 0.0;
  });

  const std::size_t fit = static_cast<std::size_t>(std::min_element(ks.begin(), ks.end()) - ks.begin());
  const double c_fit = std::ldexp(stats[fit].mean(), ks[fit]);
  const double h = std::sqrt(static_cast<double>(d2));

  SweepReport report;
  report.name = "ek";
  report.seed = seed;
  report.spec_digest = spec_digest(window, ShiftFamilySpec{});
  report.summary["C"] = c_fit;
  report.summary["fit_k"] = ks[fit];
  double worst = -std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    const double p = stats[j].mean();
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    SweepRow row;
    row.parameter = "k";
    row.value = ks[j];
    row.estimate = p;
    row.std_error = se;
    row.reference = std::ldexp(c_fit, -ks[j]);
    row.pass = j == fit || p <= row.reference + thresholds.sigma * se;
    row.extra["scale"] = scales[j];
    row.extra["tau"] = 2.0 * h / static_cast<double>(window.side_units(scales[j]));
    row.extra["exact"] = ek_probability_exact(window, x, x_prime, ks[j]);
    row.extra["fit"] = j == fit ? 1.0 : 0.0;
    if (j != fit && se > 0.0) worst = std::max(worst, (p - row.reference) / se);
    if (j > 0 && ks[j] > ks[j - 1] && p > stats[j - 1].mean()) monotone = false;
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  report.summary["max_excess_sigma"] = worst;
  report.summary["monotone"] = monotone ? 1.0 : 0.0;
  report.seal();
  return report;
}

// ---------------------------------------------------------------- size

std::vector<PointPair> log_spaced_pairs(const ScaleWindow& window, int count, double decades) {
  window.validate();
  if (count < 2) throw DomainError("need at least two pairs");
  const double top = std::ldexp(1.0, window.k_max - 2 - window.k_min);
  const double bottom = top * std::pow(10.0, -decades);
  const double floor_units = 2.0 * std::sqrt(static_cast<double>(window.dim));
  if (bottom <= floor_units) throw ResolutionError("window too shallow for " + std::to_string(decades) + " decades");
  DyadicPoint x;
  x.coords[0] = 3 * window.side_units(window.k_max) / 8 + 17;
  std::vector<PointPair> pairs;
  std::int64_t last = 0;
  for (int j = 0; j < count; ++j) {
    const double r = bottom * std::pow(top / bottom, static_cast<double>(j) / (count - 1));
    std::int64_t units = std::llround(r);
    if (units <= last) units = last + 1;
    last = units;
    DyadicPoint y = x;
    y.coords[0] += units;
    pairs.emplace_back(x, y);
  }
  return pairs;
}

SweepReport size_estimate_sweep(const ShiftFamilySpec& spec, const ScaleWindow& window,
                                const std::vector<PointPair>& pairs, std::uint64_t n_samples, std::uint64_t seed,
                                const Thresholds& thresholds, unsigned threads) {
  window.validate();
  spec.validate();
  if (pairs.empty()) throw DomainError("size_estimate_sweep: empty pair list");
  for (const auto& [x, y] : pairs) check_kernel_points(x, y, window);

  SweepReport report;
  report.name = "size";
  report.seed = seed;
  report.spec_digest = spec_digest(window, spec);
  double sup = 0.0;
  double sup_ratio = 0.0;
  SamplingOptions opts;
  opts.threads = threads;
  for (const auto& [x, y] : pairs) {
    const KernelEstimate est = estimate_kernel(x, y, spec, window, n_samples, seed, opts);
    const double r = distance(x, y, window);
    const double rd = std::pow(r, window.dim);
    const double per_omega = size_bound(spec, window, r) * rd;
    SweepRow row;
    row.parameter = "r";
    row.value = r;
    row.estimate = std::abs(est.mean) * rd;
    row.std_error = est.std_error * rd;
    row.reference = per_omega + est.truncation_bound * rd;
    row.pass = row.estimate <= row.reference + thresholds.sigma * row.std_error;
    row.extra["mean"] = est.mean;
    row.extra["per_omega_bound"] = per_omega;
    row.extra["truncation"] = est.truncation_bound * rd;
    row.extra["ratio"] = per_omega > 0.0 ? row.estimate / per_omega : 0.0;
    sup = std::max(sup, row.estimate);
    sup_ratio = std::max(sup_ratio, row.extra["ratio"]);
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  report.summary["sup"] = sup;
  report.summary["sup_ratio"] = sup_ratio;
  report.seal();
  return report;
}

// ---------------------------------------------------------------- Holder

namespace {

DyadicPoint shifted(const DyadicPoint& x, const Coords& direction, int s, const ScaleWindow& window) {
  const int e = -s - window.k_min;
  if (e < 0) throw ResolutionError("2^-" + std::to_string(s) + " is below the base resolution");
  DyadicPoint out = x;
  for (int i = 0; i < window.dim; ++i) out.coords[i] += direction[i] * (std::int64_t{1} << e);
  return out;
}

}  // namespace

SweepReport holder_sweep(const ShiftFamilySpec& spec, const ScaleWindow& window, const DyadicPoint& y,
                         const DyadicPoint& x, const Coords& direction, const std::vector<int>& scales,
                         std::uint64_t n_samples, std::uint64_t seed, const Thresholds& thresholds,
                         unsigned threads) {
  window.validate();
  spec.validate();
  if (scales.empty()) throw DomainError("empty scale list");
  if (n_samples < 2) throw DomainError("holder_sweep needs at least two samples");
  bool any = false;
  for (int i = 0; i < window.dim; ++i) any = any || direction[i] != 0;
  if (!any) throw DomainError("zero direction");
  check_kernel_points(x, y, window);
  const std::int64_t dxy2 = distance_squared_units(x, y, window.dim);
  std::vector<DyadicPoint> xs;
  for (int s : scales) {
    const DyadicPoint xp = shifted(x, direction, s, window);
    if (4 * distance_squared_units(x, xp, window.dim) >= dxy2)
      throw DomainError("|x - x'| must stay below |x - y| / 2 (scale " + std::to_string(s) + ")");
    check_kernel_points(xp, y, window);
    xs.push_back(xp);
  }

  const KernelEvaluator eval(spec, window, n_samples >= 1000);
  const auto stats = monte_carlo(n_samples, xs.size(), threads, [&](std::uint64_t i, std::span<double> out) {
    const GridShift omega = sample_grid(window, seed, i);
    const AncestorChain cx(x, omega), cy(y, omega);
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = eval.difference(cx, AncestorChain(xs[j], omega), cy, omega.digest());
  });

  SweepReport report;
  report.name = "holder";
  report.seed = seed;
  report.spec_digest = spec_digest(window, spec);
  const double dxy = distance(x, y, window);
  const double scale = std::pow(dxy, spec.delta + window.dim);
  std::vector<double> lx, ly;
  double sup_r = 0.0;
  bool rows_pass = true;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double h = distance(x, xs[j], window);
    const double mean = stats[j].mean();
    SweepRow row;
    row.parameter = "s";
    row.value = scales[j];
    row.estimate = std::abs(mean);
    row.std_error = stats[j].std_error();
    row.reference = holder_difference_bound(spec, window, x, xs[j], y);
    row.pass = row.estimate <= row.reference + thresholds.sigma * row.std_error;
    row.extra["h"] = h;
    row.extra["mean"] = mean;
    row.extra["R"] = row.estimate * scale / std::pow(h, spec.delta);
    row.extra["R_bound"] = row.reference * scale / std::pow(h, spec.delta);
    sup_r = std::max(sup_r, row.extra["R"]);
    if (row.estimate > 0.0) {
      lx.push_back(std::log(h));
      ly.push_back(std::log(row.estimate));
    }
    rows_pass = rows_pass && row.pass;
    report.rows.push_back(row);
  }
  report.summary["sup_R"] = sup_r;
  report.summary["points_fitted"] = static_cast<double>(lx.size());
  bool slope_ok = true;
  if (lx.size() >= 2) {
    const LinearFit fit = least_squares(lx, ly);
    report.summary["slope"] = fit.slope;
    slope_ok = fit.slope >= spec.delta - thresholds.slope_slack;
  } else if (lx.empty()) {
    report.summary["slope"] = std::numeric_limits<double>::quiet_NaN();
    report.notes.push_back("all differences are zero");
  } else {
    report.summary["slope"] = std::numeric_limits<double>::quiet_NaN();
    report.notes.push_back("a single nonzero difference; slope undefined");
    slope_ok = false;
  }
  report.summary["slope_threshold"] = spec.delta - thresholds.slope_slack;
  report.pass = rows_pass && slope_ok && sup_r <= thresholds.holder_ratio_budget;
  report.seal();
  return report;
}

DyadicPoint child_boundary_point(const GridShift& omega, const DyadicPoint& y, int k) {
  const ScaleWindow& w = omega.window();
  if (k - 1 < w.k_min || k > w.k_max) throw WindowError("scale " + std::to_string(k) + " has no children in the window");
  const DyadicCube q = cube_at(y, k, omega);
  DyadicPoint x = y;
  x.coords[0] = q.corner[0] + q.side / 2 - 1;
  return x;
}

SweepReport single_shift_holder_failure(const GridShift& omega, int m, int n, const ShiftFamilySpec& spec,
                                        const DyadicPoint& y, const DyadicPoint& x_boundary,
                                        const std::vector<int>& scales, const Thresholds& thresholds) {
  const ScaleWindow& w = omega.window();
  spec.validate();
  if (scales.size() < 2) throw DomainError("need at least two scales");
  for (std::size_t j = 1; j < scales.size(); ++j)
    if (scales[j] <= scales[j - 1]) throw DomainError("scales must increase");
  if (!admits(w, m, n)) throw WindowError("window cannot hold complexity (" + std::to_string(m) + ", " + std::to_string(n) + ")");
  Coords e0{};
  e0[0] = 1;
  std::vector<DyadicPoint> xs;
  for (int s : scales) {
    xs.push_back(shifted(x_boundary, e0, s, w));
    check_kernel_points(xs.back(), y, w);
  }
  check_kernel_points(x_boundary, y, w);

  SweepReport report;
  report.name = "single-shift";
  report.seed = spec.coeff_seed;
  const AncestorChain cy(y, omega);
  constexpr int kMaxAttempts = 8;
  std::vector<double> jumps;
  ShiftFamilySpec used = spec;
  int attempt = 0;
  for (; attempt < kMaxAttempts; ++attempt) {
    used.coeff_seed = spec.coeff_seed + static_cast<std::uint64_t>(attempt);
    const HaarShift shift = build_shift(used, m, n, omega);
    const Dyadic kb = shift_kernel<Dyadic>(shift, AncestorChain(x_boundary, omega), cy);
    jumps.clear();
    for (const auto& xp : xs) jumps.push_back(abs(kb - shift_kernel<Dyadic>(shift, AncestorChain(xp, omega), cy)).to_double());
    if (jumps.back() != 0.0) break;
    report.notes.push_back("zero jump with coeff_seed " + std::to_string(used.coeff_seed) + "; retrying");
  }
  if (attempt == kMaxAttempts) throw DomainError("no nonzero jump at the chosen boundary after retries");
  report.spec_digest = spec_digest(w, used);
  report.summary["attempts"] = attempt + 1;
  report.summary["coeff_seed"] = static_cast<double>(used.coeff_seed);

  const double g = thresholds.growth(spec.delta);
  const double scale = std::pow(distance(x_boundary, y, w), spec.delta + w.dim);
  std::vector<double> r;
  for (std::size_t j = 0; j < xs.size(); ++j) r.push_back(jumps[j] * scale / std::pow(distance(x_boundary, xs[j], w), spec.delta));
  const std::size_t first_checked = xs.size() > static_cast<std::size_t>(thresholds.growth_window)
                                        ? xs.size() - static_cast<std::size_t>(thresholds.growth_window)
                                        : 1;
  double min_growth = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    SweepRow row;
    row.parameter = "s";
    row.value = scales[j];
    row.estimate = r[j];
    row.extra["h"] = distance(x_boundary, xs[j], w);
    row.extra["jump"] = jumps[j];
    if (j > 0) {
      const double growth = r[j - 1] > 0.0 ? std::pow(r[j] / r[j - 1], 1.0 / (scales[j] - scales[j - 1]))
                                           : std::numeric_limits<double>::infinity();
      row.extra["growth"] = growth;
      row.reference = r[j - 1] * std::pow(g, scales[j] - scales[j - 1]);
      if (j >= first_checked) {
        row.pass = r[j] > 0.0 && growth >= g * (1.0 - 1e-12);
        min_growth = std::min(min_growth, growth);
      }
    }
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  report.summary["min_growth"] = min_growth;
  report.summary["required_growth"] = g;
  report.summary["jump"] = jumps.back();
  report.seal();
  return report;
}

// ---------------------------------------------------------------- vanishing identity

VanishingResult vanishing_identity_check(const GridShift& omega, int m, const DyadicPoint& x,
                                         const DyadicPoint& x_prime, const DyadicPoint& y,
                                         const ShiftFamilySpec& spec) {
  const ScaleWindow& w = omega.window();
  VanishingResult res;
  res.precondition_met = true;
  if (x == x_prime) return res;
  const AncestorChain cx(x, omega), cxp(x_prime, omega), cy(y, omega);
  for (const auto& [mm, n] : complexity_pairs(spec, w)) {
    if (mm != m) continue;
    const FamilyPairAssignment pairs(spec, w, m, n);
    for (int k = w.k_min + std::max(m, n) + 1; k <= w.k_max; ++k) {
      const DyadicCube& q = cy.at(k);
      const bool has_x = cx.at(k) == q;
      const bool has_xp = cxp.at(k) == q;
      if (!has_x && !has_xp) continue;
      if (!(cx.at(k - m - 1) == cxp.at(k - m - 1))) {
        res.precondition_met = false;
        res.holds = false;
        res.offending = q;
        return res;
      }
      const DyadicCube& in_cube = cy.at(k - n);
      const double in = pairs.pair(ShiftTerm{q, cx.at(k - m), in_cube}).input[child_index(in_cube, cy.at(k - n - 1))];
      const double out_x = pairs.pair(ShiftTerm{q, cx.at(k - m), in_cube}).output[child_index(cx.at(k - m), cx.at(k - m - 1))];
      const double out_xp =
          pairs.pair(ShiftTerm{q, cxp.at(k - m), in_cube}).output[child_index(cxp.at(k - m), cxp.at(k - m - 1))];
      const Dyadic sum = (Dyadic::from_double(out_x) - Dyadic::from_double(out_xp)) * Dyadic::from_double(in);
      if (!sum.is_zero()) {
        res.holds = false;
        res.offending = q;
        return res;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------- Fubini

StepFunction<double> random_step_function(const ScaleWindow& window, CounterStream& stream, int cells,
                                          std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) throw DomainError("empty support range");
  const std::int64_t top = window.side_units(window.k_max);
  StepFunction<double> f(window);
  for (int c = 0; c < cells; ++c) {
    DyadicPoint p;
    p.coords[0] = lo + static_cast<std::int64_t>(stream() % static_cast<std::uint64_t>(hi - lo));
    for (int i = 1; i < window.dim; ++i) p.coords[i] = static_cast<std::int64_t>(stream() % static_cast<std::uint64_t>(top));
    std::int64_t v = 0;
    while (v == 0) v = static_cast<std::int64_t>(stream() % 513) - 256;
    f.set(p, std::ldexp(static_cast<double>(v), -8));
  }
  return f;
}

ShiftFamilySpec random_spec(CounterStream& stream, int dim) {
  ShiftFamilySpec spec;
  spec.family = static_cast<CoefficientFamily>(stream() % 3);
  spec.lambda_rule = static_cast<LambdaRule>(stream() % 4);
  spec.delta = 0.25 * static_cast<double>(1 + stream() % 3);
  spec.complexity_cap = dim == 1 ? 3 : 2;
  spec.coeff_seed = stream();
  if (spec.lambda_rule == LambdaRule::table) {
    for (int t = 0; t <= spec.complexity_cap; ++t)
      for (int m = 0; m <= t; ++m)
        if (stream() % 4 != 0) spec.lambda_table[{m, t - m}] = lambda_bound(spec.delta, m, t - m) * (2.0 * stream.uniform() - 1.0);
  }
  return spec;
}

SweepReport fubini_check(const ScaleWindow& window, int instances, std::uint64_t seed, unsigned threads) {
  window.validate();
  if (instances < 1) throw DomainError("need at least one instance");
  const std::int64_t top = window.side_units(window.k_max);
  const std::int64_t gap = 3;  // gap^2 > 4d for d <= 2
  if (window.dim > 2) throw DomainError("fubini_check supports d <= 2");
  if (top < 2 * gap + 4) throw WindowError("window too shallow for disjoint supports");

  std::vector<SweepRow> rows(static_cast<std::size_t>(instances));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    CounterStream stream(seed, i);
    const GridShift omega = GridShift::sample(window, stream);
    const ShiftFamilySpec spec = random_spec(stream, window.dim);
    const std::int64_t split = top / 4 + static_cast<std::int64_t>(stream() % static_cast<std::uint64_t>(top / 2));
    const int fc = 1 + static_cast<int>(stream() % 6);
    const int gc = 1 + static_cast<int>(stream() % 6);
    StepFunction<double> f = random_step_function(window, stream, fc, 0, split - gap);
    StepFunction<double> g = random_step_function(window, stream, gc, split + 1, top);
    if (stream() % 2) std::swap(f, g);
    const PairingResult op = pairing_via_operator(f, g, omega, spec);
    const PairingResult ke = pairing_via_kernel(f, g, omega, spec);
    SweepRow row;
    row.parameter = "instance";
    row.value = static_cast<double>(i);
    row.estimate = op.value;
    row.reference = ke.value;
    row.pass = op.terms == ke.terms && op.value == ke.value;
    row.extra["family"] = static_cast<double>(spec.family);
    row.extra["lambda_rule"] = static_cast<double>(spec.lambda_rule);
    row.extra["complexities"] = static_cast<double>(op.complexities.size());
    std::size_t nonzero = 0;
    for (const auto& t : op.terms) nonzero += t.is_zero() ? 0 : 1;
    row.extra["nonzero_terms"] = static_cast<double>(nonzero);
    rows[i] = row;
  });

  SweepReport report;
  report.name = "fubini";
  report.seed = seed;
  report.spec_digest = spec_digest(window, ShiftFamilySpec{});
  report.rows = std::move(rows);
  std::size_t nontrivial = 0;
  for (const auto& r : report.rows) {
    report.pass = report.pass && r.pass;
    nontrivial += r.extra.at("nonzero_terms") > 0 ? 1 : 0;
  }
  report.summary["instances"] = instances;
  report.summary["nontrivial_instances"] = static_cast<double>(nontrivial);
  report.notes.push_back("random specs per instance; the digest covers the window only");
  report.seal();
  return report;
}

// ---------------------------------------------------------------- norm

SweepReport norm_experiment(const ShiftFamilySpec& spec, const ScaleWindow& window, std::uint64_t seed,
                            double tolerance, unsigned threads) {
  window.validate();
  spec.validate();
  struct Job {
    CoefficientFamily family;
    int m, n;
  };
  std::vector<Job> jobs;
  for (auto family : {CoefficientFamily::cancellative, CoefficientFamily::random_bounded, CoefficientFamily::block}) {
    ShiftFamilySpec s = spec;
    s.family = family;
    for (const auto& [m, n] : complexity_pairs(s, window)) jobs.push_back({family, m, n});
  }
  if (jobs.empty()) throw WindowError("window admits no shift under the cap");
  top_cube_cells(GridShift(window));  // surfaces oversized windows before any work

  std::vector<SweepRow> rows(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    ShiftFamilySpec s = spec;
    s.family = jobs[j].family;
    const GridShift omega = sample_grid(window, seed, j);
    const HaarShift shift = build_shift(s, jobs[j].m, jobs[j].n, omega);
    CounterStream stream(seed ^ 0x6e6f726dULL, j);
    const NormEstimate est = estimate_operator_norm(shift, stream);
    SweepRow row;
    row.parameter = to_string(jobs[j].family) + ":" + std::to_string(jobs[j].m) + "," + std::to_string(jobs[j].n);
    row.value = static_cast<double>(j);
    row.estimate = est.value;
    row.reference = 1.0;
    row.pass = est.value <= 1.0 + tolerance;
    row.extra["m"] = jobs[j].m;
    row.extra["n"] = jobs[j].n;
    row.extra["iterations"] = est.iterations;
    row.extra["converged"] = est.converged ? 1.0 : 0.0;
    row.extra["normalization"] = normalization_factor(s, window, jobs[j].m, jobs[j].n);
    rows[j] = row;
  });

  SweepReport report;
  report.name = "norm";
  report.seed = seed;
  report.spec_digest = spec_digest(window, spec);
  report.rows = std::move(rows);
  double sup = 0.0;
  for (const auto& r : report.rows) {
    report.pass = report.pass && r.pass;
    sup = std::max(sup, r.estimate);
  }
  report.summary["sup_norm"] = sup;
  report.summary["shifts"] = static_cast<double>(report.rows.size());
  report.seal();
  return report;
}

}  // namespace czlab
