#include "czlab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"
#include "czlab/stats.hpp"

namespace czlab {

namespace {

unsigned thread_count(const RunConfig& c) { return c.threads == 0 ? default_thread_count() : c.threads; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

DyadicPoint reference_point(const ScaleWindow& window) {
  DyadicPoint x;
  const std::int64_t top = window.side_units(window.k_max);
  for (int i = 0; i < window.dim; ++i) x.coords[i] = 3 * top / 8 + 17 + 101 * i;
  return x;
}

std::pair<DyadicPoint, DyadicPoint> ek_points(const RunConfig& c) {
  const ScaleWindow w = c.window();
  const DyadicPoint x = reference_point(w);
  DyadicPoint xp = x;
  xp.coords[0] += c.ek_offset_units;
  return {x, xp};
}

std::pair<DyadicPoint, DyadicPoint> holder_points(const RunConfig& c) {
  const ScaleWindow w = c.window();
  const DyadicPoint x = reference_point(w);
  DyadicPoint y = x;
  y.coords[0] -= std::llround(std::ldexp(c.holder_separation, -w.k_min));
  return {x, y};
}

SingleShiftSetup single_shift_setup(const RunConfig& c) {
  const ScaleWindow w = c.window();
  GridShift omega = sample_grid(w, c.seed, 0);
  const DyadicPoint base = reference_point(w);
  const DyadicCube q = cube_at(base, c.boundary_scale, omega);
  DyadicPoint y = base;
  y.coords[0] = q.corner[0] + q.side / 8;
  const DyadicPoint xb = child_boundary_point(omega, y, c.boundary_scale);
  return {std::move(omega), y, xb};
}

RunPlan plan_experiment(const RunConfig& c) {
  c.validate();
  const ScaleWindow w = c.window();
  RunPlan plan;
  auto budget = [&](const std::string& label, double r) {
    plan.budgets.emplace_back(label, truncation_tail_bound(c.spec, w, r).total());
  };
  switch (c.experiment) {
    case Experiment::lemma:
      if (!w.contains_scale(c.lemma_scale)) throw WindowError("lemma_scale outside the window");
      for (double t : c.taus) boundary_probability(t, w.dim);
      plan.jobs = c.taus.size();
      plan.evaluations = c.n_samples;
      break;
    case Experiment::ek: {
      const auto [x, xp] = ek_points(c);
      for (int k : c.ek_scales) ek_scale(w, x, xp, k);
      plan.jobs = c.ek_scales.size();
      plan.evaluations = c.n_samples;
      break;
    }
    case Experiment::size: {
      const auto pairs = log_spaced_pairs(w, c.size_pairs, c.size_decades);
      for (const auto& [x, y] : pairs) {
        check_kernel_points(x, y, w);
        budget("r=" + fmt(distance(x, y, w)), distance(x, y, w));
      }
      plan.jobs = pairs.size();
      plan.evaluations = pairs.size() * c.n_samples;
      break;
    }
    case Experiment::holder: {
      const auto [x, y] = holder_points(c);
      check_kernel_points(x, y, w);
      for (int s : c.holder_scales) {
        if (-s < w.k_min) throw ResolutionError("holder scale " + std::to_string(s) + " below the base resolution");
        if (2.0 * std::ldexp(1.0, -s) >= distance(x, y, w))
          throw DomainError("holder scale " + std::to_string(s) + " violates |x - x'| < |x - y| / 2");
      }
      budget("|x-y|=" + fmt(distance(x, y, w)), distance(x, y, w));
      plan.jobs = c.holder_scales.size();
      plan.evaluations = c.n_samples;
      break;
    }
    case Experiment::single_shift: {
      const auto setup = single_shift_setup(c);
      check_kernel_points(setup.x_boundary, setup.y, w);
      plan.jobs = c.holder_scales.size();
      plan.evaluations = c.holder_scales.size() + 1;
      break;
    }
    case Experiment::fubini:
      if (w.dim > 2) throw ConfigError("fubini supports d <= 2");
      plan.jobs = static_cast<std::size_t>(c.instances);
      plan.evaluations = static_cast<std::size_t>(c.instances);
      break;
    case Experiment::norm: {
      top_cube_cells(GridShift(w));
      std::size_t jobs = 0;
      for (auto f : {CoefficientFamily::cancellative, CoefficientFamily::random_bounded, CoefficientFamily::block}) {
        ShiftFamilySpec s = c.spec;
        s.family = f;
        jobs += complexity_pairs(s, w).size();
      }
      plan.jobs = jobs;
      plan.evaluations = jobs;
      break;
    }
  }
  return plan;
}

SweepReport run_experiment(const RunConfig& c) {
  plan_experiment(c);
  const ScaleWindow w = c.window();
  const unsigned threads = thread_count(c);
  switch (c.experiment) {
    case Experiment::lemma:
      return boundary_lemma_check(w, c.lemma_scale, c.taus, c.n_samples, c.seed, c.thresholds, threads);
    case Experiment::ek: {
      const auto [x, xp] = ek_points(c);
      return ek_decay_check(w, x, xp, c.ek_scales, c.n_samples, c.seed, c.thresholds, threads);
    }
    case Experiment::size:
      return size_estimate_sweep(c.spec, w, log_spaced_pairs(w, c.size_pairs, c.size_decades), c.n_samples, c.seed,
                                 c.thresholds, threads);
    case Experiment::holder: {
      const auto [x, y] = holder_points(c);
      Coords e0{};
      e0[0] = 1;
      return holder_sweep(c.spec, w, y, x, e0, c.holder_scales, c.n_samples, c.seed, c.thresholds, threads);
    }
    case Experiment::single_shift: {
      const auto setup = single_shift_setup(c);
      SweepReport r = single_shift_holder_failure(setup.omega, c.shift_m, c.shift_n, c.spec, setup.y, setup.x_boundary,
                                                  c.holder_scales, c.thresholds);
      r.seed = c.seed;
      r.seal();
      return r;
    }
    case Experiment::fubini:
      return fubini_check(w, c.instances, c.seed, threads);
    case Experiment::norm:
      return norm_experiment(c.spec, w, c.seed, 1e-9, threads);
  }
  throw ConfigError("unknown experiment");
}

std::string output_directory(const RunConfig& c) {
  if (!c.output.empty()) return c.output;
  if (const char* env = std::getenv("CZLAB_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

nlohmann::json report_json_with_config(const SweepReport& report, const RunConfig& config) {
  nlohmann::json j = to_json(report);
  j["config"] = serialize(config);
  return j;
}

Artifacts write_artifacts(const SweepReport& report, const RunConfig& config, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error("cannot create output directory " + directory + ": " + ec.message());
  const std::string stem = report.name + "_seed" + std::to_string(report.seed) + "_" + report.spec_digest;
  Artifacts a{(fs::path(directory) / (stem + ".csv")).string(), (fs::path(directory) / (stem + ".json")).string()};

  std::string header;
  std::istringstream cfg(serialize(config));
  for (std::string line; std::getline(cfg, line);) header += "# " + line + "\r\n";
  std::ofstream csv(a.csv_path, std::ios::binary);
  if (!csv) throw Error("cannot write " + a.csv_path);
  csv << header << to_csv(report);
  std::ofstream json(a.json_path, std::ios::binary);
  if (!json) throw Error("cannot write " + a.json_path);
  json << report_json_with_config(report, config).dump(2) << "\n";
  if (!csv || !json) throw Error("write failed in " + directory);
  return a;
}

std::vector<std::string> verdict_lines(const SweepReport& report) {
  std::vector<std::string> out;
  for (const auto& r : report.rows) {
    out.push_back(std::string(r.pass ? "PASS " : "FAIL ") + report.name + " " + r.parameter + "=" + fmt(r.value) +
                  " estimate=" + fmt(r.estimate) + " stderr=" + fmt(r.std_error) + " reference=" + fmt(r.reference));
    if (auto it = r.extra.find("exact"); it != r.extra.end()) out.back() += " exact=" + fmt(it->second);
  }
  std::string summary;
  for (const auto& [k, v] : report.summary) summary += " " + k + "=" + fmt(v);
  out.push_back(std::string(report.pass ? "PASS " : "FAIL ") + report.name + " overall" + summary);
  for (const auto& n : report.notes) out.push_back("note: " + n);
  return out;
}

}  // namespace czlab
