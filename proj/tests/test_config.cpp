#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "czlab/config.hpp"
#include "czlab/errors.hpp"
#include "czlab/experiments.hpp"
#include "doctest.h"

using namespace czlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("czlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config round-trips through its text form") {
  RunConfig c;
  CHECK(parse_config(serialize(c)) == c);
  c.experiment = Experiment::single_shift;
  c.dim = 2;
  c.k_min = -9;
  c.k_max = 1;
  c.spec.delta = 0.3;
  c.spec.complexity_cap = 5;
  c.spec.lambda_rule = LambdaRule::table;
  c.spec.lambda_table[{0, 1}] = -0.5;
  c.spec.lambda_table[{2, 0}] = 0.1234567890123;
  c.spec.family = CoefficientFamily::block;
  c.spec.coeff_seed = 18446744073709551615ULL;
  c.n_samples = 7;
  c.seed = 99;
  c.output = "/tmp/out dir";
  c.thresholds.sigma = 4;
  c.thresholds.holder_ratio_budget = 12.5;
  c.taus = {0.5, 0.01};
  c.holder_scales = {3, 9};
  const std::string text = serialize(c);
  CHECK(parse_config(text) == c);
  CHECK(serialize(parse_config(text)) == text);
}

TEST_CASE("config parsing tolerates order and comments, rejects junk") {
  const RunConfig c = parse_config("# a comment\nseed = 5\n\nexperiment = holder\n  delta=0.25  \n");
  CHECK(c.seed == 5);
  CHECK(c.experiment == Experiment::holder);
  CHECK(c.spec.delta == 0.25);
  CHECK(parse_config("experiment = single_shift\n").experiment == Experiment::single_shift);
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = nothing\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/czlab.cfg"), ConfigError);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.spec.delta = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.spec.delta = 0.5;
  c.n_samples = 0;
  CHECK_THROWS(c.validate());
  c.n_samples = 10;
  c.k_min = 3;
  c.k_max = 2;
  CHECK_THROWS(c.validate());
}

TEST_CASE("spec digests are stable and sensitive") {
  const ScaleWindow w{-14, 6, 1};
  ShiftFamilySpec spec;
  const std::string d = spec_digest(w, spec);
  CHECK(d.size() == 16);
  CHECK(d.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(spec_digest(w, spec) == d);
  ShiftFamilySpec other = spec;
  other.delta = 0.3;
  CHECK(spec_digest(w, other) != d);
  other = spec;
  other.coeff_seed = 1;
  CHECK(spec_digest(w, other) != d);
  CHECK(spec_digest(ScaleWindow{-14, 6, 2}, spec) != d);
  // Non-spec settings do not move the digest.
  RunConfig a, b;
  b.seed = 12;
  b.n_samples = 3;
  CHECK(spec_digest(a.window(), a.spec) == spec_digest(b.window(), b.spec));
}

TEST_CASE("experiment names and default windows") {
  for (Experiment e : all_experiments()) CHECK(parse_experiment(to_string(e)) == e);
  CHECK(all_experiments().size() == 7);
  CHECK(default_window(Experiment::holder, 1) == ScaleWindow{-14, 6, 1});
  RunConfig c;
  c.k_min = -6;
  CHECK(c.window().k_min == -6);
}

TEST_CASE("plans surface window errors without sampling") {
  RunConfig c;
  c.experiment = Experiment::ek;
  c.ek_offset_units = std::int64_t{1} << 19;
  CHECK_THROWS_AS(plan_experiment(c), WindowError);
  c.ek_offset_units = 257;
  const RunPlan p = plan_experiment(c);
  CHECK(p.jobs == 6);
  c.experiment = Experiment::holder;
  const RunPlan h = plan_experiment(c);
  CHECK(h.jobs == 9);
  CHECK(!h.budgets.empty());
  c.experiment = Experiment::single_shift;
  c.shift_m = 30;
  CHECK_THROWS(plan_experiment(c));
}

TEST_CASE("holder run with a zero lambda table passes with zero differences") {
  RunConfig c;
  c.experiment = Experiment::holder;
  c.spec.lambda_rule = LambdaRule::table;
  c.n_samples = 200;
  c.threads = 1;
  const SweepReport r = run_experiment(c);
  CHECK(r.pass);
  for (const auto& row : r.rows) CHECK(row.estimate == 0);
}

TEST_CASE("repeated runs write byte-identical artifacts") {
  RunConfig c;
  c.experiment = Experiment::size;
  c.n_samples = 50;
  c.size_pairs = 5;
  c.spec.complexity_cap = 3;
  c.threads = 2;
  const fs::path a = scratch("a"), b = scratch("b");
  const SweepReport first = run_experiment(c);
  const Artifacts fa = write_artifacts(first, c, a.string());
  const Artifacts fb = write_artifacts(run_experiment(c), c, b.string());
  RunConfig single = c;
  single.threads = 1;
  CHECK(to_csv(run_experiment(single)) == to_csv(first));
  CHECK(fs::path(fa.csv_path).filename() == fs::path(fb.csv_path).filename());
  CHECK(fs::path(fa.csv_path).filename().string().rfind("size_seed1_", 0) == 0);
  const std::string csv = slurp(fa.csv_path);
  CHECK(csv == slurp(fb.csv_path));
  CHECK(slurp(fa.json_path) == slurp(fb.json_path));
  CHECK(csv.rfind("# ", 0) == 0);

  // The embedded header reproduces the config.
  std::string header;
  std::istringstream lines(csv);
  for (std::string line; std::getline(lines, line) && line.rfind("# ", 0) == 0;) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    header += line.substr(2) + "\n";
  }
  RunConfig back = parse_config(header);
  CHECK(back.spec == c.spec);
  CHECK(back.seed == c.seed);
  CHECK(back.n_samples == c.n_samples);
  const nlohmann::json j = nlohmann::json::parse(slurp(fa.json_path));
  CHECK(j["schema"] == 1);
  CHECK(j.contains("config"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("output directory precedence") {
  RunConfig c;
  c.output = "explicit";
  CHECK(output_directory(c) == "explicit");
  c.output.clear();
  setenv("CZLAB_OUTPUT_DIR", "/tmp/from_env", 1);
  CHECK(output_directory(c) == "/tmp/from_env");
  unsetenv("CZLAB_OUTPUT_DIR");
  CHECK(output_directory(c) == ".");
}
