#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "czlab/errors.hpp"
#include "czlab/experiments.hpp"
#include "czlab/kernel.hpp"

using namespace czlab;

namespace {

struct Overrides {
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed, n_samples;
  std::optional<double> delta;
  std::optional<int> cap, dim, k_min, k_max;
  std::vector<double> taus;
  std::string out, family, lambda_rule;
  std::optional<unsigned> threads;
  bool dry_run = false;
  bool print_config = false;
};

RunConfig build_config(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (!o.experiment.empty()) c.experiment = parse_experiment(o.experiment);
  if (o.seed) c.seed = *o.seed;
  if (o.n_samples) c.n_samples = *o.n_samples;
  if (o.delta) c.spec.delta = *o.delta;
  if (o.cap) c.spec.complexity_cap = *o.cap;
  if (o.dim) c.dim = *o.dim;
  if (o.k_min) c.k_min = *o.k_min;
  if (o.k_max) c.k_max = *o.k_max;
  if (!o.taus.empty()) c.taus = o.taus;
  if (!o.out.empty()) c.output = o.out;
  if (!o.family.empty()) c.spec.family = parse_coefficient_family(o.family);
  if (!o.lambda_rule.empty()) c.spec.lambda_rule = parse_lambda_rule(o.lambda_rule);
  if (o.threads) c.threads = *o.threads;
  return c;
}

int run(const Overrides& o) {
  const RunConfig config = build_config(o);
  if (o.print_config) {
    std::cout << serialize(config);
    return 0;
  }
  const RunPlan plan = plan_experiment(config);
  const ScaleWindow w = config.window();
  std::printf("experiment %s  d=%d  window [%d, %d]  digest %s  seed %llu\n", to_string(config.experiment).c_str(),
              w.dim, w.k_min, w.k_max, spec_digest(w, config.spec).c_str(),
              static_cast<unsigned long long>(config.seed));
  if (o.dry_run) {
    std::printf("planned jobs: %zu  evaluations: %zu\n", plan.jobs, plan.evaluations);
    for (const auto& [label, b] : plan.budgets) std::printf("truncation budget %s: %.6g\n", label.c_str(), b);
    return 0;
  }
  const SweepReport report = run_experiment(config);
  for (const auto& line : verdict_lines(report)) std::printf("%s\n", line.c_str());
  const Artifacts a = write_artifacts(report, config, output_directory(config));
  std::printf("wrote %s\nwrote %s\n", a.csv_path.c_str(), a.json_path.c_str());
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact checks for averaged random dyadic Haar shifts"};
  app.require_subcommand(1);
  Overrides o;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and write CSV + JSON artifacts");
  run_cmd->add_option("experiment,--experiment", o.experiment, "lemma | ek | size | holder | single-shift | fubini | norm");
  run_cmd->add_option("--config", o.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", o.seed, "Master seed");
  run_cmd->add_option("--n-samples,--n", o.n_samples, "Monte Carlo samples");
  run_cmd->add_option("--delta", o.delta, "Decay exponent, 0 < delta < 1");
  run_cmd->add_option("--complexity-cap", o.cap, "Largest m + n (default 8 for delta >= 0.4, else 12)");
  run_cmd->add_option("--dim,--d", o.dim, "Dimension");
  run_cmd->add_option("--k-min", o.k_min, "Finest scale");
  run_cmd->add_option("--k-max", o.k_max, "Coarsest scale");
  run_cmd->add_option("--tau", o.taus, "Boundary-lemma tau values");
  run_cmd->add_option("--family", o.family, "cancellative | random-bounded | block");
  run_cmd->add_option("--lambda-rule", o.lambda_rule, "default | alternating | random-sign | table");
  run_cmd->add_option("--out", o.out, "Output directory (default $CZLAB_OUTPUT_DIR or .)");
  run_cmd->add_option("--threads", o.threads, "Worker threads (0: available parallelism)");
  run_cmd->add_flag("--dry-run", o.dry_run, "Validate and print the plan without sampling");
  run_cmd->add_flag("--print-config", o.print_config, "Print the canonical config and exit");

  CLI::App* list_cmd = app.add_subcommand("list", "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (list_cmd->parsed()) {
    for (auto e : all_experiments()) std::printf("%s\n", to_string(e).c_str());
    return 0;
  }
  if (o.experiment.empty() && o.config_path.empty()) {
    std::fprintf(stderr, "error: name an experiment (positional, --experiment or --config)\n");
    return 2;
  }
  try {
    return run(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
