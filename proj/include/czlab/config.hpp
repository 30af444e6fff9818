#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "czlab/grid.hpp"
#include "czlab/shift_family.hpp"

namespace czlab {

enum class Experiment { lemma, ek, size, holder, single_shift, fubini, norm };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);
const std::vector<Experiment>& all_experiments();

/// Pass/fail thresholds; every sweep reads them from here.
struct Thresholds {
  double sigma = 3.0;
  double slope_slack = 0.1;
  /// Required growth of R(s) per halving; <= 0 means 2^delta.
  double growth_factor = -1.0;
  int growth_window = 4;
  double holder_ratio_budget = std::numeric_limits<double>::infinity();

  double growth(double delta) const;
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct RunConfig {
  Experiment experiment = Experiment::lemma;
  int dim = 1;
  std::optional<int> k_min;  // unset: the experiment's default window
  std::optional<int> k_max;
  ShiftFamilySpec spec;
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  std::string output;  // directory; empty means $CZLAB_OUTPUT_DIR or "."
  unsigned threads = 0;  // 0: available parallelism
  Thresholds thresholds;

  // experiment parameters
  int lemma_scale = 0;
  std::vector<double> taus{0.05, 0.1, 0.25};
  std::int64_t ek_offset_units = 257;
  std::vector<int> ek_scales{1, 2, 3, 4, 5, 6};
  int size_pairs = 20;
  double size_decades = 2.0;
  std::vector<int> holder_scales{4, 5, 6, 7, 8, 9, 10, 11, 12};
  double holder_separation = 0.3;  // |x - y|, rounded to the lattice
  int shift_m = 0;
  int shift_n = 0;
  int boundary_scale = -2;
  int instances = 50;

  ScaleWindow window() const;
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

ScaleWindow default_window(Experiment e, int dim);

/// Canonical `key = value` text, one key per line in a fixed order.
std::string serialize(const RunConfig& config);
/// Inverse of serialize; unknown keys and malformed values raise ConfigError.
/// Keys may appear in any order and be omitted.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// 16-hex-digit FNV-1a digest of the canonical window + spec text.
std::string spec_digest(const ScaleWindow& window, const ShiftFamilySpec& spec);
std::string canonical_spec_text(const ScaleWindow& window, const ShiftFamilySpec& spec);

}  // namespace czlab
