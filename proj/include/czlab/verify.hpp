#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czlab/config.hpp"
#include "czlab/grid.hpp"
#include "czlab/haar.hpp"
#include "czlab/kernel.hpp"
#include "czlab/shift_family.hpp"

namespace czlab {

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;  // exact value or bound the estimate is checked against
  bool pass = true;
  std::map<std::string, double> extra;
  std::uint64_t seed = 0;
  std::string spec_digest;
};

struct SweepReport {
  std::string name;
  std::vector<SweepRow> rows;
  std::map<std::string, double> summary;
  std::vector<std::string> notes;
  bool pass = true;
  std::uint64_t seed = 0;
  std::string spec_digest;

  /// Stamps seed and digest onto every row.
  void seal();
};

nlohmann::json to_json(const SweepReport& report);
/// RFC 4180 CSV, one row per sweep point. Columns: experiment, parameter,
/// value, estimate, stderr, reference, pass, seed, spec_digest, then the
/// sorted union of extra keys.
std::string to_csv(const SweepReport& report);

/// Frequency of {d(x, boundary of Q) <= tau l(Q)}, Q the scale-k cube of
/// D_omega holding x, against 1 - (1 - 2 tau)^d. Distances are measured from
/// the center of the base cell x names, which makes the discrete law match
/// the continuous one up to O(2^{k_min - k}).
SweepReport boundary_lemma_check(const ScaleWindow& window, int k, const std::vector<double>& taus,
                                 std::uint64_t n_samples, std::uint64_t seed, const Thresholds& thresholds = {},
                                 unsigned threads = 1);

/// 1 - (1 - 2 tau)^d.
double boundary_probability(double tau, int dim);
/// The same probability for the discrete law of the base-cell center.
double boundary_probability_discrete(double tau, int dim, std::int64_t side_units);

/// Smallest window scale i with 2^i >= 2^k |x - x'|; WindowError if none.
int ek_scale(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime, int k);

/// P[E_k], E_k = {d(x, boundary of Q) < 2|x - x'|} for the scale-i(k) cube
/// Q holding x, against C 2^{-k} with C = 2^{k0} P[E_{k0}] at the smallest
/// requested k0. All k share the same omega samples.
SweepReport ek_decay_check(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime,
                           const std::vector<int>& ks, std::uint64_t n_samples, std::uint64_t seed,
                           const Thresholds& thresholds = {}, unsigned threads = 1);

/// Exact discrete P[E_k].
double ek_probability_exact(const ScaleWindow& window, const DyadicPoint& x, const DyadicPoint& x_prime, int k);

using PointPair = std::pair<DyadicPoint, DyadicPoint>;

/// `count` pairs along axis 0 with log-spaced separations covering `decades`
/// decades, the largest near 2^{k_max - 2}.
std::vector<PointPair> log_spaced_pairs(const ScaleWindow& window, int count, double decades);

/// |K(x, y)| |x - y|^d per pair against the per-omega bound W(M) C_window(r),
/// plus the truncation bound, plus sigma standard errors.
SweepReport size_estimate_sweep(const ShiftFamilySpec& spec, const ScaleWindow& window,
                                const std::vector<PointPair>& pairs, std::uint64_t n_samples, std::uint64_t seed,
                                const Thresholds& thresholds = {}, unsigned threads = 1);

/// D(s) = |E[K(x, y) - K(x_s, y)]|, x_s = x + direction 2^{-s}, with every
/// x_s evaluated on the same omega as x.
SweepReport holder_sweep(const ShiftFamilySpec& spec, const ScaleWindow& window, const DyadicPoint& y,
                         const DyadicPoint& x, const Coords& direction, const std::vector<int>& scales,
                         std::uint64_t n_samples, std::uint64_t seed, const Thresholds& thresholds = {},
                         unsigned threads = 1);

/// A point one base cell below the midpoint, along axis 0, of the scale-k
/// cube of omega holding y; other coordinates follow y.
DyadicPoint child_boundary_point(const GridShift& omega, const DyadicPoint& y, int k);

/// Fixed-omega kernel of the single shift S_{m,n} (no lambda) across the
/// boundary just above x_boundary: D(s) = |K(x, y) - K(x + 2^{-s} e_0, y)|.
/// Rows report R(s) = D(s) |x - y|^{delta + d} / |x - x'|^delta against the required
/// growth. A zero jump triggers a retry with the next coefficient seed.
SweepReport single_shift_holder_failure(const GridShift& omega, int m, int n, const ShiftFamilySpec& spec,
                                        const DyadicPoint& y, const DyadicPoint& x_boundary,
                                        const std::vector<int>& scales, const Thresholds& thresholds = {});

struct VanishingResult {
  bool precondition_met = false;
  bool holds = true;
  std::optional<DyadicCube> offending;
};

/// For each Q in the window holding y and one of x, x': checks that the cube
/// of side 2^{-m-1} l(Q) holding x also holds x', then that
/// sum_{Q', Q''} (h(x) - h(x')) h(y) vanishes exactly for every n paired
/// with m under the spec's cap.
VanishingResult vanishing_identity_check(const GridShift& omega, int m, const DyadicPoint& x,
                                         const DyadicPoint& x_prime, const DyadicPoint& y,
                                         const ShiftFamilySpec& spec);

/// Random step function with `cells` nonzero cells inside [lo, hi) along
/// axis 0 (all of the top cube along the other axes); values on a 2^{-8} grid.
StepFunction<double> random_step_function(const ScaleWindow& window, CounterStream& stream, int cells,
                                          std::int64_t lo, std::int64_t hi);

/// Random spec for identity checks: family, lambda rule, delta and a small cap.
ShiftFamilySpec random_spec(CounterStream& stream, int dim);

/// pairing_via_operator against pairing_via_kernel on random disjointly
/// supported (f, g, omega, spec); equality must be exact.
SweepReport fubini_check(const ScaleWindow& window, int instances, std::uint64_t seed, unsigned threads = 1);

/// Power-iteration norm of every (m, n) shift under the cap for each family.
SweepReport norm_experiment(const ShiftFamilySpec& spec, const ScaleWindow& window, std::uint64_t seed,
                            double tolerance = 1e-9, unsigned threads = 1);

}  // namespace czlab
