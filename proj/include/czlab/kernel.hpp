#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czlab/dyadic.hpp"
#include "czlab/grid.hpp"
#include "czlab/haar.hpp"
#include "czlab/shift_family.hpp"

namespace czlab {

/// Throws DomainError for x = y and ResolutionError when |x - y| is below
/// 2 sqrt(d) base units.
void check_kernel_points(const DyadicPoint& x, const DyadicPoint& y, const ScaleWindow& window);

/// Kernel of a single shift at (x, y): sum over Q containing both points of
/// |Q|^{-1} h^{Q''}_{Q'}(x) h^{Q'}_{Q''}(y).
template <class Scalar>
Scalar shift_kernel(const HaarShift& shift, const AncestorChain& x, const AncestorChain& y);
double shift_kernel(const HaarShift& shift, const DyadicPoint& x, const DyadicPoint& y);

/// sum_{m+n<=M} lambda_{m,n}^omega K_{S_{m,n}^omega}(x, y), the bracket inside
/// the expectation defining K. Double precision; see kernel_omega_terms for
/// the exact per-(m, n) values.
double kernel_omega(const DyadicPoint& x, const DyadicPoint& y, const GridShift& omega, const ShiftFamilySpec& spec);

/// kernel_omega(x, y) - kernel_omega(x', y), summing only the terms in which x
/// and x' sit in different cubes; cheap when x and x' are close.
double kernel_omega_difference(const DyadicPoint& x, const DyadicPoint& x_prime, const DyadicPoint& y,
                               const GridShift& omega, const ShiftFamilySpec& spec);

/// Per-(m, n) exact shift kernels, in complexity_pairs() order.
std::vector<Dyadic> kernel_omega_terms(const DyadicPoint& x, const DyadicPoint& y, const GridShift& omega,
                                       const ShiftFamilySpec& spec);

/// kernel_omega with the per-spec setup (complexity list, pair assignments)
/// done once; evaluations take precomputed ancestor chains.
class KernelEvaluator {
 public:
  /// `tabulate` precomputes every pair coefficient when the table stays
  /// below 2^20 entries; worthwhile for long Monte Carlo runs.
  KernelEvaluator(const ShiftFamilySpec& spec, const ScaleWindow& window, bool tabulate = false);

  const std::vector<std::pair<int, int>>& complexities() const { return complexities_; }
  double kernel(const AncestorChain& x, const AncestorChain& y, std::uint64_t omega_digest) const;
  /// kernel(x, y) - kernel(x', y) from the terms in which x and x' differ.
  double difference(const AncestorChain& x, const AncestorChain& x_prime, const AncestorChain& y,
                     std::uint64_t omega_digest) const;

 private:
  ScaleWindow window_;
  ShiftFamilySpec spec_;
  std::vector<std::pair<int, int>> complexities_;
  std::vector<FamilyPairAssignment> pairs_;
  std::vector<std::size_t> offsets_;  // per complexity, into table_
  std::vector<HaarPair> table_;   // factor applied, scale sign not
  std::vector<double> signs_;     // per complexity and scale

  HaarPair pair(std::size_t i, const ShiftTerm& term) const;
  struct Lookup;
};

struct KernelEstimate {
  DyadicPoint x;
  DyadicPoint y;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double truncation_bound = 0.0;
  std::uint64_t seed = 0;

  /// 3 std_error + truncation_bound; the two error sources stay separate fields.
  double half_width(double sigmas = 3.0) const { return sigmas * std_error + truncation_bound; }
};

nlohmann::json to_json(const KernelEstimate& est, const ScaleWindow& window, const std::string& spec_digest);

struct SamplingOptions {
  unsigned threads = 1;
  /// Evaluate every sample on the standard grid (omega = 0).
  bool zero_shift = false;
};

/// Omega for Monte Carlo sample `index`, drawn from its own counter stream.
GridShift sample_grid(const ScaleWindow& window, std::uint64_t seed, std::uint64_t index);

KernelEstimate estimate_kernel(const DyadicPoint& x, const DyadicPoint& y, const ShiftFamilySpec& spec,
                               const ScaleWindow& window, std::uint64_t n_samples, std::uint64_t seed,
                               const SamplingOptions& options = {});

/// sum_{m+n<=M} 2^{-(m+n) delta}.
double complexity_weight(double delta, int cap);
/// sum_{m+n>M} 2^{-(m+n) delta}, closed form.
double complexity_tail(double delta, int cap);
/// Smallest integer k with sqrt(d) 2^k >= r.
int lowest_enclosing_scale(double r, int dim);
/// C_window(r) = sum over k in [lowest_enclosing_scale(r), k_max] of 2^{-k d}.
double window_constant(const ScaleWindow& window, double r);
/// Per-omega bound W(M) C_window(r) on |kernel_omega| at distance r.
double size_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, double r);

struct TruncationBound {
  double complexity_tail = 0.0;  // (m, n) with m + n > M
  double above_window = 0.0;     // cubes larger than 2^{k_max}
  double below_window = 0.0;     // cubes whose descendants would fall below 2^{k_min}
  double total() const { return complexity_tail + above_window + below_window; }
};

/// Deterministic bound on the part of the defining series dropped by the caps.
TruncationBound truncation_tail_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, double r);

struct PairingResult {
  double value = 0.0;
  std::vector<std::pair<int, int>> complexities;
  std::vector<Dyadic> terms;  // exact per-(m, n) pairings before the lambda weights
};

/// <S f, g> through apply_shift.
PairingResult pairing_via_operator(const StepFunction<double>& f, const StepFunction<double>& g,
                                   const GridShift& omega, const ShiftFamilySpec& spec);
/// Double integral of g(x) f(y) K_omega(x, y) over base cells.
PairingResult pairing_via_kernel(const StepFunction<double>& f, const StepFunction<double>& g,
                                 const GridShift& omega, const ShiftFamilySpec& spec);

/// Squared distance (base units) between the closures of the two supports.
std::int64_t support_gap_squared(const StepFunction<double>& f, const StepFunction<double>& g);

/// |lambda_{m,n}| maximized over omega.
double lambda_magnitude(const ShiftFamilySpec& spec, int m, int n);

/// Analytic bound on E|K_omega(x, y) - K_omega(x', y)|: a term of scale k and
/// complexity (m, n) changes only when a scale k-m-1 lattice hyperplane
/// separates x and x'.
double holder_difference_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, const DyadicPoint& x,
                               const DyadicPoint& x_prime, const DyadicPoint& y);

}  // namespace czlab
