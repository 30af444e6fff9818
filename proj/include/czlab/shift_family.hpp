#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "czlab/grid.hpp"
#include "czlab/haar.hpp"

namespace czlab {

enum class LambdaRule {
  saturated,    // lambda = 2^{-(m+n) delta}; config name "default"
  alternating,  // (-1)^{m+n} 2^{-(m+n) delta}
  random_sign,  // sign drawn from the grid digest
  table,        // explicit per-(m, n) values
};

enum class CoefficientFamily {
  cancellative,    // classical mean-zero +-1 Haar patterns
  random_bounded,  // seeded coefficients in [-1, 1]
  block,           // non-negative 0/1 child patterns, averaging type
};

std::string to_string(LambdaRule rule);
std::string to_string(CoefficientFamily family);
LambdaRule parse_lambda_rule(const std::string& name);
CoefficientFamily parse_coefficient_family(const std::string& name);

/// Everything that determines {lambda_{m,n}^omega, S_{m,n}^omega}.
struct ShiftFamilySpec {
  double delta = 0.5;
  /// Keep (m, n) with m + n <= cap; negative selects the default for delta.
  int complexity_cap = -1;
  LambdaRule lambda_rule = LambdaRule::saturated;
  std::map<std::pair<int, int>, double> lambda_table;
  CoefficientFamily family = CoefficientFamily::cancellative;
  std::uint64_t coeff_seed = 0;

  /// 8 for delta >= 0.4, 12 below.
  static int default_cap(double delta) { return delta >= 0.4 ? 8 : 12; }
  int cap() const { return complexity_cap < 0 ? default_cap(delta) : complexity_cap; }
  /// Rejects delta outside (0, 1) and table entries above 2^{-(m+n) delta}.
  void validate() const;

  friend bool operator==(const ShiftFamilySpec&, const ShiftFamilySpec&) = default;
};

/// Upper bound 2^{-(m+n) delta} on |lambda_{m,n}|.
double lambda_bound(double delta, int m, int n);
double lambda(const ShiftFamilySpec& spec, int m, int n, std::uint64_t omega_digest);

/// Power-of-two factor applied to emitted Haar functions so that the
/// truncated shift has L2 operator norm at most 1 (see README).
double normalization_factor(const ShiftFamilySpec& spec, const ScaleWindow& window, int m, int n);

/// Seeded pair for the descendants at relative positions rel_out (depth m)
/// and rel_in (depth n) of a cube; independent of the cube's location.
HaarPair family_pair(const ShiftFamilySpec& spec, int dim, int m, int n, const Coords& rel_out, const Coords& rel_in);

/// Seeded +-1 multiplying the emitted functions of every cube at scale k.
/// Without it the (0, 0) cancellative shift telescopes to the identity minus
/// the top-scale average and has no off-diagonal jumps.
double scale_sign(const ShiftFamilySpec& spec, int m, int n, int k);

class FamilyPairAssignment final : public PairAssignment {
 public:
  FamilyPairAssignment(ShiftFamilySpec spec, const ScaleWindow& window, int m, int n);
  HaarPair pair(const ShiftTerm& term) const override;
  double factor() const { return factor_; }

 private:
  ShiftFamilySpec spec_;
  int dim_;
  int m_;
  int n_;
  double factor_;
};

/// S_{m,n}^omega of the family. Throws WindowError when the window cannot hold
/// complexity (m, n).
HaarShift build_shift(const ShiftFamilySpec& spec, int m, int n, const GridShift& omega);

/// True when the window admits complexity (m, n).
bool admits(const ScaleWindow& window, int m, int n);

/// (m, n) pairs with m + n <= cap, ordered by m + n then m. Pairs the window
/// cannot hold are skipped.
std::vector<std::pair<int, int>> complexity_pairs(const ShiftFamilySpec& spec, const ScaleWindow& window);

}  // namespace czlab
