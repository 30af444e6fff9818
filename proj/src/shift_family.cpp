#include "czlab/shift_family.hpp"

#include <bit>
#include <cmath>

#include "czlab/errors.hpp"

namespace czlab {

std::string to_string(LambdaRule rule) {
  switch (rule) {
    case LambdaRule::saturated: return "default";
    case LambdaRule::alternating: return "alternating";
    case LambdaRule::random_sign: return "random-sign";
    case LambdaRule::table: return "table";
  }
  return "?";
}

std::string to_string(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::cancellative: return "cancellative";
    case CoefficientFamily::random_bounded: return "random-bounded";
    case CoefficientFamily::block: return "block";
  }
  return "?";
}

LambdaRule parse_lambda_rule(const std::string& name) {
  if (name == "default" || name == "saturated") return LambdaRule::saturated;
  if (name == "alternating") return LambdaRule::alternating;
  if (name == "random-sign") return LambdaRule::random_sign;
  if (name == "table" || name == "custom") return LambdaRule::table;
  throw ConfigError("unknown lambda rule '" + name + "'");
}

CoefficientFamily parse_coefficient_family(const std::string& name) {
  if (name == "cancellative") return CoefficientFamily::cancellative;
  if (name == "random-bounded") return CoefficientFamily::random_bounded;
  if (name == "block") return CoefficientFamily::block;
  throw ConfigError("unknown coefficient family '" + name + "'");
}

double lambda_bound(double delta, int m, int n) { return std::exp2(-static_cast<double>(m + n) * delta); }

void ShiftFamilySpec::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  for (const auto& [mn, value] : lambda_table) {
    if (mn.first < 0 || mn.second < 0) throw ConfigError("lambda table entry with negative complexity");
    if (std::abs(value) > lambda_bound(delta, mn.first, mn.second)) {
      throw ConfigError("lambda table entry (" + std::to_string(mn.first) + "," + std::to_string(mn.second) +
                        ") exceeds 2^{-(m+n) delta}");
    }
  }
}

double lambda(const ShiftFamilySpec& spec, int m, int n, std::uint64_t omega_digest) {
  if (m < 0 || n < 0) throw DomainError("lambda: negative complexity");
  const double bound = lambda_bound(spec.delta, m, n);
  switch (spec.lambda_rule) {
    case LambdaRule::saturated: return bound;
    case LambdaRule::alternating: return (m + n) % 2 == 0 ? bound : -bound;
    case LambdaRule::random_sign: {
      const std::uint64_t h = hash_combine(hash_combine(omega_digest, static_cast<std::uint64_t>(m)),
                                           static_cast<std::uint64_t>(n));
      return (h >> 63) != 0U ? -bound : bound;
    }
    case LambdaRule::table: {
      auto it = spec.lambda_table.find({m, n});
      return it == spec.lambda_table.end() ? 0.0 : it->second;
    }
  }
  return 0.0;
}

bool admits(const ScaleWindow& window, int m, int n) { return window.k_min + std::max(m, n) + 1 <= window.k_max; }

double normalization_factor(const ShiftFamilySpec& spec, const ScaleWindow& window, int m, int n) {
  if (spec.family == CoefficientFamily::cancellative) return 1.0;
  // Non-cancellative terms at different scales overlap; the Schur test bounds
  // the norm by the number of scales carrying terms.
  const int scales = window.k_max - window.k_min - std::max(m, n);
  if (scales <= 1) return 1.0;
  return std::ldexp(1.0, -static_cast<int>(std::bit_width(static_cast<unsigned>(scales - 1))));
}

namespace {

constexpr std::uint64_t kInputTag = 0x1f;
constexpr std::uint64_t kOutputTag = 0x2e;

std::uint64_t pair_key(const ShiftFamilySpec& spec, int dim, int m, int n, const Coords& rel_out,
                       const Coords& rel_in) {
  std::uint64_t h = hash_combine(mix64(spec.coeff_seed), static_cast<std::uint64_t>(spec.family));
  h = hash_combine(h, static_cast<std::uint64_t>(m));
  h = hash_combine(h, static_cast<std::uint64_t>(n));
  for (int i = 0; i < dim; ++i) {
    h = hash_combine(h, static_cast<std::uint64_t>(rel_out[i]));
    h = hash_combine(h, static_cast<std::uint64_t>(rel_in[i]));
  }
  return h;
}

std::array<double, kMaxChildren> cancellative_pattern(int dim, CounterStream& stream) {
  const unsigned nchild = 1U << dim;
  const std::uint64_t draw = stream();
  const unsigned pattern = 1U + static_cast<unsigned>(draw % (nchild - 1));
  const double sign = (draw >> 63) != 0U ? -1.0 : 1.0;
  std::array<double, kMaxChildren> c{};
  for (unsigned child = 0; child < nchild; ++child) {
    // Product over the axes in `pattern` of (+1 lower half, -1 upper half).
    const int flips = std::popcount(pattern & child);
    c[child] = (flips % 2 == 0) ? sign : -sign;
  }
  return c;
}

std::array<double, kMaxChildren> bounded_pattern(int dim, CounterStream& stream) {
  const unsigned nchild = 1U << dim;
  std::array<double, kMaxChildren> c{};
  double peak = 0.0;
  for (unsigned child = 0; child < nchild; ++child) {
    // Uniform on the 2^{-16} grid of [-1, 1).
    const auto q = static_cast<std::int64_t>(stream() >> 47);
    c[child] = static_cast<double>(q - (std::int64_t{1} << 16)) * 0x1p-16;
    peak = std::max(peak, std::abs(c[child]));
  }
  if (peak > 0.0) {
    // Scale by a power of two so the sup norm lands in (1/2, 1].
    int e = 0;
    std::frexp(peak, &e);
    const double scale = peak == std::ldexp(1.0, e - 1) ? std::ldexp(1.0, 1 - e) : std::ldexp(1.0, -e);
    for (unsigned child = 0; child < nchild; ++child) c[child] *= scale;
  }
  return c;
}

std::array<double, kMaxChildren> block_pattern(int dim, CounterStream& stream) {
  const unsigned nchild = 1U << dim;
  const std::uint64_t full = (std::uint64_t{1} << nchild) - 1;
  std::uint64_t mask = stream() & full;
  if (mask == 0) mask = full;
  std::array<double, kMaxChildren> c{};
  for (unsigned child = 0; child < nchild; ++child) c[child] = ((mask >> child) & 1U) != 0U ? 1.0 : 0.0;
  return c;
}

std::array<double, kMaxChildren> draw_pattern(CoefficientFamily family, int dim, CounterStream& stream) {
  switch (family) {
    case CoefficientFamily::cancellative: return cancellative_pattern(dim, stream);
    case CoefficientFamily::random_bounded: return bounded_pattern(dim, stream);
    case CoefficientFamily::block: return block_pattern(dim, stream);
  }
  return {};
}

}  // namespace

HaarPair family_pair(const ShiftFamilySpec& spec, int dim, int m, int n, const Coords& rel_out, const Coords& rel_in) {
  const std::uint64_t key = pair_key(spec, dim, m, n, rel_out, rel_in);
  CounterStream in_stream(key, kInputTag);
  CounterStream out_stream(key, kOutputTag);
  HaarPair p;
  p.input = draw_pattern(spec.family, dim, in_stream);
  p.output = draw_pattern(spec.family, dim, out_stream);
  return p;
}

double scale_sign(const ShiftFamilySpec& spec, int m, int n, int k) {
  std::uint64_t h = hash_combine(mix64(spec.coeff_seed ^ 0x5ca1e5ULL), static_cast<std::uint64_t>(spec.family));
  h = hash_combine(h, static_cast<std::uint64_t>(m));
  h = hash_combine(h, static_cast<std::uint64_t>(n));
  h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
  return (h >> 63) != 0U ? -1.0 : 1.0;
}

FamilyPairAssignment::FamilyPairAssignment(ShiftFamilySpec spec, const ScaleWindow& window, int m, int n)
    : spec_(std::move(spec)), dim_(window.dim), m_(m), n_(n), factor_(normalization_factor(spec_, window, m, n)) {}

HaarPair FamilyPairAssignment::pair(const ShiftTerm& term) const {
  HaarPair p = family_pair(spec_, dim_, m_, n_, relative_position(term.cube, term.out_cube),
                           relative_position(term.cube, term.in_cube));
  const double f = factor_ * scale_sign(spec_, m_, n_, term.cube.scale);
  for (auto& c : p.output) c *= f;
  return p;
}

HaarShift build_shift(const ShiftFamilySpec& spec, int m, int n, const GridShift& omega) {
  spec.validate();
  return {omega, m, n, std::make_shared<const FamilyPairAssignment>(spec, omega.window(), m, n)};
}

std::vector<std::pair<int, int>> complexity_pairs(const ShiftFamilySpec& spec, const ScaleWindow& window) {
  std::vector<std::pair<int, int>> out;
  for (int total = 0; total <= spec.cap(); ++total) {
    for (int m = 0; m <= total; ++m) {
      if (admits(window, m, total - m)) out.emplace_back(m, total - m);
    }
  }
  return out;
}

}  // namespace czlab
