#include "czlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"
#include "czlab/stats.hpp"

namespace czlab {

void check_kernel_points(const DyadicPoint& x, const DyadicPoint& y, const ScaleWindow& window) {
  const std::int64_t d2 = distance_squared_units(x, y, window.dim);
  if (d2 == 0) throw DomainError("kernel evaluated on the diagonal x = y");
  if (d2 < 4 * static_cast<std::int64_t>(window.dim)) {
    throw ResolutionError("|x - y| is below 2 sqrt(d) base cells; refine k_min");
  }
}

namespace {

template <class Scalar, class Pairs>
Scalar chain_kernel(const ScaleWindow& w, int m, int n, const Pairs& pairs, const AncestorChain& cx,
                    const AncestorChain& cy) {
  using T = ScalarTraits<Scalar>;
  Scalar sum(0);
  for (int k = w.k_min + std::max(m, n) + 1; k <= w.k_max; ++k) {
    const DyadicCube& q = cx.at(k);
    if (!(q == cy.at(k))) continue;
    const DyadicCube& out_cube = cx.at(k - m);
    const DyadicCube& in_cube = cy.at(k - n);
    const HaarPair p = pairs.pair(ShiftTerm{q, out_cube, in_cube});
    const double oc = p.output[child_index(out_cube, cx.at(k - m - 1))];
    const double ic = p.input[child_index(in_cube, cy.at(k - n - 1))];
    if (oc == 0.0 || ic == 0.0) continue;
    sum += T::pow2(-static_cast<long>(k) * w.dim) * T::from_double(oc) * T::from_double(ic);
  }
  return sum;
}

}  // namespace

template <class Scalar>
Scalar shift_kernel(const HaarShift& shift, const AncestorChain& x, const AncestorChain& y) {
  return chain_kernel<Scalar>(shift.window(), shift.m(), shift.n(), shift, x, y);
}

template double shift_kernel<double>(const HaarShift&, const AncestorChain&, const AncestorChain&);
template Dyadic shift_kernel<Dyadic>(const HaarShift&, const AncestorChain&, const AncestorChain&);

double shift_kernel(const HaarShift& shift, const DyadicPoint& x, const DyadicPoint& y) {
  check_kernel_points(x, y, shift.window());
  return shift_kernel<double>(shift, AncestorChain(x, shift.grid()), AncestorChain(y, shift.grid()));
}

namespace {

// Linear index of a relative position with `depth` bits per axis.
std::size_t linear_position(const Coords& rel, int dim, int depth) {
  std::size_t idx = 0;
  for (int i = dim - 1; i >= 0; --i) idx = (idx << depth) | static_cast<std::size_t>(rel[i]);
  return idx;
}

}  // namespace

KernelEvaluator::KernelEvaluator(const ShiftFamilySpec& spec, const ScaleWindow& window, bool tabulate)
    : window_(window), spec_(spec), complexities_(complexity_pairs(spec, window)) {
  spec.validate();
  for (const auto& [m, n] : complexities_) pairs_.emplace_back(spec, window, m, n);
  if (!tabulate) return;
  std::size_t total = 0;
  for (const auto& [m, n] : complexities_) {
    const int bits = (m + n) * window.dim;
    if (bits >= 21 || total + (std::size_t{1} << bits) > (std::size_t{1} << 20)) return;
    total += std::size_t{1} << bits;
  }
  const int d = window.dim;
  for (const auto& [m, n] : complexities_)
    for (int k = window.k_min; k <= window.k_max; ++k) signs_.push_back(scale_sign(spec, m, n, k));
  table_.reserve(total);
  for (std::size_t i = 0; i < complexities_.size(); ++i) {
    const auto [m, n] = complexities_[i];
    offsets_.push_back(table_.size());
    const std::size_t outs = std::size_t{1} << (m * d);
    const std::size_t ins = std::size_t{1} << (n * d);
    for (std::size_t o = 0; o < outs; ++o) {
      for (std::size_t j = 0; j < ins; ++j) {
        Coords ro{}, ri{};
        for (int a = 0; a < d; ++a) {
          ro[a] = static_cast<std::int64_t>((o >> (a * m)) & ((std::size_t{1} << m) - 1));
          ri[a] = static_cast<std::int64_t>((j >> (a * n)) & ((std::size_t{1} << n) - 1));
        }
        HaarPair p = family_pair(spec, d, m, n, ro, ri);
        const double f = pairs_[i].factor();
        if (f != 1.0)
          for (auto& c : p.output) c *= f;
        table_.push_back(p);
      }
    }
  }
}

HaarPair KernelEvaluator::pair(std::size_t i, const ShiftTerm& term) const {
  if (table_.empty()) return pairs_[i].pair(term);
  const auto [m, n] = complexities_[i];
  const int d = window_.dim;
  const std::size_t o = linear_position(relative_position(term.cube, term.out_cube), d, m);
  const std::size_t j = linear_position(relative_position(term.cube, term.in_cube), d, n);
  HaarPair p = table_[offsets_[i] + (o << (n * d)) + j];
  if (signs_[i * static_cast<std::size_t>(window_.num_scales()) + static_cast<std::size_t>(term.cube.scale - window_.k_min)] < 0)
    for (auto& c : p.output) c = -c;
  return p;
}

struct KernelEvaluator::Lookup {
  const KernelEvaluator* eval;
  std::size_t index;
  HaarPair pair(const ShiftTerm& term) const { return eval->pair(index, term); }
};

double KernelEvaluator::kernel(const AncestorChain& cx, const AncestorChain& cy, std::uint64_t digest) const {
  double total = 0.0;
  for (std::size_t i = 0; i < complexities_.size(); ++i) {
    const auto [m, n] = complexities_[i];
    const double lam = lambda(spec_, m, n, digest);
    if (lam == 0.0) continue;
    total += lam * chain_kernel<double>(window_, m, n, Lookup{this, i}, cx, cy);
  }
  return total;
}

double KernelEvaluator::difference(const AncestorChain& cx, const AncestorChain& cxp, const AncestorChain& cy,
                                   std::uint64_t digest) const {
  const ScaleWindow& w = window_;
  // Containment is monotone in the scale, so each relation is captured by the
  // first scale at which it holds.
  auto first_shared = [&](const AncestorChain& a, const AncestorChain& b) {
    for (int k = w.k_min; k <= w.k_max; ++k)
      if (a.at(k) == b.at(k)) return k;
    return w.k_max + 1;
  };
  const int joint = first_shared(cx, cxp);
  if (joint == w.k_min) return 0.0;
  const int kx = first_shared(cx, cy);
  const int kxp = first_shared(cxp, cy);
  double total = 0.0;
  for (std::size_t i = 0; i < complexities_.size(); ++i) {
    const auto [m, n] = complexities_[i];
    // Terms whose depth-(m+1) cube sits at or above `joint` are common to x and x'.
    const int lo = std::max(w.k_min + std::max(m, n) + 1, std::min(kx, kxp));
    const int hi = std::min(w.k_max, joint + m);
    double diff = 0.0;
    for (int k = lo; k <= hi; ++k) {
      const bool has_x = k >= kx;
      const bool has_xp = k >= kxp;
      const DyadicCube& q = cy.at(k);
      const DyadicCube& in_cube = cy.at(k - n);
      const unsigned in_idx = child_index(in_cube, cy.at(k - n - 1));
      const DyadicCube& out_x = cx.at(k - m);
      const DyadicCube& out_xp = cxp.at(k - m);
      const HaarPair px = pair(i, ShiftTerm{q, has_x ? out_x : out_xp, in_cube});
      const double tx = has_x ? px.output[child_index(out_x, cx.at(k - m - 1))] * px.input[in_idx] : 0.0;
      double txp = 0.0;
      if (has_xp) {
        if (!has_x || k - m >= joint) {
          txp = px.output[child_index(out_xp, cxp.at(k - m - 1))] * px.input[in_idx];
        } else {
          const HaarPair pxp = pair(i, ShiftTerm{q, out_xp, in_cube});
          txp = pxp.output[child_index(out_xp, cxp.at(k - m - 1))] * pxp.input[in_idx];
        }
      }
      if (tx != txp) diff += std::ldexp(tx - txp, -k * w.dim);
    }
    if (diff != 0.0) total += lambda(spec_, m, n, digest) * diff;
  }
  return total;
}

double kernel_omega(const DyadicPoint& x, const DyadicPoint& y, const GridShift& omega, const ShiftFamilySpec& spec) {
  check_kernel_points(x, y, omega.window());
  const KernelEvaluator eval(spec, omega.window());
  return eval.kernel(AncestorChain(x, omega), AncestorChain(y, omega), omega.digest());
}

double kernel_omega_difference(const DyadicPoint& x, const DyadicPoint& x_prime, const DyadicPoint& y,
                               const GridShift& omega, const ShiftFamilySpec& spec) {
  check_kernel_points(x, y, omega.window());
  check_kernel_points(x_prime, y, omega.window());
  const KernelEvaluator eval(spec, omega.window());
  return eval.difference(AncestorChain(x, omega), AncestorChain(x_prime, omega), AncestorChain(y, omega),
                         omega.digest());
}

std::vector<Dyadic> kernel_omega_terms(const DyadicPoint& x, const DyadicPoint& y, const GridShift& omega,
                                       const ShiftFamilySpec& spec) {
  const ScaleWindow& w = omega.window();
  check_kernel_points(x, y, w);
  spec.validate();
  const AncestorChain cx(x, omega);
  const AncestorChain cy(y, omega);
  std::vector<Dyadic> out;
  for (const auto& [m, n] : complexity_pairs(spec, w)) {
    const FamilyPairAssignment pairs(spec, w, m, n);
    out.push_back(chain_kernel<Dyadic>(w, m, n, pairs, cx, cy));
  }
  return out;
}

nlohmann::json to_json(const KernelEstimate& est, const ScaleWindow& window, const std::string& spec_digest) {
  auto coords = [&](const DyadicPoint& p) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < window.dim; ++i) a.push_back(std::ldexp(static_cast<double>(p.coords[i]), window.k_min));
    return a;
  };
  return {{"x", coords(est.x)},
          {"y", coords(est.y)},
          {"mean", est.mean},
          {"stderr", est.std_error},
          {"n_samples", est.n_samples},
          {"truncation_bound", est.truncation_bound},
          {"seed", est.seed},
          {"spec_digest", spec_digest}};
}

GridShift sample_grid(const ScaleWindow& window, std::uint64_t seed, std::uint64_t index) {
  CounterStream stream(seed, index);
  return GridShift::sample(window, stream);
}

KernelEstimate estimate_kernel(const DyadicPoint& x, const DyadicPoint& y, const ShiftFamilySpec& spec,
                               const ScaleWindow& window, std::uint64_t n_samples, std::uint64_t seed,
                               const SamplingOptions& options) {
  check_kernel_points(x, y, window);
  spec.validate();
  if (n_samples == 0) throw DomainError("estimate_kernel needs at least one sample");
  const GridShift zero(window);
  const KernelEvaluator eval(spec, window, n_samples >= 1000);
  const auto stats = monte_carlo(n_samples, 1, options.threads, [&](std::uint64_t i, std::span<double> out) {
    const GridShift omega = options.zero_shift ? zero : sample_grid(window, seed, i);
    out[0] = eval.kernel(AncestorChain(x, omega), AncestorChain(y, omega), omega.digest());
  });
  KernelEstimate est;
  est.x = x;
  est.y = y;
  est.mean = stats[0].mean();
  est.std_error = stats[0].std_error();
  est.n_samples = n_samples;
  est.truncation_bound = truncation_tail_bound(spec, window, distance(x, y, window)).total();
  est.seed = seed;
  return est;
}

double complexity_weight(double delta, int cap) {
  double s = 0.0;
  for (int t = cap; t >= 0; --t) s += (t + 1) * std::exp2(-t * delta);
  return s;
}

double complexity_tail(double delta, int cap) {
  const double q = std::exp2(-delta);
  const double M = cap;
  return ((M + 2.0) * std::pow(q, M + 1.0) - (M + 1.0) * std::pow(q, M + 2.0)) / ((1.0 - q) * (1.0 - q));
}

int lowest_enclosing_scale(double r, int dim) {
  if (!(r > 0.0)) throw DomainError("distance must be positive");
  const double root = std::sqrt(static_cast<double>(dim));
  int k = static_cast<int>(std::ceil(std::log2(r / root)));
  while (root * std::ldexp(1.0, k - 1) >= r) --k;
  while (root * std::ldexp(1.0, k) < r) ++k;
  return k;
}

namespace {

/// sum_{k=lo}^{hi} 2^{-k d}; zero for an empty range.
double geometric_scales(int lo, int hi, int dim) {
  if (lo > hi) return 0.0;
  const double ratio = std::ldexp(1.0, -dim);
  return (std::ldexp(1.0, -lo * dim) - std::ldexp(1.0, -(hi + 1) * dim)) / (1.0 - ratio);
}

double geometric_from(int lo, int dim) { return std::ldexp(1.0, -lo * dim) / (1.0 - std::ldexp(1.0, -dim)); }

}  // namespace

double window_constant(const ScaleWindow& window, double r) {
  return geometric_scales(lowest_enclosing_scale(r, window.dim), window.k_max, window.dim);
}

double size_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, double r) {
  return complexity_weight(spec.delta, spec.cap()) * window_constant(window, r);
}

TruncationBound truncation_tail_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, double r) {
  if (!(r > 0.0)) throw DomainError("truncation_tail_bound needs r > 0");
  const int d = window.dim;
  const int k_lo = lowest_enclosing_scale(r, d);
  TruncationBound b;
  b.complexity_tail = complexity_tail(spec.delta, spec.cap()) * geometric_from(k_lo, d);
  b.above_window = complexity_weight(spec.delta, spec.cap()) * geometric_from(std::max(window.k_max + 1, k_lo), d);
  for (int t = 0; t <= spec.cap(); ++t) {
    for (int m = 0; m <= t; ++m) {
      const int n = t - m;
      const int last_dropped = std::min(window.k_max, window.k_min + std::max(m, n));
      b.below_window += lambda_bound(spec.delta, m, n) * geometric_scales(k_lo, last_dropped, d);
    }
  }
  return b;
}

std::int64_t support_gap_squared(const StepFunction<double>& f, const StepFunction<double>& g) {
  const int dim = f.window().dim;
  std::int64_t best = -1;
  for (const auto& [a, va] : f.values()) {
    for (const auto& [b, vb] : g.values()) {
      std::int64_t s = 0;
      for (int i = 0; i < dim; ++i) {
        const std::int64_t gap = std::max<std::int64_t>(0, std::abs(a[i] - b[i]) - 1);
        s += gap * gap;
      }
      if (best < 0 || s < best) best = s;
    }
  }
  return best;
}

namespace {

void check_disjoint(const StepFunction<double>& f, const StepFunction<double>& g, const GridShift& omega) {
  if (!(f.window() == omega.window()) || !(g.window() == omega.window())) {
    throw DomainError("pairing: functions and grid live on different windows");
  }
  const std::int64_t gap = support_gap_squared(f, g);
  if (gap >= 0 && gap <= 4 * static_cast<std::int64_t>(omega.window().dim)) {
    throw DomainError("pairing needs supports at distance > 2 sqrt(d) base cells");
  }
}

}  // namespace

PairingResult pairing_via_operator(const StepFunction<double>& f, const StepFunction<double>& g,
                                   const GridShift& omega, const ShiftFamilySpec& spec) {
  check_disjoint(f, g, omega);
  spec.validate();
  const StepFunction<Dyadic> fe = to_exact(f);
  const StepFunction<Dyadic> ge = to_exact(g);
  PairingResult out;
  out.complexities = complexity_pairs(spec, omega.window());
  for (const auto& [m, n] : out.complexities) {
    const HaarShift shift = build_shift(spec, m, n, omega);
    out.terms.push_back(pairing(apply_shift(shift, fe), ge));
  }
  for (std::size_t i = 0; i < out.terms.size(); ++i) {
    const auto [m, n] = out.complexities[i];
    out.value += lambda(spec, m, n, omega.digest()) * out.terms[i].to_double();
  }
  return out;
}

PairingResult pairing_via_kernel(const StepFunction<double>& f, const StepFunction<double>& g,
                                 const GridShift& omega, const ShiftFamilySpec& spec) {
  check_disjoint(f, g, omega);
  spec.validate();
  const ScaleWindow& w = omega.window();
  struct Cell {
    AncestorChain chain;
    Dyadic value;
  };
  auto cells_of = [&](const StepFunction<double>& fn) {
    std::vector<Cell> cells;
    for (const auto& [c, v] : fn.values()) cells.push_back({AncestorChain(DyadicPoint{c}, omega), Dyadic::from_double(v)});
    return cells;
  };
  const auto f_cells = cells_of(f);
  const auto g_cells = cells_of(g);
  const Dyadic vol2 = Dyadic::pow2(2L * w.k_min * w.dim);
  PairingResult out;
  out.complexities = complexity_pairs(spec, w);
  for (const auto& [m, n] : out.complexities) {
    const FamilyPairAssignment pairs(spec, w, m, n);
    Dyadic sum;
    for (const Cell& a : g_cells) {
      for (const Cell& b : f_cells) {
        const Dyadic k = chain_kernel<Dyadic>(w, m, n, pairs, a.chain, b.chain);
        if (!k.is_zero()) sum += a.value * b.value * k;
      }
    }
    out.terms.push_back(sum * vol2);
  }
  for (std::size_t i = 0; i < out.terms.size(); ++i) {
    const auto [m, n] = out.complexities[i];
    out.value += lambda(spec, m, n, omega.digest()) * out.terms[i].to_double();
  }
  return out;
}

double lambda_magnitude(const ShiftFamilySpec& spec, int m, int n) {
  if (spec.lambda_rule == LambdaRule::table) return std::abs(lambda(spec, m, n, 0));
  return lambda_bound(spec.delta, m, n);
}

double holder_difference_bound(const ShiftFamilySpec& spec, const ScaleWindow& window, const DyadicPoint& x,
                               const DyadicPoint& x_prime, const DyadicPoint& y) {
  const int d = window.dim;
  const double r_min = std::min(distance(x, y, window), distance(x_prime, y, window));
  const int k_lo = lowest_enclosing_scale(r_min, d);
  double h_sum = 0.0;
  for (int i = 0; i < d; ++i) h_sum += static_cast<double>(std::abs(x.coords[i] - x_prime.coords[i]));
  if (h_sum == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& [m, n] : complexity_pairs(spec, window)) {
    const double weight = lambda_magnitude(spec, m, n) * normalization_factor(spec, window, m, n);
    if (weight == 0.0) continue;
    double scales = 0.0;
    for (int k = std::max(window.k_min + std::max(m, n) + 1, k_lo); k <= window.k_max; ++k) {
      const double spacing = std::ldexp(1.0, k - m - 1 - window.k_min);
      scales += 2.0 * std::ldexp(1.0, -k * d) * std::min(1.0, h_sum / spacing);
    }
    total += weight * scales;
  }
  return total;
}

}  // namespace czlab
