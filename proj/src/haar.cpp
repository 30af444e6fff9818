#include "czlab/haar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"

namespace czlab {

double HaarFunction::sup_norm() const {
  double s = 0.0;
  for (unsigned c = 0; c < (1U << cube.dim); ++c) s = std::max(s, std::abs(coeffs[c]));
  return s;
}

double evaluate(const HaarFunction& h, const DyadicPoint& x) {
  if (!contains(h.cube, x)) return 0.0;
  return h.coeffs[child_index(h.cube, x)];
}

double HaarPair::sup_norm_product(int dim) const {
  double a = 0.0;
  double b = 0.0;
  for (unsigned c = 0; c < (1U << dim); ++c) {
    a = std::max(a, std::abs(input[c]));
    b = std::max(b, std::abs(output[c]));
  }
  return a * b;
}

StepFunction<Dyadic> to_exact(const StepFunction<double>& f) {
  StepFunction<Dyadic> out(f.window());
  for (const auto& [c, v] : f.values()) out.set(DyadicPoint{c}, Dyadic::from_double(v));
  return out;
}

StepFunction<double> to_double(const StepFunction<Dyadic>& f) {
  StepFunction<double> out(f.window());
  for (const auto& [c, v] : f.values()) out.set(DyadicPoint{c}, v.to_double());
  return out;
}

nlohmann::json step_function_to_json(const StepFunction<double>& f) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [c, v] : f.values()) {
    nlohmann::json corner = nlohmann::json::array();
    for (int i = 0; i < f.window().dim; ++i) corner.push_back(c[i]);
    out.push_back({corner, v});
  }
  return out;
}

StepFunction<double> step_function_from_json(const ScaleWindow& window, const nlohmann::json& j) {
  StepFunction<double> f(window);
  for (const auto& entry : j) {
    const auto& corner = entry.at(0);
    if (corner.size() != static_cast<std::size_t>(window.dim)) throw DomainError("step function cell has wrong dimension");
    DyadicPoint p;
    for (int i = 0; i < window.dim; ++i) p.coords[i] = corner.at(i).get<std::int64_t>();
    f.add(p, entry.at(1).get<double>());
  }
  return f;
}

template <class Scalar>
Scalar inner_product(const StepFunction<Scalar>& f, const HaarFunction& h) {
  if (h.cube.side < 2) throw WindowError("Haar function children fall below the base resolution");
  using T = ScalarTraits<Scalar>;
  Scalar s(0);
  for (const auto& [c, v] : f.values()) {
    const DyadicPoint p{c};
    if (!contains(h.cube, p)) continue;
    const double coeff = h.coeffs[child_index(h.cube, p)];
    if (coeff != 0.0) s += v * T::from_double(coeff);
  }
  return s * f.cell_volume();
}

HaarShift::HaarShift(GridShift grid, int m, int n, std::shared_ptr<const PairAssignment> pairs)
    : grid_(std::make_shared<const GridShift>(std::move(grid))), m_(m), n_(n), pairs_(std::move(pairs)) {
  if (m < 0 || n < 0) throw DomainError("shift complexity must be non-negative");
  if (!pairs_) throw DomainError("shift needs a pair assignment");
  const ScaleWindow& w = window();
  if (min_scale() > w.k_max) {
    throw WindowError("complexity (" + std::to_string(m) + "," + std::to_string(n) +
                      ") needs children at scale " + std::to_string(w.k_max - std::max(m, n) - 1) +
                      ", below k_min = " + std::to_string(w.k_min));
  }
}

namespace {

template <class Scalar>
using LevelMap = std::map<Coords, Scalar>;

/// integrals[k - k_min][corner] = integral of f over the scale-k cube at corner.
template <class Scalar>
std::vector<LevelMap<Scalar>> integral_pyramid(const GridShift& grid, const StepFunction<Scalar>& f) {
  const ScaleWindow& w = grid.window();
  std::vector<LevelMap<Scalar>> levels(static_cast<std::size_t>(w.num_scales()));
  const Scalar vol = f.cell_volume();
  for (const auto& [c, v] : f.values()) levels[0][c] = v * vol;
  for (int k = w.k_min + 1; k <= w.k_max; ++k) {
    auto& up = levels[static_cast<std::size_t>(k - w.k_min)];
    for (const auto& [c, v] : levels[static_cast<std::size_t>(k - 1 - w.k_min)]) {
      auto [it, inserted] = up.try_emplace(cube_at(DyadicPoint{c}, k, grid).corner, v);
      if (!inserted) it->second += v;
    }
  }
  return levels;
}

DyadicCube make_cube(const ScaleWindow& w, int k, const Coords& corner) {
  DyadicCube q;
  q.dim = w.dim;
  q.scale = k;
  q.side = w.side_units(k);
  q.corner = corner;
  return q;
}

template <class Scalar>
Scalar lookup(const LevelMap<Scalar>& level, const Coords& c) {
  auto it = level.find(c);
  return it == level.end() ? Scalar(0) : it->second;
}

/// Pushes per-cube values down to base cells.
template <class Scalar>
StepFunction<Scalar> expand_levels(const ScaleWindow& w, std::vector<LevelMap<Scalar>>& acc) {
  for (int k = w.k_max; k > w.k_min; --k) {
    auto& level = acc[static_cast<std::size_t>(k - w.k_min)];
    auto& below = acc[static_cast<std::size_t>(k - 1 - w.k_min)];
    for (const auto& [c, v] : level) {
      if (v == Scalar(0)) continue;
      const DyadicCube q = make_cube(w, k, c);
      for (unsigned i = 0; i < (1U << w.dim); ++i) {
        auto [it, inserted] = below.try_emplace(child(q, i).corner, v);
        if (!inserted) it->second += v;
      }
    }
    level.clear();
  }
  StepFunction<Scalar> out(w);
  for (auto& [c, v] : acc[0]) out.set(DyadicPoint{c}, std::move(v));
  return out;
}

template <class Scalar, bool Adjoint>
StepFunction<Scalar> apply_impl(const HaarShift& shift, const StepFunction<Scalar>& f) {
  using T = ScalarTraits<Scalar>;
  const ScaleWindow& w = shift.window();
  if (!(f.window() == w)) throw DomainError("step function and shift live on different windows");
  const GridShift& grid = shift.grid();
  const auto integrals = integral_pyramid(grid, f);
  std::vector<LevelMap<Scalar>> acc(static_cast<std::size_t>(w.num_scales()));
  const int in_depth = Adjoint ? shift.m() : shift.n();
  const int out_depth = Adjoint ? shift.n() : shift.m();
  const unsigned nchild = 1U << w.dim;

  for (int k = shift.min_scale(); k <= shift.max_scale(); ++k) {
    const auto& in_level = integrals[static_cast<std::size_t>(k - in_depth - w.k_min)];
    const auto& in_children = integrals[static_cast<std::size_t>(k - in_depth - 1 - w.k_min)];
    auto& out_level = acc[static_cast<std::size_t>(k - out_depth - 1 - w.k_min)];
    const Scalar inv_vol = T::pow2(-static_cast<long>(k) * w.dim);
    for (const auto& [corner, mass] : integrals[static_cast<std::size_t>(k - w.k_min)]) {
      const DyadicCube q = make_cube(w, k, corner);
      const auto out_cubes = descendants_at_depth(q, out_depth);
      for (const DyadicCube& in_cube : descendants_at_depth(q, in_depth)) {
        if (in_level.find(in_cube.corner) == in_level.end()) continue;
        std::array<Scalar, kMaxChildren> child_mass{};
        for (unsigned c = 0; c < nchild; ++c) child_mass[c] = lookup(in_children, child(in_cube, c).corner);
        for (const DyadicCube& out_cube : out_cubes) {
          const ShiftTerm term = Adjoint ? ShiftTerm{q, in_cube, out_cube} : ShiftTerm{q, out_cube, in_cube};
          const HaarPair p = shift.pair(term);
          const auto& test_fn = Adjoint ? p.output : p.input;
          const auto& emit_fn = Adjoint ? p.input : p.output;
          Scalar ip(0);
          for (unsigned c = 0; c < nchild; ++c) {
            if (test_fn[c] != 0.0 && child_mass[c] != Scalar(0)) ip += T::from_double(test_fn[c]) * child_mass[c];
          }
          if (ip == Scalar(0)) continue;
          ip *= inv_vol;
          for (unsigned c = 0; c < nchild; ++c) {
            if (emit_fn[c] == 0.0) continue;
            Scalar v = ip * T::from_double(emit_fn[c]);
            auto [it, inserted] = out_level.try_emplace(child(out_cube, c).corner, v);
            if (!inserted) it->second += v;
          }
        }
      }
    }
  }
  return expand_levels(w, acc);
}

}  // namespace

template <class Scalar>
StepFunction<Scalar> apply_shift_term(const ShiftTerm& term, const HaarPair& pair, const StepFunction<Scalar>& f) {
  using T = ScalarTraits<Scalar>;
  const HaarFunction in{term.in_cube, pair.input};
  const HaarFunction out{term.out_cube, pair.output};
  if (out.cube.side < 2) throw WindowError("output Haar function children fall below the base resolution");
  const Scalar coeff = inner_product(f, in) * T::pow2(-static_cast<long>(term.cube.scale) * term.cube.dim);
  StepFunction<Scalar> result(f.window());
  if (coeff == Scalar(0)) return result;
  std::array<std::int64_t, kMaxDim> idx{};
  const std::int64_t side = out.cube.side;
  const int dim = out.cube.dim;
  // Enumerate the base cells of Q' as an odometer.
  while (true) {
    DyadicPoint p{out.cube.corner};
    for (int i = 0; i < dim; ++i) p.coords[i] += idx[i];
    const double c = evaluate(out, p);
    if (c != 0.0) result.add(p, coeff * T::from_double(c));
    int i = 0;
    while (i < dim && ++idx[i] == side) idx[i++] = 0;
    if (i == dim) break;
  }
  return result;
}

template <class Scalar>
StepFunction<Scalar> apply_shift(const HaarShift& shift, const StepFunction<Scalar>& f) {
  return apply_impl<Scalar, false>(shift, f);
}

template <class Scalar>
StepFunction<Scalar> apply_adjoint(const HaarShift& shift, const StepFunction<Scalar>& g) {
  return apply_impl<Scalar, true>(shift, g);
}

template <class Scalar>
Scalar shift_bilinear_form(const HaarShift& shift, const StepFunction<Scalar>& f, const StepFunction<Scalar>& g) {
  using T = ScalarTraits<Scalar>;
  const ScaleWindow& w = shift.window();
  const GridShift& grid = shift.grid();
  const auto fi = integral_pyramid(grid, f);
  const auto gi = integral_pyramid(grid, g);
  const unsigned nchild = 1U << w.dim;
  Scalar total(0);
  for (int k = shift.min_scale(); k <= shift.max_scale(); ++k) {
    const auto& f_level = fi[static_cast<std::size_t>(k - shift.n() - w.k_min)];
    const auto& f_children = fi[static_cast<std::size_t>(k - shift.n() - 1 - w.k_min)];
    const auto& g_level = gi[static_cast<std::size_t>(k - shift.m() - w.k_min)];
    const auto& g_children = gi[static_cast<std::size_t>(k - shift.m() - 1 - w.k_min)];
    const auto& g_top = gi[static_cast<std::size_t>(k - w.k_min)];
    Scalar scale_sum(0);
    for (const auto& [corner, mass] : fi[static_cast<std::size_t>(k - w.k_min)]) {
      if (g_top.find(corner) == g_top.end()) continue;
      const DyadicCube q = make_cube(w, k, corner);
      const auto out_cubes = descendants_at_depth(q, shift.m());
      for (const DyadicCube& in_cube : descendants_at_depth(q, shift.n())) {
        if (f_level.find(in_cube.corner) == f_level.end()) continue;
        for (const DyadicCube& out_cube : out_cubes) {
          if (g_level.find(out_cube.corner) == g_level.end()) continue;
          const HaarPair p = shift.pair(ShiftTerm{q, out_cube, in_cube});
          Scalar fin(0);
          Scalar gout(0);
          for (unsigned c = 0; c < nchild; ++c) {
            if (p.input[c] != 0.0) fin += T::from_double(p.input[c]) * lookup(f_children, child(in_cube, c).corner);
            if (p.output[c] != 0.0) gout += T::from_double(p.output[c]) * lookup(g_children, child(out_cube, c).corner);
          }
          scale_sum += fin * gout;
        }
      }
    }
    total += scale_sum * T::pow2(-static_cast<long>(k) * w.dim);
  }
  return total;
}

template <class Scalar>
Scalar pairing(const StepFunction<Scalar>& f, const StepFunction<Scalar>& g) {
  Scalar s(0);
  const auto& small = f.support_size() <= g.support_size() ? f : g;
  const auto& large = f.support_size() <= g.support_size() ? g : f;
  for (const auto& [c, v] : small.values()) {
    auto it = large.values().find(c);
    if (it != large.values().end()) s += v * it->second;
  }
  return s * f.cell_volume();
}

std::vector<DyadicPoint> top_cube_cells(const GridShift& grid) {
  const ScaleWindow& w = grid.window();
  const DyadicCube top = cube_at(DyadicPoint{}, w.k_max, grid);
  const std::int64_t side = top.side;
  std::int64_t count = 1;
  for (int i = 0; i < w.dim; ++i) count *= side;
  if (count > (std::int64_t{1} << 20)) throw WindowError("top cube has too many base cells for a dense sweep");
  std::vector<DyadicPoint> cells;
  cells.reserve(static_cast<std::size_t>(count));
  std::array<std::int64_t, kMaxDim> idx{};
  while (true) {
    DyadicPoint p{top.corner};
    for (int i = 0; i < w.dim; ++i) p.coords[i] += idx[i];
    cells.push_back(p);
    int i = 0;
    while (i < w.dim && ++idx[i] == side) idx[i++] = 0;
    if (i == w.dim) break;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

NormEstimate estimate_operator_norm(const HaarShift& shift, CounterStream& stream, int max_iterations,
                                    double tolerance) {
  const ScaleWindow& w = shift.window();
  NormEstimate est;
  StepFunction<double> v(w);
  for (const DyadicPoint& cell : top_cube_cells(shift.grid())) v.set(cell, 2.0 * stream.uniform() - 1.0);
  auto normalize = [](StepFunction<double>& f) {
    const double nrm = std::sqrt(f.l2_norm_squared());
    if (nrm > 0.0) f *= 1.0 / nrm;
    return nrm;
  };
  normalize(v);
  double previous = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const StepFunction<double> u = apply_shift(shift, v);
    const double sigma = std::sqrt(u.l2_norm_squared());
    est.value = sigma;
    est.iterations = it;
    est.history.push_back(sigma);
    if (sigma == 0.0 || std::abs(sigma - previous) <= tolerance * sigma) {
      est.converged = true;
      break;
    }
    previous = sigma;
    v = apply_adjoint(shift, u);
    if (normalize(v) == 0.0) {
      est.converged = true;
      break;
    }
  }
  return est;
}

template double inner_product(const StepFunction<double>&, const HaarFunction&);
template Dyadic inner_product(const StepFunction<Dyadic>&, const HaarFunction&);
template StepFunction<double> apply_shift_term(const ShiftTerm&, const HaarPair&, const StepFunction<double>&);
template StepFunction<Dyadic> apply_shift_term(const ShiftTerm&, const HaarPair&, const StepFunction<Dyadic>&);
template StepFunction<double> apply_shift(const HaarShift&, const StepFunction<double>&);
template StepFunction<Dyadic> apply_shift(const HaarShift&, const StepFunction<Dyadic>&);
template StepFunction<double> apply_adjoint(const HaarShift&, const StepFunction<double>&);
template StepFunction<Dyadic> apply_adjoint(const HaarShift&, const StepFunction<Dyadic>&);
template double shift_bilinear_form(const HaarShift&, const StepFunction<double>&, const StepFunction<double>&);
template Dyadic shift_bilinear_form(const HaarShift&, const StepFunction<Dyadic>&, const StepFunction<Dyadic>&);
template double pairing(const StepFunction<double>&, const StepFunction<double>&);
template Dyadic pairing(const StepFunction<Dyadic>&, const StepFunction<Dyadic>&);

}  // namespace czlab
