#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czlab/dyadic.hpp"
#include "czlab/grid.hpp"
#include "czlab/rng.hpp"

namespace czlab {

/// h_Q = sum over children Q' of c_{Q'} 1_{Q'}. No mean-zero requirement.
struct HaarFunction {
  DyadicCube cube;
  std::array<double, kMaxChildren> coeffs{};

  double sup_norm() const;
};

/// c_{Q'} for the child holding x, or 0 when x lies outside the cube.
double evaluate(const HaarFunction& h, const DyadicPoint& x);

/// Finitely supported function, constant on base cells of the window.
template <class Scalar>
class StepFunction {
 public:
  using Map = std::map<Coords, Scalar>;

  StepFunction() = default;
  explicit StepFunction(ScaleWindow window) : window_(window) {}

  const ScaleWindow& window() const { return window_; }
  const Map& values() const { return values_; }
  bool empty() const { return values_.empty(); }
  std::size_t support_size() const { return values_.size(); }

  Scalar at(const DyadicPoint& cell) const {
    auto it = values_.find(cell.coords);
    return it == values_.end() ? Scalar(0) : it->second;
  }
  void set(const DyadicPoint& cell, Scalar value) {
    if (value == Scalar(0)) {
      values_.erase(cell.coords);
    } else {
      values_[cell.coords] = std::move(value);
    }
  }
  void add(const DyadicPoint& cell, const Scalar& value) {
    auto [it, inserted] = values_.try_emplace(cell.coords, value);
    if (!inserted) {
      it->second += value;
      if (it->second == Scalar(0)) values_.erase(it);
    } else if (value == Scalar(0)) {
      values_.erase(it);
    }
  }

  StepFunction& operator+=(const StepFunction& rhs) {
    for (const auto& [c, v] : rhs.values_) add(DyadicPoint{c}, v);
    return *this;
  }
  StepFunction& operator*=(const Scalar& s) {
    if (s == Scalar(0)) {
      values_.clear();
      return *this;
    }
    for (auto& [c, v] : values_) v *= s;
    return *this;
  }
  friend StepFunction operator+(StepFunction a, const StepFunction& b) { return a += b; }
  friend StepFunction operator*(StepFunction a, const Scalar& s) { return a *= s; }

  /// Base-cell volume 2^{k_min d}.
  Scalar cell_volume() const { return ScalarTraits<Scalar>::pow2(static_cast<long>(window_.k_min) * window_.dim); }
  /// sum v^2 * 2^{k_min d}; exact when Scalar is Dyadic.
  Scalar l2_norm_squared() const {
    Scalar s(0);
    for (const auto& [c, v] : values_) s += v * v;
    return s * cell_volume();
  }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    return a.window_ == b.window_ && a.values_ == b.values_;
  }

 private:
  ScaleWindow window_;
  Map values_;
};

StepFunction<Dyadic> to_exact(const StepFunction<double>& f);
StepFunction<double> to_double(const StepFunction<Dyadic>& f);

/// JSON list of [corner, value] pairs.
nlohmann::json step_function_to_json(const StepFunction<double>& f);
StepFunction<double> step_function_from_json(const ScaleWindow& window, const nlohmann::json& j);

/// <f, h> = sum over cells of f(cell) h(cell) 2^{k_min d}. Requires the
/// children of h's cube to sit at or above the base resolution.
template <class Scalar>
Scalar inner_product(const StepFunction<Scalar>& f, const HaarFunction& h);

/// One (Q, Q', Q'') summand of a Haar shift; Q' and Q'' are descendants of Q
/// at depths m and n.
struct ShiftTerm {
  DyadicCube cube;
  DyadicCube out_cube;  // Q', carries the emitted function
  DyadicCube in_cube;   // Q'', carries the function tested against f
};

/// Children coefficients of h^{Q'}_{Q''} (on Q'', `input`) and h^{Q''}_{Q'}
/// (on Q', `output`).
struct HaarPair {
  std::array<double, kMaxChildren> input{};
  std::array<double, kMaxChildren> output{};

  double sup_norm_product(int dim) const;
};

class PairAssignment {
 public:
  virtual ~PairAssignment() = default;
  virtual HaarPair pair(const ShiftTerm& term) const = 0;
};

/// Adapter for ad-hoc assignments.
class FunctionPairAssignment final : public PairAssignment {
 public:
  explicit FunctionPairAssignment(std::function<HaarPair(const ShiftTerm&)> fn) : fn_(std::move(fn)) {}
  HaarPair pair(const ShiftTerm& term) const override { return fn_(term); }

 private:
  std::function<HaarPair(const ShiftTerm&)> fn_;
};

/// Haar shift of complexity (m, n) on D_omega, truncated to the cubes Q whose
/// depth-m and depth-n descendants still have children inside the window.
class HaarShift {
 public:
  HaarShift(GridShift grid, int m, int n, std::shared_ptr<const PairAssignment> pairs);

  const GridShift& grid() const { return *grid_; }
  const ScaleWindow& window() const { return grid_->window(); }
  int m() const { return m_; }
  int n() const { return n_; }
  /// Scale range of the cubes Q carrying terms.
  int min_scale() const { return window().k_min + std::max(m_, n_) + 1; }
  int max_scale() const { return window().k_max; }

  HaarPair pair(const ShiftTerm& term) const { return pairs_->pair(term); }

 private:
  std::shared_ptr<const GridShift> grid_;
  int m_;
  int n_;
  std::shared_ptr<const PairAssignment> pairs_;
};

/// |Q|^{-1} <f, h^{Q'}_{Q''}> h^{Q''}_{Q'}.
template <class Scalar>
StepFunction<Scalar> apply_shift_term(const ShiftTerm& term, const HaarPair& pair, const StepFunction<Scalar>& f);

template <class Scalar>
StepFunction<Scalar> apply_shift(const HaarShift& shift, const StepFunction<Scalar>& f);

template <class Scalar>
StepFunction<Scalar> apply_adjoint(const HaarShift& shift, const StepFunction<Scalar>& g);

/// <S f, g> evaluated as sum_Q |Q|^{-1} sum <f, h^{Q'}_{Q''}> <g, h^{Q''}_{Q'}>,
/// without materializing S f.
template <class Scalar>
Scalar shift_bilinear_form(const HaarShift& shift, const StepFunction<Scalar>& f, const StepFunction<Scalar>& g);

template <class Scalar>
Scalar pairing(const StepFunction<Scalar>& f, const StepFunction<Scalar>& g);

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

/// Power iteration on S*S over the base cells of the top-scale cube holding the
/// origin. Every top cube carries an identical block, so this is the norm of
/// the truncated operator.
NormEstimate estimate_operator_norm(const HaarShift& shift, CounterStream& stream, int max_iterations = 20000,
                                    double tolerance = 1e-12);

/// Base cells of the top-scale cube holding the origin, in lexicographic order.
std::vector<DyadicPoint> top_cube_cells(const GridShift& grid);

}  // namespace czlab
