#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "czlab/dyadic.hpp"
#include "czlab/rng.hpp"

namespace czlab {

inline constexpr int kMaxDim = 3;
inline constexpr int kMaxChildren = 1 << kMaxDim;

/// Integer coordinates in units of the base resolution 2^{k_min}. Entries
/// beyond the active dimension stay zero.
using Coords = std::array<std::int64_t, kMaxDim>;

/// Finite range of scales [k_min, k_max] in dimension `dim`. Every coordinate
/// is an integer multiple of 2^{k_min}.
struct ScaleWindow {
  int k_min = -14;
  int k_max = 6;
  int dim = 1;

  void validate() const;
  int num_scales() const { return k_max - k_min + 1; }
  /// Side length of a scale-k cube in base units, 2^{k - k_min}.
  std::int64_t side_units(int k) const { return std::int64_t{1} << (k - k_min); }
  double unit() const;
  bool contains_scale(int k) const { return k >= k_min && k <= k_max; }

  friend bool operator==(const ScaleWindow&, const ScaleWindow&) = default;
};

/// A point coords * 2^{k_min}. It also names the base cell [coords, coords+1)
/// whose center is used wherever an interior evaluation point is needed.
struct DyadicPoint {
  Coords coords{};

  friend auto operator<=>(const DyadicPoint&, const DyadicPoint&) = default;
};

DyadicPoint make_point(std::span<const std::int64_t> coords);
/// Squared Euclidean distance in base units.
std::int64_t distance_squared_units(const DyadicPoint& a, const DyadicPoint& b, int dim);
double distance(const DyadicPoint& a, const DyadicPoint& b, const ScaleWindow& window);

/// Half-open cube corner + [0, side)^d, corner and side in base units.
struct DyadicCube {
  int dim = 1;
  int scale = 0;
  std::int64_t side = 1;
  Coords corner{};

  double side_length() const;
  double volume() const;
  double diameter() const;
  /// |Q|^{-1} = 2^{-scale * dim}, exact in double.
  double inverse_volume() const;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
};

/// Truncated realization of omega in ({0,1}^d)^Z: one binary d-tuple per scale
/// j in [k_min, k_max), and the cumulative offsets s_k = sum_{j<k} omega_j 2^j.
class GridShift {
 public:
  using Digit = std::array<std::uint8_t, kMaxDim>;

  explicit GridShift(ScaleWindow window);  // zero shift: the standard grid
  GridShift(ScaleWindow window, std::vector<Digit> digits);

  static GridShift sample(const ScaleWindow& window, CounterStream& stream);

  const ScaleWindow& window() const { return window_; }
  const Digit& digit(int j) const;
  const std::vector<Digit>& digits() const { return digits_; }
  /// s_k in base units, for k in [k_min, k_max].
  const Coords& offset(int k) const;
  std::uint64_t digest() const { return digest_; }

  nlohmann::json to_json() const;
  static GridShift from_json(const nlohmann::json& j);

  friend bool operator==(const GridShift& a, const GridShift& b) {
    return a.window_ == b.window_ && a.digits_ == b.digits_;
  }

 private:
  void rebuild();

  ScaleWindow window_;
  std::vector<Digit> digits_;
  std::vector<Coords> offsets_;
  std::uint64_t digest_ = 0;
};

/// The unique Q in D_omega^k with x in Q.
DyadicCube cube_at(const DyadicPoint& x, int k, const GridShift& shift);
bool contains(const DyadicCube& q, const DyadicPoint& x);
/// Bit i of the index is set when the child occupies the upper half along axis i.
DyadicCube child(const DyadicCube& q, unsigned index);
unsigned child_index(const DyadicCube& q, const DyadicPoint& x);
/// Index of `sub` (at scale q.scale - 1) among the children of q.
unsigned child_index(const DyadicCube& q, const DyadicCube& sub);
std::vector<DyadicCube> children(const DyadicCube& q);
DyadicCube parent(const DyadicCube& q, const GridShift& shift);
std::vector<DyadicCube> descendants_at_depth(const DyadicCube& q, int depth);
/// Position of a depth-r descendant inside q, per axis in [0, 2^r).
Coords relative_position(const DyadicCube& q, const DyadicCube& descendant);

/// d(x, dQ) = min_i min(x_i - a_i, a_i + side - x_i), in base units.
std::int64_t boundary_distance_units(const DyadicPoint& x, const DyadicCube& q);
Dyadic boundary_distance(const DyadicPoint& x, const DyadicCube& q, const ScaleWindow& window);
/// Distance from the center of x's base cell to dQ, in half base units.
std::int64_t center_boundary_distance_half_units(const DyadicPoint& x, const DyadicCube& q);

/// Cubes containing x at every window scale, indexed by k - k_min.
class AncestorChain {
 public:
  AncestorChain(const DyadicPoint& x, const GridShift& shift);
  const DyadicCube& at(int k) const { return cubes_[static_cast<std::size_t>(k - k_min_)]; }

 private:
  int k_min_;
  std::vector<DyadicCube> cubes_;
};

}  // namespace czlab
