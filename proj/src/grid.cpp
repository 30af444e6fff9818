#include "czlab/grid.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"

namespace czlab {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void require_scale(const ScaleWindow& w, int k) {
  if (!w.contains_scale(k)) {
    throw WindowError("scale " + std::to_string(k) + " outside window [" + std::to_string(w.k_min) +
                      ", " + std::to_string(w.k_max) + "]");
  }
}

}  // namespace

void ScaleWindow::validate() const {
  if (dim < 1 || dim > kMaxDim) {
    throw DomainError("dimension must lie in [1, " + std::to_string(kMaxDim) + "], got " +
                      std::to_string(dim));
  }
  if (k_min >= k_max) throw DomainError("scale window requires k_min < k_max");
  // Keep squared distances and volumes inside 63-bit integers.
  if (k_max - k_min > 28) throw DomainError("scale window spans more than 28 scales");
}

double ScaleWindow::unit() const { return std::ldexp(1.0, k_min); }

DyadicPoint make_point(std::span<const std::int64_t> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim)) throw DomainError("too many coordinates");
  DyadicPoint p;
  for (std::size_t i = 0; i < coords.size(); ++i) p.coords[i] = coords[i];
  return p;
}

std::int64_t distance_squared_units(const DyadicPoint& a, const DyadicPoint& b, int dim) {
  std::int64_t s = 0;
  for (int i = 0; i < dim; ++i) {
    const std::int64_t d = a.coords[i] - b.coords[i];
    s += d * d;
  }
  return s;
}

double distance(const DyadicPoint& a, const DyadicPoint& b, const ScaleWindow& window) {
  return std::sqrt(static_cast<double>(distance_squared_units(a, b, window.dim))) * window.unit();
}

double DyadicCube::side_length() const { return std::ldexp(1.0, scale); }
double DyadicCube::volume() const { return std::ldexp(1.0, scale * dim); }
double DyadicCube::diameter() const { return std::sqrt(static_cast<double>(dim)) * side_length(); }
double DyadicCube::inverse_volume() const { return std::ldexp(1.0, -scale * dim); }

GridShift::GridShift(ScaleWindow window)
    : GridShift(window, std::vector<Digit>(static_cast<std::size_t>(window.k_max - window.k_min))) {}

GridShift::GridShift(ScaleWindow window, std::vector<Digit> digits)
    : window_(window), digits_(std::move(digits)) {
  window_.validate();
  if (digits_.size() != static_cast<std::size_t>(window_.k_max - window_.k_min)) {
    throw DomainError("grid shift needs one digit per scale in [k_min, k_max)");
  }
  for (const auto& dgt : digits_) {
    for (int i = 0; i < kMaxDim; ++i) {
      if (dgt[i] > 1 || (i >= window_.dim && dgt[i] != 0)) throw DomainError("grid shift digits must be binary");
    }
  }
  rebuild();
}

void GridShift::rebuild() {
  offsets_.assign(static_cast<std::size_t>(window_.num_scales()), Coords{});
  std::uint64_t h = mix64(static_cast<std::uint64_t>(window_.dim));
  h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(window_.k_min)));
  h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(window_.k_max)));
  for (std::size_t j = 0; j < digits_.size(); ++j) {
    const std::int64_t step = std::int64_t{1} << j;
    std::uint64_t bits = 0;
    for (int i = 0; i < window_.dim; ++i) {
      offsets_[j + 1][i] = offsets_[j][i] + digits_[j][i] * step;
      bits |= static_cast<std::uint64_t>(digits_[j][i]) << i;
    }
    h = hash_combine(h, bits);
  }
  digest_ = h;
}

GridShift GridShift::sample(const ScaleWindow& window, CounterStream& stream) {
  window.validate();
  std::vector<Digit> digits(static_cast<std::size_t>(window.k_max - window.k_min));
  for (auto& dgt : digits) {
    const std::uint64_t bits = stream();
    for (int i = 0; i < window.dim; ++i) dgt[i] = static_cast<std::uint8_t>((bits >> (63 - i)) & 1U);
  }
  return {window, std::move(digits)};
}

const GridShift::Digit& GridShift::digit(int j) const {
  if (j < window_.k_min || j >= window_.k_max) throw WindowError("digit index outside [k_min, k_max)");
  return digits_[static_cast<std::size_t>(j - window_.k_min)];
}

const Coords& GridShift::offset(int k) const {
  require_scale(window_, k);
  return offsets_[static_cast<std::size_t>(k - window_.k_min)];
}

nlohmann::json GridShift::to_json() const {
  nlohmann::json omega = nlohmann::json::array();
  for (const auto& dgt : digits_) {
    nlohmann::json bits = nlohmann::json::array();
    for (int i = 0; i < window_.dim; ++i) bits.push_back(static_cast<int>(dgt[i]));
    omega.push_back(std::move(bits));
  }
  return {{"k_min", window_.k_min}, {"k_max", window_.k_max}, {"d", window_.dim}, {"omega", omega}};
}

GridShift GridShift::from_json(const nlohmann::json& j) {
  ScaleWindow w{j.at("k_min").get<int>(), j.at("k_max").get<int>(), j.at("d").get<int>()};
  w.validate();
  std::vector<Digit> digits;
  for (const auto& bits : j.at("omega")) {
    if (bits.size() != static_cast<std::size_t>(w.dim)) throw DomainError("grid shift digit has wrong dimension");
    Digit dgt{};
    for (int i = 0; i < w.dim; ++i) dgt[i] = static_cast<std::uint8_t>(bits.at(i).get<int>());
    digits.push_back(dgt);
  }
  return {w, std::move(digits)};
}

DyadicCube cube_at(const DyadicPoint& x, int k, const GridShift& shift) {
  const ScaleWindow& w = shift.window();
  require_scale(w, k);
  DyadicCube q;
  q.dim = w.dim;
  q.scale = k;
  q.side = w.side_units(k);
  const Coords& s = shift.offset(k);
  for (int i = 0; i < w.dim; ++i) q.corner[i] = s[i] + floor_div(x.coords[i] - s[i], q.side) * q.side;
  return q;
}

bool contains(const DyadicCube& q, const DyadicPoint& x) {
  for (int i = 0; i < q.dim; ++i) {
    if (x.coords[i] < q.corner[i] || x.coords[i] >= q.corner[i] + q.side) return false;
  }
  return true;
}

DyadicCube child(const DyadicCube& q, unsigned index) {
  if (q.side < 2) throw WindowError("children requested below the base resolution");
  DyadicCube c = q;
  c.scale = q.scale - 1;
  c.side = q.side / 2;
  for (int i = 0; i < q.dim; ++i) {
    if ((index >> i) & 1U) c.corner[i] += c.side;
  }
  return c;
}

unsigned child_index(const DyadicCube& q, const DyadicPoint& x) {
  const std::int64_t half = q.side / 2;
  unsigned index = 0;
  for (int i = 0; i < q.dim; ++i) {
    if (x.coords[i] - q.corner[i] >= half) index |= 1U << i;
  }
  return index;
}

unsigned child_index(const DyadicCube& q, const DyadicCube& sub) {
  unsigned index = 0;
  for (int i = 0; i < q.dim; ++i) {
    if (sub.corner[i] != q.corner[i]) index |= 1U << i;
  }
  return index;
}

std::vector<DyadicCube> children(const DyadicCube& q) {
  std::vector<DyadicCube> out;
  const unsigned count = 1U << q.dim;
  out.reserve(count);
  for (unsigned c = 0; c < count; ++c) out.push_back(child(q, c));
  return out;
}

DyadicCube parent(const DyadicCube& q, const GridShift& shift) {
  if (q.scale >= shift.window().k_max) throw WindowError("parent requested above the top of the window");
  return cube_at(DyadicPoint{q.corner}, q.scale + 1, shift);
}

std::vector<DyadicCube> descendants_at_depth(const DyadicCube& q, int depth) {
  if (depth < 0) throw DomainError("negative descendant depth");
  if (depth >= 63 || (q.side >> depth) < 1) throw WindowError("descendants requested below the base resolution");
  std::vector<DyadicCube> level{q};
  for (int r = 0; r < depth; ++r) {
    std::vector<DyadicCube> next;
    next.reserve(level.size() << q.dim);
    for (const auto& cube : level) {
      for (unsigned c = 0; c < (1U << q.dim); ++c) next.push_back(child(cube, c));
    }
    level = std::move(next);
  }
  return level;
}

Coords relative_position(const DyadicCube& q, const DyadicCube& descendant) {
  Coords rel{};
  for (int i = 0; i < q.dim; ++i) rel[i] = (descendant.corner[i] - q.corner[i]) / descendant.side;
  return rel;
}

std::int64_t boundary_distance_units(const DyadicPoint& x, const DyadicCube& q) {
  if (!contains(q, x)) throw DomainError("boundary_distance: point outside cube");
  std::int64_t best = q.side;
  for (int i = 0; i < q.dim; ++i) {
    const std::int64_t lo = x.coords[i] - q.corner[i];
    const std::int64_t hi = q.corner[i] + q.side - x.coords[i];
    best = std::min({best, lo, hi});
  }
  return best;
}

Dyadic boundary_distance(const DyadicPoint& x, const DyadicCube& q, const ScaleWindow& window) {
  return Dyadic(static_cast<long>(boundary_distance_units(x, q))) * Dyadic::pow2(window.k_min);
}

std::int64_t center_boundary_distance_half_units(const DyadicPoint& x, const DyadicCube& q) {
  if (!contains(q, x)) throw DomainError("boundary_distance: point outside cube");
  std::int64_t best = 2 * q.side;
  for (int i = 0; i < q.dim; ++i) {
    const std::int64_t lo = 2 * (x.coords[i] - q.corner[i]) + 1;
    const std::int64_t hi = 2 * (q.corner[i] + q.side - x.coords[i]) - 1;
    best = std::min({best, lo, hi});
  }
  return best;
}

AncestorChain::AncestorChain(const DyadicPoint& x, const GridShift& shift) : k_min_(shift.window().k_min) {
  const ScaleWindow& w = shift.window();
  cubes_.reserve(static_cast<std::size_t>(w.num_scales()));
  for (int k = w.k_min; k <= w.k_max; ++k) cubes_.push_back(cube_at(x, k, shift));
}

}  // namespace czlab
