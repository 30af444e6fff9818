#include <atomic>
#include <cmath>
#include <memory>

#include "czlab/errors.hpp"
#include "czlab/shift_family.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace czlab;

namespace {

const CoefficientFamily kFamilies[] = {CoefficientFamily::cancellative, CoefficientFamily::random_bounded,
                                       CoefficientFamily::block};

double sup(const std::array<double, kMaxChildren>& c) {
  double s = 0;
  for (double v : c) s = std::max(s, std::abs(v));
  return s;
}

Coords random_rel(CounterStream& s, int dim, int depth) {
  Coords c{};
  for (int i = 0; i < dim; ++i) c[i] = static_cast<std::int64_t>(s() % (std::uint64_t{1} << depth));
  return c;
}

}  // namespace

TEST_CASE("lambda rules") {
  ShiftFamilySpec spec;
  spec.delta = 0.5;
  CHECK(lambda(spec, 1, 1, 0) == 0.5);
  CHECK(lambda_bound(0.5, 1, 1) == 0.5);
  for (LambdaRule rule : {LambdaRule::saturated, LambdaRule::alternating, LambdaRule::random_sign, LambdaRule::table}) {
    spec.lambda_rule = rule;
    for (std::uint64_t digest = 0; digest < 50; ++digest) CHECK(std::abs(lambda(spec, 0, 0, digest)) <= 1);
  }
  spec.lambda_rule = LambdaRule::alternating;
  for (double delta : {0.1, 0.5, 0.9})
    for (int m = 0; m <= 8; ++m)
      for (int n = 0; m + n <= 8; ++n) {
        spec.delta = delta;
        CHECK(lambda(spec, m, n, 123) == doctest::Approx(std::pow(-1.0, m + n) * std::pow(2.0, -(m + n) * delta)));
      }
  CHECK_THROWS_AS(lambda(spec, -1, 0, 0), DomainError);
}

TEST_CASE("lambda magnitudes stay under the bound for every rule") {
  CounterStream s(21, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    ShiftFamilySpec spec;
    spec.delta = 0.01 + 0.98 * s.uniform();
    spec.lambda_rule = static_cast<LambdaRule>(s() % 4);
    const int m = static_cast<int>(s() % 10), n = static_cast<int>(s() % 10);
    spec.lambda_table[{m, n}] = lambda_bound(spec.delta, m, n) * (2 * s.uniform() - 1);
    spec.validate();
    CHECK(std::abs(lambda(spec, m, n, s())) <= lambda_bound(spec.delta, m, n));
  }
}

TEST_CASE("random-sign lambda depends on the grid digest only through its sign") {
  ShiftFamilySpec spec;
  spec.lambda_rule = LambdaRule::random_sign;
  int negative = 0;
  for (std::uint64_t d = 0; d < 1000; ++d) {
    const double l = lambda(spec, 1, 2, d);
    CHECK(std::abs(l) == lambda_bound(spec.delta, 1, 2));
    CHECK(l == lambda(spec, 1, 2, d));
    negative += l < 0 ? 1 : 0;
  }
  CHECK(negative > 400);
  CHECK(negative < 600);
}

TEST_CASE("spec validation") {
  ShiftFamilySpec spec;
  spec.delta = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.delta = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.delta = 0.5;
  spec.lambda_table[{1, 1}] = 0.6;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.lambda_table[{1, 1}] = -0.5;
  CHECK_NOTHROW(spec.validate());
  CHECK(ShiftFamilySpec::default_cap(0.4) == 8);
  CHECK(ShiftFamilySpec::default_cap(0.3) == 12);
  spec.complexity_cap = 3;
  CHECK(spec.cap() == 3);
}

TEST_CASE("names round-trip") {
  for (LambdaRule r : {LambdaRule::saturated, LambdaRule::alternating, LambdaRule::random_sign, LambdaRule::table})
    CHECK(parse_lambda_rule(to_string(r)) == r);
  for (CoefficientFamily f : kFamilies) CHECK(parse_coefficient_family(to_string(f)) == f);
  CHECK(to_string(LambdaRule::saturated) == "default");
  CHECK_THROWS_AS(parse_lambda_rule("bogus"), ConfigError);
  CHECK_THROWS_AS(parse_coefficient_family("bogus"), ConfigError);
}

TEST_CASE("generated pairs respect the sup-norm product bound") {
  CounterStream s(22, 0);
  for (CoefficientFamily family : kFamilies)
    for (int dim = 1; dim <= 3; ++dim)
      for (int trial = 0; trial < 500; ++trial) {
        ShiftFamilySpec spec;
        spec.family = family;
        spec.coeff_seed = s();
        const int m = static_cast<int>(s() % 4), n = static_cast<int>(s() % 4);
        const HaarPair p = family_pair(spec, dim, m, n, random_rel(s, dim, m), random_rel(s, dim, n));
        CHECK(p.sup_norm_product(dim) <= 1.0);
        CHECK(p.sup_norm_product(dim) == sup(p.input) * sup(p.output));
        const unsigned nchild = 1U << dim;
        for (unsigned c = nchild; c < kMaxChildren; ++c) CHECK(p.input[c] == 0);
        double in_sum = 0;
        for (unsigned c = 0; c < nchild; ++c) {
          in_sum += p.input[c];
          if (family == CoefficientFamily::block) CHECK((p.input[c] == 0 || p.input[c] == 1));
          if (family == CoefficientFamily::random_bounded) {
            CHECK(std::ldexp(p.input[c], 16) == std::floor(std::ldexp(p.input[c], 16)));
          }
        }
        if (family == CoefficientFamily::cancellative) CHECK(in_sum == 0);
        if (family == CoefficientFamily::block) CHECK(in_sum >= 1);
        if (family == CoefficientFamily::random_bounded) CHECK(sup(p.input) > 0.5);
      }
}

TEST_CASE("pair assignment is deterministic and translation invariant") {
  const ScaleWindow w{-6, 2, 2};
  ShiftFamilySpec spec;
  spec.family = CoefficientFamily::random_bounded;
  spec.coeff_seed = 99;
  CounterStream a(1, 0), b(2, 0);
  const GridShift g1 = GridShift::sample(w, a), g2 = GridShift::sample(w, b);
  const FamilyPairAssignment pairs(spec, w, 1, 2);
  const DyadicCube q1 = cube_at(DyadicPoint{Coords{5, 9, 0}}, 0, g1);
  const DyadicCube q2 = cube_at(DyadicPoint{Coords{-300, 77, 0}}, 0, g2);
  const auto o1 = descendants_at_depth(q1, 1), o2 = descendants_at_depth(q2, 1);
  const auto i1 = descendants_at_depth(q1, 2), i2 = descendants_at_depth(q2, 2);
  for (std::size_t i = 0; i < o1.size(); ++i)
    for (std::size_t j = 0; j < i1.size(); ++j) {
      const HaarPair p = pairs.pair(ShiftTerm{q1, o1[i], i1[j]});
      const HaarPair r = pairs.pair(ShiftTerm{q2, o2[i], i2[j]});
      CHECK(p.input == r.input);
      CHECK(p.output == r.output);
      const HaarPair again = FamilyPairAssignment(spec, w, 1, 2).pair(ShiftTerm{q1, o1[i], i1[j]});
      CHECK(again.output == p.output);
    }
}

TEST_CASE("normalization factors are powers of two covering the scale count") {
  ShiftFamilySpec spec;
  const ScaleWindow w{-14, 6, 1};
  CHECK(normalization_factor(spec, w, 3, 1) == 1.0);
  spec.family = CoefficientFamily::block;
  for (int m = 0; m < 6; ++m) {
    const double f = normalization_factor(spec, w, m, 0);
    int e = 0;
    CHECK(std::frexp(f, &e) == 0.5);
    const int scales = w.k_max - w.k_min - m;
    CHECK(f * scales <= 1.0);
    CHECK(2 * f * scales > 1.0);
  }
}

TEST_CASE("complexity pairs and admissibility") {
  ShiftFamilySpec spec;
  spec.complexity_cap = 2;
  const auto pairs = complexity_pairs(spec, ScaleWindow{-14, 6, 1});
  const std::vector<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  CHECK(pairs == expected);
  CHECK(admits(ScaleWindow{-3, 0, 1}, 2, 0));
  CHECK(!admits(ScaleWindow{-3, 0, 1}, 3, 0));
  CHECK(complexity_pairs(spec, ScaleWindow{-2, 0, 1}).size() == 4);
  CHECK_THROWS_AS(build_shift(spec, 2, 0, GridShift(ScaleWindow{-2, 0, 1})), WindowError);
}

TEST_CASE("a (1,0) shift on a 3-scale window has two terms per cube") {
  const ScaleWindow w{-3, 0, 1};
  const GridShift g(w);
  std::atomic<int> calls{0};
  auto counting = std::make_shared<FunctionPairAssignment>([&calls](const ShiftTerm& t) {
    ++calls;
    CHECK(t.out_cube.scale == t.cube.scale - 1);
    CHECK(t.in_cube == t.cube);
    HaarPair p;
    p.input = {1, 1};
    p.output = {1, -1};
    return p;
  });
  const HaarShift shift(g, 1, 0, counting);
  StepFunction<double> ones(w);
  for (const auto& c : top_cube_cells(g)) ones.set(c, 1.0);
  (void)apply_shift(shift, ones);
  int expected = 0;
  oracle::for_each_term(g, 1, 0, [&](const DyadicCube&, const DyadicCube&, const DyadicCube&) { ++expected; });
  // Cubes at scales -1 and 0 inside the top cube: 2 + 1, two terms each.
  CHECK(expected == 6);
  CHECK(calls == expected);
}

TEST_CASE("scale signs are seeded per scale") {
  ShiftFamilySpec spec;
  int flips = 0;
  for (int k = -14; k < 6; ++k) {
    CHECK(std::abs(scale_sign(spec, 0, 0, k)) == 1);
    CHECK(scale_sign(spec, 0, 0, k) == scale_sign(spec, 0, 0, k));
    flips += scale_sign(spec, 0, 0, k) != scale_sign(spec, 0, 0, k + 1) ? 1 : 0;
  }
  CHECK(flips > 0);
}

TEST_CASE("every family shift has norm at most one") {
  for (int dim = 1; dim <= 2; ++dim) {
    const ScaleWindow w = dim == 1 ? ScaleWindow{-6, 0, 1} : ScaleWindow{-3, 0, 2};
    for (CoefficientFamily family : kFamilies) {
      ShiftFamilySpec spec;
      spec.family = family;
      spec.complexity_cap = 3;
      spec.coeff_seed = 17;
      CounterStream gs(3, 0);
      const GridShift g = GridShift::sample(w, gs);
      for (auto [m, n] : complexity_pairs(spec, w)) {
        CounterStream s(4, 0);
        const NormEstimate est = estimate_operator_norm(build_shift(spec, m, n, g), s);
        CHECK(est.value <= 1 + 1e-9);
      }
    }
  }
}
