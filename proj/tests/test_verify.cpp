#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "czlab/errors.hpp"
#include "czlab/experiments.hpp"
#include "czlab/verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace czlab;

namespace {

DyadicPoint pt(std::int64_t a, std::int64_t b = 0) { return DyadicPoint{Coords{a, b, 0}}; }

std::array<double, kMaxChildren> coeffs(double a, double b) {
  std::array<double, kMaxChildren> c{};
  c[0] = a;
  c[1] = b;
  return c;
}

// Fraction of the `side` positions of a point inside its cube (one axis) that
// satisfy `near(distance to the nearer face)`.
template <class Pred>
double axis_fraction(std::int64_t side, Pred near) {
  std::int64_t hits = 0;
  for (std::int64_t u = 0; u < side; ++u) hits += near(u, side) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(side);
}

}  // namespace

TEST_CASE("boundary lemma closed form") {
  CHECK(boundary_probability(0.25, 1) == 0.5);
  CHECK(boundary_probability(0.25, 2) == 0.75);
  CHECK(boundary_probability(0.0, 1) == 0.0);
  CHECK(boundary_probability(0.0, 2) == 0.0);
  CHECK(boundary_probability(0.5, 2) == 1.0);
  CHECK_THROWS_AS(boundary_probability(0.6, 1), DomainError);
  CHECK_THROWS_AS(boundary_probability(-0.1, 1), DomainError);
}

TEST_CASE("discrete boundary probability matches cell-center enumeration") {
  for (std::int64_t side : {1, 2, 3, 8, 64, 1024})
    for (double tau : {0.0, 0.01, 0.05, 0.1, 0.25, 0.3, 0.5})
      for (int dim = 1; dim <= 2; ++dim) {
        const double p1 = axis_fraction(side, [&](std::int64_t u, std::int64_t s) {
          return static_cast<double>(std::min(2 * u + 1, 2 * s - 2 * u - 1)) <= 2.0 * tau * static_cast<double>(s);
        });
        CHECK(boundary_probability_discrete(tau, dim, side) == doctest::Approx(1 - std::pow(1 - p1, dim)));
      }
}

TEST_CASE("boundary lemma sweep") {
  for (int dim = 1; dim <= 2; ++dim) {
    const ScaleWindow w{-14, 6, dim};
    const SweepReport r = boundary_lemma_check(w, 0, {0.0, 0.05, 0.25}, 20000, 3);
    CHECK(r.pass);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].estimate == 0.0);
    CHECK(r.rows[2].reference == boundary_probability(0.25, dim));
    for (const auto& row : r.rows) CHECK(row.seed == 3);
  }
  CHECK_THROWS_AS(boundary_lemma_check(ScaleWindow{-4, 2, 1}, 3, {0.1}, 10, 1), WindowError);
  CHECK_THROWS_AS(boundary_lemma_check(ScaleWindow{-4, 2, 1}, 0, {0.7}, 10, 1), DomainError);
}

TEST_CASE("E_k scales and exact probabilities") {
  const ScaleWindow w{-14, 6, 1};
  const DyadicPoint x = pt(1000), xp = pt(1257);
  CHECK(ek_scale(w, x, xp, 0) == -5);  // 512 >= 257
  CHECK(ek_scale(w, x, xp, 1) == -4);
  CHECK(ek_scale(w, x, xp, 6) == 1);
  CHECK_THROWS_AS(ek_scale(w, x, xp, 20), WindowError);
  CHECK_THROWS_AS(ek_scale(w, x, x, 1), DomainError);

  for (int dim = 1; dim <= 2; ++dim) {
    const ScaleWindow small{-8, 0, dim};
    for (std::int64_t h = 1; h <= 7; ++h)
      for (int k = 0; k <= 4; ++k) {
        const DyadicPoint a = pt(0, 0);
        const DyadicPoint b = dim == 1 ? pt(h) : pt(h, 1);
        const std::int64_t d2 = distance_squared_units(a, b, dim);
        const std::int64_t side = small.side_units(ek_scale(small, a, b, k));
        // The cube offset is uniform, so the position of x in its cube is too.
        const double p1 = axis_fraction(side, [&](std::int64_t u, std::int64_t s) {
          const std::int64_t bd = std::min(u, s - u);
          return bd * bd < 4 * d2;
        });
        CHECK(ek_probability_exact(small, a, b, k) == doctest::Approx(1 - std::pow(1 - p1, dim)));
      }
  }
}

TEST_CASE("E_k sweep decays monotonically with shared samples") {
  const ScaleWindow w{-14, 6, 1};
  const SweepReport r = ek_decay_check(w, pt(12345), pt(12345 + 257), {1, 2, 3, 4, 5, 6}, 20000, 4);
  CHECK(r.summary.at("monotone") == 1.0);
  for (const auto& row : r.rows)
    CHECK(std::abs(row.estimate - row.extra.at("exact")) <= 4 * std::sqrt(row.extra.at("exact") / 20000) + 1e-12);
  CHECK_THROWS_AS(ek_decay_check(w, pt(0), pt(257), {1, 30}, 100, 1), WindowError);
}

TEST_CASE("log-spaced pairs") {
  const ScaleWindow w{-14, 6, 1};
  const auto pairs = log_spaced_pairs(w, 20, 2.0);
  REQUIRE(pairs.size() == 20);
  double prev = 0;
  for (const auto& [x, y] : pairs) {
    const double r = distance(x, y, w);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(distance(pairs.back().first, pairs.back().second, w) == doctest::Approx(16.0));
  CHECK(distance(pairs.front().first, pairs.front().second, w) == doctest::Approx(0.16).epsilon(1e-3));
  CHECK_THROWS_AS(log_spaced_pairs(ScaleWindow{-4, 2, 1}, 20, 2.0), ResolutionError);
}

TEST_CASE("size sweep") {
  const ScaleWindow w{-10, 2, 1};
  const auto pairs = log_spaced_pairs(w, 6, 1.5);
  ShiftFamilySpec zero;
  zero.lambda_rule = LambdaRule::table;
  const SweepReport z = size_estimate_sweep(zero, w, pairs, 50, 1);
  CHECK(z.summary.at("sup") == 0.0);
  CHECK(z.pass);

  ShiftFamilySpec single;
  single.lambda_rule = LambdaRule::table;
  single.lambda_table[{0, 0}] = 1.0;
  single.complexity_cap = 0;
  const GridShift standard(w);
  for (const auto& [x, y] : pairs) {
    const double k = kernel_omega(x, y, standard, single);
    CHECK(k == oracle::shift_kernel(standard, 0, 0, FamilyPairAssignment(single, w, 0, 0), x, y).to_double());
    const double r = distance(x, y, w);
    CHECK(std::abs(k) * r <= size_bound(single, w, r) * r);
  }

  ShiftFamilySpec spec;
  const SweepReport d = size_estimate_sweep(spec, w, log_spaced_pairs(w, 20, 1.5), 200, 2);
  CHECK(d.pass);
  CHECK(std::isfinite(d.summary.at("sup_ratio")));
  CHECK_THROWS_AS(size_estimate_sweep(spec, w, {}, 10, 1), DomainError);
}

TEST_CASE("holder sweep edge cases") {
  const ScaleWindow w{-12, 2, 1};
  const DyadicPoint x = pt(1000), y = pt(-1000);
  Coords e0{};
  e0[0] = 1;
  ShiftFamilySpec zero;
  zero.lambda_rule = LambdaRule::table;
  const SweepReport z = holder_sweep(zero, w, y, x, e0, {4, 6, 8}, 100, 1);
  CHECK(z.pass);
  for (const auto& row : z.rows) CHECK(row.estimate == 0.0);

  ShiftFamilySpec spec;
  spec.complexity_cap = 4;
  const SweepReport a = holder_sweep(spec, w, y, x, e0, {4, 6, 8, 10}, 400, 5);
  const SweepReport b = holder_sweep(spec, w, y, x, e0, {4, 6, 8, 10}, 400, 5);
  CHECK(to_csv(a) == to_csv(b));
  for (const auto& row : a.rows) CHECK(row.estimate <= row.reference + 3 * row.std_error);
  CHECK_THROWS_AS(holder_sweep(spec, w, y, x, Coords{}, {4}, 10, 1), DomainError);
  CHECK_THROWS_AS(holder_sweep(spec, w, y, x, e0, {0}, 10, 1), DomainError);  // |x - x'| too large
  CHECK_THROWS_AS(holder_sweep(spec, w, y, x, e0, {13}, 10, 1), ResolutionError);
}

TEST_CASE("classical Haar jump across the child boundary") {
  const ScaleWindow w{-4, 1, 1};
  const GridShift g(w);
  const DyadicCube unit = cube_at(pt(0), 0, g);
  auto pairs = std::make_shared<FunctionPairAssignment>([unit](const ShiftTerm& t) {
    HaarPair p;
    if (t.cube == unit) {
      p.input = coeffs(1, 1);
      p.output = coeffs(1, -1);
    }
    return p;
  });
  const HaarShift shift(g, 0, 0, pairs);
  const AncestorChain y(pt(2), g);
  auto k = [&](std::int64_t x) { return shift_kernel<Dyadic>(shift, AncestorChain(pt(x), g), y); };
  CHECK(abs(k(7) - k(8)) == Dyadic(2));
  CHECK(k(4) == k(5));
  CHECK(k(9) == k(15));
}

TEST_CASE("single-shift failure report") {
  const ScaleWindow w{-14, 6, 1};
  RunConfig cfg;
  cfg.experiment = Experiment::single_shift;
  const SingleShiftSetup setup = single_shift_setup(cfg);
  ShiftFamilySpec spec;
  const SweepReport r = single_shift_holder_failure(setup.omega, 0, 0, spec, setup.y, setup.x_boundary,
                                                    {4, 5, 6, 7, 8, 9, 10, 11, 12});
  CHECK(r.pass);
  for (std::size_t j = 1; j < r.rows.size(); ++j) {
    CHECK(r.rows[j].estimate > r.rows[j - 1].estimate);
    CHECK(r.rows[j].extra.at("jump") == r.rows[0].extra.at("jump"));
  }
  CHECK(r.summary.at("min_growth") >= std::pow(2.0, spec.delta) * (1 - 1e-12));
  CHECK_THROWS_AS(single_shift_holder_failure(setup.omega, 0, 0, spec, setup.y, setup.x_boundary, {5, 4}),
                  DomainError);
}

TEST_CASE("vanishing identity") {
  const ScaleWindow w{-10, 2, 1};
  ShiftFamilySpec spec;
  spec.complexity_cap = 4;
  const GridShift g = sample_grid(w, 1, 0);
  const auto same = vanishing_identity_check(g, 1, pt(40), pt(40), pt(-300), spec);
  CHECK(same.precondition_met);
  CHECK(same.holds);

  CounterStream s(51, 0);
  int met = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const GridShift omega = sample_grid(w, 52, trial);
    ShiftFamilySpec sp;
    sp.family = static_cast<CoefficientFamily>(s() % 3);
    sp.coeff_seed = s();
    sp.complexity_cap = 4;
    const int m = static_cast<int>(s() % 4);
    const DyadicPoint y = pt(static_cast<std::int64_t>(s() % 4096) - 2048);
    const DyadicPoint x = pt(static_cast<std::int64_t>(s() % 4096) - 2048);
    const DyadicPoint xp = pt(x.coords[0] + static_cast<std::int64_t>(s() % 9) - 4);
    const VanishingResult res = vanishing_identity_check(omega, m, x, xp, y, sp);
    if (res.precondition_met) {
      ++met;
      CHECK(res.holds);
    } else {
      CHECK(res.offending.has_value());
    }
  }
  CHECK(met > 100);
}

TEST_CASE("fubini and norm sweeps") {
  const SweepReport f = fubini_check(ScaleWindow{-5, 0, 1}, 12, 3);
  CHECK(f.pass);
  CHECK(f.rows.size() == 12);
  ShiftFamilySpec spec;
  spec.complexity_cap = 2;
  const SweepReport n = norm_experiment(spec, ScaleWindow{-4, 0, 1}, 2);
  CHECK(n.pass);
  CHECK(n.summary.at("sup_norm") <= 1 + 1e-9);
  CHECK(n.summary.at("shifts") == 18);
}

TEST_CASE("report serialization") {
  SweepReport r;
  r.name = "demo";
  r.seed = 9;
  r.spec_digest = "00ff";
  SweepRow a;
  a.parameter = "a,\"b\"";
  a.value = 0.1;
  a.extra["z"] = 1;
  SweepRow b;
  b.parameter = "plain";
  b.extra["y"] = 2;
  b.pass = false;
  r.rows = {a, b};
  r.summary["sup"] = std::numeric_limits<double>::infinity();
  r.seal();
  const std::string csv = to_csv(r);
  CHECK(csv.rfind("experiment,parameter,value,estimate,stderr,reference,pass,seed,spec_digest,y,z\r\n", 0) == 0);
  CHECK(csv.find("demo,\"a,\"\"b\"\"\",0.10000000000000001,") != std::string::npos);
  CHECK(csv.find(",false,9,00ff,2,\r\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const nlohmann::json j = to_json(r);
  CHECK(j["schema"] == 1);
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][1]["seed"] == 9);
  CHECK(j["summary"]["sup"] == "inf");
}
