#include <doctest.h>

#include <cmath>
#include <random>

#include "fracdim/dimension_estimators.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/generators.hpp"
#include "oracles.hpp"

using namespace fracdim;

namespace {
FiniteMetricSpace reals(std::vector<double> xs) {
  std::vector<std::vector<double>> pts;
  for (double x : xs) pts.push_back({x});
  return FiniteMetricSpace::from_coordinates(pts);
}

FiniteMetricSpace space_of(const char* spec) {
  return FiniteMetricSpace::from_coordinates(generate(parse_generator_spec(spec)).points);
}

std::vector<double> powers(double base, int from, int to) {
  std::vector<double> v;
  for (int k = from; k <= to; ++k) v.push_back(std::pow(base, -k));
  return v;
}
}  // namespace

TEST_CASE("covering number examples") {
  auto X = reals({0, 1});
  CHECK(covering_number(SubsetRef::all(X), 0.5) == 2);
  auto Y = reals({0, 0.4, 1});
  CHECK(covering_number(SubsetRef::all(Y), 0.5, CoverMethod::exact_oracle) == 2);
  CHECK(covering_number(SubsetRef::all(Y), 0.5) == 2);
  auto S = reals({0.3});
  CHECK(covering_number(SubsetRef::all(S), 1e-9) == 1);
  CHECK_THROWS_AS(covering_number(SubsetRef::all(X), 0.0), DomainError);
  auto big = space_of("grid(13,1)");
  CHECK_THROWS_AS(covering_number(SubsetRef::all(big), 0.1, CoverMethod::exact_oracle), CapacityError);
}

TEST_CASE("greedy covering never beats the exact oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 9; ++i) pts.push_back({u(rng), u(rng)});
    auto X = FiniteMetricSpace::from_coordinates(pts);
    const auto E = SubsetRef::all(X);
    for (double r : {0.1, 0.3, 0.6}) {
      const long g = covering_number(E, r), x = covering_number(E, r, CoverMethod::exact_oracle);
      CHECK(g >= x);
      CHECK(x >= 1);
    }
  }
}

TEST_CASE("one-dimensional greedy count matches the interval oracle") {
  auto X = space_of("sequence_set(1,400)");
  std::vector<double> xs;
  for (PointId i = 0; i < X.size(); ++i) xs.push_back(X.coordinates(i)[0]);
  for (double r : {0.3, 0.05, 0.01, 1e-3, 1e-4})
    CHECK(covering_number(SubsetRef::all(X), r) == oracle::interval_cover_count(xs, r));
}

TEST_CASE("box dimension of the Cantor set") {
  auto X = space_of("cantor(1/3,10)");
  const auto E = SubsetRef::all(X);
  const auto scales = powers(3.0, 2, 8);
  for (std::size_t k = 0; k < scales.size(); ++k)
    CHECK(covering_number(E, scales[k]) == (1L << (k + 2)));
  const auto est = box_dimension(E, scales);
  CHECK(std::abs(est.value - std::log(2.0) / std::log(3.0)) <= 0.05);
  CHECK(est.local_slopes.size() == scales.size() - 1);
}

TEST_CASE("box dimension of the unit grid") {
  auto X = space_of("grid(1025,1)");
  const auto E = SubsetRef::all(X);
  const auto scales = powers(2.0, 2, 8);
  std::vector<double> xs;
  for (PointId i = 0; i < X.size(); ++i) xs.push_back(X.coordinates(i)[0]);
  for (double r : scales) CHECK(covering_number(E, r) == oracle::interval_cover_count(xs, r));
  CHECK(std::abs(box_dimension(E, scales).value - 1.0) <= 0.05);
}

TEST_CASE("box dimension of isolated points is zero") {
  auto X = reals({0, 1, 2});
  const auto est = box_dimension(SubsetRef::all(X), powers(2.0, 2, 6));
  CHECK(est.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.resolution_caveat);
}

TEST_CASE("box dimension rejects degenerate grids") {
  auto X = reals({0, 1, 2});
  CHECK_THROWS_AS(box_dimension(SubsetRef::all(X), {0.5, 0.25, 0.125}), DomainError);
  CHECK_THROWS_AS(box_dimension(SubsetRef::all(X), {0.5, 0.25, 0.2, 0.01}), DomainError);
  CHECK_THROWS_AS(box_dimension(SubsetRef::all(X), {0.5, 0.25, -1, 0.125}), DomainError);
}

TEST_CASE("box dimension is scale invariant") {
  auto ps = generate(parse_generator_spec("cantor(1/3,8)"));
  auto X = FiniteMetricSpace::from_coordinates(ps.points);
  const double lam = 7.5;
  for (auto& p : ps.points) p[0] *= lam;
  auto Y = FiniteMetricSpace::from_coordinates(ps.points);
  auto scales = powers(3.0, 1, 6);
  const double a = box_dimension(SubsetRef::all(X), scales).value;
  for (double& r : scales) r *= lam;
  const double b = box_dimension(SubsetRef::all(Y), scales).value;
  CHECK(std::abs(a - b) <= 1e-3);
}

TEST_CASE("admissible level windows") {
  const auto w1 = admissible_levels(1.0, std::pow(2.0, -10), 1, 1, 6, 0.5);
  CHECK(w1.empty());
  const auto w2 = admissible_levels(0.5, std::pow(2.0, -6), 1, 1, 6, 0.5);
  CHECK(w2.k_min == 11);
  CHECK(w2.k_max == 10);
  CHECK(w2.empty());
  const auto w3 = admissible_levels(0.25, 0.01, 1, 1, 6, 0.5);
  REQUIRE_FALSE(w3.empty());
  for (int k = w3.k_min; k <= w3.k_max; ++k) {
    CHECK(std::pow(0.5, k) <= 0.01 / 24 * (1 + 1e-12));
    CHECK(std::pow(0.5, k) >= 3 * std::pow(0.01, 4) * (1 - 1e-12));
  }
  CHECK(std::pow(0.5, w3.k_min - 1) > 0.01 / 24);
  CHECK(std::pow(0.5, w3.k_max + 1) < 3 * std::pow(0.01, 4));
  CHECK_THROWS_AS(admissible_levels(0.0, 0.1, 1, 1, 6, 0.5), DomainError);
  CHECK_THROWS_AS(admissible_levels(0.5, 1.0, 1, 1, 6, 0.5), DomainError);
}

TEST_CASE("min cover cost equals brute force on toy trees") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 60; ++t) {
    auto tree = oracle::random_tree(rng, 8);
    const auto& sys = tree.sys;
    const std::size_t n = sys.space->size();
    std::vector<PointId> ids;
    std::vector<char> in(n, 0);
    for (PointId x = 0; x < n; ++x)
      if (x == 0 || rng() % 3 != 0) {
        ids.push_back(x);
        in[x] = 1;
      }
    const SubsetRef E(*sys.space, ids);
    for (int kmin = 0; kmin <= sys.depth(); ++kmin)
      for (int kmax = kmin; kmax <= sys.depth(); ++kmax) {
        LevelWindow w;
        w.k_min = kmin;
        w.k_max = kmax;
        for (double s : {0.0, 0.4, 1.0, 2.5}) {
          const auto r = min_cover_cost(sys, E, s, w);
          CHECK(r.cost == doctest::Approx(oracle::brute_force_cover_cost(sys, in, s, kmin, kmax)).epsilon(1e-12));
          CHECK(cover_is_valid(sys, E, r.cover));
        }
      }
  }
}

TEST_CASE("cover cost at s = 0 counts cubes") {
  std::vector<double> xs;
  for (int i = 0; i < 16; ++i) xs.push_back(i / 16.0);
  auto X = reals(xs);
  auto p = DyadicParams::relaxed_defaults();
  p.K = 5;
  auto sys = build_system(X, p);
  const auto E = SubsetRef::all(X);
  LevelWindow w;
  w.k_min = 2;
  w.k_max = 4;
  const auto r = min_cover_cost(sys, E, 0.0, w);
  std::size_t meet = 0;
  for (CubeId c : sys.levels[2]) meet += !sys.cube(c).members.empty();
  CHECK(r.cost == static_cast<double>(meet));
  for (CubeId c : r.cover.cubes) CHECK(sys.cube(c).level == 2);
}

TEST_CASE("cover cost of a singleton") {
  auto X = reals({0, 0.5, 1});
  auto p = DyadicParams::relaxed_defaults();
  p.K = 4;
  auto sys = build_system(X, p);
  LevelWindow w;
  w.k_min = 1;
  w.k_max = 3;
  const SubsetRef E(X, {1});
  CHECK(min_cover_cost(sys, E, 0.7, w).cost == 0.0);
  CHECK(min_cover_cost(sys, E, 0.0, w).cost == 1.0);
}

TEST_CASE("cover cost window errors") {
  auto X = reals({0, 1});
  auto p = DyadicParams::relaxed_defaults();
  p.K = 2;
  auto sys = build_system(X, p);
  LevelWindow empty;
  empty.k_min = 2;
  empty.k_max = 1;
  CHECK_THROWS_AS(min_cover_cost(sys, SubsetRef::all(X), 1.0, empty), DomainError);
  LevelWindow deep;
  deep.k_min = 0;
  deep.k_max = 5;
  CHECK_THROWS_AS(min_cover_cost(sys, SubsetRef::all(X), 1.0, deep), DomainError);
}

TEST_CASE("cover cost is non-increasing in s") {
  auto X = space_of("cantor(1/3,10)");
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  const auto E = SubsetRef::all(X);
  const auto grid = auto_delta_grid(sys, E, 0.5, 0.4);
  REQUIRE_FALSE(grid.empty());
  const auto plan = plan_intermediate_scale(sys, 0.5, grid.back(), 0.4, subset_resolution(E));
  REQUIRE(plan.usable);
  double last = std::numeric_limits<double>::infinity();
  for (double s = 0; s < 3; s += 0.05) {
    const double c = min_cover_cost(sys, E, s, plan.window, plan.floor).cost;
    CHECK(c < last);
    last = c;
  }
}

TEST_CASE("extrapolation rule") {
  std::vector<ScalePoint> pts;
  for (double d : {0.1, 0.01, 0.001}) {
    ScalePoint p;
    p.delta = d;
    p.s = 0.5 + 0.3 / std::log(1 / d);
    pts.push_back(p);
  }
  double v = 0;
  const auto fit = extrapolate(pts, 0.05, &v);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.slope == doctest::Approx(0.3).epsilon(1e-9));
  CHECK_FALSE(fit.fell_back);
  pts[1].s = 5;
  extrapolate(pts, 0.05, &v);
  CHECK(v == pts.back().s);
  extrapolate({pts.front()}, 0.05, &v);
  CHECK(v == pts.front().s);
}

TEST_CASE("intermediate dimension of the grid at theta = 1 matches the box dimension") {
  auto X = space_of("grid(1025,1)");
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  const auto E = SubsetRef::all(X);
  const double cu = measured_c_u(E, 0.5);
  const auto est = intermediate_dimension(sys, E, 1.0, auto_delta_grid(sys, E, 1.0, cu));
  const double box = box_dimension(E, powers(2.0, 2, 8)).value;
  CHECK(std::abs(est.value - box) <= 0.05);
  const auto h = hausdorff_dimension(sys, E, auto_delta_grid(sys, E, 0.0, cu));
  CHECK(std::abs(h.value - 1.0) <= 0.05);
}

TEST_CASE("intermediate dimension of F_1 at theta = 1/2") {
  auto X = space_of("sequence_set(1,2000)");
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  const auto E = SubsetRef::all(X);
  const double cu = measured_c_u(E, 0.5);
  const auto grid = auto_delta_grid(sys, E, 0.5, cu);
  REQUIRE_FALSE(grid.empty());
  const auto est = intermediate_dimension(sys, E, 0.5, grid);
  CHECK(std::abs(est.value - 1.0 / 3.0) <= 0.1);
  for (std::size_t i = 1; i < est.series.size(); ++i) CHECK(est.series[i].delta < est.series[i - 1].delta);
  // Cross-check the two smallest scales with an independent recursion.
  for (std::size_t i = est.series.size() - std::min<std::size_t>(2, est.series.size()); i < est.series.size(); ++i) {
    const auto plan = plan_intermediate_scale(sys, 0.5, est.series[i].delta, cu, subset_resolution(E));
    std::vector<char> in(X.size(), 1);
    const double s = oracle::unit_root(
        [&](double t) { return oracle::recursive_cover_cost(sys, in, t, plan.window, plan.floor); }, 3.0, 1e-6);
    CHECK(std::abs(s - est.series[i].s) <= 2e-3);
  }
}

TEST_CASE("singleton estimates are zero") {
  auto X = reals({0, 0.5, 1});
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  const SubsetRef E(X, {2});
  CHECK(intermediate_dimension(sys, E, 0.5, {0.1, 0.01}).value == 0.0);
  CHECK(hausdorff_dimension(sys, E, {0.1, 0.01}).value == 0.0);
}

TEST_CASE("no usable scales") {
  auto X = space_of("cantor(1/3,4)");
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  CHECK_THROWS_AS(intermediate_dimension(sys, SubsetRef::all(X), 0.25, {0.5, 0.25}), NoUsableScales);
  CHECK_THROWS_AS(intermediate_dimension(sys, SubsetRef::all(X), 0.5, {0.5, 2.0}), DomainError);
}

TEST_CASE("parallel runs are bit-identical") {
  auto X = space_of("sequence_set(2,800)");
  auto sys = build_system(X, DyadicParams::relaxed_defaults());
  const auto E = SubsetRef::all(X);
  const double cu = measured_c_u(E, 0.5);
  const auto grid = auto_delta_grid(sys, E, 0.5, cu);
  EstimatorOptions one, four;
  four.threads = 4;
  const auto a = intermediate_dimension(sys, E, 0.5, grid, one);
  const auto b = intermediate_dimension(sys, E, 0.5, grid, four);
  CHECK(to_json(a).dump() == to_json(b).dump());
}
