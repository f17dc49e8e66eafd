#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdim/metric_space.hpp"

namespace fracdim {

struct MapSample {
  const FiniteMetricSpace* source = nullptr;
  const FiniteMetricSpace* target = nullptr;
  std::vector<PointId> assignment;  // source id -> target id

  MapSample(const FiniteMetricSpace& src, const FiniteMetricSpace& tgt, std::vector<PointId> a);
  double image_dist(PointId x, PointId y) const { return target->dist(assignment[x], assignment[y]); }
  // Target ids of the images of `ids`.
  std::vector<PointId> image_ids(const std::vector<PointId>& ids) const;
};

// max over distinct pairs of d_Y(fx,fy)/d_X(x,y)^alpha; 0 for singletons.
double holder_coefficient(const MapSample& f, const SubsetRef& b, double alpha);
double holder_coefficient(const MapSample& f, const std::vector<PointId>& ids, double alpha);

struct Ball {
  PointId center = 0;
  double radius = 0.0;  // effective radius r(1 + 2 eps)
};

struct BallCover {
  std::vector<Ball> balls;
  double epsilon = 0.5;
  double nominal_radius = 0.0;    // r; centers are >= 2 eps r apart
  double effective_radius = 0.0;  // r(1 + 2 eps)
  std::vector<PointId> covered;
};

// Greedy in id order: a point becomes a center when it is >= 2 eps r from
// every accepted center.
BallCover epsilon_disjoint_cover(const SubsetRef& e, double r, double epsilon);

// Coverage within each ball's radius and pairwise center distance >= 2 eps r.
bool cover_is_valid(const FiniteMetricSpace& space, const BallCover& cover);

// Source points in the open ball.
std::vector<PointId> ball_members(const FiniteMetricSpace& space, const Ball& ball);

// Sum over balls of holder_coefficient(f, ball, alpha)^p, p in (1, inf).
double ch_p_sum(const MapSample& f, const BallCover& cover, double alpha, double p);

struct ProfileRow {
  double r = 0.0;
  double effective_radius = 0.0;
  std::size_t balls = 0;
  double sum = 0.0;
};

struct ChProfile {
  std::vector<ProfileRow> rows;  // r decreasing
  double empirical_C = 0.0;      // max sum
  double slope = 0.0;            // of log sum against log r over rows with sum > 0
  bool bounded = true;           // slope >= -slope_tolerance
  double alpha = 1.0, p = 2.0, epsilon = 0.5;
};

ChProfile estimate_ch_profile(const MapSample& f, const SubsetRef& e, double alpha, double p,
                              std::vector<double> radii, double epsilon, double slope_tolerance = 0.05);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct GradientOptions {
  std::size_t iterations = 10000;  // subgradient iterations (p = 1)
  std::size_t max_sweeps = 200000; // dual ascent sweeps (1 < p < inf)
  double sweep_tolerance = 1e-14;
};

struct GradientSolution {
  std::vector<double> g;
  double s = 1.0;
  double p = 2.0;  // kInfinity allowed
  double seminorm = 0.0;
  std::vector<double> weights;  // empty: counting measure
  std::string method;
  std::size_t iterations = 0;
  double repaired = 0.0;  // largest repair added on exit
};

// Minimal ||g||_p subject to g(x)+g(y) >= d_Y(fx,fy)/d_X(x,y)^s over pairs.
GradientSolution hajlasz_gradient(const MapSample& f, double s, double p,
                                  std::optional<std::vector<double>> weights = std::nullopt,
                                  const GradientOptions& opt = {});

// Pairs with d_Y > d_X^s (g(x)+g(y)), exact floating comparison.
std::size_t count_gradient_violations(const MapSample& f, const GradientSolution& sol);

double weighted_norm(const std::vector<double>& g, double p, const std::vector<double>& weights);

nlohmann::json to_json(const ChProfile& prof);
nlohmann::json to_json(const GradientSolution& sol);

}  // namespace fracdim
