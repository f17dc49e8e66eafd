#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fracdim {

using PointId = std::size_t;

enum class MetricKind { euclidean, chebyshev, explicit_matrix };

struct MetricOptions {
  // Full pairwise cache below this many points.
  std::size_t cache_threshold = 4096;
  // Random triples checked on explicit matrices; matrices with at most
  // exhaustive_triangle_limit points are checked exhaustively instead.
  std::size_t triangle_samples = 20000;
  std::size_t exhaustive_triangle_limit = 120;
  std::uint64_t seed = 1;
};

// Immutable finite metric space. Points are 0..size()-1.
class FiniteMetricSpace {
 public:
  static FiniteMetricSpace from_coordinates(std::vector<std::vector<double>> points,
                                            MetricKind kind = MetricKind::euclidean,
                                            MetricOptions opts = {});
  static FiniteMetricSpace from_matrix(const std::vector<std::vector<double>>& matrix,
                                       MetricOptions opts = {});

  // Same points with distances raised to eps, eps in (0,1]. Snowflakes compose.
  FiniteMetricSpace snowflake(double eps) const;

  std::size_t size() const { return n_; }
  // Coordinate dimension; 0 for explicit matrices.
  std::size_t ambient_dim() const { return dim_; }
  bool has_coordinates() const { return dim_ > 0; }
  std::span<const double> coordinates(PointId x) const;

  MetricKind base_kind() const { return kind_; }
  double snowflake_exponent() const { return eps_; }
  std::string metric_name() const;

  // Checked access; throws DomainError on unknown ids.
  double distance(PointId x, PointId y) const;
  // Unchecked.
  double dist(PointId x, PointId y) const {
    if (x == y) return 0.0;
    if (!cache_.empty()) return cache_[packed(x, y)];
    return compute(x, y);
  }

  // Smallest positive distance. 0 for a singleton.
  double resolution_floor() const { return floor_; }
  double diameter() const { return diam_; }

  bool cached() const { return !cache_.empty(); }

 private:
  FiniteMetricSpace() = default;
  void finalize(const MetricOptions& opts);
  double compute(PointId x, PointId y) const;
  double base(PointId x, PointId y) const;
  std::size_t packed(PointId x, PointId y) const {
    if (x > y) std::swap(x, y);
    return x * n_ - x * (x + 1) / 2 + (y - x - 1);
  }

  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  MetricKind kind_ = MetricKind::euclidean;
  double eps_ = 1.0;
  std::vector<double> coords_;
  std::vector<double> matrix_;
  std::vector<double> cache_;
  double floor_ = 0.0;
  double diam_ = 0.0;
};

// Non-empty list of point ids of one space.
class SubsetRef {
 public:
  SubsetRef(const FiniteMetricSpace& space, std::vector<PointId> members);
  static SubsetRef all(const FiniteMetricSpace& space);

  const FiniteMetricSpace& space() const { return *space_; }
  const std::vector<PointId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

 private:
  const FiniteMetricSpace* space_;
  std::vector<PointId> members_;
};

double diameter(const FiniteMetricSpace& space, std::span<const PointId> ids);
double diameter(const SubsetRef& e);

// Triangle inequality violations among sampled triples (relative slack 1e-12).
std::size_t count_triangle_violations(const FiniteMetricSpace& space, std::size_t samples,
                                      std::uint64_t seed);

struct RadiusSample {
  PointId center;
  double r;
};

// Greedy lower estimate of the doubling constant: max over samples of the
// number of open r-balls (centers taken in id order) covering B(x,2r).
int estimate_doubling_constant(const FiniteMetricSpace& space,
                               const std::vector<RadiusSample>& samples);

struct UniformPerfectness {
  // Largest grid value c with c r <= d(x,x') < r solvable for every sample.
  double c = 0.0;
  // Exact min over samples of (largest distance below r)/r.
  double raw = 0.0;
  bool flagged = false;
  double resolution_floor = 0.0;
  // Worst sample.
  PointId worst_point = 0;
  double worst_radius = 0.0;
};

// Search grid c_j = 2^{-j/8}, j = 1..128.
UniformPerfectness estimate_uniform_perfectness(const SubsetRef& e,
                                                const std::vector<double>& radii);

// Geometric radius grid from hi down to lo (inclusive), ratio in (0,1).
std::vector<double> geometric_grid(double hi, double lo, double ratio);

}  // namespace fracdim
