#include "fracdim/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fracdim/errors.hpp"

namespace fracdim {

namespace {

constexpr double kSlack = 1e-12;

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_coordinates(std::vector<std::vector<double>> points,
                                                      MetricKind kind, MetricOptions opts) {
  if (points.empty()) throw DomainError("point cloud is empty");
  if (kind == MetricKind::explicit_matrix)
    throw DomainError("coordinates need euclidean or chebyshev metric");
  FiniteMetricSpace s;
  s.n_ = points.size();
  s.dim_ = points.front().size();
  if (s.dim_ == 0) throw DomainError("points have no coordinates");
  s.kind_ = kind;
  s.coords_.reserve(s.n_ * s.dim_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != s.dim_)
      throw DomainError("point " + std::to_string(i) + " has " +
                        std::to_string(points[i].size()) + " coordinates, expected " +
                        std::to_string(s.dim_));
    for (double v : points[i]) {
      if (!std::isfinite(v)) throw DomainError("non-finite coordinate at point " + std::to_string(i));
      s.coords_.push_back(v);
    }
  }
  s.finalize(opts);
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(const std::vector<std::vector<double>>& m,
                                                 MetricOptions opts) {
  if (m.empty()) throw DomainError("distance matrix is empty");
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i)
    if (m[i].size() != n) throw DomainError("distance matrix is not square at row " + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i][i] != 0.0) throw DomainError("nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(m[i][j])) throw DomainError("non-finite distance");
      if (m[i][j] != m[j][i])
        throw DomainError("asymmetric distances at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (!(m[i][j] > 0.0))
        throw DomainError("distinct points " + std::to_string(i) + "," + std::to_string(j) +
                          " at distance 0");
    }
  }
  FiniteMetricSpace s;
  s.n_ = n;
  s.kind_ = MetricKind::explicit_matrix;
  s.matrix_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    std::copy(m[i].begin(), m[i].end(), s.matrix_.begin() + static_cast<std::ptrdiff_t>(i * n));
  s.finalize(opts);

  std::size_t bad = 0;
  if (n <= opts.exhaustive_triangle_limit) {
    for (std::size_t x = 0; x < n && !bad; ++x)
      for (std::size_t y = 0; y < n && !bad; ++y)
        for (std::size_t z = 0; z < n; ++z)
          if (s.base(x, z) > (s.base(x, y) + s.base(y, z)) * (1 + kSlack)) {
            bad = 1;
            break;
          }
  } else {
    bad = count_triangle_violations(s, opts.triangle_samples, opts.seed);
  }
  if (bad) throw DomainError("distance matrix violates the triangle inequality");
  return s;
}

FiniteMetricSpace FiniteMetricSpace::snowflake(double eps) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("snowflake exponent must lie in (0,1]");
  FiniteMetricSpace s = *this;
  s.eps_ = eps_ * eps;
  if (!s.cache_.empty())
    for (double& v : s.cache_) v = std::pow(v, eps);
  s.floor_ = std::pow(floor_, eps);
  s.diam_ = std::pow(diam_, eps);
  return s;
}

std::span<const double> FiniteMetricSpace::coordinates(PointId x) const {
  if (x >= n_) throw DomainError("unknown point id " + std::to_string(x));
  if (!dim_) return {};
  return {coords_.data() + x * dim_, dim_};
}

std::string FiniteMetricSpace::metric_name() const {
  std::string b = kind_ == MetricKind::euclidean   ? "euclidean"
                  : kind_ == MetricKind::chebyshev ? "chebyshev"
                                                   : "explicit-matrix";
  if (eps_ != 1.0) return "snowflake(" + b + "," + std::to_string(eps_) + ")";
  return b;
}

double FiniteMetricSpace::distance(PointId x, PointId y) const {
  if (x >= n_ || y >= n_)
    throw DomainError("unknown point id " + std::to_string(std::max(x, y)));
  return dist(x, y);
}

double FiniteMetricSpace::base(PointId x, PointId y) const {
  if (kind_ == MetricKind::explicit_matrix) return matrix_[x * n_ + y];
  const double* a = coords_.data() + x * dim_;
  const double* b = coords_.data() + y * dim_;
  if (dim_ == 1) return std::abs(a[0] - b[0]);
  double acc = 0.0;
  if (kind_ == MetricKind::euclidean) {
    for (std::size_t i = 0; i < dim_; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
  }
  for (std::size_t i = 0; i < dim_; ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
  return acc;
}

double FiniteMetricSpace::compute(PointId x, PointId y) const {
  const double d = base(x, y);
  return eps_ == 1.0 ? d : std::pow(d, eps_);
}

void FiniteMetricSpace::finalize(const MetricOptions& opts) {
  floor_ = std::numeric_limits<double>::infinity();
  diam_ = 0.0;
  if (n_ <= opts.cache_threshold && n_ > 1) {
    cache_.assign(n_ * (n_ - 1) / 2, 0.0);
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = x + 1; y < n_; ++y) cache_[packed(x, y)] = compute(x, y);
  }
  if (dim_ == 1 && n_ > 1) {
    std::vector<double> v(coords_);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < n_; ++i) floor_ = std::min(floor_, v[i] - v[i - 1]);
    diam_ = v.back() - v.front();
  } else {
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t y = x + 1; y < n_; ++y) {
        const double d = base(x, y);
        floor_ = std::min(floor_, d);
        diam_ = std::max(diam_, d);
      }
  }
  if (n_ == 1) floor_ = 0.0;
  if (n_ > 1 && !(floor_ > 0.0)) throw DomainError("duplicate points: distinct ids at distance 0");
}

SubsetRef::SubsetRef(const FiniteMetricSpace& space, std::vector<PointId> members)
    : space_(&space), members_(std::move(members)) {
  if (members_.empty()) throw DomainError("subset is empty");
  for (PointId p : members_)
    if (p >= space.size()) throw DomainError("subset member " + std::to_string(p) + " not in space");
}

SubsetRef SubsetRef::all(const FiniteMetricSpace& space) {
  std::vector<PointId> ids(space.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return SubsetRef(space, std::move(ids));
}

double diameter(const FiniteMetricSpace& space, std::span<const PointId> ids) {
  if (ids.size() < 2) return 0.0;
  if (space.ambient_dim() == 1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (PointId p : ids) {
      const double v = space.coordinates(p)[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double d = hi - lo;
    return space.snowflake_exponent() == 1.0 ? d : std::pow(d, space.snowflake_exponent());
  }
  double best = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) best = std::max(best, space.dist(ids[i], ids[j]));
  return best;
}

double diameter(const SubsetRef& e) { return diameter(e.space(), e.members()); }

std::size_t count_triangle_violations(const FiniteMetricSpace& space, std::size_t samples,
                                      std::uint64_t seed) {
  const std::size_t n = space.size();
  if (n < 3) return 0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t bad = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    const PointId x = pick(rng), y = pick(rng), z = pick(rng);
    if (space.dist(x, z) > (space.dist(x, y) + space.dist(y, z)) * (1 + kSlack)) ++bad;
  }
  return bad;
}

int estimate_doubling_constant(const FiniteMetricSpace& space,
                               const std::vector<RadiusSample>& samples) {
  if (samples.empty()) throw DomainError("doubling estimate needs at least one (center, r) sample");
  int best = 1;
  std::vector<PointId> ball, centers;
  for (const auto& [x, r] : samples) {
    if (x >= space.size()) throw DomainError("unknown point id " + std::to_string(x));
    if (!(r > 0.0)) throw DomainError("sample radius must be positive");
    ball.clear();
    centers.clear();
    for (PointId y = 0; y < space.size(); ++y)
      if (space.dist(x, y) < 2 * r) ball.push_back(y);
    for (PointId y : ball) {
      bool covered = false;
      for (PointId c : centers)
        if (space.dist(c, y) < r) {
          covered = true;
          break;
        }
      if (!covered) centers.push_back(y);
    }
    best = std::max(best, static_cast<int>(centers.size()));
  }
  return best;
}

UniformPerfectness estimate_uniform_perfectness(const SubsetRef& e,
                                                const std::vector<double>& radii) {
  if (e.size() < 2) throw DomainError("uniform perfectness needs at least two points");
  if (radii.empty()) throw DomainError("radius grid is empty");
  const auto& space = e.space();
  const auto& ids = e.members();
  const double diam = diameter(e);
  for (double r : radii)
    if (!(r > 0.0) || r > diam * (1 + kSlack))
      throw DomainError("radius " + std::to_string(r) + " outside (0, |E|]");

  UniformPerfectness out;
  out.raw = 1.0;
  out.resolution_floor = std::numeric_limits<double>::infinity();
  std::vector<double> row;
  for (PointId x : ids) {
    row.clear();
    for (PointId y : ids)
      if (y != x) row.push_back(space.dist(x, y));
    std::sort(row.begin(), row.end());
    out.resolution_floor = std::min(out.resolution_floor, row.front());
    for (double r : radii) {
      auto it = std::lower_bound(row.begin(), row.end(), r);
      const double ratio = it == row.begin() ? 0.0 : *std::prev(it) / r;
      if (ratio < out.raw) {
        out.raw = ratio;
        out.worst_point = x;
        out.worst_radius = r;
      }
    }
  }
  for (int j = 1; j <= 128; ++j) {
    const double c = std::exp2(-j / 8.0);
    if (c <= out.raw) {
      out.c = c;
      return out;
    }
  }
  out.flagged = true;
  out.c = 0.0;
  return out;
}

std::vector<double> geometric_grid(double hi, double lo, double ratio) {
  if (!(hi > 0.0) || !(lo > 0.0) || lo > hi || !(ratio > 0.0 && ratio < 1.0))
    throw DomainError("geometric grid needs 0 < lo <= hi and ratio in (0,1)");
  std::vector<double> g;
  for (double r = hi; r >= lo * (1 - kSlack); r *= ratio) g.push_back(r);
  return g;
}

}  // namespace fracdim
