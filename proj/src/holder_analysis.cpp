#include "fracdim/holder_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracdim/errors.hpp"

namespace fracdim {

MapSample::MapSample(const FiniteMetricSpace& src, const FiniteMetricSpace& tgt, std::vector<PointId> a)
    : source(&src), target(&tgt), assignment(std::move(a)) {
  if (assignment.size() != src.size())
    throw DomainError("map assigns " + std::to_string(assignment.size()) + " images to " +
                      std::to_string(src.size()) + " source points");
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] >= tgt.size())
      throw DomainError("image of source point " + std::to_string(i) + " is not a target point");
}

std::vector<PointId> MapSample::image_ids(const std::vector<PointId>& ids) const {
  std::vector<PointId> out;
  out.reserve(ids.size());
  for (PointId x : ids) out.push_back(assignment[x]);
  return out;
}

double holder_coefficient(const MapSample& f, const std::vector<PointId>& ids, double alpha) {
  if (!(alpha > 0.0) || std::isinf(alpha)) throw DomainError("Holder exponent must be positive and finite");
  double best = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const double dy = f.image_dist(ids[i], ids[j]);
      if (dy == 0.0) continue;
      const double dx = f.source->dist(ids[i], ids[j]);
      best = std::max(best, dy / (alpha == 1.0 ? dx : std::pow(dx, alpha)));
    }
  return best;
}

double holder_coefficient(const MapSample& f, const SubsetRef& b, double alpha) {
  if (&b.space() != f.source) throw DomainError("subset does not live in the map's source");
  return holder_coefficient(f, b.members(), alpha);
}

BallCover epsilon_disjoint_cover(const SubsetRef& e, double r, double epsilon) {
  if (!(r > 0.0)) throw DomainError("cover radius must be positive");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) throw DomainError("epsilon must lie in (0,1/2]");
  const auto& space = e.space();
  BallCover c;
  c.epsilon = epsilon;
  c.nominal_radius = r;
  c.effective_radius = r * (1 + 2 * epsilon);
  c.covered = e.members();
  std::sort(c.covered.begin(), c.covered.end());
  const double sep = 2 * epsilon * r;
  for (PointId x : c.covered) {
    bool ok = true;
    for (const Ball& b : c.balls)
      if (space.dist(b.center, x) < sep) {
        ok = false;
        break;
      }
    if (ok) c.balls.push_back({x, c.effective_radius});
  }
  return c;
}

bool cover_is_valid(const FiniteMetricSpace& space, const BallCover& cover) {
  const double sep = 2 * cover.epsilon * cover.nominal_radius;
  for (std::size_t i = 0; i < cover.balls.size(); ++i)
    for (std::size_t j = i + 1; j < cover.balls.size(); ++j)
      if (space.dist(cover.balls[i].center, cover.balls[j].center) < sep) return false;
  for (PointId x : cover.covered) {
    bool in = false;
    for (const Ball& b : cover.balls)
      if (space.dist(b.center, x) < b.radius) {
        in = true;
        break;
      }
    if (!in) return false;
  }
  return true;
}

std::vector<PointId> ball_members(const FiniteMetricSpace& space, const Ball& ball) {
  std::vector<PointId> out;
  for (PointId y = 0; y < space.size(); ++y)
    if (space.dist(ball.center, y) < ball.radius) out.push_back(y);
  return out;
}

double ch_p_sum(const MapSample& f, const BallCover& cover, double alpha, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("p must lie in (1,inf)");
  double sum = 0.0;
  for (const Ball& b : cover.balls) {
    const double h = holder_coefficient(f, ball_members(*f.source, b), alpha);
    if (h > 0.0) sum += std::pow(h, p);
  }
  return sum;
}

ChProfile estimate_ch_profile(const MapSample& f, const SubsetRef& e, double alpha, double p,
                              std::vector<double> radii, double epsilon, double slope_tolerance) {
  if (radii.empty()) throw DomainError("radius grid is empty");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  ChProfile prof;
  prof.alpha = alpha;
  prof.p = p;
  prof.epsilon = epsilon;
  std::vector<double> xs, ys;
  for (double r : radii) {
    const BallCover c = epsilon_disjoint_cover(e, r, epsilon);
    ProfileRow row{r, c.effective_radius, c.balls.size(), ch_p_sum(f, c, alpha, p)};
    prof.empirical_C = std::max(prof.empirical_C, row.sum);
    if (row.sum > 0.0) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(row.sum));
    }
    prof.rows.push_back(row);
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    prof.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  prof.bounded = prof.slope >= -slope_tolerance;
  return prof;
}

double weighted_norm(const std::vector<double>& g, double p, const std::vector<double>& w) {
  if (std::isinf(p)) return g.empty() ? 0.0 : *std::max_element(g.begin(), g.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += (w.empty() ? 1.0 : w[i]) * std::pow(g[i], p);
  return std::pow(acc, 1.0 / p);
}

namespace {

struct Pair {
  PointId x, y;
  double c;    // d_Y / d_X^s
  double dy;   // d_Y
  double dxs;  // d_X^s
};

std::vector<Pair> constraint_pairs(const MapSample& f, double s) {
  std::vector<Pair> out;
  const std::size_t n = f.source->size();
  for (PointId x = 0; x < n; ++x)
    for (PointId y = x + 1; y < n; ++y) {
      const double dy = f.image_dist(x, y);
      if (dy == 0.0) continue;
      const double dx = f.source->dist(x, y);
      if (!(dx > 0.0))
        throw DomainError("source points " + std::to_string(x) + "," + std::to_string(y) +
                          " coincide but have distinct images");
      const double dxs = s == 1.0 ? dx : std::pow(dx, s);
      out.push_back({x, y, dy / dxs, dy, dxs});
    }
  return out;
}

// Raise g until every pair satisfies d_Y <= d_X^s (g_x + g_y) exactly.
double repair(std::vector<double>& g, const std::vector<Pair>& pairs) {
  double worst = 0.0;
  for (const Pair& e : pairs) {
    const double def = e.c - (g[e.x] + g[e.y]);
    if (def > 0.0) {
      g[e.x] += def / 2;
      g[e.y] += def / 2;
      worst = std::max(worst, def);
    }
    while (e.dy > e.dxs * (g[e.x] + g[e.y])) {
      g[e.y] = std::nextafter(g[e.y], kInfinity);
      g[e.x] = std::nextafter(g[e.x], kInfinity);
    }
  }
  return worst;
}

// Lower each g_x to the smallest value its constraints allow.
void reduce(std::vector<double>& g, const std::vector<Pair>& pairs,
            const std::vector<std::vector<std::size_t>>& incident) {
  for (std::size_t x = 0; x < g.size(); ++x) {
    double need = 0.0;
    for (std::size_t k : incident[x]) {
      const Pair& e = pairs[k];
      need = std::max(need, e.c - g[e.x == x ? e.y : e.x]);
    }
    if (need < g[x]) g[x] = need;
  }
}

void solve_l1(std::vector<double>& g, const std::vector<Pair>& pairs, const std::vector<double>& w,
              std::size_t iterations, std::size_t& used) {
  const std::size_t n = g.size();
  double cmax = 0.0, wmax = 0.0;
  for (const Pair& e : pairs) cmax = std::max(cmax, e.c);
  for (double v : w) wmax = std::max(wmax, v);
  const double mu = 1.5 * wmax;
  std::fill(g.begin(), g.end(), cmax / 2);

  auto value = [&](const std::vector<double>& v) {
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) a += w[i] * v[i];
    for (const Pair& e : pairs) a += mu * std::max(0.0, e.c - v[e.x] - v[e.y]);
    return a;
  };

  std::vector<double> best = g, sg(n);
  double fbest = value(g), gamma = 0.5;
  std::size_t stall = 0;
  for (used = 0; used < iterations; ++used) {
    for (std::size_t i = 0; i < n; ++i) sg[i] = w[i];
    for (const Pair& e : pairs)
      if (e.c - g[e.x] - g[e.y] > 0.0) {
        sg[e.x] -= mu;
        sg[e.y] -= mu;
      }
    double nn = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!(g[i] <= 0.0 && sg[i] > 0.0)) nn += sg[i] * sg[i];
    if (nn == 0.0) break;
    const double fv = value(g);
    const double target = fbest * (1 - gamma * 1e-2);
    const double step = std::max(fv - target, 1e-16) / nn;
    for (std::size_t i = 0; i < n; ++i) g[i] = std::max(0.0, g[i] - step * sg[i]);
    const double fn = value(g);
    if (fn < fbest - 1e-15) {
      fbest = fn;
      best = g;
      stall = 0;
    } else if (++stall >= 15) {
      gamma /= 2;
      stall = 0;
      g = best;
      if (gamma < 1e-12) break;
    }
  }
  g = best;
}

// Exact coordinate ascent on the dual of min sum w_x g_x^p / p.
void solve_dual(std::vector<double>& g, const std::vector<Pair>& pairs, const std::vector<double>& w,
                double p, std::size_t max_sweeps, double tol, std::size_t& used) {
  const std::size_t n = g.size();
  const double e = 1.0 / (p - 1.0);
  std::vector<double> u(n, 0.0), lam(pairs.size(), 0.0);
  auto G = [&](std::size_t x, double ux) { return ux > 0.0 ? std::pow(ux / w[x], e) : 0.0; };

  for (used = 0; used < max_sweeps; ++used) {
    double change = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const Pair& c = pairs[k];
      const double ux = u[c.x] - lam[k], uy = u[c.y] - lam[k];
      double next = 0.0;
      if (G(c.x, ux) + G(c.y, uy) < c.c) {
        double lo = 0.0, hi = 1.0;
        while (G(c.x, ux + hi) + G(c.y, uy + hi) < c.c) hi *= 2;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
          const double mid = lo + (hi - lo) / 2;
          if (mid <= lo || mid >= hi) break;
          (G(c.x, ux + mid) + G(c.y, uy + mid) < c.c ? lo : hi) = mid;
        }
        next = hi;
      }
      const double d = next - lam[k];
      if (d != 0.0) {
        u[c.x] += d;
        u[c.y] += d;
        lam[k] = next;
        change = std::max(change, std::abs(d));
      }
      scale = std::max(scale, next);
    }
    if (change <= tol * std::max(scale, 1.0)) break;
  }
  for (std::size_t x = 0; x < n; ++x) g[x] = G(x, u[x]);
}

}  // namespace

GradientSolution hajlasz_gradient(const MapSample& f, double s, double p,
                                  std::optional<std::vector<double>> weights, const GradientOptions& opt) {
  if (!(s > 0.0)) throw DomainError("smoothness s must be positive");
  if (!(p >= 1.0)) throw DomainError("p must lie in [1,inf]");
  const std::size_t n = f.source->size();
  GradientSolution sol;
  sol.s = s;
  sol.p = p;
  std::vector<double> w(n, 1.0);
  if (weights) {
    if (weights->size() != n) throw DomainError("weight vector length differs from source size");
    for (double v : *weights)
      if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("weights must be positive and finite");
    w = *weights;
    sol.weights = *weights;
  }
  const auto pairs = constraint_pairs(f, s);
  sol.g.assign(n, 0.0);
  if (pairs.empty()) {
    sol.method = "trivial";
  } else if (std::isinf(p)) {
    double cmax = 0.0;
    for (const Pair& e : pairs) cmax = std::max(cmax, e.c);
    std::fill(sol.g.begin(), sol.g.end(), cmax / 2);
    sol.method = "closed-form";
  } else if (p == 1.0) {
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      incident[pairs[k].x].push_back(k);
      incident[pairs[k].y].push_back(k);
    }
    solve_l1(sol.g, pairs, w, opt.iterations, sol.iterations);
    for (int pass = 0; pass < 50; ++pass) {
      if (repair(sol.g, pairs) == 0.0) break;
    }
    for (int pass = 0; pass < 5; ++pass) reduce(sol.g, pairs, incident);
    sol.method = "projected-subgradient";
  } else {
    solve_dual(sol.g, pairs, w, p, opt.max_sweeps, opt.sweep_tolerance, sol.iterations);
    sol.method = "dual-coordinate-ascent";
  }
  sol.repaired = repair(sol.g, pairs);
  sol.seminorm = weighted_norm(sol.g, p, sol.weights);
  return sol;
}

std::size_t count_gradient_violations(const MapSample& f, const GradientSolution& sol) {
  std::size_t bad = 0;
  for (const Pair& e : constraint_pairs(f, sol.s))
    if (e.dy > e.dxs * (sol.g[e.x] + sol.g[e.y])) ++bad;
  return bad;
}

nlohmann::json to_json(const ChProfile& prof) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : prof.rows)
    rows.push_back({{"r", r.r}, {"effective_radius", r.effective_radius}, {"balls", r.balls}, {"sum", r.sum}});
  return {{"alpha", prof.alpha},     {"p", prof.p},
          {"epsilon", prof.epsilon}, {"empirical_C", prof.empirical_C},
          {"slope", prof.slope},     {"bounded", prof.bounded},
          {"rows", rows}};
}

nlohmann::json to_json(const GradientSolution& sol) {
  nlohmann::json j{{"s", sol.s},
                   {"p", std::isinf(sol.p) ? nlohmann::json("inf") : nlohmann::json(sol.p)},
                   {"seminorm", sol.seminorm},
                   {"method", sol.method},
                   {"iterations", sol.iterations},
                   {"repaired", sol.repaired},
                   {"g", sol.g}};
  if (!sol.weights.empty()) j["weights"] = sol.weights;
  return j;
}

}  // namespace fracdim
