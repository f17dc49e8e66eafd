#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's algorithms beyond its data types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "fracdim/dimension_estimators.hpp"
#include "fracdim/dyadic_cubes.hpp"
#include "fracdim/metric_space.hpp"

namespace oracle {

using namespace fracdim;

// Number of closed intervals of length r needed to cover sorted reals,
// greedy from the left (optimal in one dimension).
inline long interval_cover_count(std::vector<double> xs, double r) {
  std::sort(xs.begin(), xs.end());
  long n = 0;
  double start = -std::numeric_limits<double>::infinity();
  for (double x : xs)
    if (x > start + r * (1 + 1e-12)) {
      ++n;
      start = x;
    }
  return n;
}

// A hand-built cube tree with arbitrary diameters. Leaves sit at level K;
// each leaf holds one point.
struct ToyTree {
  std::unique_ptr<FiniteMetricSpace> space;
  DyadicSystem sys;
};

inline ToyTree random_tree(std::mt19937_64& rng, int max_leaves) {
  struct Node {
    int parent;
    int depth;
    std::vector<int> kids;
  };
  std::vector<Node> nodes{{-1, 0, {}}};
  std::uniform_int_distribution<int> leaves_pick(1, max_leaves);
  const int target = leaves_pick(rng);
  auto leaves = [&] {
    std::vector<int> l;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
      if (nodes[i].kids.empty()) l.push_back(i);
    return l;
  };
  for (int guard = 0; guard < 100; ++guard) {
    auto l = leaves();
    if (static_cast<int>(l.size()) >= target) break;
    const int room = target - static_cast<int>(l.size()) + 1;
    const int v = l[std::uniform_int_distribution<std::size_t>(0, l.size() - 1)(rng)];
    const int k = std::min(room, std::uniform_int_distribution<int>(1, 3)(rng));
    if (nodes[v].depth >= 4) continue;
    for (int i = 0; i < k; ++i) {
      nodes.push_back({v, nodes[v].depth + 1, {}});
      nodes[v].kids.push_back(static_cast<int>(nodes.size()) - 1);
    }
  }
  int K = 0;
  for (const auto& n : nodes) K = std::max(K, n.depth);
  // Pad shallow leaves with single-child chains down to level K.
  for (int v : leaves()) {
    int cur = v;
    while (nodes[cur].depth < K) {
      nodes.push_back({cur, nodes[cur].depth + 1, {}});
      nodes[cur].kids.push_back(static_cast<int>(nodes.size()) - 1);
      cur = static_cast<int>(nodes.size()) - 1;
    }
  }
  const auto final_leaves = leaves();
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < final_leaves.size(); ++i) pts.push_back({static_cast<double>(i)});

  ToyTree t;
  t.space = std::make_unique<FiniteMetricSpace>(FiniteMetricSpace::from_coordinates(pts, MetricKind::euclidean));
  auto& sys = t.sys;
  sys.space = t.space.get();
  sys.params = DyadicParams::relaxed_defaults();
  sys.params.K = K;
  sys.levels.assign(static_cast<std::size_t>(K) + 1, {});
  sys.centers.assign(static_cast<std::size_t>(K) + 1, {});
  sys.cube_of.assign(static_cast<std::size_t>(K) + 1, std::vector<CubeId>(pts.size(), kNoCube));
  std::uniform_real_distribution<double> diam(0.02, 0.98);
  sys.cubes.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto& c = sys.cubes[i];
    c.level = nodes[i].depth;
    c.parent = nodes[i].parent < 0 ? kNoCube : static_cast<CubeId>(nodes[i].parent);
    for (int k : nodes[i].kids) c.children.push_back(static_cast<CubeId>(k));
    c.diam = diam(rng);
    sys.levels[static_cast<std::size_t>(c.level)].push_back(i);
  }
  for (std::size_t x = 0; x < final_leaves.size(); ++x)
    for (int v = final_leaves[x]; v >= 0; v = nodes[v].parent) {
      sys.cubes[static_cast<std::size_t>(v)].members.push_back(x);
      sys.cube_of[static_cast<std::size_t>(nodes[v].depth)][x] = static_cast<CubeId>(v);
    }
  for (auto& c : sys.cubes) {
    std::sort(c.members.begin(), c.members.end());
    c.center = c.members.front();
  }
  return t;
}

// Minimum of sum |Q|^s over every antichain of window-level cubes covering
// E, by listing all such antichains' costs.
inline double brute_force_cover_cost(const DyadicSystem& sys, const std::vector<char>& in_e, double s, int k_min,
                                     int k_max, const DiameterFloor& fl = {}) {
  auto meets = [&](CubeId c) {
    for (PointId x : sys.cubes[c].members)
      if (in_e[x]) return true;
    return false;
  };
  auto dia = [&](CubeId c) {
    const auto& q = sys.cubes[c];
    return std::max({q.diam, fl.level_factor * std::pow(sys.params.b, q.level), fl.absolute});
  };
  std::function<std::vector<double>(CubeId)> options = [&](CubeId c) {
    const auto& q = sys.cubes[c];
    std::vector<double> out;
    if (q.level >= k_min && q.level <= k_max) out.push_back(std::pow(dia(c), s));
    if (q.level < k_max) {
      std::vector<double> acc{0.0};
      for (CubeId ch : q.children) {
        if (!meets(ch)) continue;
        std::vector<double> next;
        for (double a : acc)
          for (double b : options(ch)) next.push_back(a + b);
        acc = std::move(next);
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
  };
  double total = 0.0;
  for (CubeId r : sys.levels.front()) {
    if (!meets(r)) continue;
    const auto o = options(r);
    total += *std::min_element(o.begin(), o.end());
  }
  return total;
}

// Top-down recursive minimum cover cost on a real system.
inline double recursive_cover_cost(const DyadicSystem& sys, const std::vector<char>& in_e, double s,
                                   const LevelWindow& w, const DiameterFloor& fl) {
  std::function<double(CubeId)> best = [&](CubeId c) {
    const auto& q = sys.cubes[c];
    const double mine =
        std::pow(std::max({q.diam, fl.level_factor * std::pow(sys.params.b, q.level), fl.absolute}), s);
    if (q.level == w.k_max) return mine;
    double sub = 0.0;
    for (CubeId ch : q.children) {
      bool hit = false;
      for (PointId x : sys.cubes[ch].members)
        if (in_e[x]) {
          hit = true;
          break;
        }
      if (hit) sub += best(ch);
    }
    return q.level >= w.k_min ? std::min(mine, sub) : sub;
  };
  double total = 0.0;
  for (CubeId r : sys.levels.front()) {
    bool hit = false;
    for (PointId x : sys.cubes[r].members)
      if (in_e[x]) {
        hit = true;
        break;
      }
    if (hit) total += best(r);
  }
  return total;
}

// Plain bisection for cost(s) = 1 on [0, hi].
template <class F>
double unit_root(F cost, double hi, double tol) {
  if (cost(0.0) <= 1.0) return 0.0;
  double lo = 0.0;
  while (cost(hi) > 1.0) hi *= 2;
  while (hi - lo > tol) {
    const double m = 0.5 * (lo + hi);
    if (cost(m) > 1.0)
      lo = m;
    else
      hi = m;
  }
  return 0.5 * (lo + hi);
}

struct DyadicCheck {
  std::size_t partition = 0, nesting = 0, outer = 0, separation = 0, covering = 0;
  std::size_t core() const { return partition + nesting + outer; }
};

// Partition, nesting and outer ball per level; separation and covering of
// the center lists on request.
inline DyadicCheck check_dyadic(const DyadicSystem& sys, bool centers) {
  const auto& X = *sys.space;
  const auto& p = sys.params;
  DyadicCheck r;
  const std::size_t n = X.size();
  for (int k = 0; k <= sys.depth(); ++k) {
    const double bk = std::pow(p.b, k);
    std::vector<PointId> all;
    for (CubeId c : sys.levels[static_cast<std::size_t>(k)]) {
      const auto& q = sys.cubes[c];
      if (q.level != k) ++r.nesting;
      all.insert(all.end(), q.members.begin(), q.members.end());
      for (PointId x : q.members)
        if (!(X.dist(q.center, x) < 2 * p.C0 * bk)) ++r.outer;
      if (k > 0) {
        if (q.parent == kNoCube) {
          ++r.nesting;
          continue;
        }
        const auto& par = sys.cubes[q.parent].members;
        if (sys.cubes[q.parent].level != k - 1) ++r.nesting;
        for (PointId x : q.members)
          if (!std::binary_search(par.begin(), par.end(), x)) ++r.nesting;
      }
    }
    std::sort(all.begin(), all.end());
    if (all.size() != n) ++r.partition;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i] != i) {
        ++r.partition;
        break;
      }
    if (!centers) continue;
    const auto& z = sys.centers[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < z.size(); ++i)
      for (std::size_t j = i + 1; j < z.size(); ++j)
        if (X.dist(z[i], z[j]) < p.c0 * bk) ++r.separation;
    for (PointId x = 0; x < n; ++x) {
      double m = std::numeric_limits<double>::infinity();
      for (PointId c : z) m = std::min(m, X.dist(c, x));
      if (!(m < p.C0 * bk)) ++r.covering;
    }
  }
  return r;
}

// Brute-force grid search for the minimal gradient on four points. g1..g3 on
// a grid of the given step; g4 is then the smallest feasible value.
inline double gradient_grid_oracle(const std::vector<std::vector<double>>& c, double p, double step) {
  double cmax = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) cmax = std::max(cmax, c[i][j]);
  const int steps = static_cast<int>(std::ceil(cmax / step)) + 1;
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b)
      for (int d = 0; d <= steps; ++d) {
        const double g[3] = {a * step, b * step, d * step};
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i)
          for (int j = i + 1; j < 3; ++j)
            if (g[i] + g[j] < c[i][j] - 1e-12) {
              ok = false;
              break;
            }
        if (!ok) continue;
        double g4 = 0.0;
        for (int i = 0; i < 3; ++i) g4 = std::max(g4, c[i][3] - g[i]);
        const double v[4] = {g[0], g[1], g[2], g4};
        double norm = 0.0;
        if (std::isinf(p)) {
          for (double x : v) norm = std::max(norm, x);
        } else {
          for (double x : v) norm += std::pow(x, p);
          norm = std::pow(norm, 1.0 / p);
        }
        best = std::min(best, norm);
      }
  return best;
}

}  // namespace oracle
