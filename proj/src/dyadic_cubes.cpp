#include "fracdim/dyadic_cubes.hpp"

#include <algorithm>
#include <cmath>

#include "fracdim/errors.hpp"

namespace fracdim {

namespace {

constexpr std::size_t kMaxSamples = 50;
constexpr int kMaxDepth = 40;

void note(VerificationReport& rep, std::size_t& counter, Violation v) {
  ++counter;
  if (rep.samples.size() < kMaxSamples) rep.samples.push_back(std::move(v));
}

}  // namespace

void DyadicParams::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw DomainError("b must lie in (0,1)");
  if (!(c0 > 0.0) || !(C0 > 0.0)) throw DomainError("c0 and C0 must be positive");
  if (c0 > C0) throw DomainError("need c0 <= C0");
  if (K > kMaxDepth) throw DomainError("max level K is capped at 40");
  if (mode == Mode::strict && !theory_conditions_hold())
    throw DomainError("strict mode needs 12*C0*b <= c0 and C0 > 5*c0 (use relaxed mode otherwise)");
}

double DyadicParams::scale(int k) const { return std::pow(b, k); }

int default_depth(const FiniteMetricSpace& space, const DyadicParams& params) {
  const double floor = space.resolution_floor();
  if (space.size() < 2 || !(floor > 0.0)) return 0;
  const double k = std::ceil(std::log(floor / params.c0) / std::log(params.b) - 1e-12);
  return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(kMaxDepth)));
}

std::vector<std::vector<PointId>> build_net_points(const FiniteMetricSpace& space,
                                                   const DyadicParams& params) {
  if (space.size() == 0) throw DomainError("space is empty");
  params.validate();
  const int K = params.K >= 0 ? params.K : default_depth(space, params);
  const std::size_t n = space.size();
  const double smallest = params.c0 * params.scale(K);

  // Farthest-point-first order with insertion radii.
  std::vector<PointId> order{0};
  std::vector<double> radius{std::numeric_limits<double>::infinity()};
  std::vector<double> gap(n);
  for (PointId y = 0; y < n; ++y) gap[y] = space.dist(0, y);
  while (order.size() < n) {
    PointId far = 0;
    double best = -1.0;
    for (PointId y = 0; y < n; ++y)
      if (gap[y] > best) {
        best = gap[y];
        far = y;
      }
    if (best < smallest) break;
    order.push_back(far);
    radius.push_back(best);
    for (PointId y = 0; y < n; ++y) gap[y] = std::min(gap[y], space.dist(far, y));
  }

  std::vector<std::vector<PointId>> centers(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double sep = params.c0 * params.scale(k);
    auto& lv = centers[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < order.size() && radius[i] >= sep; ++i) lv.push_back(order[i]);
    std::sort(lv.begin(), lv.end());
  }
  return centers;
}

DyadicSystem build_cubes(const FiniteMetricSpace& space,
                         const std::vector<std::vector<PointId>>& centers,
                         const DyadicParams& params) {
  params.validate();
  if (centers.empty()) throw DomainError("no center levels");
  if (params.K >= 0 && static_cast<std::size_t>(params.K) + 1 != centers.size())
    throw DomainError("center levels do not match K");
  const std::size_t n = space.size();
  for (const auto& lv : centers) {
    if (lv.empty()) throw DomainError("a level has no centers");
    for (PointId z : lv)
      if (z >= n) throw DomainError("center id " + std::to_string(z) + " not in space");
  }

  DyadicSystem sys;
  sys.params = params;
  sys.params.K = static_cast<int>(centers.size()) - 1;
  sys.space = &space;
  sys.centers = centers;
  for (auto& lv : sys.centers) std::sort(lv.begin(), lv.end());
  const int K = sys.params.K;
  sys.levels.resize(static_cast<std::size_t>(K) + 1);
  sys.cube_of.assign(static_cast<std::size_t>(K) + 1, std::vector<CubeId>(n, kNoCube));

  auto nearest = [&](PointId x, const std::vector<PointId>& lv) {
    std::size_t best = 0;
    double bd = space.dist(x, lv[0]);
    for (std::size_t i = 1; i < lv.size(); ++i) {
      const double d = space.dist(x, lv[i]);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  };

  for (int k = 0; k <= K; ++k) {
    const auto& lv = sys.centers[static_cast<std::size_t>(k)];
    for (PointId z : lv) {
      DyadicCube c;
      c.level = k;
      c.center = z;
      c.outer_radius = 2.0 * params.C0 * params.scale(k);
      c.inner_radius = params.c0 * params.scale(k) / 3.0;
      sys.levels[static_cast<std::size_t>(k)].push_back(sys.cubes.size());
      sys.cubes.push_back(std::move(c));
    }
  }

  // Points join their nearest level-K center.
  {
    const auto& ids = sys.levels.back();
    const auto& lv = sys.centers.back();
    for (PointId x = 0; x < n; ++x) {
      const CubeId c = ids[nearest(x, lv)];
      sys.cubes[c].members.push_back(x);
      sys.cube_of.back()[x] = c;
    }
  }
  // Cubes attach to the level-k center nearest their own center.
  for (int k = K - 1; k >= 0; --k) {
    const auto& ids = sys.levels[static_cast<std::size_t>(k)];
    const auto& lv = sys.centers[static_cast<std::size_t>(k)];
    for (CubeId ch : sys.levels[static_cast<std::size_t>(k) + 1]) {
      const CubeId par = ids[nearest(sys.cubes[ch].center, lv)];
      sys.cubes[ch].parent = par;
      sys.cubes[par].children.push_back(ch);
    }
    for (CubeId par : ids) {
      auto& pc = sys.cubes[par];
      for (CubeId ch : pc.children)
        pc.members.insert(pc.members.end(), sys.cubes[ch].members.begin(), sys.cubes[ch].members.end());
      std::sort(pc.members.begin(), pc.members.end());
      for (PointId x : pc.members) sys.cube_of[static_cast<std::size_t>(k)][x] = par;
    }
  }
  for (auto& c : sys.cubes) c.diam = diameter(space, c.members);
  return sys;
}

DyadicSystem build_system(const FiniteMetricSpace& space, const DyadicParams& params) {
  DyadicParams p = params;
  if (p.K < 0) p.K = default_depth(space, p);
  return build_cubes(space, build_net_points(space, p), p);
}

std::size_t VerificationReport::fatal() const {
  std::size_t f = nesting + partition + outer_ball;
  if (strict) f += inner_ball + separation + covering + containment;
  return f;
}

VerificationReport verify_system(const DyadicSystem& sys) {
  VerificationReport rep;
  rep.strict = sys.params.mode == DyadicParams::Mode::strict;
  if (!sys.space) throw DomainError("system has no space");
  const auto& space = *sys.space;
  const std::size_t n = space.size();
  const auto& p = sys.params;
  const std::size_t L = sys.levels.size();

  // Rebuild point -> cube from member lists; that is what the partition check is about.
  std::vector<std::vector<CubeId>> owner(L, std::vector<CubeId>(n, kNoCube));
  for (std::size_t k = 0; k < L; ++k) {
    for (CubeId c : sys.levels[k]) {
      const auto& cube = sys.cubes[c];
      for (PointId x : cube.members) {
        if (x >= n) {
          note(rep, rep.partition, {"partition", static_cast<int>(k), c, x, "member not in space"});
          continue;
        }
        if (owner[k][x] != kNoCube)
          note(rep, rep.partition, {"partition", static_cast<int>(k), c, x, "point in two cubes"});
        else
          owner[k][x] = c;
      }
    }
    for (PointId x = 0; x < n; ++x)
      if (owner[k][x] == kNoCube)
        note(rep, rep.partition, {"partition", static_cast<int>(k), kNoCube, x, "point in no cube"});
  }

  for (std::size_t k = 0; k < L; ++k) {
    const double bk = p.scale(static_cast<int>(k));
    for (CubeId c : sys.levels[k]) {
      const auto& cube = sys.cubes[c];
      rep.max_children = std::max(rep.max_children, cube.children.size());
      // Nesting: every member sits in the parent cube.
      if (k > 0) {
        if (cube.parent == kNoCube) {
          note(rep, rep.nesting, {"nesting", static_cast<int>(k), c, cube.center, "missing parent"});
        } else {
          for (PointId x : cube.members)
            if (x < n && owner[k - 1][x] != cube.parent) {
              note(rep, rep.nesting, {"nesting", static_cast<int>(k), c, x, "member outside parent"});
              break;
            }
          const auto& pc = sys.cubes[cube.parent].children;
          if (std::find(pc.begin(), pc.end(), c) == pc.end())
            note(rep, rep.nesting, {"nesting", static_cast<int>(k), c, cube.center, "parent does not list child"});
        }
      }
      // Outer ball.
      const double outer = 2.0 * p.C0 * bk;
      for (PointId x : cube.members)
        if (x < n && !(space.dist(cube.center, x) < outer))
          note(rep, rep.outer_ball, {"outer_ball", static_cast<int>(k), c, x,
                                     "d(center,x) = " + std::to_string(space.dist(cube.center, x))});
      // Inner ball, finite-sample reading.
      const double inner = p.c0 * bk / 3.0;
      for (PointId y = 0; y < n; ++y)
        if (space.dist(cube.center, y) < inner && owner[k][y] != c)
          note(rep, rep.inner_ball, {"inner_ball", static_cast<int>(k), c, y, "point near center in other cube"});
      // Containment as a radii inequality along the parent link.
      if (k > 0 && cube.parent != kNoCube) {
        const double lhs = 2.0 * p.C0 * bk + space.dist(cube.center, sys.cubes[cube.parent].center);
        if (lhs > 2.0 * p.C0 * p.scale(static_cast<int>(k) - 1) * (1 + 1e-12))
          note(rep, rep.containment, {"containment", static_cast<int>(k), c, cube.center,
                                      "outer ball leaves parent's outer ball"});
      }
    }

    // Center separation and covering.
    const auto& lv = sys.centers[k];
    const double sep = p.c0 * bk;
    for (std::size_t i = 0; i < lv.size(); ++i)
      for (std::size_t j = i + 1; j < lv.size(); ++j)
        if (space.dist(lv[i], lv[j]) < sep)
          note(rep, rep.separation, {"separation", static_cast<int>(k), kNoCube, lv[i], "centers too close"});
    const double cover = p.C0 * bk;
    for (PointId x = 0; x < n; ++x) {
      bool ok = false;
      for (PointId z : lv)
        if (space.dist(z, x) < cover) {
          ok = true;
          break;
        }
      if (!ok) note(rep, rep.covering, {"covering", static_cast<int>(k), kNoCube, x, "no center within C0 b^k"});
    }
  }
  return rep;
}

double child_bound(const DyadicParams& params, long Cd) {
  if (Cd < 1) throw DomainError("Cd must be >= 1");
  const double l = std::log2(static_cast<double>(Cd));
  return std::exp2(6.0 * params.C0 / (params.c0 * params.b) * l * l);
}

nlohmann::json to_json(const DyadicSystem& sys, bool with_members) {
  using nlohmann::json;
  json out;
  const auto& p = sys.params;
  out["params"] = {{"b", p.b},
                   {"c0", p.c0},
                   {"C0", p.C0},
                   {"K", p.K},
                   {"mode", p.mode == DyadicParams::Mode::strict ? "strict" : "relaxed"},
                   {"theory_conditions_hold", p.theory_conditions_hold()}};
  out["points"] = sys.space ? sys.space->size() : 0;
  json levels = json::array();
  for (std::size_t k = 0; k < sys.levels.size(); ++k) {
    json cubes = json::array();
    for (CubeId c : sys.levels[k]) {
      const auto& q = sys.cubes[c];
      json j = {{"id", c},
                {"center", q.center},
                {"parent", q.parent == kNoCube ? json(nullptr) : json(q.parent)},
                {"children", q.children},
                {"size", q.members.size()},
                {"diam", q.diam},
                {"outer_radius", q.outer_radius},
                {"inner_radius", q.inner_radius}};
      if (with_members) j["members"] = q.members;
      cubes.push_back(std::move(j));
    }
    levels.push_back({{"level", k}, {"centers", sys.centers[k]}, {"cubes", std::move(cubes)}});
  }
  out["levels"] = std::move(levels);
  return out;
}

nlohmann::json to_json(const VerificationReport& rep) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& s : rep.samples)
    v.push_back({{"property", s.property},
                 {"level", s.level},
                 {"cube", s.cube == kNoCube ? nlohmann::json(nullptr) : nlohmann::json(s.cube)},
                 {"point", s.point},
                 {"detail", s.detail}});
  return {{"mode", rep.strict ? "strict" : "relaxed"},
          {"violations", rep.fatal()},
          {"counts",
           {{"nesting", rep.nesting},
            {"partition", rep.partition},
            {"outer_ball", rep.outer_ball},
            {"inner_ball", rep.inner_ball},
            {"separation", rep.separation},
            {"covering", rep.covering},
            {"containment", rep.containment}}},
          {"containment_flags", rep.containment},
          {"max_children", rep.max_children},
          {"samples", std::move(v)}};
}

}  // namespace fracdim
