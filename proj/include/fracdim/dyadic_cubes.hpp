#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdim/metric_space.hpp"

namespace fracdim {

using CubeId = std::size_t;
inline constexpr CubeId kNoCube = std::numeric_limits<CubeId>::max();

struct DyadicParams {
  enum class Mode { strict, relaxed };
  double b = 0.5;
  double c0 = 1.0;
  double C0 = 6.0;
  // Negative: derive from the space's resolution floor.
  int K = -1;
  Mode mode = Mode::relaxed;

  static DyadicParams strict_defaults() { return {1.0 / 72.0, 1.0, 6.0, -1, Mode::strict}; }
  static DyadicParams relaxed_defaults() { return {0.5, 1.0, 6.0, -1, Mode::relaxed}; }

  // 12 C0 b <= c0 and C0 > 5 c0.
  bool theory_conditions_hold() const { return 12.0 * C0 * b <= c0 && C0 > 5.0 * c0; }
  // Throws DomainError; strict mode also enforces theory_conditions_hold().
  void validate() const;
  double scale(int k) const;
};

// ceil(log(floor/c0)/log b), clamped to [0, 40].
int default_depth(const FiniteMetricSpace& space, const DyadicParams& params);

struct DyadicCube {
  int level = 0;
  PointId center = 0;
  CubeId parent = kNoCube;
  std::vector<CubeId> children;
  std::vector<PointId> members;  // ascending
  double diam = 0.0;
  double outer_radius = 0.0;  // 2 C0 b^k
  double inner_radius = 0.0;  // c0 b^k / 3
};

struct DyadicSystem {
  DyadicParams params;  // K resolved
  const FiniteMetricSpace* space = nullptr;
  std::vector<std::vector<PointId>> centers;  // per level, ascending ids
  std::vector<DyadicCube> cubes;
  std::vector<std::vector<CubeId>> levels;  // cube ids per level
  // cube_of[k][x]: the level-k cube holding point x.
  std::vector<std::vector<CubeId>> cube_of;

  int depth() const { return params.K; }
  const std::vector<CubeId>& roots() const { return levels.front(); }
  const DyadicCube& cube(CubeId c) const { return cubes[c]; }
};

// Level-k centers: maximal c0 b^k-separated sets taken as prefixes of a
// single farthest-point-first ordering (lowest id breaks ties), so they nest.
std::vector<std::vector<PointId>> build_net_points(const FiniteMetricSpace& space,
                                                   const DyadicParams& params);

DyadicSystem build_cubes(const FiniteMetricSpace& space,
                         const std::vector<std::vector<PointId>>& centers,
                         const DyadicParams& params);

// build_net_points followed by build_cubes.
DyadicSystem build_system(const FiniteMetricSpace& space, const DyadicParams& params);

struct Violation {
  std::string property;  // nesting, partition, outer_ball, inner_ball, separation, covering, containment
  int level = 0;
  CubeId cube = kNoCube;
  PointId point = 0;
  std::string detail;
};

struct VerificationReport {
  std::size_t nesting = 0;
  std::size_t partition = 0;
  std::size_t outer_ball = 0;
  std::size_t inner_ball = 0;
  std::size_t separation = 0;  // centers c0 b^k apart
  std::size_t covering = 0;    // every point within C0 b^k of a center
  std::size_t containment = 0; // 2 C0 b^{k+1} + d(child, parent) <= 2 C0 b^k
  std::size_t max_children = 0;
  bool strict = false;
  std::vector<Violation> samples;  // first few violations

  // Violations that count against the system. Relaxed mode only enforces
  // nesting, partition and the outer ball; the rest are reported as flags.
  std::size_t fatal() const;
  std::size_t total() const {
    return nesting + partition + outer_ball + inner_ball + separation + covering + containment;
  }
};

VerificationReport verify_system(const DyadicSystem& sys);

// Cd^{(6 C0/(c0 b)) log2 Cd}; may overflow to +inf.
double child_bound(const DyadicParams& params, long Cd);

nlohmann::json to_json(const DyadicSystem& sys, bool with_members = true);
nlohmann::json to_json(const VerificationReport& rep);

}  // namespace fracdim
