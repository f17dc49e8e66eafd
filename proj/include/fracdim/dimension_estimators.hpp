#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracdim/dyadic_cubes.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/metric_space.hpp"

namespace fracdim {

// Thrown when no scale of a grid can be used.
class NoUsableScales : public DomainError {
 public:
  using DomainError::DomainError;
};

struct LevelWindow {
  int k_min = 0;
  int k_max = -1;
  double theta = 1.0;
  double delta = 0.5;
  double c_u = 1.0, c0 = 1.0, C0 = 6.0, b = 0.5;

  bool empty() const { return k_min > k_max; }
};

// Levels k with b^k in [3/(c_u c0) delta^{1/theta}, delta/(4 C0)].
LevelWindow admissible_levels(double theta, double delta, double c_u, double c0, double C0, double b);

enum class CoverMethod { greedy, exact_oracle };

// Smallest number of parts of diameter <= r (relative slack 1e-12).
// greedy: first fit in id order. exact_oracle: subset DP, |E| <= 12.
long covering_number(const SubsetRef& e, double r, CoverMethod method = CoverMethod::greedy);

// Cost diameter of a cube: max(diam, level_factor * b^k, absolute).
// Zero floors give plain member diameters.
struct DiameterFloor {
  double level_factor = 0.0;
  double absolute = 0.0;
};

struct AntichainCover {
  std::vector<CubeId> cubes;  // ascending
  LevelWindow window;
  double s = 0.0;
  double cost = 0.0;
};

struct CoverResult {
  double cost = 0.0;
  AntichainCover cover;
};

// Exact minimum of sum |Q|^s over antichains of window-level cubes covering
// E. Uses 0^0 = 1. Prefers the coarser cube on ties.
CoverResult min_cover_cost(const DyadicSystem& sys, const SubsetRef& e, double s,
                           const LevelWindow& window, const DiameterFloor& floor = {});

// Non-nesting, coverage and window membership.
bool cover_is_valid(const DyadicSystem& sys, const SubsetRef& e, const AntichainCover& cover);

struct ScalePoint {
  double delta = 0.0;
  double s = 0.0;
  int k_min = 0;
  int k_max = 0;
  double count = 0.0;       // box: N(E, r); cover estimators: cubes in the optimal cover
  bool finest_level = false; // optimal cover reaches the finest usable level
};

struct Extrapolation {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // RMS of fit residuals
  bool fell_back = false;
  bool clamped = false;
};

struct DimensionEstimate {
  enum class Kind { box, hausdorff, intermediate };
  Kind kind = Kind::box;
  double theta = 1.0;
  double value = 0.0;
  double r_min = 0.0, r_max = 0.0;  // scale window actually used
  std::vector<ScalePoint> series;   // deltas strictly decreasing
  Extrapolation fit;
  std::vector<double> local_slopes;  // box only
  std::vector<std::pair<double, std::string>> skipped;
  std::vector<std::string> notes;
  bool resolution_caveat = false;
  double c_u = 1.0;
};

struct EstimatorOptions {
  // Uniform perfectness constant entering the level window; <= 0 measures it on E.
  double c_u = 0.0;
  double c_u_fallback = 0.5;
  double tolerance = 1e-3;   // bisection tolerance on s
  double residual_cap = 0.05;
  std::size_t threads = 1;
};

DimensionEstimate box_dimension(const SubsetRef& e, std::vector<double> scales);

// Affine fit of s against 1/log(1/delta); intercept unless the RMS residual
// exceeds cap, then the last s. Negative values clamp to 0. One point: that s.
Extrapolation extrapolate(const std::vector<ScalePoint>& series, double residual_cap, double* value);

// Smallest s in [0, inf) with cost(s) <= 1 to within tol; 0 if cost(0) <= 1.
template <class F>
double solve_unit_cost(F&& cost, double hi, double tol);

DimensionEstimate intermediate_dimension(const DyadicSystem& sys, const SubsetRef& e, double theta,
                                         std::vector<double> deltas, const EstimatorOptions& opt = {});

DimensionEstimate hausdorff_dimension(const DyadicSystem& sys, const SubsetRef& e,
                                      std::vector<double> deltas, const EstimatorOptions& opt = {});

// Window and cost floor used by the estimators for one scale.
struct ScalePlan {
  LevelWindow window;
  DiameterFloor floor;
  bool usable = false;
  std::string reason;
};

// A scale is usable when its finest window level c0 b^{k_max} is at least
// margin * e_resolution.
inline constexpr double kResolutionMargin = 4.0;
ScalePlan plan_intermediate_scale(const DyadicSystem& sys, double theta, double delta, double c_u,
                                  double e_resolution, double margin = kResolutionMargin);
// Window [k(delta), k_res] where k_res is the finest level with
// c0 b^k >= margin * resolution (capped at K).
ScalePlan plan_hausdorff_scale(const DyadicSystem& sys, double delta, double c_u, double e_resolution,
                               double margin = kResolutionMargin);

// Root of min_cover_cost(s) = 1 for a fixed plan, with the optimal cover there.
struct ScaleSolution {
  double s = 0.0;
  CoverResult at_root;
};
ScaleSolution solve_scale(const DyadicSystem& sys, const SubsetRef& e, const ScalePlan& plan, double tol);

// c_u measured on E over radii |E|/2, |E|/4, ... >= 4 * resolution floor,
// or the fallback when that is flagged.
double measured_c_u(const SubsetRef& e, double fallback, std::string* note = nullptr);

double subset_resolution(const SubsetRef& e);

// Default delta grid: 1/2, 1/4, ... keeping the first `count` usable scales.
std::vector<double> auto_delta_grid(const DyadicSystem& sys, const SubsetRef& e, double theta, double c_u,
                                    double ratio = 0.5, std::size_t count = 8,
                                    double margin = kResolutionMargin);

nlohmann::json to_json(const DimensionEstimate& est);
std::string kind_name(DimensionEstimate::Kind k);

template <class F>
double solve_unit_cost(F&& cost, double hi, double tol) {
  if (cost(0.0) <= 1.0) return 0.0;
  double lo = 0.0;
  int widen = 0;
  while (cost(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++widen > 12) throw DomainError("cover cost stays above 1; cube diameters >= 1?");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (cost(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fracdim
