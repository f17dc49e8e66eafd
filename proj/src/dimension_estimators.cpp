#include "fracdim/dimension_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "fracdim/parallel.hpp"

namespace fracdim {

namespace {

constexpr double kSlack = 1e-12;
// Window levels must keep c0 b^k at least this multiple of the resolution floor.

int ceil_log(double x, double b) { return static_cast<int>(std::ceil(std::log(x) / std::log(b) - kSlack)); }
int floor_log(double x, double b) { return static_cast<int>(std::floor(std::log(x) / std::log(b) + kSlack)); }

// The cubes that meet E, level by level down to k_max, with floored diameters.
class Prepared {
 public:
  Prepared(const DyadicSystem& sys, const SubsetRef& e, const LevelWindow& w, const DiameterFloor& fl)
      : w_(w) {
    const std::size_t L = static_cast<std::size_t>(w.k_max) + 1;
    std::vector<std::vector<int>> slot(L);
    nodes_.resize(L);
    for (std::size_t k = 0; k < L; ++k) slot[k].assign(sys.levels[k].size(), -1);
    // Index of each cube inside its level.
    std::vector<std::size_t> pos(sys.cubes.size());
    for (std::size_t k = 0; k < sys.levels.size(); ++k)
      for (std::size_t i = 0; i < sys.levels[k].size(); ++i) pos[sys.levels[k][i]] = i;
    for (PointId x : e.members())
      for (std::size_t k = 0; k < L; ++k) {
        const CubeId c = sys.cube_of[k][x];
        int& s = slot[k][pos[c]];
        if (s < 0) {
          s = 0;
        }
      }
    for (std::size_t k = 0; k < L; ++k) {
      const double bk = std::pow(sys.params.b, static_cast<int>(k));
      for (std::size_t i = 0; i < sys.levels[k].size(); ++i) {
        if (slot[k][i] < 0) continue;
        slot[k][i] = static_cast<int>(nodes_[k].size());
        const CubeId c = sys.levels[k][i];
        const double d = std::max({sys.cubes[c].diam, fl.level_factor * bk, fl.absolute});
        nodes_[k].push_back({c, d, {}});
      }
    }
    for (std::size_t k = 0; k + 1 < L; ++k)
      for (auto& nd : nodes_[k])
        for (CubeId ch : sys.cubes[nd.id].children) {
          const int s = slot[k + 1][pos[ch]];
          if (s >= 0) nd.kids.push_back(s);
        }
  }

  double eval(double s, std::vector<CubeId>* cover = nullptr) const {
    const std::size_t L = nodes_.size();
    std::vector<std::vector<double>> c(L);
    std::vector<std::vector<char>> own(L);
    for (std::size_t kk = L; kk-- > 0;) {
      const int k = static_cast<int>(kk);
      c[kk].resize(nodes_[kk].size());
      own[kk].assign(nodes_[kk].size(), 0);
      for (std::size_t i = 0; i < nodes_[kk].size(); ++i) {
        const auto& nd = nodes_[kk][i];
        const double mine = std::pow(nd.d, s);
        if (k == w_.k_max) {
          c[kk][i] = mine;
          own[kk][i] = 1;
          continue;
        }
        double sub = 0.0;
        for (int ch : nd.kids) sub += c[kk + 1][static_cast<std::size_t>(ch)];
        if (k >= w_.k_min && mine <= sub) {
          c[kk][i] = mine;
          own[kk][i] = 1;
        } else {
          c[kk][i] = sub;
        }
      }
    }
    double total = 0.0;
    for (double v : c[0]) total += v;
    if (cover) {
      cover->clear();
      std::vector<std::pair<std::size_t, int>> stack;
      for (std::size_t i = nodes_[0].size(); i-- > 0;) stack.push_back({0, static_cast<int>(i)});
      while (!stack.empty()) {
        auto [k, i] = stack.back();
        stack.pop_back();
        const auto& nd = nodes_[k][static_cast<std::size_t>(i)];
        if (own[k][static_cast<std::size_t>(i)]) {
          cover->push_back(nd.id);
          continue;
        }
        for (auto it = nd.kids.rbegin(); it != nd.kids.rend(); ++it) stack.push_back({k + 1, *it});
      }
      std::sort(cover->begin(), cover->end());
    }
    return total;
  }

 private:
  struct Node {
    CubeId id;
    double d;
    std::vector<int> kids;
  };
  LevelWindow w_;
  std::vector<std::vector<Node>> nodes_;
};

void check_window(const DyadicSystem& sys, const LevelWindow& w) {
  if (w.empty()) throw DomainError("level window is empty");
  if (w.k_min < 0 || w.k_max > sys.depth())
    throw DomainError("level window [" + std::to_string(w.k_min) + "," + std::to_string(w.k_max) +
                      "] exceeds system levels [0," + std::to_string(sys.depth()) + "]");
}

double ambient_guess(const FiniteMetricSpace& s) {
  const double d = s.has_coordinates() ? static_cast<double>(s.ambient_dim()) : 1.0;
  return d / s.snowflake_exponent();
}

std::vector<double> sorted_grid(std::vector<double> g, const char* what, bool below_one) {
  if (g.empty()) throw DomainError(std::string(what) + " grid is empty");
  for (double v : g)
    if (!(v > 0.0) || (below_one && !(v < 1.0)))
      throw DomainError(std::string(what) + " values must lie in " + (below_one ? "(0,1)" : "(0,inf)"));
  std::sort(g.begin(), g.end(), std::greater<>());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  for (std::size_t i = 2; i < g.size(); ++i) {
    const double r0 = g[1] / g[0], r1 = g[i] / g[i - 1];
    if (std::abs(r1 - r0) > 1e-6 * r0) throw DomainError(std::string(what) + " grid is not geometric");
  }
  return g;
}

DimensionEstimate singleton_estimate(DimensionEstimate::Kind kind, double theta) {
  DimensionEstimate est;
  est.kind = kind;
  est.theta = theta;
  est.value = 0.0;
  est.notes.push_back("single point: one set covers it at every scale");
  return est;
}

DimensionEstimate run_cover_estimator(const DyadicSystem& sys, const SubsetRef& e, DimensionEstimate est,
                                      std::vector<double> deltas, const EstimatorOptions& opt,
                                      const std::function<ScalePlan(double)>& planner) {
  deltas = sorted_grid(std::move(deltas), "delta", true);
  std::vector<ScalePlan> plans;
  std::vector<double> used;
  for (double d : deltas) {
    ScalePlan p = planner(d);
    if (p.usable) {
      plans.push_back(p);
      used.push_back(d);
    } else {
      est.skipped.push_back({d, p.reason});
    }
  }
  if (plans.empty())
    throw NoUsableScales("no usable scales: every delta has an empty or unresolvable level window"
                         " (smaller theta needs smaller delta; finer data allows smaller delta)");
  std::vector<ScaleSolution> sol(plans.size());
  parallel_for(plans.size(), opt.threads,
               [&](std::size_t i) { sol[i] = solve_scale(sys, e, plans[i], opt.tolerance); });
  est.r_max = used.front();
  est.r_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& w = plans[i].window;
    ScalePoint pt;
    pt.delta = used[i];
    pt.s = sol[i].s;
    pt.k_min = w.k_min;
    pt.k_max = w.k_max;
    pt.count = static_cast<double>(sol[i].at_root.cover.cubes.size());
    // Hausdorff windows end at the finest resolvable level, not at K.
    const int finest = w.theta == 0.0 ? w.k_max : sys.depth();
    for (CubeId c : sol[i].at_root.cover.cubes)
      if (sys.cubes[c].level == finest) pt.finest_level = true;
    est.series.push_back(pt);
    est.r_min = std::min(est.r_min, std::max(plans[i].floor.level_factor * std::pow(sys.params.b, w.k_max),
                                             plans[i].floor.absolute));
  }
  est.fit = extrapolate(est.series, opt.residual_cap, &est.value);
  return est;
}

}  // namespace

LevelWindow admissible_levels(double theta, double delta, double c_u, double c0, double C0, double b) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  if (!(c_u > 0.0) || !(c0 > 0.0) || !(C0 > 0.0) || !(b > 0.0 && b < 1.0))
    throw DomainError("window constants must be positive with b in (0,1)");
  LevelWindow w;
  w.theta = theta;
  w.delta = delta;
  w.c_u = c_u;
  w.c0 = c0;
  w.C0 = C0;
  w.b = b;
  const double hi = delta / (4.0 * C0);
  const double lo = 3.0 / (c_u * c0) * std::pow(delta, 1.0 / theta);
  w.k_min = ceil_log(hi, b);
  w.k_max = floor_log(lo, b);
  return w;
}

long covering_number(const SubsetRef& e, double r, CoverMethod method) {
  if (!(r > 0.0)) throw DomainError("covering radius must be positive");
  const auto& space = e.space();
  const auto& ids = e.members();
  const double lim = r * (1 + kSlack);
  if (method == CoverMethod::exact_oracle) {
    const std::size_t n = ids.size();
    if (n > 12) throw CapacityError("exact covering oracle is limited to 12 points");
    std::vector<unsigned> clash(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && space.dist(ids[i], ids[j]) > lim) clash[i] |= 1u << j;
    const unsigned full = (1u << n) - 1;
    std::vector<char> ok(full + 1, 1);
    for (unsigned m = 1; m <= full; ++m)
      for (std::size_t i = 0; i < n && ok[m]; ++i)
        if ((m >> i & 1u) && (clash[i] & m)) ok[m] = 0;
    std::vector<int> best(full + 1, 1 << 20);
    best[0] = 0;
    for (unsigned m = 1; m <= full; ++m) {
      const unsigned low = m & (~m + 1);
      const unsigned rest = m ^ low;
      for (unsigned sub = rest;; sub = (sub - 1) & rest) {
        const unsigned part = sub | low;
        if (ok[part]) best[m] = std::min(best[m], 1 + best[m ^ part]);
        if (sub == 0) break;
      }
    }
    return best[full];
  }
  if (space.ambient_dim() == 1) {
    const double eps = space.snowflake_exponent();
    std::vector<std::pair<double, double>> groups;  // lo, hi
    for (PointId x : ids) {
      const double v = space.coordinates(x)[0];
      bool placed = false;
      for (auto& [lo, hi] : groups) {
        const double span = std::max(hi, v) - std::min(lo, v);
        if ((eps == 1.0 ? span : std::pow(span, eps)) <= lim) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          placed = true;
          break;
        }
      }
      if (!placed) groups.push_back({v, v});
    }
    return static_cast<long>(groups.size());
  }
  std::vector<std::vector<PointId>> groups;
  for (PointId x : ids) {
    bool placed = false;
    for (auto& g : groups) {
      bool fits = true;
      for (PointId y : g)
        if (space.dist(x, y) > lim) {
          fits = false;
          break;
        }
      if (fits) {
        g.push_back(x);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({x});
  }
  return static_cast<long>(groups.size());
}

CoverResult min_cover_cost(const DyadicSystem& sys, const SubsetRef& e, double s, const LevelWindow& window,
                           const DiameterFloor& floor) {
  check_window(sys, window);
  if (!(s >= 0.0)) throw DomainError("s must be nonnegative");
  Prepared prep(sys, e, window, floor);
  CoverResult out;
  out.cover.window = window;
  out.cover.s = s;
  out.cost = prep.eval(s, &out.cover.cubes);
  out.cover.cost = out.cost;
  return out;
}

bool cover_is_valid(const DyadicSystem& sys, const SubsetRef& e, const AntichainCover& cover) {
  for (CubeId c : cover.cubes) {
    const int k = sys.cubes[c].level;
    if (k < cover.window.k_min || k > cover.window.k_max) return false;
  }
  // Non-nesting: walk each cube's ancestors.
  std::vector<char> chosen(sys.cubes.size(), 0);
  for (CubeId c : cover.cubes) chosen[c] = 1;
  for (CubeId c : cover.cubes)
    for (CubeId a = sys.cubes[c].parent; a != kNoCube; a = sys.cubes[a].parent)
      if (chosen[a]) return false;
  std::vector<char> hit(sys.space->size(), 0);
  for (CubeId c : cover.cubes)
    for (PointId x : sys.cubes[c].members) hit[x] = 1;
  for (PointId x : e.members())
    if (!hit[x]) return false;
  return true;
}

Extrapolation extrapolate(const std::vector<ScalePoint>& series, double residual_cap, double* value) {
  if (series.empty()) throw DomainError("empty series");
  Extrapolation fit;
  double v;
  if (series.size() == 1) {
    v = series.front().s;
  } else {
    const double n = static_cast<double>(series.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : series) {
      const double x = 1.0 / std::log(1.0 / p.delta);
      sx += x;
      sy += p.s;
      sxx += x * x;
      sxy += x * p.s;
    }
    const double den = n * sxx - sx * sx;
    fit.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (const auto& p : series) {
      const double r = p.s - (fit.intercept + fit.slope / std::log(1.0 / p.delta));
      ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    v = fit.intercept;
    if (fit.residual > residual_cap) {
      fit.fell_back = true;
      v = series.back().s;
    }
  }
  if (v < 0.0) {
    fit.clamped = true;
    v = 0.0;
  }
  if (value) *value = v;
  return fit;
}

DimensionEstimate box_dimension(const SubsetRef& e, std::vector<double> scales) {
  scales = sorted_grid(std::move(scales), "scale", false);
  if (scales.size() < 4) throw DomainError("box dimension needs at least 4 scales");
  DimensionEstimate est;
  est.kind = DimensionEstimate::Kind::box;
  est.r_max = scales.front();
  est.r_min = scales.back();
  const double floor = subset_resolution(e);
  std::vector<double> xs, ys;
  for (double r : scales) {
    ScalePoint pt;
    pt.delta = r;
    pt.count = static_cast<double>(covering_number(e, r));
    pt.s = r < 1.0 ? std::log(pt.count) / std::log(1.0 / r) : 0.0;
    est.series.push_back(pt);
    xs.push_back(std::log(1.0 / r));
    ys.push_back(std::log(pt.count));
    if (r < floor) est.resolution_caveat = true;
  }
  if (est.resolution_caveat)
    est.notes.push_back("scales below the resolution floor " + std::to_string(floor) +
                        " see a finite set; counts saturate there");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  est.fit.slope = sxy / sxx;
  est.fit.intercept = my - est.fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (est.fit.intercept + est.fit.slope * xs[i]);
    ss += r * r;
  }
  est.fit.residual = std::sqrt(ss / n);
  for (std::size_t i = 1; i < xs.size(); ++i) est.local_slopes.push_back((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
  est.value = est.fit.slope;
  if (est.value < 0.0) {
    est.value = 0.0;
    est.fit.clamped = true;
  }
  return est;
}

double subset_resolution(const SubsetRef& e) {
  const auto& space = e.space();
  if (e.size() < 2) return 0.0;
  if (e.size() == space.size()) return space.resolution_floor();
  double best = std::numeric_limits<double>::infinity();
  if (space.ambient_dim() == 1) {
    std::vector<double> v;
    for (PointId x : e.members()) v.push_back(space.coordinates(x)[0]);
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1]) best = std::min(best, v[i] - v[i - 1]);
    return std::pow(best, space.snowflake_exponent());
  }
  const auto& ids = e.members();
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (ids[i] != ids[j]) best = std::min(best, space.dist(ids[i], ids[j]));
  return best;
}

double measured_c_u(const SubsetRef& e, double fallback, std::string* note) {
  if (e.size() < 2) return fallback;
  const double diam = diameter(e);
  const double floor = subset_resolution(e);
  std::vector<double> radii;
  for (double r = diam / 2; r >= 4 * floor && radii.size() < 64; r /= 2) radii.push_back(r);
  if (radii.empty()) {
    if (note) *note = "too few scales to measure uniform perfectness; using fallback";
    return fallback;
  }
  const auto up = estimate_uniform_perfectness(e, radii);
  if (up.flagged) {
    if (note)
      *note = "set is not uniformly perfect at this resolution (empty annulus at r=" +
              std::to_string(up.worst_radius) + "); using fallback c_u";
    return fallback;
  }
  return up.c;
}

ScalePlan plan_intermediate_scale(const DyadicSystem& sys, double theta, double delta, double c_u,
                                  double e_resolution, double margin) {
  const auto& p = sys.params;
  ScalePlan plan;
  if (theta >= 1.0) {
    // The window is empty at theta = 1; use the single level below delta/(4 C0).
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    plan.window.theta = 1.0;
    plan.window.delta = delta;
    plan.window.c_u = c_u;
    plan.window.c0 = p.c0;
    plan.window.C0 = p.C0;
    plan.window.b = p.b;
    plan.window.k_min = plan.window.k_max = ceil_log(delta / (4.0 * p.C0), p.b);
    plan.floor = {c_u * p.c0 / 3.0, 0.0};
  } else {
    plan.window = admissible_levels(theta, delta, c_u, p.c0, p.C0, p.b);
    plan.floor = {c_u * p.c0 / 3.0, std::pow(delta, 1.0 / theta)};
  }
  plan.window.k_min = std::max(plan.window.k_min, 0);
  if (plan.window.empty()) {
    plan.reason = "empty level window";
  } else if (plan.window.k_max > sys.depth()) {
    plan.reason = "window below the system depth";
  } else if (p.c0 * std::pow(p.b, plan.window.k_max) < margin * e_resolution * (1 - kSlack)) {
    plan.reason = "finest window level is below the resolution floor";
  } else {
    plan.usable = true;
  }
  return plan;
}

ScalePlan plan_hausdorff_scale(const DyadicSystem& sys, double delta, double c_u, double e_resolution,
                               double margin) {
  const auto& p = sys.params;
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  ScalePlan plan;
  plan.window.theta = 0.0;
  plan.window.delta = delta;
  plan.window.c_u = c_u;
  plan.window.c0 = p.c0;
  plan.window.C0 = p.C0;
  plan.window.b = p.b;
  plan.window.k_min = std::max(0, ceil_log(delta / (4.0 * p.C0), p.b));
  // Cubes with c0 b^k under margin * resolution carry no scale information.
  plan.window.k_max = sys.depth();
  while (plan.window.k_max > 0 &&
         p.c0 * std::pow(p.b, plan.window.k_max) < margin * e_resolution * (1 - kSlack))
    --plan.window.k_max;
  plan.floor = {c_u * p.c0 / 3.0, 0.0};
  if (plan.window.empty())
    plan.reason = "delta below the finest resolvable level";
  else
    plan.usable = true;
  return plan;
}

ScaleSolution solve_scale(const DyadicSystem& sys, const SubsetRef& e, const ScalePlan& plan, double tol) {
  check_window(sys, plan.window);
  Prepared prep(sys, e, plan.window, plan.floor);
  ScaleSolution out;
  out.s = solve_unit_cost([&](double s) { return prep.eval(s); }, ambient_guess(*sys.space) + 2.0, tol);
  out.at_root.cover.window = plan.window;
  out.at_root.cover.s = out.s;
  out.at_root.cost = prep.eval(out.s, &out.at_root.cover.cubes);
  out.at_root.cover.cost = out.at_root.cost;
  return out;
}

DimensionEstimate intermediate_dimension(const DyadicSystem& sys, const SubsetRef& e, double theta,
                                         std::vector<double> deltas, const EstimatorOptions& opt) {
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0,1]");
  if (&e.space() != sys.space) throw DomainError("subset and system use different spaces");
  if (e.size() == 1) return singleton_estimate(DimensionEstimate::Kind::intermediate, theta);
  DimensionEstimate est;
  est.kind = DimensionEstimate::Kind::intermediate;
  est.theta = theta;
  std::string note;
  est.c_u = opt.c_u > 0.0 ? opt.c_u : measured_c_u(e, opt.c_u_fallback, &note);
  if (!note.empty()) est.notes.push_back(note);
  const double res = subset_resolution(e);
  const double c_u = est.c_u;
  return run_cover_estimator(sys, e, std::move(est), std::move(deltas), opt, [&](double d) {
    return plan_intermediate_scale(sys, theta, d, c_u, res);
  });
}

DimensionEstimate hausdorff_dimension(const DyadicSystem& sys, const SubsetRef& e, std::vector<double> deltas,
                                      const EstimatorOptions& opt) {
  if (&e.space() != sys.space) throw DomainError("subset and system use different spaces");
  if (e.size() == 1) return singleton_estimate(DimensionEstimate::Kind::hausdorff, 0.0);
  DimensionEstimate est;
  est.kind = DimensionEstimate::Kind::hausdorff;
  est.theta = 0.0;
  std::string note;
  est.c_u = opt.c_u > 0.0 ? opt.c_u : measured_c_u(e, opt.c_u_fallback, &note);
  if (!note.empty()) est.notes.push_back(note);
  const double c_u = est.c_u;
  const double res = subset_resolution(e);
  est = run_cover_estimator(sys, e, std::move(est), std::move(deltas), opt,
                            [&](double d) { return plan_hausdorff_scale(sys, d, c_u, res); });
  for (const auto& pt : est.series)
    if (pt.finest_level) est.resolution_caveat = true;
  if (est.resolution_caveat)
    est.notes.push_back("optimal covers reach the finest resolvable level: the resolution floor binds");
  return est;
}

std::vector<double> auto_delta_grid(const DyadicSystem& sys, const SubsetRef& e, double theta, double c_u,
                                    double ratio, std::size_t count, double margin) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("delta ratio must lie in (0,1)");
  const double res = subset_resolution(e);
  std::vector<double> out;
  double d = 0.5;
  for (int j = 0; j < 4000 && out.size() < count && d > 0.0; ++j, d *= ratio) {
    const ScalePlan p = theta > 0.0 ? plan_intermediate_scale(sys, theta, d, c_u, res, margin)
                                    : plan_hausdorff_scale(sys, d, c_u, res, margin);
    if (p.usable) {
      out.push_back(d);
    } else if (!out.empty()) {
      break;
    } else if (p.window.k_min > sys.depth()) {
      break;
    }
  }
  return out;
}

std::string kind_name(DimensionEstimate::Kind k) {
  switch (k) {
    case DimensionEstimate::Kind::box: return "box";
    case DimensionEstimate::Kind::hausdorff: return "hausdorff";
    case DimensionEstimate::Kind::intermediate: return "intermediate";
  }
  return {};
}

nlohmann::json to_json(const DimensionEstimate& est) {
  using nlohmann::json;
  json series = json::array();
  for (const auto& p : est.series)
    series.push_back({{"delta", p.delta},
                      {"s", p.s},
                      {"k_min", p.k_min},
                      {"k_max", p.k_max},
                      {"count", p.count},
                      {"finest_level", p.finest_level}});
  json skipped = json::array();
  for (const auto& [d, why] : est.skipped) skipped.push_back({{"delta", d}, {"reason", why}});
  json out = {{"kind", kind_name(est.kind)},
              {"value", est.value},
              {"scale_window", {est.r_min, est.r_max}},
              {"series", std::move(series)},
              {"fit",
               {{"intercept", est.fit.intercept},
                {"slope", est.fit.slope},
                {"residual", est.fit.residual},
                {"fell_back", est.fit.fell_back},
                {"clamped", est.fit.clamped}}},
              {"skipped", std::move(skipped)},
              {"notes", est.notes},
              {"resolution_caveat", est.resolution_caveat}};
  if (est.kind == DimensionEstimate::Kind::intermediate) out["theta"] = est.theta;
  if (est.kind != DimensionEstimate::Kind::box) out["c_u"] = est.c_u;
  if (!est.local_slopes.empty()) out["local_slopes"] = est.local_slopes;
  return out;
}

}  // namespace fracdim
