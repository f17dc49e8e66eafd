#include "fracdim/distortion_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fracdim/errors.hpp"
#include "fracdim/parallel.hpp"

namespace fracdim {

namespace {

constexpr double kSlack = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

double p_form(double p, double s, double Q, double d) { return std::max(p * d / (s * p - Q + d), d); }
double q_form(double p, double q, double s, double Q, double d) {
  return std::max(q * d / ((s - Q / p) * q + d), d);
}

}  // namespace

double holder_bound(double p, double alpha, double d) { return std::max(p * d / (alpha * p + d), d); }

BoundValue evaluate_bound(const BoundParams& b) {
  const std::string name = to_string(b.variant);
  require(std::isfinite(b.d) && b.d >= 0.0, name + " requires d >= 0");
  BoundValue v;
  switch (b.variant) {
    case BoundVariant::thm11:
      require(b.p > 1.0, name + " requires p > 1");
      require(b.alpha > 0.0 && std::isfinite(b.alpha), name + " requires alpha > 0");
      v.upper = std::isinf(b.p) ? std::max(b.d / b.alpha, b.d) : holder_bound(b.p, b.alpha, b.d);
      break;
    case BoundVariant::cor12_newtonian:
    case BoundVariant::cor12_qs:
      require(b.Q > 1.0, name + " requires Q > 1");
      require(b.p > b.Q && std::isfinite(b.p), name + " requires Q < p < inf");
      require(b.d < b.Q, name + " requires d < Q");
      if (b.variant == BoundVariant::cor12_qs) {
        require(b.d > 0.0, name + " requires d in (0,Q)");
        v.lower = (b.p - b.Q) * b.d / (b.p - b.d);
      }
      v.upper = b.p * b.d / (b.p - b.Q + b.d);
      break;
    case BoundVariant::thm13_tl:
    case BoundVariant::thm13_besov:
    case BoundVariant::thm14: {
      require(b.s > 0.0, name + " requires s > 0");
      require(b.Q > 0.0, name + " requires Q > 0");
      require(std::isfinite(b.p) && b.p * b.s > b.Q, name + " requires Q/s < p < inf");
      if (b.variant == BoundVariant::thm14)
        require(b.d <= b.Q, name + " requires d <= Q");
      else
        require(b.d < b.Q, name + " requires d < Q");
      const bool besov = b.variant == BoundVariant::thm13_besov ||
                         (b.variant == BoundVariant::thm14 && b.scale == SobolevScale::besov);
      if (besov) require(b.q > 0.0, name + " requires q > 0");
      if (besov && b.q > b.p) {
        require(std::isfinite(b.q), name + " with q > p requires q < inf");
        v.upper = q_form(b.p, b.q, b.s, b.Q, b.d);
      } else {
        v.upper = p_form(b.p, b.s, b.Q, b.d);
      }
      break;
    }
  }
  return v;
}

BoundVariant parse_bound_variant(const std::string& n) {
  if (n == "thm11") return BoundVariant::thm11;
  if (n == "cor12-newtonian") return BoundVariant::cor12_newtonian;
  if (n == "cor12-qs") return BoundVariant::cor12_qs;
  if (n == "thm13-TL" || n == "thm13-tl") return BoundVariant::thm13_tl;
  if (n == "thm13-besov") return BoundVariant::thm13_besov;
  if (n == "thm14") return BoundVariant::thm14;
  throw DomainError("unknown bound variant '" + n + "'");
}

std::string to_string(BoundVariant v) {
  switch (v) {
    case BoundVariant::thm11: return "thm11";
    case BoundVariant::cor12_newtonian: return "cor12-newtonian";
    case BoundVariant::cor12_qs: return "cor12-qs";
    case BoundVariant::thm13_tl: return "thm13-TL";
    case BoundVariant::thm13_besov: return "thm13-besov";
    case BoundVariant::thm14: return "thm14";
  }
  return {};
}

std::string to_string(CubeColor c) {
  switch (c) {
    case CubeColor::red: return "red";
    case CubeColor::blue: return "blue";
    case CubeColor::green: return "green";
  }
  return {};
}

std::vector<ColoredCube> classify_cubes(const MapSample& f, const DyadicSystem& sys,
                                        const std::vector<CubeId>& cubes, double delta_y, double theta) {
  require(delta_y > 0.0 && delta_y < 1.0, "delta_Y must lie in (0,1)");
  require(theta > 0.0 && theta <= 1.0, "theta must lie in (0,1]");
  require(sys.space == f.source, "dyadic system and map use different source spaces");
  const double m = std::pow(delta_y, 1.0 / theta);
  std::vector<ColoredCube> out;
  out.reserve(cubes.size());
  for (CubeId c : cubes) {
    if (c >= sys.cubes.size()) throw DomainError("unknown cube id " + std::to_string(c));
    if (sys.cubes[c].members.empty()) throw DomainError("cube " + std::to_string(c) + " has no members");
    ColoredCube cc;
    cc.cube = c;
    cc.image_diam = diameter(*f.target, f.image_ids(sys.cubes[c].members));
    cc.color = cc.image_diam >= delta_y ? CubeColor::red : cc.image_diam >= m ? CubeColor::blue : CubeColor::green;
    out.push_back(cc);
  }
  return out;
}

SubdivisionGraph build_subdivision_graph(const MapSample& f, const DyadicSystem& sys, const SubsetRef& e,
                                         const std::vector<CubeId>& initial, double delta_y, double theta) {
  require(!initial.empty(), "initial cover is empty");
  const std::set<CubeId> chosen(initial.begin(), initial.end());
  require(chosen.size() == initial.size(), "initial cover repeats a cube");
  for (CubeId c : initial) {
    require(c < sys.cubes.size(), "unknown cube id " + std::to_string(c));
    for (CubeId a = sys.cubes[c].parent; a != kNoCube; a = sys.cubes[a].parent)
      require(!chosen.count(a), "initial cover is nested: cube " + std::to_string(c) + " lies in cube " +
                                    std::to_string(a));
  }
  std::vector<char> in_e(sys.space->size(), 0);
  for (PointId x : e.members()) in_e[x] = 1;

  SubdivisionGraph g;
  g.delta_y = delta_y;
  g.theta = theta;
  std::vector<std::size_t> row;
  for (auto cc : classify_cubes(f, sys, initial, delta_y, theta)) {
    row.push_back(g.vertices.size());
    g.vertices.push_back(cc);
  }
  std::vector<char> has_child;
  for (int r = 0; !row.empty(); ++r) {
    g.rows = r + 1;
    std::vector<CubeId> kids;
    std::vector<std::size_t> parent_of;
    for (std::size_t v : row) {
      if (g.vertices[v].color != CubeColor::red) continue;
      const auto& cube = sys.cubes[g.vertices[v].cube];
      if (cube.children.empty()) {
        g.terminated = false;
        continue;
      }
      for (CubeId ch : cube.children) {
        const auto& mem = sys.cubes[ch].members;
        if (std::any_of(mem.begin(), mem.end(), [&](PointId x) { return in_e[x] != 0; })) {
          kids.push_back(ch);
          parent_of.push_back(v);
        }
      }
    }
    row.clear();
    auto colored = classify_cubes(f, sys, kids, delta_y, theta);
    for (std::size_t i = 0; i < colored.size(); ++i) {
      colored[i].row = r + 1;
      row.push_back(g.vertices.size());
      g.edges.push_back({parent_of[i], g.vertices.size()});
      g.vertices.push_back(colored[i]);
    }
  }
  has_child.assign(g.vertices.size(), 0);
  for (const auto& [a, b] : g.edges) has_child[a] = 1;
  for (std::size_t v = 0; v < g.vertices.size(); ++v)
    if (!has_child[v]) g.leaves.push_back(v);
  return g;
}

double PushforwardCover::sum(double s) const {
  double acc = 0.0;
  for (const auto& en : entries) acc += std::pow(en.reported, s);
  return acc;
}

bool PushforwardCover::admissible() const {
  const double m = std::pow(delta_y, 1.0 / theta);
  const double hi = std::max(delta_y, 2 * m / c_u_prime);
  for (const auto& en : entries)
    if (en.reported < m * (1 - kSlack) || en.reported > hi * (1 + kSlack)) return false;
  return true;
}

PushforwardCover pushforward_cover(const SubdivisionGraph& g, double c_u_prime) {
  if (!g.terminated)
    throw DomainError("subdivision did not terminate: red cubes remain at the finest level");
  require(c_u_prime > 0.0, "c_u' must be positive");
  PushforwardCover pc;
  pc.delta_y = g.delta_y;
  pc.theta = g.theta;
  pc.c_u_prime = c_u_prime;
  const double m = std::pow(g.delta_y, 1.0 / g.theta);
  for (std::size_t v : g.leaves) {
    const auto& cc = g.vertices[v];
    PushforwardEntry en;
    en.vertex = v;
    en.color = cc.color;
    if (cc.color == CubeColor::blue) {
      en.reported = en.worst = cc.image_diam;
    } else {
      en.reported = m;
      en.worst = 2 * m / c_u_prime;
      en.enlarged = true;
    }
    pc.entries.push_back(en);
  }
  return pc;
}

PushforwardReport distortion_experiment(const MapSample& f, const DyadicSystem& sys, const SubsetRef& e,
                                        double theta, double p, double alpha, std::vector<double> deltas,
                                        const ExperimentOptions& opt) {
  require(theta > 0.0 && theta <= 1.0, "theta must lie in (0,1]");
  require(p > 1.0, "p must exceed 1");
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
  require(&e.space() == f.source && sys.space == f.source, "subset, system and map disagree on the source");
  require(e.size() >= 2, "the experiment needs at least two source points");
  PushforwardReport rep;
  rep.theta = theta;
  rep.p = p;
  rep.alpha = alpha;

  std::string note;
  rep.c_u = opt.c_u > 0.0 ? opt.c_u : measured_c_u(e, opt.c_u_fallback, &note);
  if (!note.empty()) rep.notes.push_back("source: " + note);
  std::vector<PointId> img = f.image_ids(e.members());
  std::sort(img.begin(), img.end());
  img.erase(std::unique(img.begin(), img.end()), img.end());
  const SubsetRef fe(*f.target, img);
  note.clear();
  rep.c_u_prime = opt.c_u_prime > 0.0 ? opt.c_u_prime : measured_c_u(fe, opt.c_u_fallback, &note);
  if (!note.empty()) rep.notes.push_back("image: " + note);
  const double image_diam = diameter(fe);

  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  const double res = subset_resolution(e);
  std::vector<ScalePlan> plans;
  std::vector<double> used;
  for (double d : deltas) {
    ScalePlan plan = plan_intermediate_scale(sys, theta, d, rep.c_u, res, opt.resolution_margin);
    if (!plan.usable) {
      rep.skipped.push_back({d, plan.reason});
      continue;
    }
    plan.floor.absolute = std::pow(d, 1.0 / theta);
    plans.push_back(plan);
    used.push_back(d);
  }
  if (plans.empty()) throw NoUsableScales("no usable scales for the distortion experiment");

  const double hi_img = (f.target->has_coordinates() ? f.target->ambient_dim() : 1.0) /
                            f.target->snowflake_exponent() + 2.0;
  rep.rows.resize(plans.size());
  if (opt.keep_graphs) {
    rep.graphs.resize(plans.size());
    rep.covers.resize(plans.size());
  }
  parallel_for(plans.size(), opt.threads, [&](std::size_t i) {
    DeltaRow& row = rep.rows[i];
    row.delta = used[i];
    const ScaleSolution sol = solve_scale(sys, e, plans[i], opt.tolerance);
    row.d = sol.s;
    double d_eff = row.d;
    row.bound = holder_bound(p, alpha, row.d);
    if (std::abs(row.bound - row.d) < kSlack) {
      d_eff = row.d + 1e-6;
      row.bound = holder_bound(p, alpha, d_eff);
    }
    row.delta_y = std::pow(row.delta, d_eff / row.bound);
    const double m = std::pow(row.delta_y, 1.0 / theta);

    const auto& initial = sol.at_root.cover.cubes;
    row.initial_cubes = initial.size();
    const SubdivisionGraph g = build_subdivision_graph(f, sys, e, initial, row.delta_y, theta);
    row.rows = g.rows;
    if (opt.keep_graphs) rep.graphs[i] = g;
    for (const auto& v : g.vertices)
      (v.color == CubeColor::red ? row.red : v.color == CubeColor::blue ? row.blue : row.green)++;
    if (!g.terminated) {
      row.warnings.push_back("subdivision did not terminate");
      row.image = row.image_worst = std::numeric_limits<double>::quiet_NaN();
      row.admissible = false;
      return;
    }
    const PushforwardCover pc = pushforward_cover(g, rep.c_u_prime);
    if (opt.keep_graphs) rep.covers[i] = pc;
    row.entries = pc.entries.size();
    row.admissible = pc.admissible();
    try {
      row.image = solve_unit_cost([&](double s) { return pc.sum(s); }, hi_img, opt.tolerance);
    } catch (const DomainError&) {
      row.image = row.image_worst = kInfinity;
      row.violation = true;
      row.warnings.push_back("image cover sum stays above 1: delta_Y too close to 1");
      return;
    }
    try {
      row.image_worst = solve_unit_cost(
          [&](double s) {
            double acc = 0.0;
            for (const auto& en : pc.entries) acc += std::pow(en.worst, s);
            return acc;
          },
          hi_img, opt.tolerance);
    } catch (const DomainError&) {
      row.image_worst = kInfinity;
      row.warnings.push_back("worst-case cover sum stays above 1");
    }
    if (2 * m / rep.c_u_prime > row.delta_y) row.warnings.push_back("2 delta_Y^{1/theta}/c_u' exceeds delta_Y");
    if (m / rep.c_u_prime >= image_diam / 2)
      row.warnings.push_back("delta_Y^{1/theta}/c_u' reaches |f(E)|/2");
    row.violation = row.image > row.bound + opt.violation_tolerance;
  });

  std::vector<ScalePoint> src, imgs;
  for (const auto& r : rep.rows) {
    rep.violation = rep.violation || r.violation;
    src.push_back({r.delta, r.d, 0, 0, 0.0, false});
    if (std::isfinite(r.image)) imgs.push_back({r.delta, r.image, 0, 0, 0.0, false});
  }
  extrapolate(src, opt.residual_cap, &rep.source_dim);
  if (!imgs.empty()) extrapolate(imgs, opt.residual_cap, &rep.image_dim);
  rep.headline_bound = holder_bound(p, alpha, rep.source_dim);
  return rep;
}

nlohmann::json to_json(const BoundParams& bp, const BoundValue& v) {
  nlohmann::json j{{"variant", to_string(bp.variant)},
                   {"p", std::isinf(bp.p) ? nlohmann::json("inf") : nlohmann::json(bp.p)},
                   {"q", std::isinf(bp.q) ? nlohmann::json("inf") : nlohmann::json(bp.q)},
                   {"s", bp.s},
                   {"alpha", bp.alpha},
                   {"Q", bp.Q},
                   {"d", bp.d},
                   {"theta", bp.theta},
                   {"scale", bp.scale == SobolevScale::besov ? "besov" : "triebel-lizorkin"},
                   {"upper", v.upper}};
  if (v.lower) j["lower"] = *v.lower;
  return j;
}

nlohmann::json to_json(const PushforwardReport& r) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json rows = json::array();
  for (const auto& d : r.rows)
    rows.push_back({{"delta", d.delta},
                    {"delta_Y", d.delta_y},
                    {"d", d.d},
                    {"bound", d.bound},
                    {"image", num(d.image)},
                    {"image_worst_case", num(d.image_worst)},
                    {"red", d.red},
                    {"blue", d.blue},
                    {"green", d.green},
                    {"initial_cubes", d.initial_cubes},
                    {"entries", d.entries},
                    {"rows", d.rows},
                    {"admissible", d.admissible},
                    {"violation", d.violation},
                    {"warnings", d.warnings}});
  json skipped = json::array();
  for (const auto& [d, why] : r.skipped) skipped.push_back({{"delta", d}, {"reason", why}});
  return {{"theta", r.theta},
          {"p", r.p},
          {"alpha", r.alpha},
          {"c_u", r.c_u},
          {"c_u_prime", r.c_u_prime},
          {"source_dim", r.source_dim},
          {"image_dim", r.image_dim},
          {"headline_bound", r.headline_bound},
          {"violation", r.violation},
          {"rows", rows},
          {"skipped", skipped},
          {"notes", r.notes}};
}

std::vector<std::string> report_csv_header() {
  return {"delta", "delta_Y", "d", "bound", "image", "image_worst_case", "red", "blue", "green",
          "initial_cubes", "entries", "rows", "admissible", "violation"};
}

std::vector<std::vector<double>> report_csv_rows(const PushforwardReport& r) {
  std::vector<std::vector<double>> out;
  for (const auto& d : r.rows)
    out.push_back({d.delta, d.delta_y, d.d, d.bound, d.image, d.image_worst, double(d.red), double(d.blue),
                   double(d.green), double(d.initial_cubes), double(d.entries), double(d.rows),
                   d.admissible ? 1.0 : 0.0, d.violation ? 1.0 : 0.0});
  return out;
}

}  // namespace fracdim
