#include "fracdim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <memory>
#include <ostream>

#include "fracdim/config.hpp"
#include "fracdim/dimension_estimators.hpp"
#include "fracdim/distortion_engine.hpp"
#include "fracdim/dyadic_cubes.hpp"
#include "fracdim/errors.hpp"
#include "fracdim/generators.hpp"
#include "fracdim/holder_analysis.hpp"
#include "fracdim/io.hpp"

namespace fracdim {

namespace {

using nlohmann::json;

struct Overrides {
  std::string config, out, points, matrix, generator, map, spec, file, variant, scale, weights;
  std::size_t threads = 0;
  bool strict = false, relaxed = false;
  std::vector<double> thetas;
  double alpha = 0, p = 0, q = 0, s = 0, d = -1, Q = 0;
  bool has_p = false, has_q = false, has_s = false, has_d = false, has_Q = false, has_alpha = false;
};

struct Source {
  std::unique_ptr<FiniteMetricSpace> space;
  std::vector<PointId> subset;
};

struct Map {
  std::unique_ptr<FiniteMetricSpace> target;
  std::vector<PointId> assignment;
  double alpha = 1.0, p = 2.0;
  std::string name;
};

MetricKind metric_kind(const std::string& s) {
  if (s == "euclidean") return MetricKind::euclidean;
  if (s == "chebyshev") return MetricKind::chebyshev;
  throw InputError("unknown metric '" + s + "' (euclidean or chebyshev)", 0);
}

Source load_source(const Config& c) {
  const auto& in = c.input;
  const int given = !in.generator.empty() + !in.points.empty() + !in.matrix.empty();
  if (given != 1) throw InputError("give exactly one of input.generator, input.points, input.matrix", 0);
  Source src;
  if (!in.matrix.empty()) {
    src.space = std::make_unique<FiniteMetricSpace>(FiniteMetricSpace::from_matrix(read_distance_matrix(in.matrix)));
  } else {
    auto pts = in.points.empty() ? generate(parse_generator_spec(in.generator)).points : read_point_cloud(in.points);
    src.space = std::make_unique<FiniteMetricSpace>(
        FiniteMetricSpace::from_coordinates(std::move(pts), metric_kind(in.metric)));
  }
  if (in.snowflake != 1.0) src.space = std::make_unique<FiniteMetricSpace>(src.space->snowflake(in.snowflake));
  src.subset = in.subset;
  if (src.subset.empty())
    for (PointId x = 0; x < src.space->size(); ++x) src.subset.push_back(x);
  return src;
}

Map load_map(const Config& c, const FiniteMetricSpace& source) {
  if (!c.map) throw InputError("this command needs a map section (or --map)", 0);
  const auto& m = *c.map;
  Map out;
  if (!m.spec.empty()) {
    const MapSpec spec = parse_map_spec(m.spec);
    GeneratedMap gm = generate_map(spec, source);
    out.target = std::move(gm.target);
    out.assignment = std::move(gm.assignment);
    out.alpha = spec.holder_alpha();
    out.p = spec.holder_p();
    out.name = spec.to_string();
  } else {
    if (m.pairs.empty() || (m.target_points.empty() == m.target_matrix.empty()))
      throw InputError("map needs spec, or pairs plus exactly one of target_points, target_matrix", 0);
    if (!m.target_matrix.empty())
      out.target = std::make_unique<FiniteMetricSpace>(
          FiniteMetricSpace::from_matrix(read_distance_matrix(m.target_matrix)));
    else
      out.target = std::make_unique<FiniteMetricSpace>(
          FiniteMetricSpace::from_coordinates(read_point_cloud(m.target_points), metric_kind(m.target_metric)));
    out.assignment = read_map_pairs(m.pairs, source.size());
    out.name = m.pairs;
    if (!(m.alpha > 0.0) || !(m.p > 0.0)) throw InputError("a map read from CSV needs map.alpha and map.p", 0);
  }
  if (m.alpha > 0.0) out.alpha = m.alpha;
  if (m.p > 0.0) out.p = m.p;
  return out;
}

std::vector<double> grid_values(const GridConfig& g, double unit) {
  if (!g.values.empty()) return g.values;
  std::vector<double> v;
  double x = g.start * unit;
  for (std::size_t i = 0; i < g.count; ++i, x *= g.ratio) v.push_back(x);
  return v;
}

std::string theta_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", t);
  return buf;
}

std::string path_in(const Config& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

std::vector<std::vector<double>> series_rows(const DimensionEstimate& est) {
  std::vector<std::vector<double>> rows;
  for (const auto& p : est.series)
    rows.push_back({p.delta, p.s, double(p.k_min), double(p.k_max), p.count, p.finest_level ? 1.0 : 0.0});
  return rows;
}

const std::vector<std::string> kSeriesHeader{"delta", "s", "k_min", "k_max", "count", "finest_level"};

int cmd_net(const Config& c, std::ostream& out) {
  const Source src = load_source(c);
  const DyadicSystem sys = build_system(*src.space, c.dyadic);
  const VerificationReport rep = verify_system(sys);
  json levels = json::array();
  std::vector<std::vector<double>> rows;
  for (int k = 0; k <= sys.depth(); ++k) {
    double dmax = 0.0;
    for (CubeId q : sys.levels[k]) dmax = std::max(dmax, sys.cubes[q].diam);
    levels.push_back({{"level", k},
                      {"scale", sys.params.scale(k)},
                      {"centers", sys.centers[k].size()},
                      {"cubes", sys.levels[k].size()},
                      {"max_diam", dmax}});
    rows.push_back({double(k), sys.params.scale(k), double(sys.centers[k].size()), double(sys.levels[k].size()), dmax});
  }
  json summary{{"points", src.space->size()},
               {"metric", src.space->metric_name()},
               {"depth", sys.depth()},
               {"levels", levels},
               {"theory_conditions_hold", sys.params.theory_conditions_hold()},
               {"verification", to_json(rep)}};
  write_json(path_in(c, "net.json"), summary);
  write_json(path_in(c, "system.json"), to_json(sys, src.space->size() <= 5000));
  write_csv(path_in(c, "net_levels.csv"), {"level", "scale", "centers", "cubes", "max_diam"}, rows);
  out << "levels 0.." << sys.depth() << ", " << sys.cubes.size() << " cubes, " << rep.total()
      << " invariant violations (" << rep.fatal() << " fatal)\n";
  return rep.fatal() ? kExitViolation : kExitOk;
}

int cmd_dims(const Config& c, std::ostream& out, std::ostream& err) {
  const Source src = load_source(c);
  const SubsetRef e(*src.space, src.subset);
  const DyadicSystem sys = build_system(*src.space, c.dyadic);
  EstimatorOptions opt = c.estimator;
  opt.threads = c.threads;
  json result{{"points", e.size()}, {"metric", src.space->metric_name()}};
  json errors = json::array();
  bool no_scales = false;

  const double diam = diameter(e);
  const double floor = subset_resolution(e);
  DimensionEstimate box;
  if (e.size() == 1) {
    box.value = 0.0;
    box.notes.push_back("single point");
  } else {
    std::vector<double> scales;
    if (c.box_scales) {
      scales = grid_values(*c.box_scales, c.box_scales->values.empty() ? diam : 1.0);
    } else {
      for (double r = diam / 4; r >= 2 * floor && scales.size() < 40; r /= 2) scales.push_back(r);
    }
    try {
      box = box_dimension(e, scales);
      write_csv(path_in(c, "dims_box.csv"), {"r", "N"}, [&] {
        std::vector<std::vector<double>> rows;
        for (const auto& p : box.series) rows.push_back({p.delta, p.count});
        return rows;
      }());
    } catch (const DomainError& ex) {
      errors.push_back({{"estimator", "box"}, {"error", ex.what()}});
    }
  }
  const bool box_ok = errors.empty();
  result["box"] = box_ok ? to_json(box) : json(nullptr);

  const double c_u = opt.c_u > 0.0 ? opt.c_u : measured_c_u(e, opt.c_u_fallback);
  auto run = [&](double theta, const std::string& label) -> json {
    try {
      std::vector<double> deltas = c.deltas.values.empty()
                                       ? auto_delta_grid(sys, e, theta, c_u, c.deltas.ratio, c.deltas.count)
                                       : c.deltas.values;
      if (e.size() > 1 && deltas.empty())
        throw NoUsableScales("no usable delta for " + label +
                             ": the level window is empty or below the resolution floor at every delta;"
                             " use finer data or a larger theta");
      DimensionEstimate est;
      if (theta > 0.0)
        est = intermediate_dimension(sys, e, theta, deltas, opt);
      else
        est = hausdorff_dimension(sys, e, deltas, opt);
      write_csv(path_in(c, "dims_" + label + ".csv"), kSeriesHeader, series_rows(est));
      out << label << ": " << format_double(est.value) << "\n";
      return to_json(est);
    } catch (const NoUsableScales& ex) {
      no_scales = true;
      errors.push_back({{"estimator", label}, {"error", ex.what()}});
      err << label << ": " << ex.what() << "\n";
      return nullptr;
    }
  };
  result["hausdorff"] = run(0.0, "hausdorff");
  json inter = json::array();
  for (double t : c.thetas) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("theta values must lie in (0,1]", 0);
    json j = run(t, "theta_" + theta_tag(t));
    if (j.is_null()) j = {{"theta", t}, {"value", nullptr}};
    inter.push_back(j);
  }
  result["intermediate"] = inter;
  result["errors"] = errors;
  out << "box: " << (box_ok ? format_double(box.value) : std::string("unavailable")) << "\n";
  write_json(path_in(c, "dims.json"), result);
  return no_scales ? kExitNoScales : kExitOk;
}

int cmd_holder(const Config& c, std::ostream& out) {
  const Source src = load_source(c);
  const SubsetRef e(*src.space, src.subset);
  const Map m = load_map(c, *src.space);
  const MapSample f(*src.space, *m.target, m.assignment);
  const double alpha = c.holder.alpha > 0.0 ? c.holder.alpha : m.alpha;
  const double p = c.holder.p > 0.0 ? c.holder.p : m.p;
  const double diam = diameter(e);
  if (!(diam > 0.0)) throw InputError("the Holder profile needs at least two points", 0);
  const auto radii = grid_values(c.holder.radii, c.holder.radii.values.empty() ? diam : 1.0);
  const ChProfile prof = estimate_ch_profile(f, e, alpha, p, radii, c.holder.epsilon, c.holder.slope_tolerance);
  json j{{"map", m.name},
         {"holder_coefficient", holder_coefficient(f, e, alpha)},
         {"profile", to_json(prof)}};
  write_json(path_in(c, "holder.json"), j);
  std::vector<std::vector<double>> rows;
  for (const auto& r : prof.rows) rows.push_back({r.r, r.effective_radius, double(r.balls), r.sum});
  write_csv(path_in(c, "holder_profile.csv"), {"r", "effective_radius", "balls", "sum"}, rows);
  out << "empirical C: " << format_double(prof.empirical_C) << ", slope " << format_double(prof.slope)
      << (prof.bounded ? " (bounded)\n" : " (growing)\n");
  return kExitOk;
}

int cmd_gradient(const Config& c, std::ostream& out) {
  const Source src = load_source(c);
  const Map m = load_map(c, *src.space);
  const MapSample f(*src.space, *m.target, m.assignment);
  std::optional<std::vector<double>> w;
  if (!c.gradient.weights.empty()) w = read_column(c.gradient.weights);
  const GradientSolution sol = hajlasz_gradient(f, c.gradient.s, c.gradient.p, w, c.gradient.options);
  json j = to_json(sol);
  j["violations"] = count_gradient_violations(f, sol);
  write_json(path_in(c, "gradient.json"), j);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sol.g.size(); ++i) rows.push_back({double(i), sol.g[i]});
  write_csv(path_in(c, "gradient.csv"), {"id", "g"}, rows);
  out << "seminorm: " << format_double(sol.seminorm) << " (" << sol.method << ")\n";
  return kExitOk;
}

int cmd_bounds(const Config& c, std::ostream& out) {
  std::vector<double> ds = c.bound_d_values;
  if (ds.empty()) ds.push_back(c.bound.d);
  json list = json::array();
  std::vector<std::vector<double>> rows;
  for (double d : ds) {
    BoundParams bp = c.bound;
    bp.d = d;
    const BoundValue v = evaluate_bound(bp);
    list.push_back(to_json(bp, v));
    rows.push_back({d, v.upper, v.lower ? *v.lower : std::nan("")});
    out << to_string(bp.variant) << " d=" << format_double(d) << ": " << format_double(v.upper) << "\n";
  }
  write_json(path_in(c, "bounds.json"), list);
  write_csv(path_in(c, "bounds.csv"), {"d", "upper", "lower"}, rows);
  return kExitOk;
}

int cmd_experiment(const Config& c, std::ostream& out, std::ostream& err) {
  const Source src = load_source(c);
  const SubsetRef e(*src.space, src.subset);
  const Map m = load_map(c, *src.space);
  const MapSample f(*src.space, *m.target, m.assignment);
  const DyadicSystem sys = build_system(*src.space, c.dyadic);
  ExperimentOptions opt = c.experiment;
  opt.threads = c.threads;
  const double c_u = opt.c_u > 0.0 ? opt.c_u : measured_c_u(e, opt.c_u_fallback);
  opt.c_u = c_u;
  json runs = json::array();
  bool violation = false, no_scales = false;
  for (double t : c.thetas) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("theta values must lie in (0,1]", 0);
    const std::string tag = "theta_" + theta_tag(t);
    try {
      const auto& g = c.experiment_deltas;
      std::vector<double> deltas =
          g.values.empty() ? auto_delta_grid(sys, e, t, c_u, g.ratio, g.count, opt.resolution_margin) : g.values;
      if (deltas.empty()) throw NoUsableScales("no usable delta");
      const PushforwardReport rep = distortion_experiment(f, sys, e, t, m.p, m.alpha, deltas, opt);
      violation = violation || rep.violation;
      runs.push_back(to_json(rep));
      write_csv(path_in(c, "experiment_" + tag + ".csv"), report_csv_header(), report_csv_rows(rep));
      std::size_t bad = 0;
      for (const auto& r : rep.rows) bad += r.violation;
      out << tag << ": " << rep.rows.size() << " scales, " << bad << " violations\n";
    } catch (const NoUsableScales& ex) {
      no_scales = true;
      runs.push_back({{"theta", t}, {"error", ex.what()}});
      err << tag << ": " << ex.what() << "\n";
    }
  }
  write_json(path_in(c, "experiment.json"),
             {{"map", m.name}, {"p", m.p}, {"alpha", m.alpha}, {"c_u", c_u}, {"runs", runs}});
  if (violation) return kExitViolation;
  return no_scales ? kExitNoScales : kExitOk;
}

int cmd_generate(const Config& c, const Overrides& o, std::ostream& out) {
  std::string spec = !o.spec.empty() ? o.spec : !c.generate.empty() ? c.generate : c.input.generator;
  if (spec.empty()) throw InputError("generate needs --spec or a generate entry in the config", 0);
  const PointSet ps = generate(parse_generator_spec(spec));
  std::vector<std::string> header;
  for (std::size_t i = 0; i < ps.dim; ++i) header.push_back("x" + std::to_string(i));
  const std::string file = o.file.empty() ? path_in(c, "points.csv") : o.file;
  write_csv(file, header, ps.points);
  out << ps.points.size() << " points written to " << file << "\n";
  return kExitOk;
}

Config assemble(const Overrides& o) {
  Config c = o.config.empty() ? Config{} : load_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.threads) c.threads = o.threads;
  if (o.strict) c.dyadic = DyadicParams::strict_defaults();
  if (o.relaxed) c.dyadic = DyadicParams::relaxed_defaults();
  if (!o.points.empty() || !o.matrix.empty() || !o.generator.empty()) {
    c.input.points = o.points;
    c.input.matrix = o.matrix;
    c.input.generator = o.generator;
  }
  if (!o.map.empty()) {
    if (!c.map) c.map = MapConfig{};
    c.map->spec = o.map;
  }
  if (!o.thetas.empty()) c.thetas = o.thetas;
  if (o.has_alpha) c.holder.alpha = c.bound.alpha = o.alpha;
  if (o.has_p) c.holder.p = c.gradient.p = c.bound.p = o.p;
  if (c.map && o.has_alpha) c.map->alpha = o.alpha;
  if (c.map && o.has_p) c.map->p = o.p;
  if (o.has_q) c.bound.q = o.q;
  if (o.has_s) c.gradient.s = c.bound.s = o.s;
  if (o.has_Q) c.bound.Q = o.Q;
  if (o.has_d) {
    c.bound.d = o.d;
    c.bound_d_values.clear();
  }
  if (!o.variant.empty()) c.bound.variant = parse_bound_variant(o.variant);
  if (o.scale == "besov")
    c.bound.scale = SobolevScale::besov;
  else if (o.scale == "triebel-lizorkin" || o.scale == "tl")
    c.bound.scale = SobolevScale::triebel_lizorkin;
  else if (!o.scale.empty())
    throw InputError("--scale must be besov or triebel-lizorkin", 0);
  if (!o.weights.empty()) c.gradient.weights = o.weights;
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractal dimension estimation and dimension-distortion checks on finite metric spaces",
               "fracdim"};
  app.fallthrough();
  app.require_subcommand(1);
  Overrides o;
  auto p_value = [&](const std::string& s) {
    if (s == "inf") return kInfinity;
    return std::stod(s);
  };
  std::string p_text, q_text;

  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  auto* strict = app.add_flag("--strict", o.strict, "strict dyadic constants (b = 1/72)");
  app.add_flag("--relaxed", o.relaxed, "relaxed dyadic constants (b = 1/2)")->excludes(strict);
  app.add_option("--points", o.points, "point-cloud CSV");
  app.add_option("--matrix", o.matrix, "distance-matrix CSV");
  app.add_option("--generator", o.generator, "generated source, e.g. cantor(1/3,8)");
  app.add_option("--map", o.map, "generated map, e.g. power(1/2)");
  app.add_option("--theta", o.thetas, "theta values in (0,1]");
  app.add_option("--alpha", o.alpha, "Holder exponent");
  app.add_option("--p", p_text, "integrability exponent (inf allowed where meaningful)");
  app.add_option("--q", q_text, "fine index");
  app.add_option("--s", o.s, "smoothness");
  app.add_option("--Q", o.Q, "regularity dimension");
  app.add_option("--d", o.d, "source dimension");

  auto* net = app.add_subcommand("net", "build and verify the dyadic cube system");
  auto* dims = app.add_subcommand("dims", "box, Hausdorff and intermediate dimension estimates");
  auto* holder = app.add_subcommand("holder", "Holder ball-sum profile of a map");
  auto* gradient = app.add_subcommand("gradient", "minimal fractional gradient of a map");
  gradient->add_option("--weights", o.weights, "one-column CSV of point weights");
  auto* bounds = app.add_subcommand("bounds", "evaluate dimension-distortion bounds");
  bounds->add_option("--variant", o.variant, "thm11, cor12-newtonian, cor12-qs, thm13-TL, thm13-besov, thm14");
  bounds->add_option("--scale", o.scale, "besov or triebel-lizorkin (thm14)");
  auto* experiment = app.add_subcommand("experiment", "pushforward-cover distortion experiment");
  auto* gen = app.add_subcommand("generate", "write a generated point set as CSV");
  gen->add_option("--spec", o.spec, "generator spec, e.g. cantor(1/3,10)");
  gen->add_option("--file", o.file, "output CSV (default OUT/points.csv)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInput;
  }

  try {
    const auto* pp = app.get_option("--p");
    const auto* qq = app.get_option("--q");
    if (pp->count()) o.p = p_value(p_text);
    if (qq->count()) o.q = p_value(q_text);
    o.has_p = pp->count() > 0;
    o.has_q = qq->count() > 0;
    o.has_alpha = app.get_option("--alpha")->count() > 0;
    o.has_s = app.get_option("--s")->count() > 0;
    o.has_Q = app.get_option("--Q")->count() > 0;
    o.has_d = app.get_option("--d")->count() > 0;
    const Config c = assemble(o);
    if (net->parsed()) return cmd_net(c, out);
    if (dims->parsed()) return cmd_dims(c, out, err);
    if (holder->parsed()) return cmd_holder(c, out);
    if (gradient->parsed()) return cmd_gradient(c, out);
    if (bounds->parsed()) return cmd_bounds(c, out);
    if (experiment->parsed()) return cmd_experiment(c, out, err);
    if (gen->parsed()) return cmd_generate(c, o, out);
    return kExitInput;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NoUsableScales& e) {
    err << "no usable scales: " << e.what() << "\n";
    return kExitNoScales;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInput;
  } catch (const CapacityError& e) {
    err << "too large: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "bad number: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace fracdim
