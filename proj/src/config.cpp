#include "fracdim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fracdim/errors.hpp"

namespace fracdim {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw InputError("config " + path + ": " + what, 0);
}

// Numbers, "inf", or "a/b" fractions.
double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
    try {
      const auto slash = s.find('/');
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double x = std::stod(s, &used);
        if (used == s.size()) return x;
      } else {
        const double a = std::stod(s.substr(0, slash), &used);
        if (used == slash) {
          const std::string rest = s.substr(slash + 1);
          const double b = std::stod(rest, &used);
          if (used == rest.size() && b != 0.0) return a / b;
        }
      }
    } catch (const std::exception&) {
    }
  }
  bad(path, "expected a number, \"inf\" or \"a/b\"");
}

class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }
  ~Section() = default;

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const char* key) { return j_.at(key); }
  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void num(const char* key, double& out) {
    if (has(key)) out = number(at(key), sub(key));
  }
  void size(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const double v = number(at(key), sub(key));
    if (!(v >= 0) || v != std::floor(v) || std::isinf(v)) bad(sub(key), "expected a non-negative integer");
    out = static_cast<std::size_t>(v);
  }
  void integer(const char* key, int& out) {
    if (!has(key)) return;
    const double v = number(at(key), sub(key));
    if (v != std::floor(v) || std::isinf(v)) bad(sub(key), "expected an integer");
    out = static_cast<int>(v);
  }
  void str(const char* key, std::string& out) {
    if (!has(key)) return;
    if (!at(key).is_string()) bad(sub(key), "expected a string");
    out = at(key).get<std::string>();
  }
  void flag(const char* key, bool& out) {
    if (!has(key)) return;
    if (!at(key).is_boolean()) bad(sub(key), "expected true or false");
    out = at(key).get<bool>();
  }
  void numbers(const char* key, std::vector<double>& out) {
    if (!has(key)) return;
    if (!at(key).is_array()) bad(sub(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < at(key).size(); ++i)
      out.push_back(number(at(key)[i], sub(key) + "[" + std::to_string(i) + "]"));
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(sub(it.key().c_str()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_grid(const json& j, const std::string& path, GridConfig& g) {
  Section s(j, path);
  s.num("start", g.start);
  s.num("ratio", g.ratio);
  s.size("count", g.count);
  s.numbers("values", g.values);
  s.finish();
  if (g.values.empty() && (!(g.ratio > 0.0 && g.ratio < 1.0) || !(g.start > 0.0) || g.count == 0))
    bad(path, "needs start > 0, ratio in (0,1) and count >= 1, or explicit values");
}

json grid_json(const GridConfig& g) {
  json j{{"start", g.start}, {"ratio", g.ratio}, {"count", g.count}};
  if (!g.values.empty()) j["values"] = g.values;
  return j;
}

json num_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

}  // namespace

Config config_from_json(const json& root) {
  Config c;
  Section top(root, "");
  if (top.has("input")) {
    Section s(top.at("input"), "input");
    s.str("generator", c.input.generator);
    s.str("points", c.input.points);
    s.str("matrix", c.input.matrix);
    s.str("metric", c.input.metric);
    s.num("snowflake", c.input.snowflake);
    if (s.has("subset")) {
      std::vector<double> ids;
      s.numbers("subset", ids);
      for (double v : ids) {
        if (!(v >= 0) || v != std::floor(v)) bad("input.subset", "ids must be non-negative integers");
        c.input.subset.push_back(static_cast<std::size_t>(v));
      }
    }
    s.finish();
  }
  if (top.has("map")) {
    MapConfig m;
    Section s(top.at("map"), "map");
    s.str("spec", m.spec);
    s.str("target_points", m.target_points);
    s.str("target_matrix", m.target_matrix);
    s.str("target_metric", m.target_metric);
    s.str("pairs", m.pairs);
    s.num("alpha", m.alpha);
    s.num("p", m.p);
    s.finish();
    c.map = m;
  }
  if (top.has("dyadic")) {
    Section s(top.at("dyadic"), "dyadic");
    std::string mode = c.dyadic.mode == DyadicParams::Mode::strict ? "strict" : "relaxed";
    s.str("mode", mode);
    if (mode == "strict")
      c.dyadic = DyadicParams::strict_defaults();
    else if (mode != "relaxed")
      bad("dyadic.mode", "expected \"strict\" or \"relaxed\"");
    s.num("b", c.dyadic.b);
    s.num("c0", c.dyadic.c0);
    s.num("C0", c.dyadic.C0);
    s.integer("K", c.dyadic.K);
    s.finish();
  }
  top.numbers("thetas", c.thetas);
  if (top.has("deltas")) read_grid(top.at("deltas"), "deltas", c.deltas);
  if (top.has("experiment_deltas")) read_grid(top.at("experiment_deltas"), "experiment_deltas", c.experiment_deltas);
  if (top.has("box_scales")) {
    GridConfig g{0.25, 0.5, 8, {}};
    read_grid(top.at("box_scales"), "box_scales", g);
    c.box_scales = g;
  }
  if (top.has("estimator")) {
    Section s(top.at("estimator"), "estimator");
    s.num("c_u", c.estimator.c_u);
    s.num("c_u_fallback", c.estimator.c_u_fallback);
    s.num("tolerance", c.estimator.tolerance);
    s.num("residual_cap", c.estimator.residual_cap);
    s.finish();
  }
  if (top.has("experiment")) {
    Section s(top.at("experiment"), "experiment");
    s.num("c_u", c.experiment.c_u);
    s.num("c_u_prime", c.experiment.c_u_prime);
    s.num("c_u_fallback", c.experiment.c_u_fallback);
    s.num("tolerance", c.experiment.tolerance);
    s.num("violation_tolerance", c.experiment.violation_tolerance);
    s.num("residual_cap", c.experiment.residual_cap);
    s.num("resolution_margin", c.experiment.resolution_margin);
    s.finish();
  }
  if (top.has("bound")) {
    Section s(top.at("bound"), "bound");
    std::string variant = to_string(c.bound.variant), scale = "triebel-lizorkin";
    s.str("variant", variant);
    try {
      c.bound.variant = parse_bound_variant(variant);
    } catch (const DomainError& e) {
      bad("bound.variant", e.what());
    }
    s.num("p", c.bound.p);
    s.num("q", c.bound.q);
    s.num("s", c.bound.s);
    s.num("alpha", c.bound.alpha);
    s.num("Q", c.bound.Q);
    s.num("d", c.bound.d);
    s.num("theta", c.bound.theta);
    s.str("scale", scale);
    if (scale == "besov")
      c.bound.scale = SobolevScale::besov;
    else if (scale != "triebel-lizorkin" && scale != "tl")
      bad("bound.scale", "expected \"besov\" or \"triebel-lizorkin\"");
    s.numbers("d_values", c.bound_d_values);
    s.finish();
  }
  if (top.has("holder")) {
    Section s(top.at("holder"), "holder");
    s.num("alpha", c.holder.alpha);
    s.num("p", c.holder.p);
    s.num("epsilon", c.holder.epsilon);
    s.num("slope_tolerance", c.holder.slope_tolerance);
    if (s.has("radii")) read_grid(s.at("radii"), "holder.radii", c.holder.radii);
    s.finish();
  }
  if (top.has("gradient")) {
    Section s(top.at("gradient"), "gradient");
    s.num("s", c.gradient.s);
    s.num("p", c.gradient.p);
    s.str("weights", c.gradient.weights);
    s.size("iterations", c.gradient.options.iterations);
    s.size("max_sweeps", c.gradient.options.max_sweeps);
    s.finish();
  }
  top.str("generate", c.generate);
  top.size("threads", c.threads);
  top.str("out", c.out);
  top.finish();
  if (c.threads == 0) bad("threads", "must be at least 1");
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path, 0);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path + " is not valid JSON: " + e.what(), 0);
  }
  return config_from_json(j);
}

json config_to_json(const Config& c) {
  json input{{"metric", c.input.metric}, {"snowflake", c.input.snowflake}};
  if (!c.input.generator.empty()) input["generator"] = c.input.generator;
  if (!c.input.points.empty()) input["points"] = c.input.points;
  if (!c.input.matrix.empty()) input["matrix"] = c.input.matrix;
  if (!c.input.subset.empty()) input["subset"] = c.input.subset;
  json j{{"input", input},
         {"dyadic",
          {{"mode", c.dyadic.mode == DyadicParams::Mode::strict ? "strict" : "relaxed"},
           {"b", c.dyadic.b},
           {"c0", c.dyadic.c0},
           {"C0", c.dyadic.C0},
           {"K", c.dyadic.K}}},
         {"thetas", c.thetas},
         {"deltas", grid_json(c.deltas)},
         {"experiment_deltas", grid_json(c.experiment_deltas)},
         {"estimator",
          {{"c_u", c.estimator.c_u},
           {"c_u_fallback", c.estimator.c_u_fallback},
           {"tolerance", c.estimator.tolerance},
           {"residual_cap", c.estimator.residual_cap}}},
         {"experiment",
          {{"c_u", c.experiment.c_u},
           {"c_u_prime", c.experiment.c_u_prime},
           {"c_u_fallback", c.experiment.c_u_fallback},
           {"tolerance", c.experiment.tolerance},
           {"violation_tolerance", c.experiment.violation_tolerance},
           {"residual_cap", c.experiment.residual_cap},
           {"resolution_margin", c.experiment.resolution_margin}}},
         {"holder",
          {{"alpha", c.holder.alpha},
           {"p", num_json(c.holder.p)},
           {"epsilon", c.holder.epsilon},
           {"slope_tolerance", c.holder.slope_tolerance},
           {"radii", grid_json(c.holder.radii)}}},
         {"gradient",
          {{"s", c.gradient.s},
           {"p", num_json(c.gradient.p)},
           {"iterations", c.gradient.options.iterations},
           {"max_sweeps", c.gradient.options.max_sweeps}}},
         {"threads", c.threads},
         {"out", c.out}};
  if (c.box_scales) j["box_scales"] = grid_json(*c.box_scales);
  if (c.map) {
    json m{{"target_metric", c.map->target_metric}, {"alpha", c.map->alpha}, {"p", num_json(c.map->p)}};
    if (!c.map->spec.empty()) m["spec"] = c.map->spec;
    if (!c.map->target_points.empty()) m["target_points"] = c.map->target_points;
    if (!c.map->target_matrix.empty()) m["target_matrix"] = c.map->target_matrix;
    if (!c.map->pairs.empty()) m["pairs"] = c.map->pairs;
    j["map"] = m;
  }
  if (!c.generate.empty()) j["generate"] = c.generate;
  return j;
}

}  // namespace fracdim
