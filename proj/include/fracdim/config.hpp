#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdim/dimension_estimators.hpp"
#include "fracdim/distortion_engine.hpp"
#include "fracdim/dyadic_cubes.hpp"
#include "fracdim/holder_analysis.hpp"

namespace fracdim {

// Source data: exactly one of generator, points, matrix.
struct InputConfig {
  std::string generator;           // e.g. "cantor(1/3,8)"
  std::string points;              // point-cloud CSV
  std::string matrix;              // distance-matrix CSV
  std::string metric = "euclidean";  // or "chebyshev", for points/generator
  double snowflake = 1.0;          // distances raised to this power
  std::vector<std::size_t> subset;  // E; empty means every point
};

struct MapConfig {
  std::string spec;           // generated map, e.g. "power(1/2)"
  std::string target_points;  // or an explicit target space ...
  std::string target_matrix;
  std::string target_metric = "euclidean";
  std::string pairs;          // ... plus (source id, target id) CSV
  double alpha = 0.0;         // Holder data; 0 takes the generated map's
  double p = 0.0;
};

// Geometric grid start * ratio^j, or an explicit list.
struct GridConfig {
  double start = 0.5;
  double ratio = 0.5;
  std::size_t count = 8;
  std::vector<double> values;
};

struct HolderConfig {
  double alpha = 0.0;  // 0: from the map
  double p = 0.0;
  double epsilon = 0.5;
  double slope_tolerance = 0.05;
  GridConfig radii{0.25, 0.5, 6, {}};
};

struct GradientConfig {
  double s = 1.0;
  double p = 2.0;  // kInfinity for sup norm
  std::string weights;  // one-column CSV
  GradientOptions options;
};

struct Config {
  InputConfig input;
  std::optional<MapConfig> map;
  DyadicParams dyadic = DyadicParams::relaxed_defaults();
  std::vector<double> thetas{0.25, 0.5, 1.0};
  GridConfig deltas{0.5, 0.5, 8, {}};
  GridConfig experiment_deltas{0.5, 0.8408964152537145, 64, {}};  // ratio 2^{-1/4}
  std::optional<GridConfig> box_scales;  // default: |E|/4 halving down to 2 x floor
  EstimatorOptions estimator;
  ExperimentOptions experiment;
  BoundParams bound;
  std::vector<double> bound_d_values;  // evaluate over these d instead of bound.d
  HolderConfig holder;
  GradientConfig gradient;
  std::string generate;  // spec for the generate subcommand
  std::size_t threads = 1;
  std::string out = "fracdim-out";
};

// Throws InputError on unknown keys and bad types or values.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::string& path);
nlohmann::json config_to_json(const Config& c);

}  // namespace fracdim
