#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fracdim/metric_space.hpp"

namespace fracdim {

struct GeneratorSpec {
  enum class Kind { cantor, sequence_set, grid, product, set_union };
  Kind kind = Kind::grid;
  double ratio = 1.0 / 3.0;  // cantor
  int depth = 0;             // cantor
  double exponent = 1.0;     // sequence_set
  long n = 2;                // sequence_set n_max, grid points per axis
  int dim = 1;               // grid
  std::shared_ptr<GeneratorSpec> a, b;

  static GeneratorSpec cantor(double ratio, int depth);
  static GeneratorSpec sequence_set(double p, long n_max);
  static GeneratorSpec grid(long n, int dim = 1);
  static GeneratorSpec product(GeneratorSpec a, GeneratorSpec b);
  static GeneratorSpec set_union(GeneratorSpec a, GeneratorSpec b);

  std::string to_string() const;
};

// Parses e.g. "cantor(1/3,10)", "sequence_set(2,2000)", "grid(1025,1)",
// "product(grid(3,1),cantor(1/3,2))", "union(...,...)". Fractions allowed.
GeneratorSpec parse_generator_spec(const std::string& text);

struct PointSet {
  std::vector<std::vector<double>> points;
  std::size_t dim = 1;
  // Smallest positive gap (0 for a single point).
  double resolution_floor = 0.0;
};

// Throws CapacityError when the point count exceeds max_points.
PointSet generate(const GeneratorSpec& spec, std::size_t max_points = 1u << 22);

// Exact point count without generating.
std::size_t generated_size(const GeneratorSpec& spec);

struct MapSpec {
  enum class Kind { identity, power, linear, snowflake_target };
  Kind kind = Kind::identity;
  double param = 1.0;  // a, c or eps

  static MapSpec identity() { return {}; }
  static MapSpec power(double a) { return {Kind::power, a}; }
  static MapSpec linear(double c) { return {Kind::linear, c}; }
  static MapSpec snowflake_target(double eps) { return {Kind::snowflake_target, eps}; }

  std::string to_string() const;
  // Hölder data used by experiments: (alpha, p).
  double holder_alpha() const;
  double holder_p() const;
};

MapSpec parse_map_spec(const std::string& text);

// Target space plus total assignment source id -> target id. Coinciding
// images share one target point.
struct GeneratedMap {
  std::unique_ptr<FiniteMetricSpace> target;
  std::vector<PointId> assignment;
};

GeneratedMap generate_map(const MapSpec& spec, const FiniteMetricSpace& source);

}  // namespace fracdim
