#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracdim/dimension_estimators.hpp"
#include "fracdim/dyadic_cubes.hpp"
#include "fracdim/holder_analysis.hpp"

namespace fracdim {

// Dimension-distortion bounds.
enum class BoundVariant { thm11, cor12_newtonian, cor12_qs, thm13_tl, thm13_besov, thm14 };
enum class SobolevScale { triebel_lizorkin, besov };

struct BoundParams {
  BoundVariant variant = BoundVariant::thm11;
  double p = 2.0;
  double q = 2.0;      // fine index; kInfinity allowed for Besov
  double s = 1.0;      // smoothness
  double alpha = 1.0;  // Holder exponent
  double Q = 1.0;      // Ahlfors regularity dimension
  double d = 0.0;      // dimension of the source set
  double theta = 1.0;  // carried for reporting
  SobolevScale scale = SobolevScale::triebel_lizorkin;  // thm14
};

struct BoundValue {
  double upper = 0.0;
  std::optional<double> lower;  // cor12_qs
};

BoundValue evaluate_bound(const BoundParams& bp);
BoundVariant parse_bound_variant(const std::string& name);
std::string to_string(BoundVariant v);

// thm11 bound as a function of d.
double holder_bound(double p, double alpha, double d);

enum class CubeColor { red, blue, green };
std::string to_string(CubeColor c);

struct ColoredCube {
  CubeId cube = kNoCube;
  double image_diam = 0.0;
  CubeColor color = CubeColor::green;
  int row = 0;
};

// red: |f(Q)| >= delta_Y; blue: [delta_Y^{1/theta}, delta_Y); green: below.
std::vector<ColoredCube> classify_cubes(const MapSample& f, const DyadicSystem& sys,
                                        const std::vector<CubeId>& cubes, double delta_y, double theta);

struct SubdivisionGraph {
  std::vector<ColoredCube> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // parent vertex -> child vertex
  std::vector<std::size_t> leaves;
  int rows = 0;
  bool terminated = true;
  double delta_y = 0.0;
  double theta = 1.0;
};

// Red cubes are replaced row by row by their E-meeting children until a row
// has no red cube. Throws DomainError when the initial cover is nested.
SubdivisionGraph build_subdivision_graph(const MapSample& f, const DyadicSystem& sys, const SubsetRef& e,
                                         const std::vector<CubeId>& initial, double delta_y, double theta);

struct PushforwardEntry {
  std::size_t vertex = 0;
  CubeColor color = CubeColor::green;
  double reported = 0.0;  // |f(Q)| for blue, delta_Y^{1/theta} for green
  double worst = 0.0;     // |f(Q)| for blue, 2 delta_Y^{1/theta} / c_u' for green
  bool enlarged = false;
};

struct PushforwardCover {
  std::vector<PushforwardEntry> entries;
  double delta_y = 0.0;
  double theta = 1.0;
  double c_u_prime = 1.0;

  double sum(double s) const;
  // Reported diameters inside [delta_Y^{1/theta}, max(delta_Y, 2 delta_Y^{1/theta}/c_u')].
  bool admissible() const;
};

PushforwardCover pushforward_cover(const SubdivisionGraph& g, double c_u_prime);

struct DeltaRow {
  double delta = 0.0;
  double delta_y = 0.0;
  double d = 0.0;      // source exponent at delta
  double bound = 0.0;  // D
  double image = 0.0;  // exponent of the pushforward cover
  double image_worst = 0.0;
  std::size_t red = 0, blue = 0, green = 0;
  std::size_t initial_cubes = 0, entries = 0;
  int rows = 0;
  bool admissible = true;
  bool violation = false;
  std::vector<std::string> warnings;
};

struct ExperimentOptions {
  double c_u = 0.0;        // <= 0: measured on E
  double c_u_prime = 0.0;  // <= 0: measured on f(E)
  double c_u_fallback = 0.5;
  double tolerance = 1e-3;
  double violation_tolerance = 0.05;
  double residual_cap = 0.05;
  // Both sides of each per-delta comparison share the resolution, so the
  // estimator's margin is off by default; the window must still fit in K.
  double resolution_margin = 0.0;
  std::size_t threads = 1;
  bool keep_graphs = false;  // store each delta's graph and pushforward cover
};

struct PushforwardReport {
  double theta = 1.0;
  double p = 2.0, alpha = 1.0;
  double c_u = 1.0, c_u_prime = 1.0;
  std::vector<DeltaRow> rows;
  std::vector<std::pair<double, std::string>> skipped;
  double source_dim = 0.0;  // extrapolated d
  double image_dim = 0.0;   // extrapolated image exponent
  double headline_bound = 0.0;
  bool violation = false;  // some delta row violates
  std::vector<std::string> notes;
  std::vector<SubdivisionGraph> graphs;  // keep_graphs only, one per row
  std::vector<PushforwardCover> covers;
};

PushforwardReport distortion_experiment(const MapSample& f, const DyadicSystem& sys, const SubsetRef& e,
                                        double theta, double p, double alpha, std::vector<double> deltas,
                                        const ExperimentOptions& opt = {});

nlohmann::json to_json(const BoundParams& bp, const BoundValue& v);
nlohmann::json to_json(const PushforwardReport& r);
// Header and rows for the per-delta CSV.
std::vector<std::string> report_csv_header();
std::vector<std::vector<double>> report_csv_rows(const PushforwardReport& r);

}  // namespace fracdim
