#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavetank/geometry.hpp"
#include "wavetank/potential.hpp"

namespace wavetank {

// One of trapezoid {a, b}, tilted_square {alpha}, unit_square, polygon {vertices}, arc_domain {edges}.
struct DomainSpec {
  std::string kind = "trapezoid";
  double a = 1.0;
  double b = 1.0;
  double alpha = 0.0;
  std::vector<Vec2> vertices;
  std::vector<Edge> edges;

  PlanarDomain build() const;
};

struct MeshParams {
  double h = 0.04;
  std::string lattice = "triangular";
  std::vector<Vec2> graded_points;
  double grading = 0.3;
  double h_min = 1e-4;
};

struct SweepParams {
  double lambda_min = 0.72;
  double lambda_max = 0.98;
  int steps = 100;
};

struct OrbitParams {
  double seed = 0.1;  // theta of the first point
  int iters = 200;
  int q_max = 50;
  int depth = 50;
};

struct CornerParams {
  double s_max = 1.0;
};

struct EvolveParams {
  double dt = 0.1;
  double T = 0.0;    // 0 means periods * 2 pi / lambda
  int periods = 50;
  bool heatmap = true;
};

struct LapParams {
  std::vector<double> eps = {0.1, 0.05, 0.025};
  bool heatmap = true;
};

struct TubeParams {
  double width = 0.0;  // 0 means 3 h
  bool special_rays = false;
};

struct KernelParams {
  double eps = 0.1;
  int samples = 20;
  double chart = 0.05;
};

struct BemParams {
  double eps = 0.1;
  int order = 8;
  int panels_per_half_edge = 8;
  bool fem_check = true;
};

struct ScenarioConfig {
  DomainSpec domain;
  std::vector<double> lambdas = {0.8};
  std::vector<std::string> tasks;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  Bump load{Vec2(0.6, 0.45), 0.2, 1.0};
  MeshParams mesh;
  SweepParams sweep;
  OrbitParams orbit;
  CornerParams corner;
  EvolveParams evolve;
  LapParams lap;
  TubeParams tube;
  KernelParams kernel;
  BemParams bem;

  // Every field, defaults included.
  nlohmann::json echo() const;
};

const std::vector<std::string>& task_names();

// Throws ConfigInvalid on unknown keys, wrong types or out-of-range values.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig parse_toml(const std::string& text);
ScenarioConfig parse_json(const std::string& text);
// By extension: .json is JSON, anything else TOML.
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace wavetank
