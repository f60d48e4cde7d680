#pragma once

#include "mfg/grid.hpp"
#include "mfg/pdhg.hpp"
#include "mfg/problem.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace mfg {

struct GridSize
{
  int nx = 64; // cells per spatial dimension
  int nt = 32;

  bool operator==(GridSize const &) const = default;
};

struct PresetInfo
{
  std::string name;
  std::string summary;
  // Every accepted override key with its default value.
  nlohmann::json defaults;
  // Steps that converge to tol 1e-3 in a few thousand iterations at default parameters.
  StepSizes recommended;
};

// The built-in presets, in a fixed order.
std::vector<PresetInfo> const &preset_catalog();
PresetInfo const &preset_info(std::string_view name);

// Preset defaults merged with overrides. Throws ConfigError on an unknown
// name, an unknown override key or a wrongly typed value.
nlohmann::json preset_parameters(std::string_view name, nlohmann::json const &overrides);

// Builds a validated problem. Throws ConfigError on an unknown name, an
// unknown override key, a wrongly typed value or a value violating a problem
// invariant.
ProblemSpec preset(std::string_view name, nlohmann::json const &overrides = nlohmann::json::object(),
                   GridSize size = {});

// Field-by-field equality of two problems (grids, data, basis features and Gram).
bool same_problem(ProblemSpec const &a, ProblemSpec const &b);

struct Spread
{
  double var_x1 = 0.0;
  double var_x2 = 0.0;
};

// Per-axis central second moments of a density slice (normalised by its mass).
Spread spread_metrics(std::span<double const> rho, Grid const &grid);

struct TurnpikeReport
{
  std::vector<double> lambda_hat; // levels 0..nt-1
  std::vector<double> times;      // t of each lambda_hat entry
  // L1 distance between density levels, (nt+1) x (nt+1), row-major.
  std::vector<double> stationarity;
  int levels = 0;
  double lambda_mid = 0.0;
  // (max - min) / |lambda_mid| of lambda_hat over the mid window.
  double lambda_variation = 0.0;
  // max over the mid window of sup_x |phi / T - lambda_mid (1 - t)|
  double drift = 0.0;
  double window_lo = 0.3;
  double window_hi = 0.7;

  double s(int l1, int l2) const { return stationarity[static_cast<std::size_t>(l1) * levels + l2]; }
};

TurnpikeReport turnpike_diagnostics(LevelField const &rho, LevelField const &phi, Grid const &grid, double T);

// field minus its domain mean.
std::vector<double> mean_shift_normalize(std::span<double const> field, Grid const &grid);

} // namespace mfg
