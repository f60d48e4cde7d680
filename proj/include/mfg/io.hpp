#pragma once

#include "mfg/experiments.hpp"
#include "mfg/pdhg.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mfg {

/**
 * A run configuration. JSON schema (every key optional except "preset"):
 *
 *   {
 *     "preset": "spread",
 *     "overrides": { ...preset keys... },
 *     "grid": { "nx": 64, "nt": 32 },
 *     "steps": { "tau_rho": 0.5, "tau_m": 0.5, "tau_a": 0.5,
 *                "tau_phi_t": 0.5, "tau_grad_phi": 0.5, "tau_phi0": 0.5 },
 *     "max_iters": 5000,
 *     "tol": 1e-3,
 *     "history_stride": 10,
 *     "output_dir": "out",
 *     "snapshots": [0.1, 0.5, 0.9],
 *     "formats": ["csv", "pgm"]
 *   }
 *
 * Unknown keys are rejected at every level.
 */
struct RunConfig
{
  std::string preset;
  nlohmann::json overrides = nlohmann::json::object();
  GridSize grid;
  StepSizes steps;
  long max_iters = 5000;
  double tol = 1e-3;
  long history_stride = 10;
  std::string output_dir = "out";
  std::vector<double> snapshots = {0.1, 0.5, 0.9};
  std::vector<std::string> formats = {"csv", "pgm"};

  bool wants(std::string_view format) const;
  bool operator==(RunConfig const &) const = default;
};

// Throws ConfigError naming the offending key and the expected type.
RunConfig parse_config(nlohmann::json const &doc);
RunConfig parse_config_text(std::string const &text);
RunConfig load_config(std::filesystem::path const &path);

// Canonical form: sorted keys, two-space indent, trailing newline.
nlohmann::json config_to_json(RunConfig const &cfg);
std::string serialize_config(RunConfig const &cfg);

struct HeatmapScale
{
  double min = 0.0;
  double max = 0.0;
};

// Binary 8-bit PGM, first row = largest x2. Min-max normalised; a constant
// field maps to 128. Throws std::domain_error on a non-finite value (nothing
// is written) and IoError when the file cannot be written.
HeatmapScale emit_heatmap(std::span<double const> field, Grid const &grid, std::filesystem::path const &path);

struct FieldCsv
{
  std::map<std::string, std::string> meta;
  int nx1 = 0;
  int nx2 = 0;
  std::vector<double> values; // cell order j * nx1 + i
};

// One line per x2 row (j = 0 first), %.17g values, '#' metadata header.
void write_field_csv(std::span<double const> field, Grid const &grid,
                     std::map<std::string, std::string> const &meta, std::filesystem::path const &path);
FieldCsv read_field_csv(std::filesystem::path const &path);

struct RunOptions
{
  bool dry_run = false;
  // Called for each residual history row (after it is written).
  std::function<void(HistoryRow const &)> on_history;
};

struct RunSummary
{
  nlohmann::json json;
  bool converged = false;
  long iterations = 0;
};

// Builds the preset, solves, writes artifacts into cfg.output_dir and returns
// the summary that was written to summary.json. A dry run validates the
// problem and returns the config echo without solving or writing anything.
// Solver errors propagate.
RunSummary run(RunConfig const &cfg, RunOptions const &opts = {});

struct KernelCheckRow
{
  int order = 0;
  int features = 0;
  double sup_error = 0.0;
};

struct KernelCheck
{
  std::string family;
  std::string reference;
  std::vector<KernelCheckRow> rows;
};

// Sup error of the truncated kernel of the configured preset against its
// exact kernel, over all pairs of cell centres of an m x m sampling grid on
// the preset domain, for increasing truncation order.
KernelCheck kernel_check(RunConfig const &cfg, int samples = 17);

} // namespace mfg
