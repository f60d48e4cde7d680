#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "mfg/kernels.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace mfg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string time_tag(double t)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%.3f", t);
  return buf;
}

void write_file(fs::path const &path, std::string const &bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

json residual_json(Residuals const &r)
{
  return {{"continuity_res", r.continuity},
          {"a_fixedpoint_res", r.a_fixedpoint},
          {"iterate_change", r.iterate_change},
          {"complementarity_res", r.complementarity}};
}

std::string history_line(HistoryRow const &h)
{
  std::string obj = h.objective.infinite ? "-inf" : fmt17(h.objective.value);
  return std::to_string(h.iteration) + "," + fmt17(h.res.continuity) + "," + fmt17(h.res.a_fixedpoint) + "," +
         fmt17(h.res.complementarity) + "," + obj + "\n";
}

} // namespace

HeatmapScale emit_heatmap(std::span<double const> field, Grid const &grid, fs::path const &path)
{
  if (field.size() != grid.cells()) throw std::domain_error("heatmap: field size does not match the grid");
  HeatmapScale s{field[0], field[0]};
  for (double v : field) {
    if (!std::isfinite(v)) throw std::domain_error("heatmap: field has a non-finite value");
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  std::string bytes = "P5\n" + std::to_string(grid.nx1) + " " + std::to_string(grid.nx2) + "\n255\n";
  double const span = s.max - s.min;
  for (int j = grid.nx2 - 1; j >= 0; --j) {
    for (int i = 0; i < grid.nx1; ++i) {
      double const v = field[grid.index(i, j)];
      long px = span > 0.0 ? std::lround(255.0 * (v - s.min) / span) : 128;
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0L, 255L))));
    }
  }
  write_file(path, bytes);
  return s;
}

void write_field_csv(std::span<double const> field, Grid const &grid, std::map<std::string, std::string> const &meta,
                     fs::path const &path)
{
  std::string out;
  for (auto const &[k, v] : meta) out += "# " + k + "=" + v + "\n";
  out += "# nx1=" + std::to_string(grid.nx1) + "\n";
  out += "# nx2=" + std::to_string(grid.nx2) + "\n";
  out += "# x1_range=" + fmt17(grid.x1_min) + ":" + fmt17(grid.x1_max) + "\n";
  out += "# x2_range=" + fmt17(grid.x2_min) + ":" + fmt17(grid.x2_max) + "\n";
  for (int j = 0; j < grid.nx2; ++j) {
    for (int i = 0; i < grid.nx1; ++i) {
      if (i) out += ',';
      out += fmt17(field[grid.index(i, j)]);
    }
    out += '\n';
  }
  write_file(path, out);
}

FieldCsv read_field_csv(fs::path const &path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  FieldCsv f;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto const eq = line.find('=');
      if (eq == std::string::npos || line.size() < 2) throw IoError("bad header line in " + path.string());
      f.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        f.values.push_back(std::stod(cell));
      } catch (std::exception const &) {
        throw IoError("bad value '" + cell + "' in " + path.string());
      }
      ++cols;
    }
    if (f.nx1 == 0) f.nx1 = cols;
    if (cols != f.nx1) throw IoError("ragged row in " + path.string());
    ++rows;
  }
  f.nx2 = rows;
  if (f.meta.count("nx1") && std::stoi(f.meta["nx1"]) != f.nx1) throw IoError("nx1 mismatch in " + path.string());
  if (f.meta.count("nx2") && std::stoi(f.meta["nx2"]) != f.nx2) throw IoError("nx2 mismatch in " + path.string());
  return f;
}

RunSummary run(RunConfig const &cfg, RunOptions const &opts)
{
  ProblemSpec const spec = preset(cfg.preset, cfg.overrides, cfg.grid);
  cfg.steps.validate();
  RunSummary out;
  out.json["config"] = config_to_json(cfg);
  if (opts.dry_run) {
    out.json["dry_run"] = true;
    return out;
  }

  fs::path const dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  fs::path const hist_path = dir / "residuals.csv";
  std::ofstream hist(hist_path, std::ios::trunc);
  if (!hist) throw IoError("cannot open " + hist_path.string());
  hist << "iter,continuity_res,a_fixedpoint_res,complementarity_res,objective\n";

  SolveOptions so;
  so.max_iters = cfg.max_iters;
  so.tol = cfg.tol;
  so.history_stride = cfg.history_stride;
  so.on_history = [&](HistoryRow const &h) {
    hist << history_line(h);
    hist.flush();
    if (opts.on_history) opts.on_history(h);
  };

  auto const t0 = std::chrono::steady_clock::now();
  SolveResult const res = solve(spec, cfg.steps, so);
  double const wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!hist) throw IoError("write failed: " + hist_path.string());
  hist.close();

  Grid const &g = spec.grid;
  double drift = 0.0;
  for (int l = 0; l <= g.nt; ++l) drift = std::max(drift, std::abs(integrate(res.state.rho[l], g) - 1.0));

  json snaps = json::array();
  json heat = json::object();
  for (double t : cfg.snapshots) {
    int const level = g.level_at(t);
    std::string const tag = time_tag(t);
    std::map<std::string, std::string> meta = {{"preset", cfg.preset},
                                               {"t", fmt17(t)},
                                               {"level", std::to_string(level)},
                                               {"nt", std::to_string(g.nt)}};
    json files = json::array();
    for (auto const &[name, field] : {std::pair<char const *, LevelField const *>{"rho", &res.state.rho},
                                       std::pair<char const *, LevelField const *>{"phi", &res.state.phi}}) {
      auto const slice = (*field)[level];
      std::string const stem = std::string(name) + "_" + tag;
      if (cfg.wants("csv")) {
        meta["field"] = name;
        write_field_csv(slice, g, meta, dir / (stem + ".csv"));
        files.push_back(stem + ".csv");
      }
      if (cfg.wants("pgm")) {
        HeatmapScale const s = emit_heatmap(slice, g, dir / (stem + ".pgm"));
        heat[stem + ".pgm"] = {{"min", s.min}, {"max", s.max}};
        files.push_back(stem + ".pgm");
      }
    }
    Spread const sp = spread_metrics(res.state.rho[level], g);
    snaps.push_back({{"t", t}, {"level", level}, {"files", files}, {"var_x1", sp.var_x1}, {"var_x2", sp.var_x2}});
  }

  json &j = out.json;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["wall_time_s"] = wall;
  j["final_residuals"] = residual_json(res.final_residuals);
  j["mass_drift_max"] = drift;
  j["min_rho"] = res.min_rho;
  j["kernels"] = kernels::active().name;
  j["snapshots"] = snaps;
  j["heatmap_normalization"] = heat;
  if (cfg.preset == "turnpike") {
    TurnpikeReport const r = turnpike_diagnostics(res.state.rho, res.state.phi, g, spec.time_scale);
    j["turnpike"] = {{"lambda_mid", r.lambda_mid},
                     {"lambda_variation", r.lambda_variation},
                     {"drift", r.drift},
                     {"s_0.4_0.6", r.s(g.level_at(0.4), g.level_at(0.6))},
                     {"lambda_hat", r.lambda_hat}};
  }
  write_file(dir / "summary.json", j.dump(2) + "\n");
  out.converged = res.converged;
  out.iterations = res.iterations;
  return out;
}

namespace {

double gaussian_exact(double mu, double s1, double s2, Point x, Point y)
{
  double const d1 = x.x1 - y.x1, d2 = x.x2 - y.x2;
  return mu * std::exp(-d1 * d1 / (2.0 * s1 * s1) - d2 * d2 / (2.0 * s2 * s2));
}

// Green's function of mu (I - Lap)^2 on the unit torus, summed to |a1| + |a2| <= order.
double green_series(double mu, int order, double d1, double d2)
{
  double v = fourier_green_weight(mu, 0, 0);
  for (auto [a1, a2] : fourier_half_lattice(order)) {
    v += fourier_green_weight(mu, a1, a2) * std::cos(2.0 * std::numbers::pi * (a1 * d1 + a2 * d2));
  }
  return v;
}

double sup_error(FeatureBasis const &basis, Grid const &g, std::function<double(std::size_t, std::size_t)> const &exact)
{
  double e = 0.0;
  for (std::size_t p = 0; p < g.cells(); ++p) {
    for (std::size_t q = 0; q < g.cells(); ++q) e = std::max(e, std::abs(kernel_eval(basis, p, q) - exact(p, q)));
  }
  return e;
}

} // namespace

KernelCheck kernel_check(RunConfig const &cfg, int samples)
{
  if (samples < 2) throw ConfigError("kernel check: samples must be >= 2");
  json const p = preset_parameters(cfg.preset, cfg.overrides);
  KernelCheck out;
  out.family = cfg.preset;
  std::string const &name = cfg.preset;

  if (name == "gauss_static" || name == "gauss_dynamic" || name == "subregion") {
    Grid const g = make_grid(-1.0, 1.0, -1.0, 1.0, samples, samples, 2, Boundary::NoFlux);
    bool const sub = name == "subregion" && p["subregions"].get<bool>();
    double const mu = p["mu"];
    double const s1 = name == "subregion" ? p["sigma"].get<double>() : p["sigma1"].get<double>();
    double const s2 = name == "subregion" ? p["sigma"].get<double>() : p["sigma2"].get<double>();
    out.reference = sub ? "mu exp(-|x-y|^2/(2 sigma^2)) within each half, 0 across" : "mu exp(-sum (x_i-y_i)^2/(2 sigma_i^2))";
    auto exact = [&](std::size_t a, std::size_t b) {
      Point const x = g.center(a), y = g.center(b);
      if (sub && ((x.x1 <= 0.0) != (y.x1 <= 0.0))) return 0.0;
      return gaussian_exact(mu, s1, s2, x, y);
    };
    for (int n = 0; n <= 8; ++n) {
      FeatureBasis b;
      if (sub) {
        Region const left{"x1 <= 0", [](Point x) { return x.x1 <= 0.0; }};
        Region const right{"x1 > 0", [](Point x) { return x.x1 > 0.0; }};
        b = subregion_basis({{left, gaussian_basis(mu, s1, s2, n, g)}, {right, gaussian_basis(mu, s1, s2, n, g)}}, g);
      } else {
        b = gaussian_basis(mu, s1, s2, n, g);
      }
      out.rows.push_back({n, b.size(), sup_error(b, g, exact)});
    }
  } else if (name == "turnpike") {
    Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, samples, samples, 2, Boundary::Periodic);
    double const mu = p["mu"];
    constexpr int ref_order = 48;
    out.reference = "Fourier series of mu (I - Lap)^-2 Green's function, |a1|+|a2| <= 48";
    // The exact kernel depends on x - y only; tabulate it on index offsets.
    int const m = samples;
    std::vector<double> table(static_cast<std::size_t>(m) * m);
    for (int dj = 0; dj < m; ++dj) {
      for (int di = 0; di < m; ++di) table[dj * m + di] = green_series(mu, ref_order, di * g.dx1, dj * g.dx2);
    }
    auto exact = [&](std::size_t a, std::size_t b) {
      int const di = ((static_cast<int>(a % m) - static_cast<int>(b % m)) % m + m) % m;
      int const dj = ((static_cast<int>(a / m) - static_cast<int>(b / m)) % m + m) % m;
      return table[dj * m + di];
    };
    for (int n = 0; n <= 8; ++n) {
      FeatureBasis const b = fourier_green_basis(mu, n, g);
      out.rows.push_back({n, b.size(), sup_error(b, g, exact)});
    }
  } else if (name == "spread") {
    Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, samples, samples, 2, Boundary::NoFlux);
    double const l1 = p["lambda1"], l2 = p["lambda2"];
    out.reference = "2 (lambda1 x1 y1 + lambda2 x2 y2)";
    FeatureBasis const b = linear_spread_basis(l1, l2, g);
    auto exact = [&](std::size_t a, std::size_t c) {
      Point const x = g.center(a), y = g.center(c);
      return 2.0 * (l1 * x.x1 * y.x1 + l2 * x.x2 * y.x2);
    };
    out.rows.push_back({1, b.size(), sup_error(b, g, exact)});
  } else {
    Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, samples, samples, 2, Boundary::NoFlux);
    bool const constant = p["constant_feature"].get<bool>();
    double const k = constant ? p["k"].get<double>() : 0.0;
    out.reference = constant ? "k" : "0";
    FeatureBasis const b = constant ? constant_basis(1.0, k, g) : empty_basis(g);
    out.rows.push_back({0, b.size(), sup_error(b, g, [&](std::size_t, std::size_t) { return k; })});
  }
  return out;
}

} // namespace mfg
