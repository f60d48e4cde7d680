#include "mfg/experiments.hpp"

#include "mfg/basis.hpp"
#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mfg {

using nlohmann::json;

namespace {

constexpr double kConfinement = 1e3;
constexpr int kConfinementPower = 8;

// Non-canonical channel layout: four rectangles across x2 = 0 leaving three gaps.
json default_obstacles(double speed_sign)
{
  json o = json::array();
  double const r[4][2] = {{-1.0, -0.6}, {-0.4, -0.1}, {0.1, 0.4}, {0.6, 1.0}};
  for (int i = 0; i < 4; ++i) {
    double const v = speed_sign == 0.0 ? 0.0 : speed_sign * (i % 2 == 0 ? 0.5 : -0.5);
    o.push_back({r[i][0], r[i][1], -0.1, 0.1, v});
  }
  return o;
}

std::vector<PresetInfo> build_catalog()
{
  json const gauss = {{"sigma1", 0.8},
                      {"sigma2", 0.8},
                      {"mu", 0.1},
                      {"order", 3},
                      {"confinement", kConfinement},
                      {"confinement_center", {0.0, 0.0}},
                      {"obstacle_height", 1e4},
                      {"obstacles", default_obstacles(0.0)}};
  json dynamic = gauss;
  dynamic["obstacles"] = default_obstacles(1.0);
  StepSizes const smooth{0.1, 0.1, 0.5, 10.0, 10.0, 10.0};
  StepSizes const stiff{0.02, 0.02, 0.5, 50.0, 50.0, 50.0};
  StepSizes const large_kernel{0.1, 0.1, 0.01, 10.0, 10.0, 10.0};
  return {
    {"spread", "maximal spread on [0,1]^2, linear kernel 2 sum lambda_i x_i y_i",
     {{"lambda1", 4.0}, {"lambda2", 4.0}, {"confinement", kConfinement}},
     smooth},
    {"gauss_static", "Gaussian repulsion on [-1,1]^2 with four static obstacles", gauss, stiff},
    {"gauss_dynamic", "Gaussian repulsion on [-1,1]^2 with vertically moving obstacles", dynamic, stiff},
    {"subregion", "Gaussian repulsion restricted to x1 <= 0 and x1 > 0 (global kernel if subregions = false)",
     {{"sigma", 0.2},
      {"mu", 5.0},
      {"order", 3},
      {"confinement", kConfinement},
      {"confinement_center", {0.0, 0.0}},
      {"subregions", true}},
     stiff},
    {"turnpike", "periodic unit square, kernel mu (I - Lap)^-2, horizon T rescaled to [0,1]",
     {{"mu", 200.0}, {"T", 10.0}, {"order", 2}},
     large_kernel},
    {"trivial", "no running cost, zero terminal cost; optional constant feature with Gram entry k",
     {{"constant_feature", false}, {"k", 1.0}},
     smooth},
  };
}

bool same_kind(json const &def, json const &v)
{
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array() && !def.empty() && def[0].is_array()) {
    // A list of records: any length, every entry shaped like the first default.
    if (!v.is_array()) return false;
    return std::all_of(v.begin(), v.end(), [&](json const &e) { return same_kind(def[0], e); });
  }
  if (def.is_array()) {
    if (!v.is_array() || v.size() != def.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!same_kind(def[i], v[i])) return false;
    }
    return true;
  }
  return false;
}

std::string kind_name(json const &def)
{
  if (def.is_boolean()) return "boolean";
  if (def.is_number_integer()) return "integer";
  if (def.is_number()) return "number";
  if (def.is_array() && !def.empty() && def[0].is_array()) return "array of " + kind_name(def[0]);
  if (def.is_array()) return "array of " + std::to_string(def.size()) + " numbers";
  return "string";
}

json merged(PresetInfo const &info, json const &overrides)
{
  if (!overrides.is_object()) throw ConfigError("preset '" + info.name + "': overrides must be an object");
  json p = info.defaults;
  for (auto const &[key, value] : overrides.items()) {
    if (!info.defaults.contains(key)) {
      throw ConfigError("preset '" + info.name + "': unknown override '" + key + "'");
    }
    if (!same_kind(info.defaults[key], value)) {
      throw ConfigError("preset '" + info.name + "': override '" + key + "' must be " +
                        kind_name(info.defaults[key]));
    }
    p[key] = value;
  }
  return p;
}

void check_size(GridSize s)
{
  if (s.nx < 2 || s.nt < 2) throw ConfigError("grid: nx and nt must be >= 2");
}

Point center_of(json const &c) { return {c[0].get<double>(), c[1].get<double>()}; }

std::vector<Rectangle> rectangles(json const &list, double dt)
{
  std::vector<Rectangle> out;
  for (auto const &r : list) {
    out.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>(),
                   r[4].get<double>() * dt});
  }
  return out;
}

ProblemSpec build_spread(json const &p, GridSize s)
{
  Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, s.nx, s.nx, s.nt, Boundary::NoFlux);
  double const l1 = p["lambda1"], l2 = p["lambda2"];
  ProblemSpec spec;
  spec.grid = g;
  spec.basis = linear_spread_basis(l1, l2, g);
  spec.Q = static_cost(confinement_cost({0.5, 0.5}, p["confinement"], kConfinementPower, g), g);
  add_cost(spec.Q, spread_potential(l1, l2, g));
  spec.rho0 = normalize_mass(gaussian_density(0.5, 0.9, 0.2, g), g);
  spec.g = terminal_cost_preset("spread", g);
  return spec;
}

ProblemSpec build_gauss(json const &p, GridSize s, bool dynamic)
{
  Grid const g = make_grid(-1.0, 1.0, -1.0, 1.0, s.nx, s.nx, s.nt, Boundary::NoFlux);
  ProblemSpec spec;
  spec.grid = g;
  spec.basis = gaussian_basis(p["mu"], p["sigma1"], p["sigma2"], p["order"], g);
  spec.Q = static_cost(confinement_cost(center_of(p["confinement_center"]), p["confinement"], kConfinementPower, g), g);
  auto const rects = rectangles(p["obstacles"], g.dt);
  add_cost(spec.Q, obstacle_cost(rects, p["obstacle_height"], g));
  if (dynamic) {
    std::vector<GaussianBump> bumps;
    for (int j = 1; j <= 5; ++j) bumps.push_back({-1.2 + 0.4 * j, -0.9, 0.2, 0.2});
    spec.rho0 = gaussian_mixture(bumps, g);
  } else {
    spec.rho0 = normalize_mass(gaussian_density(0.0, -0.9, 0.2, g), g);
  }
  spec.g = terminal_cost_preset("gaussian_repulsion", g);
  return spec;
}

ProblemSpec build_subregion(json const &p, GridSize s)
{
  Grid const g = make_grid(-1.0, 1.0, -1.0, 1.0, s.nx, s.nx, s.nt, Boundary::NoFlux);
  double const sigma = p["sigma"], mu = p["mu"];
  int const order = p["order"];
  ProblemSpec spec;
  spec.grid = g;
  if (p["subregions"].get<bool>()) {
    Region const left{"x1 <= 0", [](Point x) { return x.x1 <= 0.0; }};
    Region const right{"x1 > 0", [](Point x) { return x.x1 > 0.0; }};
    spec.basis = subregion_basis({{left, gaussian_basis(mu, sigma, sigma, order, g)},
                                  {right, gaussian_basis(mu, sigma, sigma, order, g)}},
                                 g);
  } else {
    spec.basis = gaussian_basis(mu, sigma, sigma, order, g);
  }
  spec.Q = static_cost(confinement_cost(center_of(p["confinement_center"]), p["confinement"], kConfinementPower, g), g);
  GaussianBump const bumps[] = {{0.2, -0.9, 0.2, 0.5}, {-0.2, -0.9, 0.2, 0.5}};
  spec.rho0 = gaussian_mixture(bumps, g);
  spec.g = terminal_cost_preset("subregion", g);
  return spec;
}

ProblemSpec build_turnpike(json const &p, GridSize s)
{
  Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, s.nx, s.nx, s.nt, Boundary::Periodic);
  ProblemSpec spec;
  spec.grid = g;
  spec.basis = fourier_green_basis(p["mu"], p["order"], g);
  spec.Q = static_cost(turnpike_potential(g), g);
  spec.rho0 = uniform_density(g);
  spec.g = terminal_cost_preset("zero", g);
  spec.validate();
  return turnpike_rescale(std::move(spec), p["T"]);
}

ProblemSpec build_trivial(json const &p, GridSize s)
{
  Grid const g = make_grid(0.0, 1.0, 0.0, 1.0, s.nx, s.nx, s.nt, Boundary::NoFlux);
  ProblemSpec spec;
  spec.grid = g;
  spec.basis = p["constant_feature"].get<bool>() ? constant_basis(1.0, p["k"], g) : empty_basis(g);
  spec.Q = LevelField(g.nt, g.cells());
  spec.rho0 = normalize_mass(gaussian_density(0.5, 0.5, 0.2, g), g);
  spec.g = terminal_cost_preset("zero", g);
  return spec;
}

} // namespace

std::vector<PresetInfo> const &preset_catalog()
{
  static std::vector<PresetInfo> const catalog = build_catalog();
  return catalog;
}

PresetInfo const &preset_info(std::string_view name)
{
  for (auto const &p : preset_catalog()) {
    if (p.name == name) return p;
  }
  std::string names;
  for (auto const &p : preset_catalog()) names += (names.empty() ? "" : ", ") + p.name;
  throw ConfigError("unknown preset '" + std::string(name) + "' (expected one of " + names + ")");
}

json preset_parameters(std::string_view name, json const &overrides)
{
  return merged(preset_info(name), overrides);
}

ProblemSpec preset(std::string_view name, json const &overrides, GridSize size)
{
  PresetInfo const &info = preset_info(name);
  json const p = merged(info, overrides);
  check_size(size);
  ProblemSpec spec;
  try {
    if (name == "spread") spec = build_spread(p, size);
    else if (name == "gauss_static") spec = build_gauss(p, size, false);
    else if (name == "gauss_dynamic") spec = build_gauss(p, size, true);
    else if (name == "subregion") spec = build_subregion(p, size);
    else if (name == "turnpike") spec = build_turnpike(p, size);
    else spec = build_trivial(p, size);
  } catch (json::exception const &e) {
    throw ConfigError("preset '" + info.name + "': " + e.what());
  }
  spec.validate();
  return spec;
}

bool same_problem(ProblemSpec const &a, ProblemSpec const &b)
{
  if (!(a.grid == b.grid) || a.beta != b.beta || a.time_scale != b.time_scale) return false;
  if (!(a.Q == b.Q) || a.rho0 != b.rho0 || a.g != b.g) return false;
  FeatureBasis const &p = a.basis, &q = b.basis;
  if (p.size() != q.size() || p.family() != q.family() || p.description() != q.description()) return false;
  if (p.gram() != q.gram()) return false;
  for (int k = 0; k < p.size(); ++k) {
    auto const x = p.feature(k), y = q.feature(k);
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

Spread spread_metrics(std::span<double const> rho, Grid const &grid)
{
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    Point const x = grid.center(c);
    mass += rho[c];
    m1 += rho[c] * x.x1;
    m2 += rho[c] * x.x2;
  }
  if (!(mass > 0.0)) return {};
  m1 /= mass;
  m2 /= mass;
  Spread s;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    Point const x = grid.center(c);
    s.var_x1 += rho[c] * (x.x1 - m1) * (x.x1 - m1);
    s.var_x2 += rho[c] * (x.x2 - m2) * (x.x2 - m2);
  }
  s.var_x1 /= mass;
  s.var_x2 /= mass;
  return s;
}

TurnpikeReport turnpike_diagnostics(LevelField const &rho, LevelField const &phi, Grid const &grid, double T)
{
  if (!(T > 0.0)) throw ConfigError("turnpike diagnostics: T must be > 0");
  if (rho.levels() != grid.nt + 1 || phi.levels() != grid.nt + 1) {
    throw ConfigError("turnpike diagnostics: fields must have nt + 1 levels");
  }
  TurnpikeReport r;
  int const nt = grid.nt;
  double const area = grid.area();
  for (int l = 0; l < nt; ++l) {
    double const t = grid.time(l);
    r.times.push_back(t);
    r.lambda_hat.push_back(integrate(phi[l], grid) / (area * T * (1.0 - t)));
  }

  r.levels = nt + 1;
  r.stationarity.assign(static_cast<std::size_t>(r.levels) * r.levels, 0.0);
  for (int a = 0; a <= nt; ++a) {
    for (int b = a + 1; b <= nt; ++b) {
      double d = 0.0;
      for (std::size_t c = 0; c < grid.cells(); ++c) d += std::abs(rho[a][c] - rho[b][c]);
      d *= grid.cell_area();
      r.stationarity[static_cast<std::size_t>(a) * r.levels + b] = d;
      r.stationarity[static_cast<std::size_t>(b) * r.levels + a] = d;
    }
  }

  double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int count = 0;
  for (int l = 0; l < nt; ++l) {
    double const t = r.times[l];
    if (t < r.window_lo - 1e-12 || t > r.window_hi + 1e-12) continue;
    sum += r.lambda_hat[l];
    lo = std::min(lo, r.lambda_hat[l]);
    hi = std::max(hi, r.lambda_hat[l]);
    ++count;
  }
  if (count == 0) return r;
  r.lambda_mid = sum / count;
  r.lambda_variation = r.lambda_mid != 0.0 ? (hi - lo) / std::abs(r.lambda_mid) : 0.0;
  for (int l = 0; l < nt; ++l) {
    double const t = r.times[l];
    if (t < r.window_lo - 1e-12 || t > r.window_hi + 1e-12) continue;
    double const ref = r.lambda_mid * (1.0 - t);
    for (double v : phi[l]) r.drift = std::max(r.drift, std::abs(v / T - ref));
  }
  return r;
}

std::vector<double> mean_shift_normalize(std::span<double const> field, Grid const &grid)
{
  double const mean = integrate(field, grid) / grid.area();
  std::vector<double> out(field.begin(), field.end());
  for (double &v : out) v -= mean;
  return out;
}

} // namespace mfg
