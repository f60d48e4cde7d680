#include "mfg/problem.hpp"

#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfg {

void ProblemSpec::validate() const
{
  std::size_t const n = grid.cells();
  if (rho0.size() != n || g.size() != n) throw ConfigError("problem: rho0 and g must have one value per cell");
  if (Q.levels() != grid.nt || Q.cells() != n) throw ConfigError("problem: Q must have nt levels of grid cells");
  if (basis.size() > 0 && basis.cells() != n) throw ConfigError("problem: basis was built on a different grid");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("problem: kinetic coefficient beta must be > 0");
  if (!(time_scale >= 1.0)) throw ConfigError("problem: time_scale must be >= 1");
  for (double v : Q.data()) {
    if (!std::isfinite(v)) throw ConfigError("problem: Q contains a non-finite value");
  }
  for (double v : g) {
    if (!std::isfinite(v)) throw ConfigError("problem: g contains a non-finite value");
  }
  for (double v : rho0) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("problem: rho0 must be finite and >= 0");
  }
  double const mass = integrate(rho0, grid);
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream m;
    m.precision(17);
    m << "problem: rho0 must have unit mass (got " << mass << ")";
    throw ConfigError(m.str());
  }
}

std::vector<double> normalize_mass(std::vector<double> field, Grid const &grid)
{
  double const mass = integrate(field, grid);
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("density has zero or non-finite total mass");
  double const inv = 1.0 / mass;
  for (double &v : field) v *= inv;
  return field;
}

std::vector<double> gaussian_density(double c1, double c2, double sigma, Grid const &grid)
{
  if (!(sigma > 0.0)) throw ConfigError("gaussian density: sigma must be > 0");
  std::vector<double> f(grid.cells());
  double const inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t c = 0; c < f.size(); ++c) {
    Point const x = grid.center(c);
    double const d1 = x.x1 - c1, d2 = x.x2 - c2;
    f[c] = std::exp(-(d1 * d1 + d2 * d2) * inv2s2);
  }
  return normalize_mass(std::move(f), grid);
}

std::vector<double> gaussian_mixture(std::span<GaussianBump const> bumps, Grid const &grid)
{
  if (bumps.empty()) throw ConfigError("gaussian mixture: at least one component required");
  std::vector<double> f(grid.cells(), 0.0);
  for (auto const &b : bumps) {
    if (b.weight < 0.0) throw ConfigError("gaussian mixture: weights must be >= 0");
    auto const comp = gaussian_density(b.c1, b.c2, b.sigma, grid);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] += b.weight * comp[c];
  }
  return normalize_mass(std::move(f), grid);
}

std::vector<double> uniform_density(Grid const &grid)
{
  return normalize_mass(std::vector<double>(grid.cells(), 1.0), grid);
}

std::vector<double> confinement_cost(Point center, double coefficient, int power, Grid const &grid)
{
  if (coefficient < 0.0) throw ConfigError("confinement: coefficient must be >= 0");
  if (power <= 0 || power % 2 != 0) throw ConfigError("confinement: power must be a positive even integer");
  std::vector<double> f(grid.cells());
  for (std::size_t c = 0; c < f.size(); ++c) {
    Point const x = grid.center(c);
    double const d = std::max(std::abs(x.x1 - center.x1), std::abs(x.x2 - center.x2));
    f[c] = coefficient * std::pow(d, power);
  }
  return f;
}

LevelField obstacle_cost(std::span<Rectangle const> rects, double height, Grid const &grid)
{
  constexpr double slack = 1e-12;
  for (auto const &r : rects) {
    if (!(r.x1_max > r.x1_min) || !(r.x2_max > r.x2_min)) {
      throw ConfigError("obstacle: rectangle must have positive extent");
    }
    if (r.x1_min < grid.x1_min - slack || r.x1_max > grid.x1_max + slack || r.x2_min < grid.x2_min - slack ||
        r.x2_max > grid.x2_max + slack) {
      std::ostringstream m;
      m << "obstacle: rectangle [" << r.x1_min << ", " << r.x1_max << "] x [" << r.x2_min << ", " << r.x2_max
        << "] lies outside the domain";
      throw ConfigError(m.str());
    }
  }
  LevelField Q(grid.nt, grid.cells());
  for (int l = 0; l < grid.nt; ++l) {
    auto level = Q[l];
    for (auto const &r : rects) {
      double const shift = l * r.dy_per_interval;
      double const y0 = r.x2_min + shift, y1 = r.x2_max + shift;
      for (std::size_t c = 0; c < level.size(); ++c) {
        Point const x = grid.center(c);
        if (x.x1 >= r.x1_min && x.x1 <= r.x1_max && x.x2 >= y0 && x.x2 <= y1) level[c] = height;
      }
    }
  }
  return Q;
}

std::vector<double> terminal_cost_preset(std::string_view name, Grid const &grid)
{
  std::vector<double> f(grid.cells());
  for (std::size_t c = 0; c < f.size(); ++c) {
    Point const x = grid.center(c);
    if (name == "spread") {
      double const a = x.x1 - 0.5, b = x.x2 - 0.1;
      f[c] = 2.0 * std::exp(-10.0 * a * a - b * b) * (b * b - 1.0);
    } else if (name == "gaussian_repulsion") {
      double const b = x.x2 - 0.9;
      f[c] = 2.0 * std::exp(-5.0 * x.x1 * x.x1 - 0.25 * b * b) * (b * b - 1.0) + x.x1 * x.x1;
    } else if (name == "subregion") {
      double const a = x.x1 - 0.0, b = x.x2 - 0.5;
      f[c] = -4.0 * std::exp(-5.0 * a * a - 2.5 * b * b);
    } else if (name == "zero") {
      f[c] = 0.0;
    } else {
      throw ConfigError("unknown terminal cost preset '" + std::string(name) +
                        "' (expected spread, gaussian_repulsion, subregion or zero)");
    }
  }
  return f;
}

std::vector<double> spread_potential(double lambda1, double lambda2, Grid const &grid)
{
  std::vector<double> f(grid.cells());
  for (std::size_t c = 0; c < f.size(); ++c) {
    Point const x = grid.center(c);
    f[c] = -(lambda1 * x.x1 * x.x1 + lambda2 * x.x2 * x.x2);
  }
  return f;
}

std::vector<double> turnpike_potential(Grid const &grid)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> f(grid.cells());
  for (std::size_t c = 0; c < f.size(); ++c) {
    Point const x = grid.center(c);
    f[c] = -std::sin(two_pi * x.x2) - std::sin(two_pi * x.x1) - std::cos(2.0 * two_pi * x.x1);
  }
  return f;
}

LevelField static_cost(std::span<double const> field, Grid const &grid)
{
  LevelField Q(grid.nt, grid.cells());
  for (int l = 0; l < grid.nt; ++l) std::copy(field.begin(), field.end(), Q[l].begin());
  return Q;
}

void add_cost(LevelField &Q, std::span<double const> field)
{
  for (int l = 0; l < Q.levels(); ++l) {
    auto level = Q[l];
    for (std::size_t c = 0; c < level.size(); ++c) level[c] += field[c];
  }
}

void add_cost(LevelField &Q, LevelField const &other)
{
  auto &d = Q.data();
  auto const &o = other.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += o[i];
}

ProblemSpec turnpike_rescale(ProblemSpec spec, double T)
{
  if (!(T >= 1.0) || !std::isfinite(T)) throw ConfigError("turnpike rescale: T must be >= 1");
  if (spec.grid.bc != Boundary::Periodic) throw ConfigError("turnpike rescale: requires a periodic grid");
  if (T == 1.0) return spec;
  spec.beta *= T;
  for (double &v : spec.Q.data()) v *= T;
  spec.basis = spec.basis.scaled(std::sqrt(T));
  spec.time_scale *= T;
  return spec;
}

} // namespace mfg
