#pragma once

#include "mfg/basis.hpp"
#include "mfg/grid.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace mfg {

/**
 * A first-order nonlocal MFG on the grid with Lagrangian
 *   L(x, v) = |v|^2 / (2 beta) + Q(x, t)
 * (Hamiltonian beta |p|^2 / 2 - Q), interaction kernel given by the basis,
 * initial density rho0 and terminal cost g.
 *
 * Q holds one cell field per time interval. time_scale records the horizon
 * the problem was rescaled from (1 unless turnpike_rescale was applied).
 */
struct ProblemSpec
{
  Grid grid;
  double beta = 1.0;
  LevelField Q;
  std::vector<double> rho0;
  std::vector<double> g;
  FeatureBasis basis;
  double time_scale = 1.0;

  // Throws ConfigError on shape mismatches, non-finite data, beta <= 0,
  // negative rho0 or a mass different from 1 by more than 1e-12.
  void validate() const;
};

struct GaussianBump
{
  double c1 = 0.0;
  double c2 = 0.0;
  double sigma = 0.2;
  double weight = 1.0;
};

// Rescales a nonnegative field to unit discrete mass.
std::vector<double> normalize_mass(std::vector<double> field, Grid const &grid);
// exp(-|x - c|^2 / (2 sigma^2)) at cell centres, renormalised to unit mass.
std::vector<double> gaussian_density(double c1, double c2, double sigma, Grid const &grid);
// Weighted sum of unit-mass Gaussians, renormalised to unit mass.
std::vector<double> gaussian_mixture(std::span<GaussianBump const> bumps, Grid const &grid);
std::vector<double> uniform_density(Grid const &grid);

// coefficient * max(|x1 - c1|, |x2 - c2|)^power
std::vector<double> confinement_cost(Point center, double coefficient, int power, Grid const &grid);

// Axis-aligned obstacle, shifted vertically by l * dy_per_interval on interval l.
struct Rectangle
{
  double x1_min = 0.0, x1_max = 0.0;
  double x2_min = 0.0, x2_max = 0.0;
  double dy_per_interval = 0.0;
};

// height on cells whose centre lies in a (shifted) rectangle, 0 elsewhere;
// one level per time interval. Moving rectangles are clipped to the domain.
LevelField obstacle_cost(std::span<Rectangle const> rects, double height, Grid const &grid);

// Named terminal costs: "spread", "gaussian_repulsion", "subregion", "zero".
std::vector<double> terminal_cost_preset(std::string_view name, Grid const &grid);

// -(lambda1 x1^2 + lambda2 x2^2): the self-term that turns the linear kernel
// 2 sum lambda_i x_i y_i into a reward for distance from the population mean.
std::vector<double> spread_potential(double lambda1, double lambda2, Grid const &grid);

// -sin(2 pi x2) - sin(2 pi x1) - cos(4 pi x1)
std::vector<double> turnpike_potential(Grid const &grid);

// The same cell field on each of nt intervals.
LevelField static_cost(std::span<double const> field, Grid const &grid);
// Elementwise sum of interval fields.
void add_cost(LevelField &Q, std::span<double const> field);
void add_cost(LevelField &Q, LevelField const &other);

// Horizon-T problem mapped to [0, 1]: beta *= T, Q *= T and features scaled by
// sqrt(T), so the effective kernel is T K.
ProblemSpec turnpike_rescale(ProblemSpec spec, double T);

} // namespace mfg
