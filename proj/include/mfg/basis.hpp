#pragma once

#include "mfg/grid.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfg {

enum class BasisFamily
{
  Empty,
  Constant,
  Linear,
  Gaussian,
  Fourier,
  Subregion
};

// Writes the r feature values at a point into out.
using PointFeatures = std::function<void(Point, std::span<double>)>;

/**
 * Finite feature expansion K(x, y) = sum_ij k_ij f_i(x) f_j(y) of an
 * interaction kernel.
 *
 * The features are sampled once at the cell centres of the grid the basis is
 * built on; the point evaluator is kept for off-grid kernel checks. The Gram
 * matrix is the coefficient matrix (k_ij), not the L2 Gram of the sampled
 * fields.
 */
class FeatureBasis
{
public:
  FeatureBasis() = default;
  FeatureBasis(BasisFamily family, std::string description, Grid const &grid, int r, PointFeatures eval,
               Eigen::MatrixXd gram);

  int size() const { return r_; }
  BasisFamily family() const { return family_; }
  std::string const &description() const { return description_; }
  std::size_t cells() const { return cells_; }

  std::span<double const> feature(int k) const
  {
    return {fields_.data() + static_cast<std::size_t>(k) * cells_, cells_};
  }
  Eigen::MatrixXd const &gram() const { return gram_; }
  Eigen::MatrixXd const &gram_inv() const { return gram_inv_; }

  void evaluate(Point x, std::span<double> out) const;

  // Every feature multiplied by factor (kernel scales by factor^2).
  FeatureBasis scaled(double factor) const;

private:
  BasisFamily family_ = BasisFamily::Empty;
  std::string description_;
  int r_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> fields_; // r x cells
  PointFeatures eval_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
};

// Coefficients a_{k,l}: r rows, one column per time interval.
using CoefficientPath = Eigen::MatrixXd;

// No interaction (r = 0).
FeatureBasis empty_basis(Grid const &grid);
// One constant feature f = value with k_11 = gram_entry.
FeatureBasis constant_basis(double value, double gram_entry, Grid const &grid);
// f_i(x) = sqrt(2 lambda_i) x_i, K = I. Reproduces K(x, y) = 2 sum lambda_i x_i y_i.
FeatureBasis linear_spread_basis(double lambda1, double lambda2, Grid const &grid);
// Taylor features of mu exp(-sum |x_i - y_i|^2 / (2 sigma_i^2)) of total order <= n, K = I.
FeatureBasis gaussian_basis(double mu, double sigma1, double sigma2, int order, Grid const &grid);
// Number of Gaussian features of total order <= n.
int gaussian_feature_count(int order);

struct Region
{
  std::string name;
  std::function<bool(Point)> contains;
};

// Features of each child restricted to its region; block-diagonal Gram.
FeatureBasis subregion_basis(std::vector<std::pair<Region, FeatureBasis>> const &parts, Grid const &grid);

// Trigonometric features of the Green's function of mu (I - Lap)^2 on the
// periodic cell: constant plus cos/sin over the half-lattice |a1| + |a2| <= n.
FeatureBasis fourier_green_basis(double mu, int order, Grid const &grid);
// Fourier weight of the mode alpha (both signs combined) on a unit torus.
double fourier_green_weight(double mu, int a1, int a2);
// Half-lattice representatives alpha != 0 with |a1| + |a2| <= n.
std::vector<std::pair<int, int>> fourier_half_lattice(int order);

// K_r at two cells, from the cached fields.
double kernel_eval(FeatureBasis const &basis, std::size_t cell_x, std::size_t cell_y);
// K_r at two arbitrary points, from the point evaluator.
double kernel_eval(FeatureBasis const &basis, Point x, Point y);

// field(x, l) = sum_k a_{k,l} f_k(x), one level per column of a.
LevelField interaction_field(CoefficientPath const &a, FeatureBasis const &basis);
// Adds sum_k a_{k,l} f_k(x) into out for a single column.
void add_interaction(CoefficientPath const &a, int column, FeatureBasis const &basis, std::span<double> out);

// F_{k,l} = sum_cells f_k rho^l dx1 dx2 for every level of rho.
Eigen::MatrixXd moments(LevelField const &rho, FeatureBasis const &basis, Grid const &grid);

} // namespace mfg
