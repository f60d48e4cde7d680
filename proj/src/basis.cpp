#include "mfg/basis.hpp"

#include "mfg/error.hpp"
#include "mfg/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mfg {

FeatureBasis::FeatureBasis(BasisFamily family, std::string description, Grid const &grid, int r, PointFeatures eval,
                           Eigen::MatrixXd gram)
  : family_(family)
  , description_(std::move(description))
  , r_(r)
  , cells_(grid.cells())
  , fields_(static_cast<std::size_t>(r) * grid.cells())
  , eval_(std::move(eval))
  , gram_(std::move(gram))
{
  if (gram_.rows() != r || gram_.cols() != r) {
    throw ConfigError("basis: Gram matrix must be " + std::to_string(r) + "x" + std::to_string(r));
  }
  if (!gram_.isApprox(gram_.transpose(), 1e-14) && r > 0) {
    throw ConfigError("basis: Gram matrix must be symmetric");
  }
  if (r > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram_);
    if (!lu.isInvertible()) throw ConfigError("basis: Gram matrix is singular");
    gram_inv_ = lu.inverse();
  } else {
    gram_inv_ = Eigen::MatrixXd(0, 0);
  }
  std::vector<double> values(static_cast<std::size_t>(r));
  for (std::size_t c = 0; c < cells_; ++c) {
    eval_(grid.center(c), values);
    for (int k = 0; k < r; ++k) fields_[static_cast<std::size_t>(k) * cells_ + c] = values[k];
  }
}

void FeatureBasis::evaluate(Point x, std::span<double> out) const
{
  if (r_ > 0) eval_(x, out);
}

FeatureBasis FeatureBasis::scaled(double factor) const
{
  FeatureBasis b = *this;
  for (double &v : b.fields_) v *= factor;
  PointFeatures inner = eval_;
  if (inner) {
    b.eval_ = [inner, factor](Point x, std::span<double> out) {
      inner(x, out);
      for (double &v : out) v *= factor;
    };
  }
  std::ostringstream d;
  d << description_ << " x" << factor;
  b.description_ = d.str();
  return b;
}

FeatureBasis empty_basis(Grid const &grid)
{
  return FeatureBasis(BasisFamily::Empty, "none", grid, 0, [](Point, std::span<double>) {}, Eigen::MatrixXd(0, 0));
}

FeatureBasis constant_basis(double value, double gram_entry, Grid const &grid)
{
  if (!(gram_entry > 0.0)) throw ConfigError("constant basis: Gram entry must be > 0");
  Eigen::MatrixXd k(1, 1);
  k(0, 0) = gram_entry;
  std::ostringstream d;
  d << "constant(value=" << value << ", k=" << gram_entry << ")";
  return FeatureBasis(BasisFamily::Constant, d.str(), grid, 1, [value](Point, std::span<double> out) { out[0] = value; },
                      k);
}

FeatureBasis linear_spread_basis(double lambda1, double lambda2, Grid const &grid)
{
  if (lambda1 < 0.0 || lambda2 < 0.0) {
    throw ConfigError("linear spread basis: lambda must be >= 0 (monotone coupling)");
  }
  double const s1 = std::sqrt(2.0 * lambda1);
  double const s2 = std::sqrt(2.0 * lambda2);
  std::ostringstream d;
  d << "linear(lambda1=" << lambda1 << ", lambda2=" << lambda2 << ")";
  return FeatureBasis(
    BasisFamily::Linear, d.str(), grid, 2,
    [s1, s2](Point x, std::span<double> out) {
      out[0] = s1 * x.x1;
      out[1] = s2 * x.x2;
    },
    Eigen::MatrixXd::Identity(2, 2));
}

int gaussian_feature_count(int order) { return (order + 1) * (order + 2) / 2; }

FeatureBasis gaussian_basis(double mu, double sigma1, double sigma2, int order, Grid const &grid)
{
  if (!(mu > 0.0) || !(sigma1 > 0.0) || !(sigma2 > 0.0)) {
    throw ConfigError("gaussian basis: mu and sigma must be > 0");
  }
  if (order < 0) throw ConfigError("gaussian basis: order must be >= 0");
  int const r = gaussian_feature_count(order);

  // 1 / sqrt(a!) for a = 0..order
  std::vector<double> inv_sqrt_fact(static_cast<std::size_t>(order) + 1);
  double f = 1.0;
  for (int a = 0; a <= order; ++a) {
    if (a > 0) f *= a;
    inv_sqrt_fact[a] = 1.0 / std::sqrt(f);
  }
  double const root_mu = std::sqrt(mu);
  auto eval = [=](Point x, std::span<double> out) {
    double const u1 = x.x1 / sigma1;
    double const u2 = x.x2 / sigma2;
    double const env = root_mu * std::exp(-0.5 * (u1 * u1 + u2 * u2));
    std::size_t k = 0;
    for (int deg = 0; deg <= order; ++deg) {
      for (int a1 = deg; a1 >= 0; --a1) {
        int const a2 = deg - a1;
        out[k++] = env * std::pow(u1, a1) * inv_sqrt_fact[a1] * std::pow(u2, a2) * inv_sqrt_fact[a2];
      }
    }
  };
  std::ostringstream d;
  d << "gaussian(mu=" << mu << ", sigma=(" << sigma1 << ", " << sigma2 << "), n=" << order << ")";
  return FeatureBasis(BasisFamily::Gaussian, d.str(), grid, r, eval, Eigen::MatrixXd::Identity(r, r));
}

FeatureBasis subregion_basis(std::vector<std::pair<Region, FeatureBasis>> const &parts, Grid const &grid)
{
  int r = 0;
  for (auto const &[region, child] : parts) {
    if (!region.contains) throw ConfigError("subregion basis: region '" + region.name + "' has no indicator");
    r += child.size();
  }
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    Point const x = grid.center(c);
    int owners = 0;
    for (auto const &[region, child] : parts) owners += region.contains(x) ? 1 : 0;
    if (owners > 1) {
      std::ostringstream m;
      m << "subregion basis: regions overlap at cell (" << x.x1 << ", " << x.x2 << ")";
      throw ConfigError(m.str());
    }
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r, r);
  std::ostringstream d;
  d << "subregion[";
  int offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto const &child = parts[p].second;
    gram.block(offset, offset, child.size(), child.size()) = child.gram();
    offset += child.size();
    d << (p ? "; " : "") << parts[p].first.name << ": " << child.description();
  }
  d << "]";

  auto eval = [parts](Point x, std::span<double> out) {
    std::size_t k = 0;
    for (auto const &[region, child] : parts) {
      auto const block = out.subspan(k, static_cast<std::size_t>(child.size()));
      if (region.contains(x)) {
        child.evaluate(x, block);
      } else {
        std::fill(block.begin(), block.end(), 0.0);
      }
      k += block.size();
    }
  };
  return FeatureBasis(BasisFamily::Subregion, d.str(), grid, r, eval, gram);
}

double fourier_green_weight(double mu, int a1, int a2)
{
  if (a1 == 0 && a2 == 0) return mu;
  double const pi2 = std::numbers::pi * std::numbers::pi;
  double const n2 = static_cast<double>(a1) * a1 + static_cast<double>(a2) * a2;
  return 2.0 * mu / (1.0 + 8.0 * pi2 * n2 + 16.0 * pi2 * pi2 * n2 * n2);
}

std::vector<std::pair<int, int>> fourier_half_lattice(int order)
{
  std::vector<std::pair<int, int>> out;
  for (int a1 = 0; a1 <= order; ++a1) {
    for (int a2 = -order; a2 <= order; ++a2) {
      if (std::abs(a1) + std::abs(a2) > order) continue;
      if (a1 > 0 || (a1 == 0 && a2 > 0)) out.emplace_back(a1, a2);
    }
  }
  return out;
}

FeatureBasis fourier_green_basis(double mu, int order, Grid const &grid)
{
  if (grid.bc != Boundary::Periodic) throw ConfigError("fourier basis: requires a periodic grid");
  if (!(mu > 0.0)) throw ConfigError("fourier basis: mu must be > 0");
  if (order < 0) throw ConfigError("fourier basis: order must be >= 0");
  if (std::abs(grid.x1_max - grid.x1_min - 1.0) > 1e-12 || std::abs(grid.x2_max - grid.x2_min - 1.0) > 1e-12) {
    throw ConfigError("fourier basis: the periodic cell must have unit side length");
  }
  auto const modes = fourier_half_lattice(order);
  int const r = 1 + 2 * static_cast<int>(modes.size());
  std::vector<double> root_gamma;
  root_gamma.reserve(modes.size());
  for (auto [a1, a2] : modes) root_gamma.push_back(std::sqrt(fourier_green_weight(mu, a1, a2)));
  double const root_g0 = std::sqrt(fourier_green_weight(mu, 0, 0));
  double const x1_0 = grid.x1_min, x2_0 = grid.x2_min;
  auto eval = [=](Point x, std::span<double> out) {
    out[0] = root_g0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double const arg = 2.0 * std::numbers::pi * (modes[m].first * (x.x1 - x1_0) + modes[m].second * (x.x2 - x2_0));
      out[1 + 2 * m] = root_gamma[m] * std::cos(arg);
      out[2 + 2 * m] = root_gamma[m] * std::sin(arg);
    }
  };
  std::ostringstream d;
  d << "fourier(mu=" << mu << ", n=" << order << ")";
  return FeatureBasis(BasisFamily::Fourier, d.str(), grid, r, eval, Eigen::MatrixXd::Identity(r, r));
}

double kernel_eval(FeatureBasis const &basis, std::size_t cell_x, std::size_t cell_y)
{
  int const r = basis.size();
  Eigen::VectorXd fx(r), fy(r);
  for (int k = 0; k < r; ++k) {
    fx[k] = basis.feature(k)[cell_x];
    fy[k] = basis.feature(k)[cell_y];
  }
  return fx.dot(basis.gram() * fy);
}

double kernel_eval(FeatureBasis const &basis, Point x, Point y)
{
  int const r = basis.size();
  Eigen::VectorXd fx(r), fy(r);
  basis.evaluate(x, {fx.data(), static_cast<std::size_t>(r)});
  basis.evaluate(y, {fy.data(), static_cast<std::size_t>(r)});
  return fx.dot(basis.gram() * fy);
}

void add_interaction(CoefficientPath const &a, int column, FeatureBasis const &basis, std::span<double> out)
{
  for (int k = 0; k < basis.size(); ++k) {
    double const coef = a(k, column);
    if (coef != 0.0) kernels::axpy(coef, basis.feature(k), out);
  }
}

LevelField interaction_field(CoefficientPath const &a, FeatureBasis const &basis)
{
  if (a.rows() != basis.size()) {
    throw ConfigError("interaction_field: coefficient rows (" + std::to_string(a.rows()) +
                      ") do not match basis size (" + std::to_string(basis.size()) + ")");
  }
  LevelField out(static_cast<int>(a.cols()), basis.cells());
  for (int l = 0; l < a.cols(); ++l) add_interaction(a, l, basis, out[l]);
  return out;
}

Eigen::MatrixXd moments(LevelField const &rho, FeatureBasis const &basis, Grid const &grid)
{
  Eigen::MatrixXd F(basis.size(), rho.levels());
  double const w = grid.cell_area();
  for (int l = 0; l < rho.levels(); ++l) {
    for (int k = 0; k < basis.size(); ++k) F(k, l) = kernels::dot(basis.feature(k), rho[l]) * w;
  }
  return F;
}

} // namespace mfg
