#pragma once

#include "mfg/grid.hpp"

#include <memory>
#include <span>
#include <vector>

namespace mfg {

// Weights of the H1-type proximal metric on phi.
struct EllipticWeights
{
  double tau_phi_t = 0.5;
  double tau_grad_phi = 0.5;
  double tau_phi0 = 0.5;
};

/**
 * Applies the space-time operator of the phi prox to an increment d on levels
 * 0..nt-1 (d^nt = 0 is implied):
 *
 *   l >= 1:  (d^{l+1} - 2 d^l + d^{l-1}) / (tau_t dt^2) + Lap d^l / tau_grad
 *   l = 0:   (d^1 - d^0) / (tau_t dt^2) - d^0 / (tau_0 dt) + Lap d^0 / tau_grad
 *
 * Lap = divergence(gradient_forward(.)), i.e. the no-flux or periodic
 * five-point Laplacian. Evaluated directly in physical space.
 */
void apply_spacetime_operator(Grid const &grid, EllipticWeights w, std::span<double const> d, std::span<double> out);

/**
 * Inverts apply_spacetime_operator(). The spatial Laplacian is diagonalised
 * with a DCT-II (no-flux) or a discrete Hartley transform (periodic), leaving
 * one symmetric tridiagonal system in time per spatial mode.
 */
class SpaceTimeEllipticSolver
{
public:
  SpaceTimeEllipticSolver(Grid const &grid, EllipticWeights w);
  ~SpaceTimeEllipticSolver();
  SpaceTimeEllipticSolver(SpaceTimeEllipticSolver &&) noexcept;
  SpaceTimeEllipticSolver &operator=(SpaceTimeEllipticSolver &&) noexcept;
  SpaceTimeEllipticSolver(SpaceTimeEllipticSolver const &) = delete;
  SpaceTimeEllipticSolver &operator=(SpaceTimeEllipticSolver const &) = delete;

  // rhs and d hold nt levels of grid cells. Uses internal scratch, so one
  // instance must not be used from two threads at once.
  void solve(std::span<double const> rhs, std::span<double> d);

  // Nonnegative eigenvalues of -Lap, mode index k2 * nx1 + k1.
  std::span<double const> laplacian_eigenvalues() const { return eig_; }

private:
  struct Transforms;

  Grid grid_;
  EllipticWeights w_;
  std::vector<double> eig_;
  std::vector<double> inv_;
  std::vector<double> upper_;
  double off_ = 0.0;
  double norm_ = 1.0;
  std::unique_ptr<Transforms> fft_;
};

} // namespace mfg
