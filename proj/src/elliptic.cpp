#include "mfg/elliptic.hpp"

#include "mfg/error.hpp"
#include "mfg/kernels.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace mfg {

namespace {

// FFTW planning is not thread-safe.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

} // namespace

void apply_spacetime_operator(Grid const &grid, EllipticWeights w, std::span<double const> d, std::span<double> out)
{
  std::size_t const n = grid.cells();
  int const nt = grid.nt;
  double const e = 1.0 / (w.tau_phi_t * grid.dt * grid.dt);
  double const robin = 1.0 / (w.tau_phi0 * grid.dt);
  double const ig = 1.0 / w.tau_grad_phi;
  std::vector<double> g1(n), g2(n), lap(n);
  for (int l = 0; l < nt; ++l) {
    auto const dl = d.subspan(static_cast<std::size_t>(l) * n, n);
    gradient_forward(grid, dl, g1, g2);
    divergence(grid, g1, g2, lap);
    auto o = out.subspan(static_cast<std::size_t>(l) * n, n);
    for (std::size_t c = 0; c < n; ++c) {
      double const next = l + 1 < nt ? d[static_cast<std::size_t>(l + 1) * n + c] : 0.0;
      double time_part;
      if (l == 0) {
        time_part = e * (next - dl[c]) - robin * dl[c];
      } else {
        double const prev = d[static_cast<std::size_t>(l - 1) * n + c];
        time_part = e * (next - 2.0 * dl[c] + prev);
      }
      o[c] = time_part + ig * lap[c];
    }
  }
}

struct SpaceTimeEllipticSolver::Transforms
{
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  double *buf = nullptr;

  ~Transforms()
  {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buf) fftw_free(buf);
  }
};

SpaceTimeEllipticSolver::SpaceTimeEllipticSolver(Grid const &grid, EllipticWeights w)
  : grid_(grid)
  , w_(w)
  , fft_(std::make_unique<Transforms>())
{
  if (!(w.tau_phi_t > 0.0) || !(w.tau_grad_phi > 0.0) || !(w.tau_phi0 > 0.0)) {
    throw ConfigError("elliptic solver: step sizes must be > 0");
  }
  std::size_t const n = grid.cells();
  std::size_t const nt = static_cast<std::size_t>(grid.nt);
  bool const periodic = grid.bc == Boundary::Periodic;

  // 1D eigenvalues of the negative second difference.
  auto eig1d = [periodic](int N, double h) {
    std::vector<double> e(static_cast<std::size_t>(N));
    double const base = periodic ? 2.0 * std::numbers::pi / N : std::numbers::pi / N;
    for (int k = 0; k < N; ++k) e[k] = (2.0 - 2.0 * std::cos(base * k)) / (h * h);
    return e;
  };
  auto const e1 = eig1d(grid.nx1, grid.dx1);
  auto const e2 = eig1d(grid.nx2, grid.dx2);
  eig_.resize(n);
  for (int k2 = 0; k2 < grid.nx2; ++k2) {
    for (int k1 = 0; k1 < grid.nx1; ++k1) eig_[grid.index(k1, k2)] = e1[k1] + e2[k2];
  }

  // Per-mode tridiagonal in time: constant off-diagonal, diagonal by row type.
  off_ = 1.0 / (w.tau_phi_t * grid.dt * grid.dt);
  double const robin = 1.0 / (w.tau_phi0 * grid.dt);
  std::vector<double> diag(nt * n);
  for (std::size_t l = 0; l < nt; ++l) {
    for (std::size_t m = 0; m < n; ++m) {
      double const lap = eig_[m] / w.tau_grad_phi;
      diag[l * n + m] = l == 0 ? -off_ - robin - lap : -2.0 * off_ - lap;
    }
  }
  inv_.resize(nt * n);
  upper_.resize(nt * n);
  kernels::thomas_factor(diag, off_, nt, n, inv_, upper_);

  norm_ = periodic ? 1.0 / (static_cast<double>(grid.nx1) * grid.nx2)
                   : 1.0 / (4.0 * static_cast<double>(grid.nx1) * grid.nx2);

  std::lock_guard lock(planner_mutex());
  fft_->buf = static_cast<double *>(fftw_malloc(sizeof(double) * nt * n));
  int dims[2] = {grid.nx2, grid.nx1};
  fftw_r2r_kind fwd[2], bwd[2];
  for (int i = 0; i < 2; ++i) {
    fwd[i] = periodic ? FFTW_DHT : FFTW_REDFT10;
    bwd[i] = periodic ? FFTW_DHT : FFTW_REDFT01;
  }
  int const howmany = grid.nt;
  int const dist = static_cast<int>(n);
  fft_->forward = fftw_plan_many_r2r(2, dims, howmany, fft_->buf, nullptr, 1, dist, fft_->buf, nullptr, 1, dist, fwd,
                                     FFTW_ESTIMATE);
  fft_->backward = fftw_plan_many_r2r(2, dims, howmany, fft_->buf, nullptr, 1, dist, fft_->buf, nullptr, 1, dist, bwd,
                                      FFTW_ESTIMATE);
  if (!fft_->forward || !fft_->backward) throw ConfigError("elliptic solver: FFTW planning failed");
}

SpaceTimeEllipticSolver::~SpaceTimeEllipticSolver() = default;
SpaceTimeEllipticSolver::SpaceTimeEllipticSolver(SpaceTimeEllipticSolver &&) noexcept = default;
SpaceTimeEllipticSolver &SpaceTimeEllipticSolver::operator=(SpaceTimeEllipticSolver &&) noexcept = default;

void SpaceTimeEllipticSolver::solve(std::span<double const> rhs, std::span<double> d)
{
  std::size_t const n = grid_.cells();
  std::size_t const nt = static_cast<std::size_t>(grid_.nt);
  double *buf = fft_->buf;
  std::memcpy(buf, rhs.data(), sizeof(double) * nt * n);
  fftw_execute(fft_->forward);
  kernels::active().tridiag(inv_.data(), upper_.data(), off_, buf, nt, n);
  fftw_execute(fft_->backward);
  for (std::size_t i = 0; i < nt * n; ++i) d[i] = buf[i] * norm_;
}

} // namespace mfg
