#include "mfg/grid.hpp"

#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfg {

int Grid::level_at(double t) const
{
  int const l = static_cast<int>(std::lround(t / dt));
  return std::clamp(l, 0, nt);
}

Grid make_grid(double x1_min, double x1_max, double x2_min, double x2_max, int nx1, int nx2, int nt, Boundary bc)
{
  if (!(x1_max > x1_min) || !(x2_max > x2_min)) {
    throw ConfigError("grid: domain bounds must satisfy min < max");
  }
  if (!std::isfinite(x1_min) || !std::isfinite(x1_max) || !std::isfinite(x2_min) || !std::isfinite(x2_max)) {
    throw ConfigError("grid: domain bounds must be finite");
  }
  if (nx1 < 2 || nx2 < 2 || nt < 2) {
    throw ConfigError("grid: nx1, nx2 and nt must all be >= 2 (got " + std::to_string(nx1) + ", " +
                      std::to_string(nx2) + ", " + std::to_string(nt) + ")");
  }
  Grid g;
  g.x1_min = x1_min;
  g.x1_max = x1_max;
  g.x2_min = x2_min;
  g.x2_max = x2_max;
  g.nx1 = nx1;
  g.nx2 = nx2;
  g.nt = nt;
  g.dx1 = (x1_max - x1_min) / nx1;
  g.dx2 = (x2_max - x2_min) / nx2;
  g.dt = 1.0 / nt;
  g.bc = bc;
  return g;
}

std::vector<double> time_diff_forward(LevelField const &rho, Grid const &g, int l)
{
  if (l < 0 || l + 1 >= rho.levels()) {
    throw std::out_of_range("time_diff_forward: level " + std::to_string(l) + " outside [0, " +
                            std::to_string(rho.levels() - 2) + "]");
  }
  auto const a = rho[l];
  auto const b = rho[l + 1];
  std::vector<double> out(a.size());
  double const inv = 1.0 / g.dt;
  for (std::size_t c = 0; c < a.size(); ++c) {
    out[c] = (b[c] - a[c]) * inv;
  }
  return out;
}

void divergence(Grid const &g, std::span<double const> m1, std::span<double const> m2, std::span<double> out)
{
  int const n1 = g.nx1, n2 = g.nx2;
  bool const periodic = g.bc == Boundary::Periodic;
  double const i1 = 1.0 / g.dx1, i2 = 1.0 / g.dx2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      std::size_t const c = g.index(i, j);
      double right = m1[c];
      double left;
      double up = m2[c];
      double down;
      if (periodic) {
        left = m1[g.index((i + n1 - 1) % n1, j)];
        down = m2[g.index(i, (j + n2 - 1) % n2)];
      } else {
        left = i > 0 ? m1[g.index(i - 1, j)] : 0.0;
        down = j > 0 ? m2[g.index(i, j - 1)] : 0.0;
        if (i == n1 - 1) right = 0.0;
        if (j == n2 - 1) up = 0.0;
      }
      out[c] = (right - left) * i1 + (up - down) * i2;
    }
  }
}

std::vector<double> divergence(FluxField const &m, Grid const &g, int l)
{
  std::vector<double> out(g.cells());
  divergence(g, m.m1[l], m.m2[l], out);
  return out;
}

void gradient_forward(Grid const &g, std::span<double const> phi, std::span<double> g1, std::span<double> g2)
{
  int const n1 = g.nx1, n2 = g.nx2;
  bool const periodic = g.bc == Boundary::Periodic;
  double const i1 = 1.0 / g.dx1, i2 = 1.0 / g.dx2;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      std::size_t const c = g.index(i, j);
      if (i + 1 < n1) {
        g1[c] = (phi[g.index(i + 1, j)] - phi[c]) * i1;
      } else {
        g1[c] = periodic ? (phi[g.index(0, j)] - phi[c]) * i1 : 0.0;
      }
      if (j + 1 < n2) {
        g2[c] = (phi[g.index(i, j + 1)] - phi[c]) * i2;
      } else {
        g2[c] = periodic ? (phi[g.index(i, 0)] - phi[c]) * i2 : 0.0;
      }
    }
  }
}

FaceField gradient_forward(LevelField const &phi, Grid const &g, int l)
{
  FaceField f{std::vector<double>(g.cells()), std::vector<double>(g.cells())};
  gradient_forward(g, phi[l], f.g1, f.g2);
  return f;
}

void face_to_cell_average(Grid const &g, std::span<double const> f1, std::span<double const> f2,
                          std::span<double> c1, std::span<double> c2)
{
  int const n1 = g.nx1, n2 = g.nx2;
  bool const periodic = g.bc == Boundary::Periodic;
  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      std::size_t const c = g.index(i, j);
      double right = f1[c], up = f2[c], left, down;
      if (periodic) {
        left = f1[g.index((i + n1 - 1) % n1, j)];
        down = f2[g.index(i, (j + n2 - 1) % n2)];
      } else {
        left = i > 0 ? f1[g.index(i - 1, j)] : 0.0;
        down = j > 0 ? f2[g.index(i, j - 1)] : 0.0;
        if (i == n1 - 1) right = 0.0;
        if (j == n2 - 1) up = 0.0;
      }
      c1[c] = 0.5 * (left + right);
      c2[c] = 0.5 * (down + up);
    }
  }
}

double integrate(std::span<double const> field, Grid const &g)
{
  double s = 0.0;
  for (double v : field) s += v;
  return s * g.cell_area();
}

double face_inner(Grid const &g, std::span<double const> m1, std::span<double const> m2,
                  std::span<double const> g1, std::span<double const> g2)
{
  double s = 0.0;
  for (std::size_t c = 0; c < m1.size(); ++c) s += m1[c] * g1[c] + m2[c] * g2[c];
  return s * g.cell_area();
}

double integrate_spacetime(LevelField const &f, Grid const &g)
{
  double s = 0.0;
  for (double v : f.data()) s += v;
  return s * g.cell_area() * g.dt;
}

} // namespace mfg
