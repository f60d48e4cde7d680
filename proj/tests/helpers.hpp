#pragma once

#include "mfg/grid.hpp"

#include <cmath>
#include <random>
#include <span>
#include <vector>

namespace testutil {

inline std::vector<double> random_field(std::size_t n, std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0)
{
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto &x : v) x = d(rng);
  return v;
}

// Random flux level with zero boundary faces under no-flux.
inline void random_flux(mfg::Grid const &g, std::mt19937_64 &rng, std::vector<double> &m1, std::vector<double> &m2)
{
  m1 = random_field(g.cells(), rng);
  m2 = random_field(g.cells(), rng);
  if (g.bc == mfg::Boundary::Periodic) return;
  for (int j = 0; j < g.nx2; ++j) m1[g.index(g.nx1 - 1, j)] = 0.0;
  for (int i = 0; i < g.nx1; ++i) m2[g.index(i, g.nx2 - 1)] = 0.0;
}

inline double max_abs_diff(std::span<double const> a, std::span<double const> b)
{
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

} // namespace testutil
