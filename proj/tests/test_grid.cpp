#include "helpers.hpp"

#include "mfg/error.hpp"
#include "mfg/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace mfg;
using testutil::random_field;

TEST_CASE("make_grid spacings")
{
  Grid const g = make_grid(0, 1, 0, 1, 64, 64, 32, Boundary::NoFlux);
  CHECK(g.dx1 == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(g.dt == doctest::Approx(1.0 / 32).epsilon(1e-15));
  Grid const h = make_grid(-1, 1, -1, 1, 64, 64, 32, Boundary::NoFlux);
  CHECK(h.dx1 == doctest::Approx(2.0 / 64).epsilon(1e-15));
  CHECK(h.dx2 == doctest::Approx(2.0 / 64).epsilon(1e-15));
  CHECK(h.cells() == 64u * 64u);
}

TEST_CASE("make_grid rejects bad input")
{
  CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 1, 4, 4, Boundary::NoFlux), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 4, 4, 1, Boundary::NoFlux), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 0, 0, 1, 4, 4, 4, Boundary::NoFlux), ConfigError);
  CHECK_THROWS_AS(make_grid(0, 1, 0, 0, 4, 4, 4, Boundary::NoFlux), ConfigError);
}

TEST_CASE("level_at rounds to the nearest level")
{
  Grid const g = make_grid(0, 1, 0, 1, 4, 4, 32, Boundary::NoFlux);
  CHECK(g.level_at(0.0) == 0);
  CHECK(g.level_at(0.5) == 16);
  CHECK(g.level_at(1.0) == 32);
  CHECK(g.level_at(2.0) == 32);
  CHECK(g.level_at(0.1) == 3);
}

TEST_CASE("time_diff_forward")
{
  Grid const g = make_grid(0, 1, 0, 1, 4, 3, 5, Boundary::NoFlux);
  DensityField c(g, 0.7);
  for (double v : time_diff_forward(c, g, 2)) CHECK(v == 0.0);

  DensityField lin(g);
  for (int l = 0; l <= g.nt; ++l)
    for (double &v : lin[l]) v = l * g.dt;
  for (double v : time_diff_forward(lin, g, 3)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(1);
  DensityField r(g);
  r.data() = random_field(r.data().size(), rng);
  for (int l = 0; l < g.nt; ++l) {
    auto const d = time_diff_forward(r, g, l);
    for (std::size_t c2 = 0; c2 < g.cells(); ++c2) CHECK(d[c2] == doctest::Approx((r[l + 1][c2] - r[l][c2]) / g.dt).epsilon(1e-14));
  }
  CHECK_THROWS_AS(time_diff_forward(r, g, g.nt), std::out_of_range);
  CHECK_THROWS_AS(time_diff_forward(r, g, -1), std::out_of_range);
}

TEST_CASE("divergence: zero flux and the hand-computed 4x4 case")
{
  Grid const g = make_grid(0, 1, 0, 1, 4, 4, 2, Boundary::NoFlux);
  std::vector<double> m1(16, 0.0), m2(16, 0.0), out(16);
  divergence(g, m1, m2, out);
  for (double v : out) CHECK(v == 0.0);

  // m1 at face i+1/2 equals its coordinate (i+1) dx; the boundary face stays 0.
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 3; ++i) m1[g.index(i, j)] = (i + 1) * 0.25;
  divergence(g, m1, m2, out);
  for (int j = 0; j < 4; ++j) {
    CHECK(out[g.index(0, j)] == doctest::Approx(1.0));
    CHECK(out[g.index(1, j)] == doctest::Approx(1.0));
    CHECK(out[g.index(2, j)] == doctest::Approx(1.0));
    CHECK(out[g.index(3, j)] == doctest::Approx(-3.0));
  }
}

TEST_CASE("divergence of a no-flux field integrates to zero")
{
  std::mt19937_64 rng(2);
  Grid const g = make_grid(-1, 1, 0, 3, 7, 5, 2, Boundary::NoFlux);
  std::vector<double> m1, m2, out(g.cells());
  for (int trial = 0; trial < 20; ++trial) {
    testutil::random_flux(g, rng, m1, m2);
    divergence(g, m1, m2, out);
    CHECK(std::abs(integrate(out, g)) < 1e-12);
  }
}

TEST_CASE("gradient_forward")
{
  Grid const g = make_grid(0, 1, 0, 1, 4, 4, 2, Boundary::Periodic);
  std::vector<double> phi(16, 3.0), g1(16), g2(16);
  gradient_forward(g, phi, g1, g2);
  for (std::size_t c = 0; c < 16; ++c) CHECK((g1[c] == 0.0 && g2[c] == 0.0));

  for (std::size_t c = 0; c < 16; ++c) phi[c] = g.center(c).x1;
  gradient_forward(g, phi, g1, g2);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 3; ++i) CHECK(g1[g.index(i, j)] == doctest::Approx(1.0));
    // wrap face: (x_0 - x_3) / dx = (0.125 - 0.875) / 0.25
    CHECK(g1[g.index(3, j)] == doctest::Approx(-3.0));
  }
  for (double v : g2) CHECK(v == 0.0);

  Grid const n = make_grid(0, 1, 0, 1, 4, 4, 2, Boundary::NoFlux);
  gradient_forward(n, phi, g1, g2);
  for (int j = 0; j < 4; ++j) CHECK(g1[n.index(3, j)] == 0.0);
}

TEST_CASE("discrete integration by parts holds for both boundary kinds")
{
  std::mt19937_64 rng(3);
  for (Boundary bc : {Boundary::NoFlux, Boundary::Periodic}) {
    Grid const g = make_grid(0, 2, -1, 1, 6, 9, 2, bc);
    for (int trial = 0; trial < 20; ++trial) {
      auto const phi = random_field(g.cells(), rng);
      std::vector<double> m1, m2, g1(g.cells()), g2(g.cells()), div(g.cells());
      testutil::random_flux(g, rng, m1, m2);
      gradient_forward(g, phi, g1, g2);
      divergence(g, m1, m2, div);
      double pair = 0.0, scale = 0.0;
      for (std::size_t c = 0; c < g.cells(); ++c) {
        pair += m1[c] * g1[c] + m2[c] * g2[c] + phi[c] * div[c];
        scale += std::abs(m1[c] * g1[c]) + std::abs(m2[c] * g2[c]);
      }
      CHECK(std::abs(pair) <= 1e-12 * (1.0 + scale));
      double const lhs = face_inner(g, m1, m2, g1, g2);
      std::vector<double> phidiv(g.cells());
      for (std::size_t c = 0; c < g.cells(); ++c) phidiv[c] = phi[c] * div[c];
      CHECK(lhs + integrate(phidiv, g) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0 + scale));
    }
  }
}

TEST_CASE("operators are linear")
{
  std::mt19937_64 rng(4);
  Grid const g = make_grid(0, 1, 0, 1, 5, 6, 2, Boundary::Periodic);
  std::size_t const n = g.cells();
  auto const u = random_field(n, rng), v = random_field(n, rng), w = random_field(n, rng), z = random_field(n, rng);
  double const a = 0.37, b = -2.1;
  std::vector<double> comb(n), comb2(n);
  for (std::size_t c = 0; c < n; ++c) {
    comb[c] = a * u[c] + b * v[c];
    comb2[c] = a * w[c] + b * z[c];
  }
  std::vector<double> du(n), dv(n), dc(n), gu1(n), gu2(n), gv1(n), gv2(n), gc1(n), gc2(n);
  divergence(g, u, w, du);
  divergence(g, v, z, dv);
  divergence(g, comb, comb2, dc);
  gradient_forward(g, u, gu1, gu2);
  gradient_forward(g, v, gv1, gv2);
  gradient_forward(g, comb, gc1, gc2);
  for (std::size_t c = 0; c < n; ++c) {
    CHECK(dc[c] == doctest::Approx(a * du[c] + b * dv[c]).epsilon(1e-12));
    CHECK(gc1[c] == doctest::Approx(a * gu1[c] + b * gv1[c]).epsilon(1e-12));
    CHECK(gc2[c] == doctest::Approx(a * gu2[c] + b * gv2[c]).epsilon(1e-12));
  }
}

TEST_CASE("integrate")
{
  Grid const unit = make_grid(0, 1, 0, 1, 8, 8, 2, Boundary::NoFlux);
  Grid const big = make_grid(-1, 1, -1, 1, 8, 8, 2, Boundary::NoFlux);
  std::vector<double> ones(64, 1.0);
  CHECK(integrate(ones, unit) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(ones, big) == doctest::Approx(4.0).epsilon(1e-15));
  std::vector<double> half(64, 0.0);
  for (std::size_t c = 0; c < 32; ++c) half[c] = 1.0;
  CHECK(integrate(half, big) == doctest::Approx(2.0).epsilon(1e-15));

  LevelField f(3, 64, 1.0);
  CHECK(integrate_spacetime(f, unit) == doctest::Approx(3.0 * unit.dt).epsilon(1e-15));
}

TEST_CASE("face_to_cell_average")
{
  Grid const g = make_grid(0, 1, 0, 1, 3, 1 + 1, 2, Boundary::NoFlux);
  std::vector<double> f1 = {2, 4, 9, 6, 8, 9}, f2 = {1, 1, 1, 5, 5, 5}, c1(6), c2(6);
  face_to_cell_average(g, f1, f2, c1, c2);
  // boundary faces (i = 2, j = 1) count as zero
  CHECK(c1[g.index(0, 0)] == 1.0);
  CHECK(c1[g.index(1, 0)] == 3.0);
  CHECK(c1[g.index(2, 0)] == 2.0);
  CHECK(c2[g.index(0, 0)] == 0.5);
  CHECK(c2[g.index(0, 1)] == 0.5);

  Grid const p = make_grid(0, 1, 0, 1, 3, 2, 2, Boundary::Periodic);
  face_to_cell_average(p, f1, f2, c1, c2);
  CHECK(c1[p.index(0, 0)] == 0.5 * (9 + 2));
  CHECK(c2[p.index(0, 0)] == 0.5 * (5 + 1));
}
