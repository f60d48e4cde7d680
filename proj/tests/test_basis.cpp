#include "helpers.hpp"

#include "mfg/basis.hpp"
#include "mfg/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mfg;

namespace {

double gauss_exact(double mu, double s1, double s2, Point x, Point y)
{
  double const a = x.x1 - y.x1, b = x.x2 - y.x2;
  return mu * std::exp(-a * a / (2 * s1 * s1) - b * b / (2 * s2 * s2));
}

// Taylor truncation of the cross term exp(x.y / sigma^2), summed directly.
double gauss_truncated(double mu, double s1, double s2, int n, Point x, Point y)
{
  double const pre = mu * std::exp(-(x.x1 * x.x1 + y.x1 * y.x1) / (2 * s1 * s1) -
                                   (x.x2 * x.x2 + y.x2 * y.x2) / (2 * s2 * s2));
  double const u = x.x1 * y.x1 / (s1 * s1), v = x.x2 * y.x2 / (s2 * s2);
  double sum = 0.0;
  for (int a1 = 0; a1 <= n; ++a1)
    for (int a2 = 0; a1 + a2 <= n; ++a2) sum += std::pow(u, a1) / std::tgamma(a1 + 1.0) * std::pow(v, a2) / std::tgamma(a2 + 1.0);
  return pre * sum;
}

Grid grid8() { return make_grid(-1, 1, -1, 1, 8, 8, 4, Boundary::NoFlux); }

} // namespace

TEST_CASE("linear spread basis")
{
  Grid const g = make_grid(0, 1, 0, 1, 6, 6, 2, Boundary::NoFlux);
  FeatureBasis const b = linear_spread_basis(0.5, 0.5, g);
  REQUIRE(b.size() == 2);
  CHECK(b.gram() == Eigen::MatrixXd::Identity(2, 2));
  for (std::size_t c = 0; c < g.cells(); ++c) {
    CHECK(b.feature(0)[c] == doctest::Approx(g.center(c).x1).epsilon(1e-15));
    CHECK(b.feature(1)[c] == doctest::Approx(g.center(c).x2).epsilon(1e-15));
  }
  FeatureBasis const f = linear_spread_basis(4, 4, g);
  CHECK(kernel_eval(f, Point{1, 1}, Point{1, 1}) == doctest::Approx(16.0).epsilon(1e-14));
  FeatureBasis const u = linear_spread_basis(1, 1, g);
  CHECK(kernel_eval(u, Point{1, 0}, Point{0, 1}) == 0.0);

  FeatureBasis const z = linear_spread_basis(0, 0, g);
  CHECK(z.size() == 2);
  for (double v : z.feature(0)) CHECK(v == 0.0);
  CHECK_THROWS_AS(linear_spread_basis(-0.1, 1, g), ConfigError);
}

TEST_CASE("spread features are sqrt(2 lambda) x")
{
  Grid const g = make_grid(0, 1, 0, 1, 4, 4, 2, Boundary::NoFlux);
  FeatureBasis const b = linear_spread_basis(0.1, 4, g);
  Point const x = g.center(5);
  CHECK(b.feature(0)[5] == doctest::Approx(std::sqrt(0.2) * x.x1).epsilon(1e-14));
  CHECK(b.feature(1)[5] == doctest::Approx(std::sqrt(8.0) * x.x2).epsilon(1e-14));
}

TEST_CASE("gaussian basis: size, origin value and truncated sum")
{
  Grid const g = grid8();
  CHECK(gaussian_feature_count(3) == 10);
  FeatureBasis const b = gaussian_basis(5, 0.5, 0.7, 3, g);
  CHECK(b.size() == 10);
  CHECK(b.gram() == Eigen::MatrixXd::Identity(10, 10));
  for (int n : {0, 1, 4}) CHECK(kernel_eval(gaussian_basis(5, 0.5, 0.7, n, g), Point{0, 0}, Point{0, 0}) == doctest::Approx(5.0).epsilon(1e-14));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    Point const x{u(rng), u(rng)}, y{u(rng), u(rng)};
    CHECK(kernel_eval(b, x, y) == doctest::Approx(gauss_truncated(5, 0.5, 0.7, 3, x, y)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gaussian_basis(0, 0.5, 0.5, 2, g), ConfigError);
  CHECK_THROWS_AS(gaussian_basis(1, -0.5, 0.5, 2, g), ConfigError);
  CHECK_THROWS_AS(gaussian_basis(1, 0.5, 0.5, -1, g), ConfigError);
}

TEST_CASE("gaussian truncation converges to the exact kernel")
{
  Grid const g = grid8();
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1, 1);
  FeatureBasis const b3 = gaussian_basis(5, 0.5, 0.5, 3, g), b6 = gaussian_basis(5, 0.5, 0.5, 6, g);
  FeatureBasis const b30 = gaussian_basis(5, 0.5, 0.5, 30, g);
  double e3 = 0.0, e6 = 0.0, e30 = 0.0;
  for (int i = 0; i < 100; ++i) {
    Point const x{u(rng), u(rng)}, y{u(rng), u(rng)};
    double const k = gauss_exact(5, 0.5, 0.5, x, y);
    e3 = std::max(e3, std::abs(kernel_eval(b3, x, y) - k));
    e6 = std::max(e6, std::abs(kernel_eval(b6, x, y) - k));
    e30 = std::max(e30, std::abs(kernel_eval(b30, x, y) - k));
  }
  CHECK(e6 < e3);
  CHECK(e30 < 1e-6);

  // Sup error over cell pairs does not increase with n.
  double prev = 1e300;
  for (int n = 0; n <= 7; ++n) {
    FeatureBasis const b = gaussian_basis(5, 0.5, 0.5, n, g);
    double e = 0.0;
    for (std::size_t p = 0; p < g.cells(); ++p)
      for (std::size_t q = 0; q < g.cells(); ++q)
        e = std::max(e, std::abs(kernel_eval(b, p, q) - gauss_exact(5, 0.5, 0.5, g.center(p), g.center(q))));
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("subregion basis")
{
  Grid const g = grid8();
  Region const left{"left", [](Point x) { return x.x1 <= 0.0; }};
  Region const right{"right", [](Point x) { return x.x1 > 0.0; }};
  FeatureBasis const b = subregion_basis({{left, gaussian_basis(5, 0.2, 0.2, 3, g)}, {right, gaussian_basis(5, 0.2, 0.2, 3, g)}}, g);
  REQUIRE(b.size() == 20);
  CHECK(b.gram() == Eigen::MatrixXd::Identity(20, 20));
  for (int k = 0; k < 10; ++k) {
    for (std::size_t c = 0; c < g.cells(); ++c) {
      if (g.center(c).x1 > 0) CHECK(b.feature(k)[c] == 0.0);
      else CHECK(b.feature(10 + k)[c] == 0.0);
    }
  }
  for (std::size_t p = 0; p < g.cells(); ++p)
    for (std::size_t q = 0; q < g.cells(); ++q)
      if ((g.center(p).x1 <= 0) != (g.center(q).x1 <= 0)) CHECK(kernel_eval(b, p, q) == 0.0);

  Region const all{"all", [](Point) { return true; }};
  CHECK_THROWS_AS(subregion_basis({{left, linear_spread_basis(1, 1, g)}, {all, linear_spread_basis(1, 1, g)}}, g), ConfigError);
}

TEST_CASE("subregion Gram is block diagonal with the child blocks")
{
  Grid const g = grid8();
  Region const left{"left", [](Point x) { return x.x1 <= 0.0; }};
  Region const right{"right", [](Point x) { return x.x1 > 0.0; }};
  FeatureBasis const b = subregion_basis({{left, constant_basis(1.0, 2.0, g)}, {right, constant_basis(1.0, 3.0, g)}}, g);
  Eigen::MatrixXd expect(2, 2);
  expect << 2, 0, 0, 3;
  CHECK(b.gram() == expect);
  CHECK((b.gram() * b.gram_inv() - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("fourier green basis")
{
  Grid const g = make_grid(0, 1, 0, 1, 8, 8, 2, Boundary::Periodic);
  CHECK(fourier_green_weight(200, 0, 0) == 200.0);
  double const pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(fourier_green_weight(200, 1, 0) == doctest::Approx(400.0 / (1 + 8 * pi2 + 16 * pi2 * pi2)).epsilon(1e-14));
  CHECK(fourier_green_weight(200, 1, 0) == doctest::Approx(0.24413).epsilon(1e-4));
  CHECK(fourier_half_lattice(2).size() == 6u);
  FeatureBasis const b = fourier_green_basis(200, 2, g);
  CHECK(b.size() == 13);
  CHECK(b.gram() == Eigen::MatrixXd::Identity(13, 13));
  CHECK(b.feature(0)[0] == doctest::Approx(std::sqrt(200.0)).epsilon(1e-15));

  // Against the direct mode sum over the full lattice |a1| + |a2| <= 2.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    Point const x{u(rng), u(rng)}, y{u(rng), u(rng)};
    double ref = 0.0;
    for (int a1 = -2; a1 <= 2; ++a1) {
      for (int a2 = -2; a2 <= 2; ++a2) {
        if (std::abs(a1) + std::abs(a2) > 2) continue;
        double const n2 = a1 * a1 + a2 * a2;
        double const w = 200.0 / std::pow(1 + 4 * pi2 * n2, 2);
        ref += w * std::cos(2 * std::numbers::pi * (a1 * (x.x1 - y.x1) + a2 * (x.x2 - y.x2)));
      }
    }
    CHECK(kernel_eval(b, x, y) == doctest::Approx(ref).epsilon(1e-12));
  }
  Grid const nf = make_grid(0, 1, 0, 1, 8, 8, 2, Boundary::NoFlux);
  CHECK_THROWS_AS(fourier_green_basis(200, 2, nf), ConfigError);
}

TEST_CASE("kernel properties: symmetry, PSD Gram, monotone quadratic form")
{
  Grid const g = grid8();
  Grid const p = make_grid(0, 1, 0, 1, 8, 8, 2, Boundary::Periodic);
  Region const left{"left", [](Point x) { return x.x1 <= 0.0; }};
  Region const right{"right", [](Point x) { return x.x1 > 0.0; }};
  std::vector<std::pair<FeatureBasis, Grid>> const bases = {
    {linear_spread_basis(0.1, 4, g), g},
    {gaussian_basis(5, 0.2, 0.5, 3, g), g},
    {subregion_basis({{left, gaussian_basis(5, 0.2, 0.2, 2, g)}, {right, gaussian_basis(5, 0.2, 0.2, 2, g)}}, g), g},
    {fourier_green_basis(200, 2, p), p},
    {constant_basis(1.0, 2.0, g), g},
  };
  std::mt19937_64 rng(13);
  for (auto const &[b, grid] : bases) {
    int const r = b.size();
    Eigen::MatrixXd G(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < grid.cells(); ++c) s += b.feature(i)[c] * b.feature(j)[c];
        G(i, j) = s * grid.cell_area();
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK((b.gram() * b.gram_inv() - Eigen::MatrixXd::Identity(r, r)).norm() <= 1e-10);

    for (int t = 0; t < 20; ++t) {
      std::size_t const x = rng() % grid.cells(), y = rng() % grid.cells();
      CHECK(std::abs(kernel_eval(b, x, y) - kernel_eval(b, y, x)) <= 1e-12);
      CHECK(kernel_eval(b, x, x) >= 0.0);
    }
    for (int t = 0; t < 5; ++t) {
      auto d = testutil::random_field(grid.cells(), rng);
      double mean = 0.0;
      for (double v : d) mean += v;
      mean /= d.size();
      for (double &v : d) v -= mean;
      double q = 0.0;
      for (std::size_t x = 0; x < grid.cells(); ++x)
        for (std::size_t y = 0; y < grid.cells(); ++y) q += kernel_eval(b, x, y) * d[x] * d[y];
      CHECK(q >= -1e-10);
    }
  }
}

TEST_CASE("interaction_field")
{
  Grid const g = grid8();
  FeatureBasis const b = gaussian_basis(1, 0.5, 0.5, 1, g); // r = 3
  CoefficientPath zero = CoefficientPath::Zero(3, 4);
  LevelField const fz = interaction_field(zero, b);
  for (double v : fz.data()) CHECK(v == 0.0);

  FeatureBasis const c = constant_basis(2.5, 1.0, g);
  CoefficientPath one = CoefficientPath::Ones(1, 4);
  LevelField const fc = interaction_field(one, c);
  for (double v : fc.data()) CHECK(v == 2.5);

  std::mt19937_64 rng(14);
  CoefficientPath a = CoefficientPath::Random(3, 4);
  LevelField const f = interaction_field(a, b);
  for (int l = 0; l < 4; ++l)
    for (std::size_t x = 0; x < g.cells(); ++x) {
      double ref = 0.0;
      for (int k = 0; k < 3; ++k) ref += a(k, l) * b.feature(k)[x];
      CHECK(f[l][x] == doctest::Approx(ref).epsilon(1e-14));
    }
  CHECK_THROWS_AS(interaction_field(CoefficientPath::Zero(2, 4), b), ConfigError);
}

TEST_CASE("moments")
{
  Grid const g = make_grid(0, 1, 0, 1, 10, 10, 3, Boundary::NoFlux);
  LevelField rho(4, g.cells(), 1.0);
  FeatureBasis const lin = linear_spread_basis(0.5, 0.5, g);
  Eigen::MatrixXd const F = moments(rho, lin, g);
  for (int l = 0; l < 4; ++l) CHECK(F(0, l) == doctest::Approx(0.5).epsilon(1e-14));

  FeatureBasis const c = constant_basis(1.0, 1.0, g);
  std::mt19937_64 rng(15);
  auto r = testutil::random_field(g.cells(), rng, 0, 1);
  double m = 0.0;
  for (double v : r) m += v * g.cell_area();
  for (double &v : r) v /= m;
  LevelField one(1, g.cells());
  std::copy(r.begin(), r.end(), one[0].begin());
  CHECK(moments(one, c, g)(0, 0) == doctest::Approx(1.0).epsilon(1e-13));

  LevelField spike(1, g.cells(), 0.0);
  spike[0][37] = 1.0 / g.cell_area();
  Eigen::MatrixXd const S = moments(spike, lin, g);
  CHECK(S(0, 0) == doctest::Approx(lin.feature(0)[37]).epsilon(1e-14));
  CHECK(S(1, 0) == doctest::Approx(lin.feature(1)[37]).epsilon(1e-14));
}

TEST_CASE("scaled basis multiplies the kernel by the square of the factor")
{
  Grid const g = grid8();
  FeatureBasis const b = gaussian_basis(2, 0.4, 0.6, 2, g);
  FeatureBasis const s = b.scaled(std::sqrt(10.0));
  std::mt19937_64 rng(16);
  for (int t = 0; t < 20; ++t) {
    std::size_t const x = rng() % g.cells(), y = rng() % g.cells();
    CHECK(kernel_eval(s, x, y) == doctest::Approx(10.0 * kernel_eval(b, x, y)).epsilon(1e-13));
  }
}
