#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

enum class Boundary
{
  NoFlux,  // homogeneous Neumann: boundary faces carry zero flux
  Periodic // flat torus: indices wrap
};

struct Point
{
  double x1 = 0.0;
  double x2 = 0.0;
};

/**
 * Uniform space-time grid on [x1_min,x1_max] x [x2_min,x2_max] x [0,1].
 *
 * Scalars (density, value function, features) live at cell centres. The flux
 * components are staggered: m1 on the face to the right of each cell (i+1/2, j)
 * and m2 on the face above it (i, j+1/2), both stored with one entry per cell.
 * Under no-flux the last face in each direction is the boundary and is held
 * at zero; under periodic bc it is the wrap face back to index 0.
 */
struct Grid
{
  double x1_min = 0.0, x1_max = 1.0;
  double x2_min = 0.0, x2_max = 1.0;
  int nx1 = 0, nx2 = 0, nt = 0;
  double dx1 = 0.0, dx2 = 0.0, dt = 0.0;
  Boundary bc = Boundary::NoFlux;

  std::size_t cells() const { return static_cast<std::size_t>(nx1) * static_cast<std::size_t>(nx2); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx1 + i; }
  Point center(int i, int j) const { return {x1_min + (i + 0.5) * dx1, x2_min + (j + 0.5) * dx2}; }
  Point center(std::size_t c) const { return center(static_cast<int>(c % nx1), static_cast<int>(c / nx1)); }
  double cell_area() const { return dx1 * dx2; }
  double area() const { return (x1_max - x1_min) * (x2_max - x2_min); }
  double time(int level) const { return level * dt; }
  // Time level nearest to t (clamped to [0, nt]).
  int level_at(double t) const;

  bool operator==(Grid const &) const = default;
};

Grid make_grid(double x1_min, double x1_max, double x2_min, double x2_max, int nx1, int nx2, int nt, Boundary bc);

// Level-major storage of a cell field over several time levels or slots.
class LevelField
{
public:
  LevelField() = default;
  LevelField(int levels, std::size_t cells, double fill = 0.0)
    : levels_(levels)
    , cells_(cells)
    , data_(static_cast<std::size_t>(levels) * cells, fill)
  {
  }

  int levels() const { return levels_; }
  std::size_t cells() const { return cells_; }

  std::span<double> operator[](int l) { return {data_.data() + static_cast<std::size_t>(l) * cells_, cells_}; }
  std::span<double const> operator[](int l) const { return {data_.data() + static_cast<std::size_t>(l) * cells_, cells_}; }

  // Contiguous levels [first, first + count).
  std::span<double> levels_span(int first, int count)
  {
    return {data_.data() + static_cast<std::size_t>(first) * cells_, static_cast<std::size_t>(count) * cells_};
  }
  std::span<double const> levels_span(int first, int count) const
  {
    return {data_.data() + static_cast<std::size_t>(first) * cells_, static_cast<std::size_t>(count) * cells_};
  }

  std::vector<double> &data() { return data_; }
  std::vector<double> const &data() const { return data_; }

  bool operator==(LevelField const &) const = default;

private:
  int levels_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> data_;
};

// rho on levels 0..nt; level 0 is the initial density.
struct DensityField : LevelField
{
  using LevelField::LevelField;
  explicit DensityField(Grid const &g, double fill = 0.0)
    : LevelField(g.nt + 1, g.cells(), fill)
  {
  }
};

// phi on levels 0..nt; level nt is the terminal cost.
struct ValueField : LevelField
{
  using LevelField::LevelField;
  explicit ValueField(Grid const &g, double fill = 0.0)
    : LevelField(g.nt + 1, g.cells(), fill)
  {
  }
};

// Staggered flux on the nt time intervals.
struct FluxField
{
  LevelField m1;
  LevelField m2;

  FluxField() = default;
  explicit FluxField(Grid const &g)
    : m1(g.nt, g.cells())
    , m2(g.nt, g.cells())
  {
  }
  bool operator==(FluxField const &) const = default;
};

// Forward differences of a cell field, located on the flux faces.
struct FaceField
{
  std::vector<double> g1;
  std::vector<double> g2;
};

// (rho^{l+1} - rho^l) / dt.
std::vector<double> time_diff_forward(LevelField const &rho, Grid const &g, int l);

// Conservative cell-centred divergence of a staggered flux level.
void divergence(Grid const &g, std::span<double const> m1, std::span<double const> m2, std::span<double> out);
std::vector<double> divergence(FluxField const &m, Grid const &g, int l);

// Forward-difference gradient on the flux faces. No-flux boundary faces get 0,
// which makes this the exact negative adjoint of divergence().
void gradient_forward(Grid const &g, std::span<double const> phi, std::span<double> g1, std::span<double> g2);
FaceField gradient_forward(LevelField const &phi, Grid const &g, int l);

// Cell-centred average of the two faces bracketing each cell.
void face_to_cell_average(Grid const &g, std::span<double const> f1, std::span<double const> f2,
                          std::span<double> c1, std::span<double> c2);

// dx1 dx2 weighted sum; fixed left-to-right summation order.
double integrate(std::span<double const> field, Grid const &g);
// dx1 dx2 weighted face inner product sum(m1 g1 + m2 g2).
double face_inner(Grid const &g, std::span<double const> m1, std::span<double const> m2,
                  std::span<double const> g1, std::span<double const> g2);
// dx1 dx2 dt weighted sum over every level of a field.
double integrate_spacetime(LevelField const &f, Grid const &g);

} // namespace mfg
