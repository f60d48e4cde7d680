#pragma once

#include "mfg/basis.hpp"
#include "mfg/elliptic.hpp"
#include "mfg/grid.hpp"
#include "mfg/kernels.hpp"
#include "mfg/problem.hpp"

#include <functional>
#include <vector>

namespace mfg {

struct StepSizes
{
  double tau_rho = 0.5;
  double tau_m = 0.5;
  double tau_a = 0.5;
  double tau_phi_t = 0.5;
  double tau_grad_phi = 0.5;
  double tau_phi0 = 0.5;

  // Throws ConfigError unless every step is positive and finite.
  void validate() const;
  EllipticWeights elliptic() const { return {tau_phi_t, tau_grad_phi, tau_phi0}; }
  bool operator==(StepSizes const &) const = default;
};

struct PdhgState
{
  DensityField rho;
  FluxField m;
  ValueField phi;
  CoefficientPath a;
  ValueField phi_prev;
  CoefficientPath a_prev;
  ValueField phi_bar;
  CoefficientPath a_bar;
  long iteration = 0;
  // Largest relative change of rho, phi, a over the last step.
  double last_change = 0.0;
};

struct Residuals
{
  double continuity = 0.0;
  double a_fixedpoint = 0.0;
  double iterate_change = 0.0;
  double complementarity = 0.0;
};

struct Objective
{
  double value = 0.0;
  // Some cell has rho = 0 with nonzero flux; value is then a large sentinel.
  bool infinite = false;
};

// The pointwise (rho, m) prox of the quadratic Lagrangian. See kernels::prox_cell.
kernels::ProxResult scalar_prox(double b_sq, double rho_prev, double c, double tau_rho, double tau_m, double beta);

// Feasible starting point: rho = rho0, m = 0, a = 0, phi = g on every level.
PdhgState initial_state(ProblemSpec const &spec);

class PdhgSolver
{
public:
  PdhgSolver(ProblemSpec const &spec, StepSizes steps);

  ProblemSpec const &spec() const { return spec_; }
  StepSizes const &steps() const { return steps_; }

  // (rho, m) <- prox using (phi_bar, a_bar).
  void prox_rho_m(PdhgState &s) const;
  // a <- (tau_a K^-1 + I)^-1 (a + tau_a F), F the moments of rho levels 1..nt.
  void prox_a(PdhgState &s) const;
  // phi <- exact minimiser of the discrete Lagrangian plus the H1 prox term.
  void prox_phi(PdhgState &s);
  // Both proxes on the dual side share this: writes phi_bar = 2 phi - phi_prev etc.
  void extrapolate(PdhgState &s) const;
  // One full iteration in the order (rho, m), a, phi, extrapolation.
  void step(PdhgState &s);

  // R^l = (rho^{l+1} - rho^l)/dt + div m^l, l = 0..nt-1.
  LevelField continuity_defect(PdhgState const &s) const;

private:
  ProblemSpec spec_;
  StepSizes steps_;
  Eigen::MatrixXd a_update_; // (tau_a K^-1 + I)^-1
  SpaceTimeEllipticSolver elliptic_;
  // scratch
  std::vector<double> rhs_;
  std::vector<double> delta_;
};

Residuals residuals(PdhgState const &s, ProblemSpec const &spec);

// The discrete saddle-point Lagrangian.
Objective saddle_objective(PdhgState const &s, ProblemSpec const &spec);

struct HistoryRow
{
  long iteration = 0;
  Residuals res;
  Objective objective;
};

struct SolveOptions
{
  long max_iters = 5000;
  double tol = 1e-3;
  long history_stride = 1;
  // Called for every recorded history row.
  std::function<void(HistoryRow const &)> on_history;
};

struct SolveResult
{
  PdhgState state;
  std::vector<HistoryRow> history;
  Residuals final_residuals;
  long iterations = 0;
  bool converged = false;
  // Smallest density value observed after any iteration.
  double min_rho = 0.0;
};

// Iterates PdhgSolver::step until max(continuity, a_fixedpoint) <= tol or
// max_iters. Throws DivergenceError on a non-finite iterate.
SolveResult solve(ProblemSpec const &spec, StepSizes const &steps, SolveOptions const &options);

} // namespace mfg
