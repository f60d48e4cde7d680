#include "mfg/pdhg.hpp"

#include "mfg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfg {

namespace {

constexpr double kInfiniteSentinel = 1e300;

double rel_change(std::span<double const> now, std::span<double const> before)
{
  double num = 0.0, a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < now.size(); ++i) {
    double const d = now[i] - before[i];
    num += d * d;
    a += now[i] * now[i];
    b += before[i] * before[i];
  }
  if (num == 0.0) return 0.0;
  return std::sqrt(num / std::max({a, b, std::numeric_limits<double>::min()}));
}

std::span<double const> span_of(Eigen::MatrixXd const &m)
{
  return {m.data(), static_cast<std::size_t>(m.size())};
}

bool all_finite(std::span<double const> v)
{
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Moments of rho levels 1..nt, one column per interval.
Eigen::MatrixXd interval_moments(LevelField const &rho, ProblemSpec const &spec)
{
  Eigen::MatrixXd const F = moments(rho, spec.basis, spec.grid);
  return F.rightCols(spec.grid.nt);
}

double a_fixedpoint(CoefficientPath const &a, LevelField const &rho, ProblemSpec const &spec)
{
  if (spec.basis.size() == 0) return 0.0;
  Eigen::MatrixXd const KF = spec.basis.gram() * interval_moments(rho, spec);
  double const diff = std::sqrt(spec.grid.dt * (a - KF).squaredNorm());
  double const ref = std::sqrt(spec.grid.dt * KF.squaredNorm());
  return diff / std::max(1.0, ref);
}

} // namespace

void StepSizes::validate() const
{
  for (double t : {tau_rho, tau_m, tau_a, tau_phi_t, tau_grad_phi, tau_phi0}) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("step sizes must be positive and finite");
  }
}

kernels::ProxResult scalar_prox(double b_sq, double rho_prev, double c, double tau_rho, double tau_m, double beta)
{
  return kernels::prox_cell(b_sq, rho_prev, c, {tau_rho, tau_m, beta});
}

PdhgState initial_state(ProblemSpec const &spec)
{
  Grid const &g = spec.grid;
  int const r = spec.basis.size();
  PdhgState s;
  s.rho = DensityField(g);
  s.phi = ValueField(g);
  for (int l = 0; l <= g.nt; ++l) {
    std::copy(spec.rho0.begin(), spec.rho0.end(), s.rho[l].begin());
    std::copy(spec.g.begin(), spec.g.end(), s.phi[l].begin());
  }
  s.m = FluxField(g);
  s.a = CoefficientPath::Zero(r, g.nt);
  s.phi_prev = s.phi;
  s.phi_bar = s.phi;
  s.a_prev = s.a;
  s.a_bar = s.a;
  return s;
}

PdhgSolver::PdhgSolver(ProblemSpec const &spec, StepSizes steps)
  : spec_(spec)
  , steps_(steps)
  , elliptic_((steps.validate(), spec.validate(), spec.grid), steps.elliptic())
{
  int const r = spec_.basis.size();
  if (r > 0) {
    Eigen::MatrixXd const M = steps_.tau_a * spec_.basis.gram_inv() + Eigen::MatrixXd::Identity(r, r);
    a_update_ = M.inverse();
  }
  std::size_t const n = static_cast<std::size_t>(spec_.grid.nt) * spec_.grid.cells();
  rhs_.resize(n);
  delta_.resize(n);
}

void PdhgSolver::prox_rho_m(PdhgState &s) const
{
  Grid const &g = spec_.grid;
  std::size_t const n = g.cells();
  bool const periodic = g.bc == Boundary::Periodic;
  double const tm = steps_.tau_m;
  kernels::ProxParams const p{steps_.tau_rho, tm, spec_.beta};

  std::vector<double> g1(n), g2(n), w1(n), w2(n), c1(n), c2(n), b_sq(n), c(n), rho_new(n), scale(n);
  for (int l = 0; l < g.nt; ++l) {
    gradient_forward(g, s.phi_bar[l], g1, g2);
    auto m1 = s.m.m1[l];
    auto m2 = s.m.m2[l];
    for (std::size_t k = 0; k < n; ++k) {
      w1[k] = m1[k] - tm * g1[k];
      w2[k] = m2[k] - tm * g2[k];
    }
    face_to_cell_average(g, w1, w2, c1, c2);
    for (std::size_t k = 0; k < n; ++k) b_sq[k] = c1[k] * c1[k] + c2[k] * c2[k];

    auto const q = spec_.Q[l];
    auto const pb0 = s.phi_bar[l];
    auto const pb1 = s.phi_bar[l + 1];
    for (std::size_t k = 0; k < n; ++k) c[k] = q[k] + (pb1[k] - pb0[k]) / g.dt;
    if (spec_.basis.size() > 0) add_interaction(s.a_bar, l, spec_.basis, c);

    kernels::prox(p, b_sq, s.rho[l + 1], c, rho_new, scale);
    std::copy(rho_new.begin(), rho_new.end(), s.rho[l + 1].begin());

    for (int j = 0; j < g.nx2; ++j) {
      for (int i = 0; i < g.nx1; ++i) {
        std::size_t const k = g.index(i, j);
        bool const last1 = i == g.nx1 - 1, last2 = j == g.nx2 - 1;
        if (!periodic && last1) {
          m1[k] = 0.0;
        } else {
          std::size_t const right = g.index(last1 ? 0 : i + 1, j);
          m1[k] = 0.5 * (scale[k] + scale[right]) * w1[k];
        }
        if (!periodic && last2) {
          m2[k] = 0.0;
        } else {
          std::size_t const up = g.index(i, last2 ? 0 : j + 1);
          m2[k] = 0.5 * (scale[k] + scale[up]) * w2[k];
        }
      }
    }
  }
}

void PdhgSolver::prox_a(PdhgState &s) const
{
  if (spec_.basis.size() == 0) return;
  Eigen::MatrixXd const F = interval_moments(s.rho, spec_);
  s.a_prev = s.a;
  s.a = a_update_ * (s.a + steps_.tau_a * F);
}

LevelField PdhgSolver::continuity_defect(PdhgState const &s) const
{
  Grid const &g = spec_.grid;
  std::size_t const n = g.cells();
  LevelField R(g.nt, n);
  std::vector<double> div(n);
  for (int l = 0; l < g.nt; ++l) {
    divergence(g, s.m.m1[l], s.m.m2[l], div);
    auto const r0 = s.rho[l];
    auto const r1 = s.rho[l + 1];
    auto out = R[l];
    for (std::size_t k = 0; k < n; ++k) out[k] = (r1[k] - r0[k]) / g.dt + div[k];
  }
  return R;
}

void PdhgSolver::prox_phi(PdhgState &s)
{
  Grid const &g = spec_.grid;
  LevelField const R = continuity_defect(s);
  std::copy(R.data().begin(), R.data().end(), rhs_.begin());
  elliptic_.solve(rhs_, delta_);
  s.phi_prev = s.phi;
  auto body = s.phi.levels_span(0, g.nt);
  for (std::size_t k = 0; k < body.size(); ++k) body[k] += delta_[k];
  std::copy(spec_.g.begin(), spec_.g.end(), s.phi[g.nt].begin());
}

void PdhgSolver::extrapolate(PdhgState &s) const
{
  kernels::extrapolate(s.phi.data(), s.phi_prev.data(), s.phi_bar.data());
  if (spec_.basis.size() > 0) {
    s.a_bar.resize(s.a.rows(), s.a.cols());
    kernels::extrapolate(span_of(s.a), span_of(s.a_prev),
                         {s.a_bar.data(), static_cast<std::size_t>(s.a_bar.size())});
  }
}

void PdhgSolver::step(PdhgState &s)
{
  std::vector<double> const rho_old = s.rho.data();
  prox_rho_m(s);
  prox_a(s);
  prox_phi(s);
  extrapolate(s);
  if (spec_.basis.size() == 0) s.a_prev = s.a;
  s.last_change = std::max({rel_change(s.rho.data(), rho_old), rel_change(s.phi.data(), s.phi_prev.data()),
                            rel_change(span_of(s.a), span_of(s.a_prev))});
  ++s.iteration;
}

Residuals residuals(PdhgState const &s, ProblemSpec const &spec)
{
  Grid const &g = spec.grid;
  std::size_t const n = g.cells();
  Residuals out;

  double cont = 0.0;
  double comp = 0.0;
  std::vector<double> div(n), g1(n), g2(n), c1(n), c2(n), inter(n);
  for (int l = 0; l < g.nt; ++l) {
    divergence(g, s.m.m1[l], s.m.m2[l], div);
    gradient_forward(g, s.phi[l], g1, g2);
    face_to_cell_average(g, g1, g2, c1, c2);
    std::fill(inter.begin(), inter.end(), 0.0);
    if (spec.basis.size() > 0) add_interaction(s.a, l, spec.basis, inter);
    auto const r0 = s.rho[l];
    auto const r1 = s.rho[l + 1];
    auto const p0 = s.phi[l];
    auto const p1 = s.phi[l + 1];
    auto const q = spec.Q[l];
    for (std::size_t k = 0; k < n; ++k) {
      double const R = (r1[k] - r0[k]) / g.dt + div[k];
      cont += R * R;
      double const hjb = -(p1[k] - p0[k]) / g.dt + 0.5 * spec.beta * (c1[k] * c1[k] + c2[k] * c2[k]) - q[k] - inter[k];
      comp += r1[k] * std::abs(hjb);
    }
  }
  double const w = g.cell_area() * g.dt;
  out.continuity = std::sqrt(cont * w);
  out.complementarity = comp * w;
  out.a_fixedpoint = a_fixedpoint(s.a, s.rho, spec);
  out.iterate_change = s.last_change;
  return out;
}

Objective saddle_objective(PdhgState const &s, ProblemSpec const &spec)
{
  Grid const &g = spec.grid;
  std::size_t const n = g.cells();
  double const w = g.cell_area() * g.dt;
  Objective out;

  double coef = 0.0;
  if (spec.basis.size() > 0) {
    for (int l = 0; l < g.nt; ++l) {
      Eigen::VectorXd const al = s.a.col(l);
      coef += al.dot(spec.basis.gram_inv() * al);
    }
  }
  double total = 0.5 * g.dt * coef;

  double init = 0.0;
  for (std::size_t k = 0; k < n; ++k) init += s.phi[0][k] * spec.rho0[k];
  total -= g.cell_area() * init;

  double pair = 0.0, running = 0.0;
  std::vector<double> g1(n), g2(n), c1(n), c2(n), inter(n);
  for (int l = 0; l < g.nt; ++l) {
    gradient_forward(g, s.phi[l], g1, g2);
    face_to_cell_average(g, s.m.m1[l], s.m.m2[l], c1, c2);
    std::fill(inter.begin(), inter.end(), 0.0);
    if (spec.basis.size() > 0) add_interaction(s.a, l, spec.basis, inter);
    auto const r1 = s.rho[l + 1];
    auto const p0 = s.phi[l];
    auto const p1 = s.phi[l + 1];
    auto const m1 = s.m.m1[l];
    auto const m2 = s.m.m2[l];
    auto const q = spec.Q[l];
    for (std::size_t k = 0; k < n; ++k) {
      pair += r1[k] * (p1[k] - p0[k]) / g.dt + m1[k] * g1[k] + m2[k] * g2[k];
      double const msq = c1[k] * c1[k] + c2[k] * c2[k];
      double kinetic = 0.0;
      if (r1[k] > 0.0) {
        kinetic = msq / (2.0 * spec.beta * r1[k]);
      } else if (msq > 0.0) {
        out.infinite = true;
      }
      running += r1[k] * q[k] + kinetic + r1[k] * inter[k];
    }
  }
  total -= w * (pair + running);
  out.value = out.infinite ? -kInfiniteSentinel : total;
  return out;
}

SolveResult solve(ProblemSpec const &spec, StepSizes const &steps, SolveOptions const &options)
{
  if (options.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(options.tol > 0.0)) throw ConfigError("tol must be > 0");
  long const stride = std::max(1L, options.history_stride);

  PdhgSolver solver(spec, steps);
  SolveResult out;
  out.state = initial_state(spec);
  PdhgState &s = out.state;
  out.min_rho = *std::min_element(s.rho.data().begin(), s.rho.data().end());

  for (long it = 1; it <= options.max_iters; ++it) {
    solver.step(s);
    if (!all_finite(s.rho.data())) throw DivergenceError("non-finite rho at iteration " + std::to_string(it), "rho", it);
    if (!all_finite(s.m.m1.data()) || !all_finite(s.m.m2.data()))
      throw DivergenceError("non-finite m at iteration " + std::to_string(it), "m", it);
    if (!all_finite(s.phi.data())) throw DivergenceError("non-finite phi at iteration " + std::to_string(it), "phi", it);
    if (!all_finite(span_of(s.a))) throw DivergenceError("non-finite a at iteration " + std::to_string(it), "a", it);
    out.min_rho = std::min(out.min_rho, *std::min_element(s.rho.data().begin(), s.rho.data().end()));

    Residuals const res = residuals(s, spec);
    out.iterations = it;
    out.final_residuals = res;
    out.converged = std::max(res.continuity, res.a_fixedpoint) <= options.tol;
    if (it % stride == 0 || out.converged || it == options.max_iters) {
      HistoryRow row{it, res, saddle_objective(s, spec)};
      out.history.push_back(row);
      if (options.on_history) options.on_history(row);
    }
    if (out.converged) break;
  }
  return out;
}

} // namespace mfg
