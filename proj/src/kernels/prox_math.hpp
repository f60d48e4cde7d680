#pragma once

// Shared scalar formulas for the pointwise prox. The AVX2 kernel evaluates the
// same expressions in the same order, lane by lane.

namespace mfg::kernels::detail {

constexpr int kProxMaxIter = 200;
constexpr double kProxRelStep = 1e-15;

struct ProxConsts
{
  double bb;     // beta * b_sq
  double bbb;    // beta * beta * b_sq
  double tm;     // tau_m
  double beta;
  double tr;     // tau_rho
  double inv_tr; // 1 / tau_rho
  double rp;     // rho_prev
  double c;
};

inline double prox_h(ProxConsts const &k, double r)
{
  double const t = k.tm + k.beta * r;
  double const first = k.bb / (2.0 * (t * t));
  double const second = (r - k.rp) / k.tr;
  return (first - second) - k.c;
}

inline double prox_dh(ProxConsts const &k, double r)
{
  double const t = k.tm + k.beta * r;
  double const t3 = (t * t) * t;
  return (0.0 - k.bbb / t3) - k.inv_tr;
}

} // namespace mfg::kernels::detail
