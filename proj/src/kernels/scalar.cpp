#include "mfg/kernels.hpp"

#include "prox_math.hpp"

#include <algorithm>

namespace mfg::kernels {

using detail::ProxConsts;
using detail::prox_dh;
using detail::prox_h;

ProxResult prox_cell(double b_sq, double rho_prev, double c, ProxParams p)
{
  ProxConsts const k{p.beta * b_sq, p.beta * (p.beta * b_sq), p.tau_m, p.beta, p.tau_rho, 1.0 / p.tau_rho,
                     rho_prev, c};
  double const h0 = prox_h(k, 0.0);
  if (!(h0 > 0.0)) {
    return {0.0, 0.0};
  }
  double hi = rho_prev + p.tau_rho * h0;
  double x, hx;
  double const hp = prox_h(k, rho_prev);
  if (hp > 0.0) {
    x = rho_prev;
    hx = hp;
  } else {
    x = 0.0;
    hx = h0;
    hi = std::min(hi, rho_prev);
  }

  for (int it = 0; it < detail::kProxMaxIter; ++it) {
    double const d = prox_dh(k, x);
    double xn = x - hx / d;
    if (!(xn > x && xn < hi)) {
      xn = 0.5 * (x + hi);
    }
    if (!(xn > x)) break;
    double const hn = prox_h(k, xn);
    if (hn > 0.0) {
      double const step = xn - x;
      x = xn;
      hx = hn;
      if (step <= detail::kProxRelStep * x) break;
    } else if (hn < 0.0) {
      hi = xn;
      if (hi - x <= detail::kProxRelStep * hi) break;
    } else {
      x = xn;
      break;
    }
  }
  double const br = p.beta * x;
  return {x, br / (p.tau_m + br)};
}

void thomas_factor(std::span<double const> diag, double off, std::size_t levels, std::size_t modes,
                   std::span<double> inv, std::span<double> upper)
{
  for (std::size_t m = 0; m < modes; ++m) {
    double const denom = diag[m];
    inv[m] = 1.0 / denom;
    upper[m] = off * inv[m];
  }
  for (std::size_t l = 1; l < levels; ++l) {
    for (std::size_t m = 0; m < modes; ++m) {
      double const denom = diag[l * modes + m] - off * upper[(l - 1) * modes + m];
      inv[l * modes + m] = 1.0 / denom;
      upper[l * modes + m] = off * inv[l * modes + m];
    }
  }
}

namespace {

void prox_scalar(ProxParams p, double const *b_sq, double const *rho_prev, double const *c, double *rho_out,
                 double *scale_out, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) {
    auto const r = prox_cell(b_sq[i], rho_prev[i], c[i], p);
    rho_out[i] = r.rho;
    scale_out[i] = r.scale;
  }
}

double dot_scalar(double const *a, double const *b, std::size_t n)
{
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, double const *x, double *y, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void extrapolate_scalar(double const *cur, double const *prev, double *out, std::size_t n)
{
  for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * cur[i] - prev[i];
}

void tridiag_scalar(double const *inv, double const *upper, double off, double *rhs, std::size_t levels,
                    std::size_t modes)
{
  for (std::size_t m = 0; m < modes; ++m) rhs[m] *= inv[m];
  for (std::size_t l = 1; l < levels; ++l) {
    double *r = rhs + l * modes;
    double const *rp = rhs + (l - 1) * modes;
    double const *iv = inv + l * modes;
    for (std::size_t m = 0; m < modes; ++m) r[m] = (r[m] - off * rp[m]) * iv[m];
  }
  for (std::size_t l = levels - 1; l-- > 0;) {
    double *r = rhs + l * modes;
    double const *rn = rhs + (l + 1) * modes;
    double const *up = upper + l * modes;
    for (std::size_t m = 0; m < modes; ++m) r[m] = r[m] - up[m] * rn[m];
  }
}

} // namespace

KernelTable const &scalar_table()
{
  static KernelTable const table{"scalar", prox_scalar, dot_scalar, axpy_scalar, extrapolate_scalar, tridiag_scalar};
  return table;
}

} // namespace mfg::kernels
