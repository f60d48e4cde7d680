#pragma once

// Data-parallel inner loops of the solver. Each kernel has a scalar reference
// implementation and, on x86-64 hosts with AVX2, a vectorised variant. The
// variant in use is picked once at first call from the CPU feature bits; the
// environment variable MFG_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>

namespace mfg::kernels {

struct ProxParams
{
  double tau_rho = 0.5;
  double tau_m = 0.5;
  double beta = 1.0;
};

struct ProxResult
{
  double rho = 0.0;
  double scale = 0.0;
};

// Pointwise (rho, m) proximal step for the quadratic Lagrangian |v|^2/(2 beta) + Q.
//
// With gamma(r) = beta b_sq / (2 (tau_m + beta r)^2) - (r - rho_prev) / tau_rho,
// returns the unique r >= 0 with gamma(r) = c when gamma(0) > c and r = 0
// otherwise, together with scale = beta r / (tau_m + beta r) (the factor that
// maps m^k - tau_m grad(phibar) to the new flux).
//
// gamma - c is convex and strictly decreasing on r >= 0, so Newton started at a
// point where it is positive climbs monotonically to the root; the bracket
// [lo, hi] with hi = rho_prev + tau_rho (gamma(0) - c) catches round-off.
ProxResult prox_cell(double b_sq, double rho_prev, double c, ProxParams p);

struct KernelTable
{
  char const *name;
  void (*prox)(ProxParams p, double const *b_sq, double const *rho_prev, double const *c, double *rho_out,
               double *scale_out, std::size_t n);
  double (*dot)(double const *a, double const *b, std::size_t n);
  // y += alpha x
  void (*axpy)(double alpha, double const *x, double *y, std::size_t n);
  // out = 2 cur - prev
  void (*extrapolate)(double const *cur, double const *prev, double *out, std::size_t n);
  // Batched symmetric tridiagonal solve with precomputed Thomas factors.
  // rhs is levels x modes (mode fastest); solved in place. inv and upper are
  // the factorisation from thomas_factor(), off is the constant off-diagonal.
  void (*tridiag)(double const *inv, double const *upper, double off, double *rhs, std::size_t levels,
                  std::size_t modes);
};

KernelTable const &scalar_table();
// nullptr when the binary was built without AVX2 support or the CPU lacks it.
KernelTable const *avx2_table();
KernelTable const &active();

// Thomas factorisation of a symmetric tridiagonal matrix per mode, with
// diagonal diag (levels x modes) and constant off-diagonal off.
void thomas_factor(std::span<double const> diag, double off, std::size_t levels, std::size_t modes,
                   std::span<double> inv, std::span<double> upper);

inline void prox(ProxParams p, std::span<double const> b_sq, std::span<double const> rho_prev,
                 std::span<double const> c, std::span<double> rho_out, std::span<double> scale_out)
{
  active().prox(p, b_sq.data(), rho_prev.data(), c.data(), rho_out.data(), scale_out.data(), b_sq.size());
}

inline double dot(std::span<double const> a, std::span<double const> b)
{
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<double const> x, std::span<double> y)
{
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void extrapolate(std::span<double const> cur, std::span<double const> prev, std::span<double> out)
{
  active().extrapolate(cur.data(), prev.data(), out.data(), cur.size());
}

} // namespace mfg::kernels
