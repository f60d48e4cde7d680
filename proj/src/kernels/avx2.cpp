// Built with -mavx2; only reached through avx2_table() after a CPU check.

#include "mfg/kernels.hpp"

#include "prox_math.hpp"

#include <immintrin.h>

namespace mfg::kernels::avx2 {

namespace {

struct Lanes
{
  __m256d bb, bbb, tm, beta, tr, inv_tr, rp, c;
};

inline __m256d h(Lanes const &k, __m256d r)
{
  __m256d const t = _mm256_add_pd(k.tm, _mm256_mul_pd(k.beta, r));
  __m256d const first = _mm256_div_pd(k.bb, _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_mul_pd(t, t)));
  __m256d const second = _mm256_div_pd(_mm256_sub_pd(r, k.rp), k.tr);
  return _mm256_sub_pd(_mm256_sub_pd(first, second), k.c);
}

inline __m256d dh(Lanes const &k, __m256d r)
{
  __m256d const t = _mm256_add_pd(k.tm, _mm256_mul_pd(k.beta, r));
  __m256d const t3 = _mm256_mul_pd(_mm256_mul_pd(t, t), t);
  return _mm256_sub_pd(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_div_pd(k.bbb, t3)), k.inv_tr);
}

inline __m256d gt(__m256d a, __m256d b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
inline __m256d lt(__m256d a, __m256d b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
inline __m256d le(__m256d a, __m256d b) { return _mm256_cmp_pd(a, b, _CMP_LE_OQ); }
inline __m256d sel(__m256d mask, __m256d yes, __m256d no) { return _mm256_blendv_pd(no, yes, mask); }

void prox4(ProxParams p, double const *b_sq, double const *rho_prev, double const *c, double *rho_out,
           double *scale_out)
{
  __m256d const zero = _mm256_setzero_pd();
  __m256d const half = _mm256_set1_pd(0.5);
  __m256d const rel = _mm256_set1_pd(detail::kProxRelStep);
  __m256d const beta = _mm256_set1_pd(p.beta);
  __m256d const b = _mm256_loadu_pd(b_sq);
  __m256d const bb = _mm256_mul_pd(beta, b);
  Lanes const k{bb,
                _mm256_mul_pd(beta, bb),
                _mm256_set1_pd(p.tau_m),
                beta,
                _mm256_set1_pd(p.tau_rho),
                _mm256_set1_pd(1.0 / p.tau_rho),
                _mm256_loadu_pd(rho_prev),
                _mm256_loadu_pd(c)};

  __m256d const h0 = h(k, zero);
  __m256d const positive = gt(h0, zero);
  __m256d hi = _mm256_add_pd(k.rp, _mm256_mul_pd(k.tr, h0));
  __m256d const hp = h(k, k.rp);
  __m256d const start_at_prev = gt(hp, zero);
  __m256d x = sel(start_at_prev, k.rp, zero);
  __m256d hx = sel(start_at_prev, hp, h0);
  hi = sel(start_at_prev, hi, _mm256_min_pd(k.rp, hi));

  __m256d active = positive;
  for (int it = 0; it < detail::kProxMaxIter && _mm256_movemask_pd(active) != 0; ++it) {
    __m256d xn = _mm256_sub_pd(x, _mm256_div_pd(hx, dh(k, x)));
    __m256d const inside = _mm256_and_pd(gt(xn, x), lt(xn, hi));
    xn = sel(inside, xn, _mm256_mul_pd(half, _mm256_add_pd(x, hi)));
    active = _mm256_andnot_pd(_mm256_cmp_pd(xn, x, _CMP_NGT_UQ), active);

    __m256d const hn = h(k, xn);
    __m256d const a_gt = _mm256_and_pd(active, gt(hn, zero));
    __m256d const a_lt = _mm256_and_pd(active, lt(hn, zero));
    __m256d const a_eq = _mm256_andnot_pd(_mm256_or_pd(a_gt, a_lt), active);

    __m256d const step = _mm256_sub_pd(xn, x);
    x = sel(_mm256_or_pd(a_gt, a_eq), xn, x);
    hx = sel(a_gt, hn, hx);
    hi = sel(a_lt, xn, hi);
    __m256d const done_gt = _mm256_and_pd(a_gt, le(step, _mm256_mul_pd(rel, x)));
    __m256d const done_lt = _mm256_and_pd(a_lt, le(_mm256_sub_pd(hi, x), _mm256_mul_pd(rel, hi)));
    active = _mm256_andnot_pd(_mm256_or_pd(_mm256_or_pd(done_gt, done_lt), a_eq), active);
  }

  __m256d const rho = sel(positive, x, zero);
  __m256d const br = _mm256_mul_pd(beta, rho);
  _mm256_storeu_pd(rho_out, rho);
  _mm256_storeu_pd(scale_out, _mm256_div_pd(br, _mm256_add_pd(k.tm, br)));
}

void prox_avx2(ProxParams p, double const *b_sq, double const *rho_prev, double const *c, double *rho_out,
               double *scale_out, std::size_t n)
{
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) prox4(p, b_sq + i, rho_prev + i, c + i, rho_out + i, scale_out + i);
  for (; i < n; ++i) {
    auto const r = prox_cell(b_sq[i], rho_prev[i], c[i], p);
    rho_out[i] = r.rho;
    scale_out[i] = r.scale;
  }
}

double dot_avx2(double const *a, double const *b, std::size_t n)
{
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) + tail;
}

void axpy_avx2(double alpha, double const *x, double *y, std::size_t n)
{
  __m256d const al = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d const v = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(al, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void extrapolate_avx2(double const *cur, double const *prev, double *out, std::size_t n)
{
  __m256d const two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d const v = _mm256_sub_pd(_mm256_mul_pd(two, _mm256_loadu_pd(cur + i)), _mm256_loadu_pd(prev + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] = 2.0 * cur[i] - prev[i];
}

void tridiag_avx2(double const *inv, double const *upper, double off, double *rhs, std::size_t levels,
                  std::size_t modes)
{
  __m256d const o = _mm256_set1_pd(off);
  std::size_t const vec_end = modes - modes % 4;
  for (std::size_t m = 0; m < vec_end; m += 4) {
    _mm256_storeu_pd(rhs + m, _mm256_mul_pd(_mm256_loadu_pd(rhs + m), _mm256_loadu_pd(inv + m)));
  }
  for (std::size_t m = vec_end; m < modes; ++m) rhs[m] *= inv[m];

  for (std::size_t l = 1; l < levels; ++l) {
    double *r = rhs + l * modes;
    double const *rp = rhs + (l - 1) * modes;
    double const *iv = inv + l * modes;
    for (std::size_t m = 0; m < vec_end; m += 4) {
      __m256d const v = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(r + m), _mm256_mul_pd(o, _mm256_loadu_pd(rp + m))),
                                      _mm256_loadu_pd(iv + m));
      _mm256_storeu_pd(r + m, v);
    }
    for (std::size_t m = vec_end; m < modes; ++m) r[m] = (r[m] - off * rp[m]) * iv[m];
  }
  for (std::size_t l = levels - 1; l-- > 0;) {
    double *r = rhs + l * modes;
    double const *rn = rhs + (l + 1) * modes;
    double const *up = upper + l * modes;
    for (std::size_t m = 0; m < vec_end; m += 4) {
      __m256d const v =
        _mm256_sub_pd(_mm256_loadu_pd(r + m), _mm256_mul_pd(_mm256_loadu_pd(up + m), _mm256_loadu_pd(rn + m)));
      _mm256_storeu_pd(r + m, v);
    }
    for (std::size_t m = vec_end; m < modes; ++m) r[m] = r[m] - up[m] * rn[m];
  }
}

} // namespace

KernelTable const &table()
{
  static KernelTable const t{"avx2", prox_avx2, dot_avx2, axpy_avx2, extrapolate_avx2, tridiag_avx2};
  return t;
}

} // namespace mfg::kernels::avx2
