// AVX2/FMA lane. Compiled with -mavx2 -mfma on x86 builds only; callers must
// check avx2_supported() before dispatching here. Reduction order is fixed
// (four independent accumulators combined pairwise), so results are
// deterministic run-to-run within this lane.

#include "tea/kernels.hpp"

#ifdef TEA_KERNELS_AVX2_BUILD

#include <immintrin.h>

#include <cmath>

namespace tea::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);                    // [v0+v2, v1+v3]
  __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));           // (v0+v2) + (v1+v3)
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3));
  double sum = hsum(acc);
  for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

void matvec_avx2(const double* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = dot_avx2(w + i * cols, x, cols) + (bias ? bias[i] : 0.0);
  }
}

void matvec_t_acc_avx2(const double* w, const double* d, double* out,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    axpy_avx2(d[i], w + i * cols, out, cols);
  }
}

void outer_acc_avx2(double* dw, const double* d, const double* x,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    axpy_avx2(d[i], x, dw + i * cols, cols);
  }
}

void adam_update_avx2(double* w, double* m, double* v, const double* g, std::size_t n,
                      double lr, double beta1, double beta2, double eps,
                      double bc1, double bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vomb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_fmadd_pd(vb1, mi, _mm256_mul_pd(vomb1, gi));
    vi = _mm256_fmadd_pd(vb2, vi, _mm256_mul_pd(vomb2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d num = _mm256_mul_pd(vlr, _mm256_mul_pd(mi, vbc1));
    const __m256d den = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vbc2)), veps);
    const __m256d wi = _mm256_sub_pd(_mm256_loadu_pd(w + i), _mm256_div_pd(num, den));
    _mm256_storeu_pd(w + i, wi);
  }
  for (; i < n; ++i) {
    m[i] = std::fma(beta1, m[i], (1.0 - beta1) * g[i]);
    v[i] = std::fma(beta2, v[i], (1.0 - beta2) * (g[i] * g[i]));
    w[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
  }
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{
      "avx2",        dot_avx2,          axpy_avx2,
      matvec_avx2,   matvec_t_acc_avx2, outer_acc_avx2,
      adam_update_avx2,
  };
  return ops;
}

}  // namespace tea::kernels

#else  // !TEA_KERNELS_AVX2_BUILD

namespace tea::kernels {
// Non-x86 build: keep the symbol so the dispatcher links; never selected
// because avx2_supported() reports false.
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace tea::kernels

#endif
