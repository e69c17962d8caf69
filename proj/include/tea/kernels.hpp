#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tea::kernels {

// Dense inner-loop kernels behind the network math. Two lanes: a scalar
// reference implementation and an AVX2/FMA variant, selected once at startup
// from CPUID (override with TEA_KERNELS=scalar|avx2). Lanes agree to ~1e-13
// relative (SIMD reduction reassociates additions); each lane is individually
// deterministic, which is what the reproducibility contract requires.
struct Ops {
  const char* name;

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + bias; W row-major (rows x cols)
  void (*matvec)(const double* w, const double* x, const double* bias, double* y,
                 std::size_t rows, std::size_t cols);
  // out[j] += sum_i W[i][j] * d[i]
  void (*matvec_t_acc)(const double* w, const double* d, double* out,
                       std::size_t rows, std::size_t cols);
  // dW[i][j] += d[i] * x[j]
  void (*outer_acc)(double* dw, const double* d, const double* x,
                    std::size_t rows, std::size_t cols);
  // Adam update with precomputed bias-correction factors bc1 = 1/(1-b1^t),
  // bc2 = 1/(1-b2^t):
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
  //   w -= lr * (m*bc1) / (sqrt(v*bc2) + eps)
  void (*adam_update)(double* w, double* m, double* v, const double* g, std::size_t n,
                      double lr, double beta1, double beta2, double eps,
                      double bc1, double bc2);
};

const Ops& scalar_ops();

bool avx2_supported();       // compiled in and reported by CPUID
const Ops& avx2_ops();       // valid only when avx2_supported()

// Lane picked at first use: TEA_KERNELS env override, else AVX2 when
// available, else scalar.
const Ops& active_ops();
// Force a lane by name ("scalar"/"avx2"); returns false if unavailable.
bool set_active_lane(const std::string& name);

std::vector<std::string> available_lanes();

}  // namespace tea::kernels
