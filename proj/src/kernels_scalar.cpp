#include "tea/kernels.hpp"

#include <cmath>

namespace tea::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(const double* w, const double* x, const double* bias, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = dot_scalar(w + i * cols, x, cols) + (bias ? bias[i] : 0.0);
  }
}

void matvec_t_acc_scalar(const double* w, const double* d, double* out,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    axpy_scalar(d[i], w + i * cols, out, cols);
  }
}

void outer_acc_scalar(double* dw, const double* d, const double* x,
                      std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    axpy_scalar(d[i], x, dw + i * cols, cols);
  }
}

void adam_update_scalar(double* w, double* m, double* v, const double* g, std::size_t n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    w[i] -= lr * (m[i] * bc1) / (std::sqrt(v[i] * bc2) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{
      "scalar",         dot_scalar,       axpy_scalar,
      matvec_scalar,    matvec_t_acc_scalar, outer_acc_scalar,
      adam_update_scalar,
  };
  return ops;
}

}  // namespace tea::kernels
