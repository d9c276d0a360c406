#include "kernels_impl.hpp"

#include <cmath>

namespace stlf::kernels::scalar {

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
              std::size_t lda, const double* b, std::size_t ldb, double* c,
              std::size_t ldc) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = c[i * ldc + j];
      for (std::size_t p = 0; p < k; ++p) {
        acc += a[i * lda + p] * b[p * ldb + j];
      }
      c[i * ldc + j] = acc;
    }
  }
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double* c,
                 std::size_t ldc) {
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = c[p * ldc + j];
      for (std::size_t i = 0; i < m; ++i) {
        acc += a[i * lda + p] * b[i * ldb + j];
      }
      c[p * ldc + j] = acc;
    }
  }
}

void col_sum_acc(std::size_t m, std::size_t n, const double* a,
                 std::size_t lda, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = out[j];
    for (std::size_t i = 0; i < m; ++i) acc += a[i * lda + j];
    out[j] = acc;
  }
}

void adam_update(std::size_t n, double* p, const double* g, double* m,
                 double* v, double lr, double b1, double b2, double c1,
                 double c2, double eps) {
  const double one_minus_b1 = 1.0 - b1;
  const double one_minus_b2 = 1.0 - b2;
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + one_minus_b1 * gi;
    v[i] = b2 * v[i] + one_minus_b2 * (gi * gi);
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    p[i] = p[i] - (lr * m_hat) / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace stlf::kernels::scalar
