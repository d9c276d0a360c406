#pragma once

// Dense arithmetic kernels behind every layer and the optimizer.
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant chosen at runtime. The SIMD variants vectorize across independent
// output elements only; the order in which terms are added into any single
// output element is the same as in the scalar loop, and no fused
// multiply-add is used. Both paths therefore produce bit-identical results,
// which the equivalence tests assert.
//
// Matrices are row-major with an explicit leading dimension (row stride).

#include <cstddef>
#include <string_view>

namespace stlf::kernels {

enum class Backend { scalar, avx2 };

struct KernelTable {
  // C[MxN] += A[MxK] * B[KxN]
  void (*gemm_acc)(std::size_t m, std::size_t n, std::size_t k,
                   const double* a, std::size_t lda, const double* b,
                   std::size_t ldb, double* c, std::size_t ldc);
  // C[KxN] += A[MxK]^T * B[MxN]; terms are added in row order of A and B.
  void (*gemm_tn_acc)(std::size_t m, std::size_t n, std::size_t k,
                      const double* a, std::size_t lda, const double* b,
                      std::size_t ldb, double* c, std::size_t ldc);
  // out[j] += sum_i a[i*lda + j], rows added in order.
  void (*col_sum_acc)(std::size_t m, std::size_t n, const double* a,
                      std::size_t lda, double* out);
  // One Adam update with bias-correction factors precomputed by the caller:
  //   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g
  //   p -= lr * (m / c1) / (sqrt(v / c2) + eps)
  void (*adam_update)(std::size_t n, double* p, const double* g, double* m,
                      double* v, double lr, double b1, double b2, double c1,
                      double c2, double eps);
};

const KernelTable& scalar_table();

// Null when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table();

// Active table. The first call picks AVX2 if available unless the
// STLF_KERNELS environment variable is set to "scalar".
const KernelTable& active();
Backend active_backend();
std::string_view backend_name(Backend b);

// Returns false (and changes nothing) if the backend is unavailable.
bool set_backend(Backend b);

inline void gemm_acc(std::size_t m, std::size_t n, std::size_t k,
                     const double* a, std::size_t lda, const double* b,
                     std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm_acc(m, n, k, a, lda, b, ldb, c, ldc);
}

inline void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k,
                        const double* a, std::size_t lda, const double* b,
                        std::size_t ldb, double* c, std::size_t ldc) {
  active().gemm_tn_acc(m, n, k, a, lda, b, ldb, c, ldc);
}

inline void col_sum_acc(std::size_t m, std::size_t n, const double* a,
                        std::size_t lda, double* out) {
  active().col_sum_acc(m, n, a, lda, out);
}

inline void adam_update(std::size_t n, double* p, const double* g, double* m,
                        double* v, double lr, double b1, double b2, double c1,
                        double c2, double eps) {
  active().adam_update(n, p, g, m, v, lr, b1, b2, c1, c2, eps);
}

// dst[cols x rows] = src[rows x cols]^T
void transpose(std::size_t rows, std::size_t cols, const double* src,
               std::size_t lds, double* dst, std::size_t ldd);

}  // namespace stlf::kernels
