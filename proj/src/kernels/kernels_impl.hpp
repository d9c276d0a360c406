#pragma once

#include <cstddef>

namespace stlf::kernels::scalar {

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
              std::size_t lda, const double* b, std::size_t ldb, double* c,
              std::size_t ldc);
void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double* c,
                 std::size_t ldc);
void col_sum_acc(std::size_t m, std::size_t n, const double* a,
                 std::size_t lda, double* out);
void adam_update(std::size_t n, double* p, const double* g, double* m,
                 double* v, double lr, double b1, double b2, double c1,
                 double c2, double eps);

}  // namespace stlf::kernels::scalar

#if defined(STLF_HAVE_AVX2)
namespace stlf::kernels::avx2 {

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
              std::size_t lda, const double* b, std::size_t ldb, double* c,
              std::size_t ldc);
void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double* c,
                 std::size_t ldc);
void col_sum_acc(std::size_t m, std::size_t n, const double* a,
                 std::size_t lda, double* out);
void adam_update(std::size_t n, double* p, const double* g, double* m,
                 double* v, double lr, double b1, double b2, double c1,
                 double c2, double eps);

}  // namespace stlf::kernels::avx2
#endif
