// Compiled with -mavx2 only (no -mfma); see kernels.hpp for the ordering
// contract shared with the scalar reference.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace stlf::kernels::avx2 {
namespace {

// Accumulates a ROWS x (4*VECS) tile of C. a_at(r, p) yields the scalar that
// multiplies row p of B for tile row r.
template <int ROWS, int VECS, typename AAt>
inline void tile(std::size_t depth, AAt a_at, const double* b, std::size_t ldb,
                 double* c, std::size_t ldc) {
  __m256d acc[ROWS][VECS];
  for (int r = 0; r < ROWS; ++r)
    for (int v = 0; v < VECS; ++v)
      acc[r][v] = _mm256_loadu_pd(c + r * ldc + 4 * v);
  for (std::size_t p = 0; p < depth; ++p) {
    __m256d bv[VECS];
    for (int v = 0; v < VECS; ++v) bv[v] = _mm256_loadu_pd(b + p * ldb + 4 * v);
    for (int r = 0; r < ROWS; ++r) {
      const __m256d av = _mm256_set1_pd(a_at(r, p));
      for (int v = 0; v < VECS; ++v)
        acc[r][v] = _mm256_add_pd(acc[r][v], _mm256_mul_pd(av, bv[v]));
    }
  }
  for (int r = 0; r < ROWS; ++r)
    for (int v = 0; v < VECS; ++v)
      _mm256_storeu_pd(c + r * ldc + 4 * v, acc[r][v]);
}

template <int ROWS, typename AAt>
inline void tail_columns(std::size_t depth, std::size_t ncols, AAt a_at,
                         const double* b, std::size_t ldb, double* c,
                         std::size_t ldc) {
  for (int r = 0; r < ROWS; ++r) {
    for (std::size_t j = 0; j < ncols; ++j) {
      double acc = c[r * ldc + j];
      for (std::size_t p = 0; p < depth; ++p) acc += a_at(r, p) * b[p * ldb + j];
      c[r * ldc + j] = acc;
    }
  }
}

template <int ROWS, typename AAt>
inline void row_panel(std::size_t n, std::size_t depth, AAt a_at,
                      const double* b, std::size_t ldb, double* c,
                      std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) tile<ROWS, 2>(depth, a_at, b + j, ldb, c + j, ldc);
  for (; j + 4 <= n; j += 4) tile<ROWS, 1>(depth, a_at, b + j, ldb, c + j, ldc);
  if (j < n) tail_columns<ROWS>(depth, n - j, a_at, b + j, ldb, c + j, ldc);
}

}  // namespace

void gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
              std::size_t lda, const double* b, std::size_t ldb, double* c,
              std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const double* ai = a + i * lda;
    auto a_at = [ai, lda](int r, std::size_t p) { return ai[r * lda + p]; };
    row_panel<4>(n, k, a_at, b, ldb, c + i * ldc, ldc);
  }
  for (; i < m; ++i) {
    const double* ai = a + i * lda;
    auto a_at = [ai](int, std::size_t p) { return ai[p]; };
    row_panel<1>(n, k, a_at, b, ldb, c + i * ldc, ldc);
  }
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double* c,
                 std::size_t ldc) {
  // Output row p of C pairs with column p of A; the depth loop runs over the
  // shared rows of A and B.
  std::size_t p = 0;
  for (; p + 4 <= k; p += 4) {
    const double* ap = a + p;
    auto a_at = [ap, lda](int r, std::size_t i) { return ap[i * lda + r]; };
    row_panel<4>(n, m, a_at, b, ldb, c + p * ldc, ldc);
  }
  for (; p < k; ++p) {
    const double* ap = a + p;
    auto a_at = [ap, lda](int, std::size_t i) { return ap[i * lda]; };
    row_panel<1>(n, m, a_at, b, ldb, c + p * ldc, ldc);
  }
}

void col_sum_acc(std::size_t m, std::size_t n, const double* a,
                 std::size_t lda, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(out + j);
    for (std::size_t i = 0; i < m; ++i)
      acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i * lda + j));
    _mm256_storeu_pd(out + j, acc);
  }
  for (; j < n; ++j) {
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
  const __m256d vb1 = _mm256_set1_pd(b1);
  const __m256d vb2 = _mm256_set1_pd(b2);
  const __m256d vob1 = _mm256_set1_pd(one_minus_b1);
  const __m256d vob2 = _mm256_set1_pd(one_minus_b2);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(vob1, gi));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(vob2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, vc1);
    const __m256d v_hat = _mm256_div_pd(vi, vc2);
    const __m256d step = _mm256_div_pd(
        _mm256_mul_pd(vlr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), veps));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    m[i] = b1 * m[i] + one_minus_b1 * gi;
    v[i] = b2 * v[i] + one_minus_b2 * (gi * gi);
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    p[i] = p[i] - (lr * m_hat) / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace stlf::kernels::avx2
