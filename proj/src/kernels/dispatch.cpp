#include "stlf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace stlf::kernels {
namespace {

const KernelTable kScalar{&scalar::gemm_acc, &scalar::gemm_tn_acc,
                          &scalar::col_sum_acc, &scalar::adam_update};

#if defined(STLF_HAVE_AVX2)
const KernelTable kAvx2{&avx2::gemm_acc, &avx2::gemm_tn_acc,
                        &avx2::col_sum_acc, &avx2::adam_update};
#endif

bool cpu_has_avx2() {
#if defined(STLF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() {
  const char* env = std::getenv("STLF_KERNELS");
  if (env != nullptr && std::string_view(env) == "scalar") return Backend::scalar;
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(STLF_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return nullptr;
}

const KernelTable& active() {
#if defined(STLF_HAVE_AVX2)
  if (current().load(std::memory_order_relaxed) == Backend::avx2) return kAvx2;
#endif
  return kScalar;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

std::string_view backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

bool set_backend(Backend b) {
  if (b == Backend::avx2 && avx2_table() == nullptr) return false;
  current().store(b, std::memory_order_relaxed);
  return true;
}

void transpose(std::size_t rows, std::size_t cols, const double* src,
               std::size_t lds, double* dst, std::size_t ldd) {
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) dst[j * ldd + i] = src[i * lds + j];
}

}  // namespace stlf::kernels
