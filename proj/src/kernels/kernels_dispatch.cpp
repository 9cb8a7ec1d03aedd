#include <cstdlib>
#include <cstring>

#include "aucmeta/kernels/kernels.hpp"

namespace aucmeta::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend& select_backend() {
  const Backend* avx2 = avx2_backend();
  const char* env = std::getenv("AUCMETA_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return scalar_backend();
    if (std::strcmp(env, "avx2") == 0 && avx2 != nullptr && cpu_has_avx2_fma())
      return *avx2;
    return scalar_backend();
  }
  if (avx2 != nullptr && cpu_has_avx2_fma()) return *avx2;
  return scalar_backend();
}

}  // namespace

const Backend& active_backend() {
  static const Backend& chosen = select_backend();
  return chosen;
}

}  // namespace aucmeta::kernels
