#include <cstdlib>
#include <string>

#include "bosonlab/simd/kernels.hpp"

namespace bosonlab::simd {

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {
Isa detect() {
  if (const char* env = std::getenv("BOSONLAB_SIMD"); env != nullptr && std::string(env) == "scalar")
    return Isa::scalar;
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}
}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels_for(Isa isa) {
  return isa == Isa::avx2 && isa_supported(Isa::avx2) ? avx2_kernels() : scalar_kernels();
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

}  // namespace bosonlab::simd
