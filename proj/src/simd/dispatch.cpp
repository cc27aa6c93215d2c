#include <atomic>
#include <cstdlib>
#include <string_view>

#include "mutdist/errors.hpp"
#include "mutdist/simd/kernels.hpp"

namespace mutdist::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(MUTDIST_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const bool avx2 = cpu_has_avx2();
  if (const char* env = std::getenv("MUTDIST_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && avx2) return Isa::Avx2;
  }
  return avx2 ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2());
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("simd: ISA '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  }
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) {
    throw ValidationError("simd: ISA '" + std::string(to_string(isa)) + "' is not supported on this CPU");
  }
#if defined(MUTDIST_HAVE_AVX2)
  if (isa == Isa::Avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

const KernelTable& kernels() noexcept {
#if defined(MUTDIST_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "?";
}

}  // namespace mutdist::simd
