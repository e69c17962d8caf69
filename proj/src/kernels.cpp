#include "tea/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#if defined(__x86_64__) || defined(__i386__)
#include <cpuid.h>
#endif

namespace tea::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if defined(TEA_KERNELS_AVX2_BUILD) && (defined(__x86_64__) || defined(__i386__))
  unsigned eax, ebx, ecx, edx;
  if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
  const bool fma = ecx & (1u << 12);
  const bool osxsave = ecx & (1u << 27);
  if (!fma || !osxsave) return false;
  // OS must save YMM state (XCR0 bits 1 and 2).
  const unsigned long long xcr0 = _xgetbv(0);
  if ((xcr0 & 0x6) != 0x6) return false;
  if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
  return (ebx & (1u << 5)) != 0;  // AVX2
#else
  return false;
#endif
}

std::atomic<const Ops*> g_active{nullptr};

const Ops* pick_default() {
  if (const char* env = std::getenv("TEA_KERNELS")) {
    const std::string want = env;
    if (want == "scalar") return &scalar_ops();
    if (want == "avx2" && avx2_supported()) return &avx2_ops();
    // Unknown or unavailable lane requested: fall through to auto-detect.
  }
  return avx2_supported() ? &avx2_ops() : &scalar_ops();
}

}  // namespace

bool avx2_supported() {
  static const bool ok = cpu_has_avx2_fma();
  return ok;
}

const Ops& active_ops() {
  const Ops* ops = g_active.load(std::memory_order_acquire);
  if (!ops) {
    ops = pick_default();
    g_active.store(ops, std::memory_order_release);
  }
  return *ops;
}

bool set_active_lane(const std::string& name) {
  if (name == "scalar") {
    g_active.store(&scalar_ops(), std::memory_order_release);
    return true;
  }
  if (name == "avx2" && avx2_supported()) {
    g_active.store(&avx2_ops(), std::memory_order_release);
    return true;
  }
  return false;
}

std::vector<std::string> available_lanes() {
  std::vector<std::string> lanes{"scalar"};
  if (avx2_supported()) lanes.push_back("avx2");
  return lanes;
}

}  // namespace tea::kernels
