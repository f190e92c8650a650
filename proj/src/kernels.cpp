#include "kitbench/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kitbench/errors.hpp"

namespace kitbench::kernels {
namespace {

const KernelTable* pick_initial() {
  if (const char* env = std::getenv("KITBENCH_ISA"); env != nullptr && *env != '\0') {
    const auto requested = parse_isa(env);
    if (requested && isa_supported(*requested)) return &table(*requested);
  }
  return &table(detected_isa());
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{pick_initial()};
  return slot;
}

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ShapeError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

Isa detected_isa() {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& table(Isa isa) {
  switch (isa) {
    case Isa::scalar: return scalar::kTable;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return avx2::kTable;
#else
      break;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return neon::kTable;
#else
      break;
#endif
  }
  throw ConfigError("kernel variant '" + std::string(isa_name(isa)) + "' is not compiled in");
}

Isa active_isa() { return active().isa; }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError("kernel variant '" + std::string(isa_name(isa)) +
                      "' is not supported on this CPU");
  }
  active_slot().store(&table(isa), std::memory_order_release);
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

}  // namespace kitbench::kernels
