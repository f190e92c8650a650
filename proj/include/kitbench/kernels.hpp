#pragma once

// Data-parallel inner loops used by the dense layers, normalizers and RMSE.
//
// Every kernel has a scalar reference implementation plus SIMD variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is chosen once at
// runtime from the CPU's capabilities and can be pinned with
// set_active_isa() or the KITBENCH_ISA environment variable
// ("scalar", "avx2", "neon"). SIMD variants reassociate sums, so results
// agree with the scalar path to rounding, not bit-for-bit.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace kitbench::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// Kernel ABI. Matrices are row-major `rows x cols`.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y = W x + b
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* b,
               double* y);
  /// y = W^T g  (y has `cols` entries, overwritten)
  void (*gemv_transposed)(const double* w, std::size_t rows, std::size_t cols, const double* g,
                          double* y);
  /// W += alpha * u v^T
  void (*rank1_update)(double* w, std::size_t rows, std::size_t cols, double alpha, const double* u,
                       const double* v);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// sum_i (a_i - b_i)^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();

/// Best supported variant on this machine.
Isa detected_isa();

Isa active_isa();
/// Throws ConfigError when `isa` is not supported here.
void set_active_isa(Isa isa);

const KernelTable& table(Isa isa);
const KernelTable& active();

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double squared_distance(std::span<const double> a, std::span<const double> b);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const KernelTable kTable;
}
#endif

}  // namespace kitbench::kernels
