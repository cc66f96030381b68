#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the scan metrics and the model fitter.
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant; the top-level entry points dispatch at runtime based on cpuid.
// The two backends may differ in the last few ulps for the reductions
// (different association order), which is why equivalence tests use a tight
// relative tolerance instead of bit equality; min_value is exact.

namespace navsim::kernels {

namespace scalar {
double min_value(const double* x, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sse(const double* a, const double* b, std::size_t n);
// xtx += X^T X (m x m, row-major), xty += X^T y, for X: n x m row-major.
void accumulate_normal(const double* X, const double* y, std::size_t n,
                       std::size_t m, double* xtx, double* xty);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
// Only call these after checking cpu_supports_avx2().
double min_value(const double* x, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sse(const double* a, const double* b, std::size_t n);
void accumulate_normal(const double* X, const double* y, std::size_t n,
                       std::size_t m, double* xtx, double* xty);
}  // namespace avx2
#endif

bool cpu_supports_avx2();

// Name of the backend the dispatched entry points route to ("avx2" or
// "scalar").
std::string_view active_backend();

double min_value(const double* x, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double sse(const double* a, const double* b, std::size_t n);
void accumulate_normal(const double* X, const double* y, std::size_t n,
                       std::size_t m, double* xtx, double* xty);

}  // namespace navsim::kernels
