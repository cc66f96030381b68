#include "navsim/kernels.hpp"

namespace navsim::kernels {

bool cpu_supports_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {
const bool use_avx2 = cpu_supports_avx2();
}

std::string_view active_backend() { return use_avx2 ? "avx2" : "scalar"; }

#if defined(__x86_64__) || defined(_M_X64)
#define NAVSIM_DISPATCH(call) return use_avx2 ? avx2::call : scalar::call
#define NAVSIM_DISPATCH_VOID(call)  \
    do {                            \
        if (use_avx2)               \
            avx2::call;             \
        else                        \
            scalar::call;           \
    } while (0)
#else
#define NAVSIM_DISPATCH(call) return scalar::call
#define NAVSIM_DISPATCH_VOID(call) scalar::call
#endif

double min_value(const double* x, std::size_t n) { NAVSIM_DISPATCH(min_value(x, n)); }
double sum(const double* x, std::size_t n) { NAVSIM_DISPATCH(sum(x, n)); }
double dot(const double* a, const double* b, std::size_t n) {
    NAVSIM_DISPATCH(dot(a, b, n));
}
double sse(const double* a, const double* b, std::size_t n) {
    NAVSIM_DISPATCH(sse(a, b, n));
}
void accumulate_normal(const double* X, const double* y, std::size_t n,
                       std::size_t m, double* xtx, double* xty) {
    NAVSIM_DISPATCH_VOID(accumulate_normal(X, y, n, m, xtx, xty));
}

#undef NAVSIM_DISPATCH
#undef NAVSIM_DISPATCH_VOID

}  // namespace navsim::kernels
