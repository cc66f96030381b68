#include "navsim/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

namespace navsim::kernels::avx2 {

namespace {

double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
    return _mm_cvtsd_f64(s);
}

}  // namespace

double min_value(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
    double m = hmin(acc);
    for (; i < n; ++i) {
        if (x[i] < m) m = x[i];
    }
    return m;
}

double sum(const double* x, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, p);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sse(const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void accumulate_normal(const double* X, const double* y, std::size_t n,
                       std::size_t m, double* xtx, double* xty) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = X + r * m;
        for (std::size_t i = 0; i < m; ++i) {
            double xi = row[i];
            __m256d vxi = _mm256_set1_pd(xi);
            double* out = xtx + i * m;
            std::size_t j = i;
            for (; j + 4 <= m; j += 4) {
                __m256d acc = _mm256_loadu_pd(out + j);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(vxi, _mm256_loadu_pd(row + j)));
                _mm256_storeu_pd(out + j, acc);
            }
            for (; j < m; ++j) out[j] += xi * row[j];
            xty[i] += xi * y[r];
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) xtx[i * m + j] = xtx[j * m + i];
}

}  // namespace navsim::kernels::avx2

#endif  // x86-64
