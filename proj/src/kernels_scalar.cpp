#include "navsim/kernels.hpp"

#include <limits>

namespace navsim::kernels::scalar {

double min_value(const double* x, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < m) m = x[i];
    }
    return m;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sse(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
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
            double* out = xtx + i * m;
            for (std::size_t j = i; j < m; ++j) out[j] += xi * row[j];
            xty[i] += xi * y[r];
        }
    }
    // Only the upper triangle was accumulated; mirror it.
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) xtx[i * m + j] = xtx[j * m + i];
}

}  // namespace navsim::kernels::scalar
