#include "pmkl/simd.hpp"

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace pmkl::simd {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy_scalar(double c, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * x[i];
}

#if defined(__x86_64__)

__attribute__((target("avx2,fma")))
static double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc0 = _mm256_add_pd(acc0, acc1);
    double lane[4];
    _mm256_storeu_pd(lane, acc0);
    double s = lane[0] + lane[1] + lane[2] + lane[3];
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2,fma")))
static double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double lane[4];
    _mm256_storeu_pd(lane, acc);
    double s = lane[0] + lane[1] + lane[2] + lane[3];
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

__attribute__((target("avx2,fma")))
static void axpy_avx2(double c, const double* x, double* y, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += c * x[i];
}

static bool has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

static bool has_avx2() { return false; }

#endif

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

namespace {
#if defined(__x86_64__)
const bool g_avx2 = has_avx2();
const DotFn g_dot = g_avx2 ? dot_avx2 : dot_scalar;
const DotFn g_sqdist = g_avx2 ? squared_distance_avx2 : squared_distance_scalar;
const AxpyFn g_axpy = g_avx2 ? axpy_avx2 : axpy_scalar;
#else
const bool g_avx2 = false;
const DotFn g_dot = dot_scalar;
const DotFn g_sqdist = squared_distance_scalar;
const AxpyFn g_axpy = axpy_scalar;
#endif
}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return g_dot(a, b, n); }
double squared_distance(const double* a, const double* b, std::size_t n) { return g_sqdist(a, b, n); }
void axpy(double c, const double* x, double* y, std::size_t n) { g_axpy(c, x, y, n); }

void weighted_row_sum(const double* const* rows, const double* w, std::size_t m,
                      double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        if (w[k] == 0.0) continue;
        axpy(w[k], rows[k], out, n);
    }
}

const char* active_backend() { return g_avx2 ? "avx2" : "scalar"; }

}  // namespace pmkl::simd
