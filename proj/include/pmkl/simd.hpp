#ifndef PMKL_SIMD_HPP
#define PMKL_SIMD_HPP

#include <cstddef>

// Data-parallel primitives used by the Gram builder and the dual solver.
// Scalar reference kernels are always available; an AVX2/FMA variant is
// selected at runtime when the CPU supports it.

namespace pmkl::simd {

double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
// y += c * x
void axpy(double c, const double* x, double* y, std::size_t n);
// out[i] = sum_m w[m] * rows[m][i]
void weighted_row_sum(const double* const* rows, const double* w, std::size_t m,
                      double* out, std::size_t n);

// Reference implementations, used for equivalence testing.
double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double c, const double* x, double* y, std::size_t n);

// "avx2" or "scalar"
const char* active_backend();

}  // namespace pmkl::simd

#endif
