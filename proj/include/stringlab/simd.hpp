#pragma once

#include <complex>
#include <cstddef>

namespace stringlab::simd {

enum class Level { scalar, avx2 };

/// Level in use. Chosen once from the CPU, overridable with STRINGLAB_SIMD=scalar|avx2.
Level active_level();
/// Force a level (tests). Requesting avx2 on a CPU without it throws.
void set_level(Level level);
const char* level_name(Level level);
bool cpu_has_avx2();

/// sum a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);
/// sum w[i] * conj(a[i]) * b[i]
std::complex<double> weighted_cdot(const double* w, const std::complex<double>* a, const std::complex<double>* b,
                                   std::size_t n);
/// y[i] += s * x[i]
void axpy(double s, const double* x, double* y, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
std::complex<double> weighted_cdot(const double* w, const std::complex<double>* a, const std::complex<double>* b,
                                   std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
std::complex<double> weighted_cdot(const double* w, const std::complex<double>* a, const std::complex<double>* b,
                                   std::size_t n);
void axpy(double s, const double* x, double* y, std::size_t n);
}  // namespace avx2

}  // namespace stringlab::simd
