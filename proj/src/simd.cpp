#include "stringlab/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace stringlab::simd {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::complex<double> weighted_cdot(const double* w, const std::complex<double>* a, const std::complex<double>* b,
                                   std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    re += w[i] * (ar * br + ai * bi);
    im += w[i] * (ar * bi - ai * br);
  }
  return {re, im};
}

void axpy(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

}  // namespace scalar

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const char* level_name(Level level) { return level == Level::avx2 ? "avx2" : "scalar"; }

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using CdotFn = std::complex<double> (*)(const double*, const std::complex<double>*, const std::complex<double>*,
                                        std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

struct Table {
  Level level;
  DotFn dot;
  CdotFn cdot;
  AxpyFn axpy;
};

Table make_table(Level level) {
  if (level == Level::avx2) return {Level::avx2, &avx2::dot, &avx2::weighted_cdot, &avx2::axpy};
  return {Level::scalar, &scalar::dot, &scalar::weighted_cdot, &scalar::axpy};
}

Level detect() {
  const char* env = std::getenv("STRINGLAB_SIMD");
  if (env && *env) {
    if (std::strcmp(env, "scalar") == 0) return Level::scalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2()) throw std::runtime_error("STRINGLAB_SIMD=avx2 requested but the CPU lacks AVX2/FMA");
      return Level::avx2;
    }
    throw std::runtime_error(std::string("STRINGLAB_SIMD: unknown level '") + env + "'");
  }
  return cpu_has_avx2() ? Level::avx2 : Level::scalar;
}

std::atomic<const Table*>& table_slot() {
  static std::atomic<const Table*> slot{nullptr};
  return slot;
}

const Table& table() {
  const Table* t = table_slot().load(std::memory_order_acquire);
  if (t) return *t;
  static const Table detected = make_table(detect());
  const Table* expected = nullptr;
  table_slot().compare_exchange_strong(expected, &detected, std::memory_order_acq_rel);
  return *table_slot().load(std::memory_order_acquire);
}

}  // namespace

Level active_level() { return table().level; }

void set_level(Level level) {
  if (level == Level::avx2 && !cpu_has_avx2()) throw std::runtime_error("set_level: CPU lacks AVX2/FMA");
  static const Table scalar_table = make_table(Level::scalar);
  static const Table avx2_table = make_table(Level::avx2);
  table_slot().store(level == Level::avx2 ? &avx2_table : &scalar_table, std::memory_order_release);
}

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

std::complex<double> weighted_cdot(const double* w, const std::complex<double>* a, const std::complex<double>* b,
                                   std::size_t n) {
  return table().cdot(w, a, b, n);
}

void axpy(double s, const double* x, double* y, std::size_t n) { table().axpy(s, x, y, n); }

}  // namespace stringlab::simd
