#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels used in the iteration inner loops (Chebyshev, PCG,
// power iteration). Scalar reference implementations plus AVX2 variants
// selected at runtime; SDD_KERNELS=scalar|avx2 overrides the dispatch.

namespace sdd::kernels {

double dot(const double* x, const double* y, std::size_t n);
double nrm2(const double* x, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// y = x + a * y
void xpay(const double* x, double a, double* y, std::size_t n);
// w = x - y
void sub(const double* x, const double* y, double* w, std::size_t n);
// x *= a
void scal(double a, double* x, std::size_t n);

// Name of the active variant ("avx2" or "scalar").
std::string active_variant();

namespace ref {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpay(const double* x, double a, double* y, std::size_t n);
void sub(const double* x, const double* y, double* w, std::size_t n);
void scal(double a, double* x, std::size_t n);
}  // namespace ref

}  // namespace sdd::kernels
