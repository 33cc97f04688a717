#pragma once

#include <cstdint>

#include "sdd/solver.hpp"

namespace sdd {

struct FiedlerResult {
    Vector v;              // unit norm, orthogonal to the all-ones vector
    double rayleigh = 0.0; // v'Av / v'v
    int trials = 0;
    std::uint64_t seed = 0;
};

// v'Av / v'v. Throws on the zero vector.
double rayleigh_quotient(const SparseSymMatrix& a, const Vector& v);

// Inverse power iteration through the preconditioned Chebyshev operator:
// ceil(log2(1/p)) independent trials of k = ceil(8 ln(18(n-1)/eps)/eps)
// applications each, starting from random unit vectors orthogonal to
// all-ones; returns the trial with the smallest Rayleigh quotient.
// Requires an irreducible Laplacian, 0 < eps <= 1 and 0 < p < 1.
FiedlerResult approx_fiedler(const SparseSymMatrix& a, double eps, double p,
                             const ChainConfig& cfg = {});

}  // namespace sdd
