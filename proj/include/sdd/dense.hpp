#pragma once

#include <vector>

#include "sdd/graph.hpp"

namespace sdd {

// Dense symmetric eigendecomposition A = V diag(w) V^T, eigenvalues
// ascending. Row-major input of size n*n.
struct DenseEig {
    int n = 0;
    std::vector<double> values;
    std::vector<double> vectors;  // column k at vectors[i*n + k]
};

DenseEig sym_eig(const std::vector<double>& a, int n);

std::vector<double> densify(const SparseSymMatrix& a);

// Dense Moore-Penrose pseudo-inverse operator via eigendecomposition;
// eigenvalues below n*eps*|lambda|_max are treated as zero.
class DensePinv {
public:
    DensePinv() = default;
    explicit DensePinv(const SparseSymMatrix& a);
    DensePinv(const std::vector<double>& dense, int n);

    int dim() const { return n_; }
    int rank() const { return rank_; }
    Vector apply(const Vector& b) const;

private:
    int n_ = 0;
    int rank_ = 0;
    DenseEig eig_;
    std::vector<double> inv_values_;
};

// Generalized eigenvalues of the pencil (A, B) restricted to the common
// range: the eigenvalues of pinv(B)^(1/2-free form) computed as
// eig(L^+T A L^+) over B's nonnull eigenspace. Throws if the nullspaces
// disagree.
std::vector<double> generalized_eigenvalues(const SparseSymMatrix& a, const SparseSymMatrix& b);

// Finite generalized condition number: ratio of extreme nonzero
// eigenvalues of A pinv(B). Dense test oracle, dimension-capped.
double finite_condition_number(const SparseSymMatrix& a, const SparseSymMatrix& b,
                               int dim_cap = 400);

}  // namespace sdd
