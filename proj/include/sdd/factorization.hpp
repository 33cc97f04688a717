#pragma once

#include <functional>
#include <vector>

#include "sdd/graph.hpp"

namespace sdd {

// Partial Cholesky factor of an irreducible SDDM0 matrix B:
//   B = P L diag(C, A1) L^T P^T
// where L is lower triangular carrying the square-root pivot scaling on the
// eliminated block and identity on the rest, C is the eliminated-block
// diagonal (all ones, except a trailing zero when a singular matrix
// eliminates completely), and every row of A1 has at least 3 off-diagonal
// nonzeros.
class PartialCholFactor {
public:
    struct LCol {
        double d = 1.0;  // diagonal of L at this position
        int r1 = -1;     // permuted row indices of the off-diagonal entries
        double v1 = 0.0;
        int r2 = -1;
        double v2 = 0.0;
    };

    int dim() const { return n_; }
    int reduced_dim() const { return n1_; }
    int eliminated_count() const { return n_ - n1_; }
    const SparseSymMatrix& reduced() const { return reduced_; }
    const std::vector<int>& perm() const { return perm_; }  // position -> vertex
    const std::vector<LCol>& l_cols() const { return cols_; }
    const std::vector<double>& cdiag() const { return cdiag_; }
    bool projection() const { return projection_; }
    int l_nnz() const;

    // x := L^{-1} x and x := L^{-T} x, in factor (permuted) coordinates.
    void forward(Vector& x) const;
    void backward(Vector& x) const;

    friend PartialCholFactor partial_cholesky(const SparseSymMatrix& b);

private:
    int n_ = 0, n1_ = 0;
    std::vector<int> perm_, inv_perm_;
    std::vector<LCol> cols_;
    std::vector<double> cdiag_;
    SparseSymMatrix reduced_;
    bool projection_ = false;
};

// Eliminates every row with at most 2 off-diagonal nonzeros (FIFO worklist,
// deterministic). Throws on reducible or non-SDDM0 input.
PartialCholFactor partial_cholesky(const SparseSymMatrix& b);

// pinv(B) b = Pi P^{-T} L^{-T} diag(C, pinv(A1)) L^{-1} P^{-1} Pi b, with
// `inner` applying pinv(A1) (exactly or approximately).
Vector apply_factored_pinv(const PartialCholFactor& f,
                           const std::function<Vector(const Vector&)>& inner, const Vector& b);

// Exact variant: empty A1 needs no inner solve; otherwise the inner solve
// must be supplied.
Vector apply_factored_pinv(const PartialCholFactor& f, const Vector& b);

// Full LDL^T of an irreducible SDDM0 matrix, dense storage. D is all ones
// except a trailing zero when the matrix is a (singular) Laplacian; the
// magnitude scaling lives in L.
struct BaseFactor {
    int n = 0;
    std::vector<double> l;  // row-major dense lower triangle, unit-free
    std::vector<double> d;  // ones, possibly trailing zero
    bool projection = false;
};

BaseFactor ldl_base(const SparseSymMatrix& a);

// pinv(A) b = Pi L^{-T} D L^{-1} Pi b.
Vector apply_base_pinv(const BaseFactor& f, const Vector& b);

// Orthogonal projection against the all-ones vector (in place helper).
void project_ones(Vector& x);

}  // namespace sdd
