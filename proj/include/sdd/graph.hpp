#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdd {

using Vector = std::vector<double>;

// Weighted undirected edge, canonicalized to u < v.
struct Edge {
    int u = 0;
    int v = 0;
    double w = 0.0;
};

bool operator==(const Edge& a, const Edge& b);

// Undirected graph with strictly positive edge weights, no self-loops and
// at most one edge per vertex pair. Immutable after construction; a CSR
// adjacency is built once for traversal.
class WeightedGraph {
public:
    WeightedGraph() = default;

    // Canonicalizes edges to u < v and sorts them. Duplicate pairs are
    // summed, zero-weight edges dropped, negative weights rejected.
    WeightedGraph(int n, std::vector<Edge> edges);

    int num_vertices() const { return n_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int id) const { return edges_[id]; }

    int degree(int v) const { return ptr_[v + 1] - ptr_[v]; }
    // Incident edge ids of v, CSR slice [begin, end).
    const int* incident_begin(int v) const { return eid_.data() + ptr_[v]; }
    const int* incident_end(int v) const { return eid_.data() + ptr_[v + 1]; }
    // Neighbor across incident edge id `e` as seen from `v`.
    int other(int e, int v) const { return edges_[e].u == v ? edges_[e].v : edges_[e].u; }

    double total_weight() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> ptr_;  // n+1
    std::vector<int> eid_;  // 2m incident edge ids
};

// Symmetric sparse matrix: diagonal array plus strictly-upper coordinate
// entries (i < j), sorted. The (j,i) mirror is implicit.
class SparseSymMatrix {
public:
    struct Off {
        int i = 0;
        int j = 0;  // i < j
        double v = 0.0;
    };

    SparseSymMatrix() = default;
    SparseSymMatrix(int n, std::vector<double> diag, std::vector<Off> off);

    // From unordered coordinate triples; (i,j) and (j,i) duplicates are
    // summed, mismatched mirrors rejected.
    static SparseSymMatrix from_coordinates(int n, const std::vector<Off>& entries);

    int dim() const { return n_; }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<Off>& off() const { return off_; }
    // Off-diagonal nonzeros counting both triangles.
    int noff2() const { return 2 * static_cast<int>(off_.size()); }
    // Upper-triangular off-diagonal count.
    int noff() const { return static_cast<int>(off_.size()); }

    int off_degree(int v) const { return ptr_[v + 1] - ptr_[v]; }
    const int* adj_begin(int v) const { return aid_.data() + ptr_[v]; }
    const int* adj_end(int v) const { return aid_.data() + ptr_[v + 1]; }
    int other(int e, int v) const { return off_[e].i == v ? off_[e].j : off_[e].i; }

    Vector apply(const Vector& x) const;
    // Max row 1-norm; 0 for the zero matrix.
    double scale() const;

private:
    int n_ = 0;
    std::vector<double> diag_;
    std::vector<Off> off_;
    std::vector<int> ptr_;
    std::vector<int> aid_;
};

enum class MatrixKind { Laplacian, SDDM0, SDD0, NotSDD };

struct MatrixClass {
    MatrixKind kind = MatrixKind::NotSDD;
    bool irreducible = false;
    bool singular = false;
};

std::string to_string(MatrixKind k);

// Graph <-> Laplacian isomorphism.
SparseSymMatrix laplacian_of(const WeightedGraph& g);
// Requires a Laplacian matrix (negated off-diagonals become weights).
WeightedGraph graph_of(const SparseSymMatrix& a);

double quadratic_form(const WeightedGraph& g, const Vector& x);

// Most-specific class; weak dominance tested with tolerance
// |A_ii| >= sum|A_ij| - 1e-12 * scale. Diagonals must be nonnegative for
// any SDD class (the positive semi-definite reading of the class).
MatrixClass classify(const SparseSymMatrix& a);

// A = A_L + A_D with A_L Laplacian and A_D nonnegative diagonal.
// Requires SDDM0 input.
void split_sddm(const SparseSymMatrix& a, SparseSymMatrix& a_l, Vector& a_d);

// Gremban doubling: SDD0 system of size n -> SDDM0 system of size 2n.
void gremban_reduce(const SparseSymMatrix& a, const Vector& b, SparseSymMatrix& a_hat,
                    Vector& b_hat);
Vector gremban_recover(const Vector& x_hat);

// Connected components of the graph (by edges). Returns component id per
// vertex; ids are 0..k-1 in order of first occurrence.
std::vector<int> connected_components(const WeightedGraph& g, int* count = nullptr);
std::vector<int> connected_components(const SparseSymMatrix& a, int* count = nullptr);

}  // namespace sdd
