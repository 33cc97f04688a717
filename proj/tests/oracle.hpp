#pragma once

// Test-only oracles, independent of the library's solve paths: dense
// linear algebra through Eigen, brute-force tree walks, and fixture
// constructors shared across the suites.

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "sdd/graph.hpp"
#include "sdd/spanning_tree.hpp"

namespace oracle {

using sdd::Edge;
using sdd::SparseSymMatrix;
using sdd::Vector;
using sdd::WeightedGraph;

inline Eigen::MatrixXd dense_of(const SparseSymMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.dim(), a.dim());
    for (int i = 0; i < a.dim(); ++i) m(i, i) = a.diag()[i];
    for (const auto& e : a.off()) {
        m(e.i, e.j) = e.v;
        m(e.j, e.i) = e.v;
    }
    return m;
}

inline Eigen::MatrixXd dense_pinv(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd w = es.eigenvalues();
    double tol = w.cwiseAbs().maxCoeff() * m.rows() * 1e-13;
    Eigen::VectorXd winv = Eigen::VectorXd::Zero(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        if (std::abs(w(i)) > tol) winv(i) = 1.0 / w(i);
    return es.eigenvectors() * winv.asDiagonal() * es.eigenvectors().transpose();
}

inline Vector pinv_apply(const SparseSymMatrix& a, const Vector& b) {
    Eigen::MatrixXd p = dense_pinv(dense_of(a));
    Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    Eigen::VectorXd x = p * bv;
    return Vector(x.data(), x.data() + x.size());
}

// Relative A-norm error ||x - pinv(A) b||_A / ||pinv(A) b||_A.
inline double anorm_relative_error(const SparseSymMatrix& a, const Vector& b, const Vector& x) {
    Eigen::MatrixXd ad = dense_of(a);
    Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd xs = dense_pinv(ad) * bv;
    Eigen::VectorXd d = xv - xs;
    double num = std::sqrt(std::max(d.dot(ad * d), 0.0));
    double den = std::sqrt(std::max(xs.dot(ad * xs), 0.0));
    return den > 0 ? num / den : num;
}

// Brute-force stretch: DFS path in the tree, resistances summed.
inline double brute_stretch(const sdd::SpanningTree& t, const Edge& e) {
    if (e.u == e.v) return 0.0;
    return e.w * sdd::path_resistance(t, e.u, e.v);
}

// Figure-1 matrix of the weighted-graph/Laplacian correspondence.
inline SparseSymMatrix figure1() {
    return SparseSymMatrix(4, {1.5, 4.0, 3.0, 1.5},
                           {{0, 1, -1.5}, {1, 2, -2.0}, {1, 3, -0.5}, {2, 3, -1.0}});
}

inline WeightedGraph figure1_graph() {
    return WeightedGraph(4, {{0, 1, 1.5}, {1, 2, 2.0}, {1, 3, 0.5}, {2, 3, 1.0}});
}

// Random connected graph with dyadic weights (exact in binary floating
// point) for tests that compare sums exactly.
inline WeightedGraph random_connected(int n, int extra, std::uint64_t seed,
                                      bool dyadic_weights = false) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    std::uniform_real_distribution<double> wdist(0.25, 4.0);
    const double dyadic[] = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::uniform_int_distribution<int> didx(0, 5);
    auto weight = [&]() { return dyadic_weights ? dyadic[didx(rng)] : wdist(rng); };
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        edges.push_back({pick(rng), v, weight()});
    }
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < extra; ++e) {
        int u = pick(rng), v = pick(rng);
        if (u != v) edges.push_back({std::min(u, v), std::max(u, v), weight()});
    }
    return WeightedGraph(n, std::move(edges));
}

// Random irreducible SDDM0 matrix; when `laplacian` the row sums are zero.
inline SparseSymMatrix random_sddm(int n, std::uint64_t seed, bool laplacian) {
    WeightedGraph g = random_connected(n, n, seed);
    SparseSymMatrix l = sdd::laplacian_of(g);
    if (laplacian) return l;
    std::mt19937_64 rng(seed ^ 0xabcdef);
    std::uniform_real_distribution<double> slack(0.0, 2.0);
    std::vector<double> diag = l.diag();
    for (double& d : diag) d += slack(rng);
    return SparseSymMatrix(n, std::move(diag), l.off());
}

// Random SDD0 matrix with a sprinkling of positive off-diagonals.
inline SparseSymMatrix random_sdd(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.1, 2.0);
    std::uniform_int_distribution<int> coin(0, 3);
    std::vector<SparseSymMatrix::Off> off;
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < std::min(n, i + 4); ++j) {
            double v = mag(rng) * (coin(rng) == 0 ? 1.0 : -1.0);
            off.push_back({i, j, v});
            rowsum[i] += std::abs(v);
            rowsum[j] += std::abs(v);
        }
    std::uniform_real_distribution<double> slack(0.0, 1.0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = rowsum[i] + slack(rng);
    return SparseSymMatrix(n, std::move(diag), std::move(off));
}

}  // namespace oracle
