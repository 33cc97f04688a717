#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "sdd/factorization.hpp"

using namespace sdd;

namespace {

// Materialize the reconstruction P L diag(C, A1) L^T P^T.
Eigen::MatrixXd reconstruct(const PartialCholFactor& f) {
    int n = f.dim();
    int ne = f.eliminated_count();
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(n, n);
    for (int j = 0; j < ne; ++j) {
        const auto& c = f.l_cols()[j];
        l(j, j) = c.d;
        if (c.r1 >= 0) l(c.r1, j) = c.v1;
        if (c.r2 >= 0) l(c.r2, j) = c.v2;
    }
    Eigen::MatrixXd mid = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < ne; ++j) mid(j, j) = f.cdiag()[j];
    Eigen::MatrixXd a1 = oracle::dense_of(f.reduced());
    mid.bottomRightCorner(f.reduced_dim(), f.reduced_dim()) = a1;
    Eigen::MatrixXd plcp = l * mid * l.transpose();
    // apply the permutation: entry at factor position p corresponds to
    // original vertex perm[p]
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(f.perm()[i], f.perm()[j]) = plcp(i, j);
    return out;
}

// Materialize a linear operator column by column.
Eigen::MatrixXd materialize(int n, const std::function<Vector(const Vector&)>& op) {
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        Vector col = op(e);
        for (int i = 0; i < n; ++i) m(i, j) = col[i];
    }
    return m;
}

void check_pinv_axioms(const Eigen::MatrixXd& b, const Eigen::MatrixXd& p, double tol) {
    CHECK(((b * p * b) - b).cwiseAbs().maxCoeff() <= tol);
    CHECK(((p * b * p) - p).cwiseAbs().maxCoeff() <= tol);
    CHECK(((b * p).transpose() - b * p).cwiseAbs().maxCoeff() <= tol);
    CHECK(((p * b).transpose() - p * b).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace

TEST_CASE("partial cholesky fully eliminates trees and cycles") {
    WeightedGraph tree = oracle::random_connected(20, 0, 9);
    PartialCholFactor f = partial_cholesky(laplacian_of(tree));
    CHECK(f.reduced_dim() == 0);
    CHECK(f.eliminated_count() == 20);
    CHECK(f.projection());
    CHECK(f.cdiag().back() == 0.0);  // singular Laplacian bottom

    std::vector<Edge> c5{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {0, 4, 1}};
    PartialCholFactor fc = partial_cholesky(laplacian_of(WeightedGraph(5, c5)));
    CHECK(fc.reduced_dim() == 0);
}

TEST_CASE("partial cholesky leaves K4 untouched") {
    std::vector<Edge> k4;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) k4.push_back({i, j, 1.0});
    SparseSymMatrix l = laplacian_of(WeightedGraph(4, k4));
    PartialCholFactor f = partial_cholesky(l);
    CHECK(f.reduced_dim() == 4);
    CHECK(f.eliminated_count() == 0);
    CHECK(oracle::dense_of(f.reduced()) == oracle::dense_of(l));
}

TEST_CASE("partial cholesky rejects bad input") {
    CHECK_THROWS_AS(partial_cholesky(SparseSymMatrix(2, {2, 2}, {{0, 1, 1.0}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        partial_cholesky(SparseSymMatrix(4, {1, 1, 1, 1}, {{0, 1, -1.0}, {2, 3, -1.0}})),
        std::invalid_argument);
}

TEST_CASE("partial cholesky structure bounds and reconstruction") {
    for (int trial = 0; trial < 16; ++trial) {
        bool laplacian = trial % 2 == 0;
        int n = 8 + 2 * trial;
        SparseSymMatrix b = oracle::random_sddm(n, 7000 + trial, laplacian);
        PartialCholFactor f = partial_cholesky(b);

        CHECK(f.l_nnz() <= 3 * n);
        int j = b.noff() - (n - 1);
        int cap = std::max(0, 2 * j - 2);
        CHECK(f.reduced_dim() <= cap);
        for (int v = 0; v < f.reduced_dim(); ++v) CHECK(f.reduced().off_degree(v) >= 3);

        Eigen::MatrixXd rec = reconstruct(f);
        Eigen::MatrixXd orig = oracle::dense_of(b);
        CHECK((rec - orig).cwiseAbs().maxCoeff() <= 1e-9 * orig.cwiseAbs().maxCoeff());

        if (f.reduced_dim() > 0) {
            MatrixClass mc = classify(f.reduced());
            CHECK((mc.kind == MatrixKind::Laplacian || mc.kind == MatrixKind::SDDM0));
            CHECK(mc.irreducible);
            CHECK(mc.singular == classify(b).singular);
        }
    }
}

TEST_CASE("factored pseudo-inverse on simple fixtures") {
    // nonsingular diagonal: elementwise division
    SparseSymMatrix d(3, {2, 4, 8}, {});
    PartialCholFactor fd = partial_cholesky(d);
    Vector x = apply_factored_pinv(fd, {2.0, 4.0, 8.0});
    for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    // tree Laplacian with b orthogonal to ones: B x = b
    WeightedGraph tree = oracle::random_connected(15, 0, 31);
    SparseSymMatrix b = laplacian_of(tree);
    PartialCholFactor ft = partial_cholesky(b);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss;
    Vector rhs(15);
    for (double& v : rhs) v = gauss(rng);
    project_ones(rhs);
    Vector sol = apply_factored_pinv(ft, rhs);
    Vector back = b.apply(sol);
    for (int i = 0; i < 15; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-9));

    // figure-1 Laplacian against the dense pseudo-inverse
    SparseSymMatrix f1 = oracle::figure1();
    PartialCholFactor ff = partial_cholesky(f1);
    Vector want = oracle::pinv_apply(f1, {1, -1, 0, 0});
    Vector got = apply_factored_pinv(ff, {1, -1, 0, 0});
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("pseudo-inverse axioms for the factored operator with exact inner") {
    for (int trial = 0; trial < 10; ++trial) {
        bool laplacian = trial % 2 == 0;
        int n = 10 + 3 * trial;
        SparseSymMatrix b = oracle::random_sddm(n, 8100 + trial, laplacian);
        PartialCholFactor f = partial_cholesky(b);
        Eigen::MatrixXd a1p;
        if (f.reduced_dim() > 0) a1p = oracle::dense_pinv(oracle::dense_of(f.reduced()));
        auto inner = [&](const Vector& s) {
            Vector y(s.size(), 0.0);
            for (int i = 0; i < f.reduced_dim(); ++i)
                for (int k = 0; k < f.reduced_dim(); ++k) y[i] += a1p(i, k) * s[k];
            return y;
        };
        Eigen::MatrixXd p = materialize(n, [&](const Vector& v) {
            return apply_factored_pinv(f, inner, v);
        });
        Eigen::MatrixXd bd = oracle::dense_of(b);
        double tol = 1e-8 * std::max(1.0, bd.cwiseAbs().maxCoeff());
        check_pinv_axioms(bd, p, tol);
        CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * p.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("ldl base factor on fixtures") {
    BaseFactor d4 = ldl_base(SparseSymMatrix(1, {4.0}, {}));
    CHECK(d4.l == std::vector<double>{2.0});
    CHECK(d4.d == std::vector<double>{1.0});

    BaseFactor r1 = ldl_base(SparseSymMatrix(2, {1, 1}, {{0, 1, -1.0}}));
    CHECK(r1.d == std::vector<double>{1.0, 0.0});

    // figure-1 reconstruction error
    SparseSymMatrix f1 = oracle::figure1();
    BaseFactor bf = ldl_base(f1);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j) l(i, j) = bf.l[4 * i + j];
    Eigen::MatrixXd rec = l * Eigen::Vector4d(bf.d.data()).asDiagonal() * l.transpose();
    CHECK((rec - oracle::dense_of(f1)).cwiseAbs().maxCoeff() <= 1e-12 * 4.0);
}

TEST_CASE("base pseudo-inverse application") {
    BaseFactor d = ldl_base(SparseSymMatrix(3, {2, 4, 5}, {}));
    Vector x = apply_base_pinv(d, {2, 4, 5});
    for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    BaseFactor r1 = ldl_base(SparseSymMatrix(2, {1, 1}, {{0, 1, -1.0}}));
    Vector y = apply_base_pinv(r1, {1.0, -1.0});
    CHECK(y[0] == doctest::Approx(0.5));
    CHECK(y[1] == doctest::Approx(-0.5));

    SparseSymMatrix f1 = oracle::figure1();
    BaseFactor bf = ldl_base(f1);
    std::mt19937_64 rng(10);
    std::normal_distribution<double> gauss;
    Vector b(4);
    for (double& v : b) v = gauss(rng);
    Vector got = apply_base_pinv(bf, b);
    Vector want = oracle::pinv_apply(f1, b);
    for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("pseudo-inverse axioms for the base factor") {
    for (int trial = 0; trial < 10; ++trial) {
        bool laplacian = trial % 2 == 1;
        int n = 6 + 3 * trial;
        SparseSymMatrix a = oracle::random_sddm(n, 9100 + trial, laplacian);
        BaseFactor f = ldl_base(a);
        Eigen::MatrixXd p =
            materialize(n, [&](const Vector& v) { return apply_base_pinv(f, v); });
        Eigen::MatrixXd ad = oracle::dense_of(a);
        check_pinv_axioms(ad, p, 1e-8 * std::max(1.0, ad.cwiseAbs().maxCoeff()));
    }
}
