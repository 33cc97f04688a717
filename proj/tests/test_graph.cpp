#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "sdd/graph.hpp"

using namespace sdd;

TEST_CASE("laplacian of the figure-1 graph") {
    SparseSymMatrix l = laplacian_of(oracle::figure1_graph());
    auto d = oracle::dense_of(l);
    Eigen::MatrixXd want(4, 4);
    want << 1.5, -1.5, 0, 0, -1.5, 4, -2, -0.5, 0, -2, 3, -1, 0, -0.5, -1, 1.5;
    CHECK((d - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian of a single edge and of an empty graph") {
    SparseSymMatrix l = laplacian_of(WeightedGraph(2, {{0, 1, 1.0}}));
    CHECK(l.diag() == std::vector<double>{1.0, 1.0});
    REQUIRE(l.off().size() == 1);
    CHECK(l.off()[0].v == -1.0);

    SparseSymMatrix z = laplacian_of(WeightedGraph(3, {}));
    CHECK(z.diag() == std::vector<double>{0, 0, 0});
    CHECK(z.off().empty());
}

TEST_CASE("apply") {
    SparseSymMatrix l = oracle::figure1();
    Vector ones(4, 1.0);
    for (double v : l.apply(ones)) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));

    SparseSymMatrix id(3, {1, 1, 1}, {});
    Vector x{2.0, -3.0, 0.5};
    CHECK(id.apply(x) == x);

    Vector e1{1, 0, 0, 0};
    Vector col = l.apply(e1);
    CHECK(col[0] == 1.5);
    CHECK(col[1] == -1.5);
    CHECK(col[2] == 0.0);
    CHECK(col[3] == 0.0);

    CHECK_THROWS_AS((void)l.apply(Vector(3, 0.0)), std::invalid_argument);
}

TEST_CASE("quadratic form") {
    WeightedGraph g(2, {{0, 1, 2.0}});
    CHECK(quadratic_form(g, {1.0, 0.0}) == 2.0);

    WeightedGraph f1 = oracle::figure1_graph();
    CHECK(quadratic_form(f1, Vector(4, 0.7)) == 0.0);
    CHECK(quadratic_form(f1, {1.0, 0.0, 0.0, 0.0}) == 1.5);
}

TEST_CASE("quadratic form equals x' L x") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
        WeightedGraph g = oracle::random_connected(30, 40, 100 + trial);
        SparseSymMatrix l = laplacian_of(g);
        Vector x(30);
        for (double& v : x) v = gauss(rng);
        double qf = quadratic_form(g, x);
        Vector lx = l.apply(x);
        double xlx = 0;
        for (int i = 0; i < 30; ++i) xlx += x[i] * lx[i];
        CHECK(qf == doctest::Approx(xlx).epsilon(1e-10));
    }
}

TEST_CASE("classification") {
    MatrixClass f1 = classify(oracle::figure1());
    CHECK(f1.kind == MatrixKind::Laplacian);
    CHECK(f1.irreducible);
    CHECK(f1.singular);

    MatrixClass pos = classify(SparseSymMatrix(2, {2, 2}, {{0, 1, 1.0}}));
    CHECK(pos.kind == MatrixKind::SDD0);
    CHECK(pos.irreducible);
    CHECK_FALSE(pos.singular);

    SparseSymMatrix block(4, {1, 1, 2, 2}, {{0, 1, -1.0}, {2, 3, -2.0}});
    MatrixClass bc = classify(block);
    CHECK(bc.kind == MatrixKind::Laplacian);
    CHECK_FALSE(bc.irreducible);
    CHECK(bc.singular);

    MatrixClass m0 = classify(SparseSymMatrix(2, {3, 2}, {{0, 1, -1.0}}));
    CHECK(m0.kind == MatrixKind::SDDM0);
    CHECK_FALSE(m0.singular);

    MatrixClass bad = classify(SparseSymMatrix(2, {1, 1}, {{0, 1, -2.0}}));
    CHECK(bad.kind == MatrixKind::NotSDD);
}

TEST_CASE("classify is invariant under symmetric permutation") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        SparseSymMatrix a = oracle::random_sdd(12, 500 + trial);
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> diag(12);
        std::vector<SparseSymMatrix::Off> off;
        for (int i = 0; i < 12; ++i) diag[perm[i]] = a.diag()[i];
        for (const auto& e : a.off()) off.push_back({perm[e.i], perm[e.j], e.v});
        SparseSymMatrix b = SparseSymMatrix::from_coordinates(12, off);
        std::vector<double> bd = b.diag();
        (void)bd;
        SparseSymMatrix b2(12, diag, [&] {
            std::vector<SparseSymMatrix::Off> o = off;
            for (auto& e : o)
                if (e.i > e.j) std::swap(e.i, e.j);
            return o;
        }());
        MatrixClass ca = classify(a), cb = classify(b2);
        CHECK(ca.kind == cb.kind);
        CHECK(ca.irreducible == cb.irreducible);
        CHECK(ca.singular == cb.singular);
    }
}

TEST_CASE("split into Laplacian plus diagonal") {
    SparseSymMatrix a(2, {3, 2}, {{0, 1, -1.0}});
    SparseSymMatrix al;
    Vector ad;
    split_sddm(a, al, ad);
    CHECK(al.diag() == std::vector<double>{1.0, 1.0});
    CHECK(ad == Vector{2.0, 1.0});

    SparseSymMatrix lap = oracle::figure1();
    split_sddm(lap, al, ad);
    CHECK(ad == Vector(4, 0.0));
    CHECK(oracle::dense_of(al) == oracle::dense_of(lap));

    SparseSymMatrix d(2, {1, 2}, {});
    split_sddm(d, al, ad);
    CHECK(al.off().empty());
    CHECK(al.diag() == std::vector<double>{0.0, 0.0});
    CHECK(ad == Vector{1.0, 2.0});

    CHECK_THROWS_AS(split_sddm(SparseSymMatrix(2, {2, 2}, {{0, 1, 1.0}}), al, ad),
                    std::invalid_argument);
}

TEST_CASE("gremban reduction block formula") {
    SparseSymMatrix a(2, {2, 2}, {{0, 1, 1.0}});
    SparseSymMatrix ah;
    Vector bh;
    gremban_reduce(a, {1.0, 1.0}, ah, bh);
    Eigen::MatrixXd want(4, 4);
    want << 2, 0, 0, -1, 0, 2, -1, 0, 0, -1, 2, 0, -1, 0, 0, 2;
    CHECK((oracle::dense_of(ah) - want).cwiseAbs().maxCoeff() == 0.0);
    CHECK(bh == Vector{1, 1, -1, -1});
    CHECK(classify(ah).kind == MatrixKind::SDDM0);

    // SDDM0 input: A_p = 0, hat(A) = blockdiag(A, A)
    SparseSymMatrix m(2, {3, 2}, {{0, 1, -1.0}});
    gremban_reduce(m, {1.0, 0.0}, ah, bh);
    Eigen::MatrixXd bd = Eigen::MatrixXd::Zero(4, 4);
    bd.topLeftCorner(2, 2) = oracle::dense_of(m);
    bd.bottomRightCorner(2, 2) = oracle::dense_of(m);
    CHECK((oracle::dense_of(ah) - bd).cwiseAbs().maxCoeff() == 0.0);

    SparseSymMatrix s(1, {3}, {});
    gremban_reduce(s, {6.0}, ah, bh);
    CHECK(ah.diag() == std::vector<double>{3.0, 3.0});
    CHECK(bh == Vector{6.0, -6.0});
}

TEST_CASE("gremban recovery") {
    Vector xh{1.0 / 3, 1.0 / 3, -1.0 / 3, -1.0 / 3};
    Vector x = gremban_recover(xh);
    CHECK(x == Vector{1.0 / 3, 1.0 / 3});
    // checks A x = b for A = [[2,1],[1,2]], b = (1,1)
    SparseSymMatrix a(2, {2, 2}, {{0, 1, 1.0}});
    Vector ax = a.apply(x);
    CHECK(ax[0] == doctest::Approx(1.0));
    CHECK(ax[1] == doctest::Approx(1.0));

    CHECK(gremban_recover({2.0, -3.0, -2.0, 3.0}) == Vector{2.0, -3.0});
    CHECK(gremban_recover({2.0, -3.0, 2.0, -3.0}) == Vector{0.0, 0.0});
    CHECK_THROWS_AS(gremban_recover(Vector(3, 0.0)), std::invalid_argument);
}

TEST_CASE("gremban round trip against a dense solve") {
    for (int trial = 0; trial < 12; ++trial) {
        int n = 5 + trial;
        SparseSymMatrix a = oracle::random_sdd(n, 900 + trial);
        std::mt19937_64 rng(31 + trial);
        std::normal_distribution<double> gauss;
        Vector b(n);
        for (double& v : b) v = gauss(rng);

        SparseSymMatrix ah;
        Vector bh;
        gremban_reduce(a, b, ah, bh);
        CHECK((classify(ah).kind == MatrixKind::SDDM0 ||
               classify(ah).kind == MatrixKind::Laplacian));
        Vector xh = oracle::pinv_apply(ah, bh);
        Vector x = gremban_recover(xh);
        Vector ax = a.apply(x);
        double err = 0, bn = 0;
        for (int i = 0; i < n; ++i) {
            err += (ax[i] - b[i]) * (ax[i] - b[i]);
            bn += b[i] * b[i];
        }
        CHECK(std::sqrt(err) <= 1e-8 * std::sqrt(bn));
    }
}

TEST_CASE("connected components basics") {
    WeightedGraph path(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    int c = 0;
    connected_components(path, &c);
    CHECK(c == 1);

    WeightedGraph iso(2, {});
    connected_components(iso, &c);
    CHECK(c == 2);

    connected_components(oracle::figure1_graph(), &c);
    CHECK(c == 1);
}

TEST_CASE("graph construction rules") {
    // duplicates summed, zero weights dropped
    WeightedGraph g(3, {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 0.0}});
    CHECK(g.num_edges() == 1);
    CHECK(g.edge(0).w == 3.0);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 1, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(WeightedGraph(2, {{0, 2, 1.0}}), std::invalid_argument);
}

TEST_CASE("laplacian has zero row sums") {
    WeightedGraph g = oracle::random_connected(40, 80, 77);
    SparseSymMatrix l = laplacian_of(g);
    Vector row = l.apply(Vector(40, 1.0));
    double scale = l.scale();
    for (double v : row) CHECK(std::abs(v) <= 1e-12 * scale);
}
