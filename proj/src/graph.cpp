#include "sdd/graph.hpp"

#include <algorithm>
#include <cmath>

namespace sdd {

bool operator==(const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v && a.w == b.w; }

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : n_(n) {
    if (n < 0) throw std::invalid_argument("graph: negative vertex count");
    for (auto& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw std::invalid_argument("graph: vertex id out of range");
        if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
        if (std::isnan(e.w) || std::isinf(e.w)) throw std::invalid_argument("graph: bad weight");
        if (e.w < 0) throw std::invalid_argument("graph: negative weight");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    edges_.reserve(edges.size());
    for (const auto& e : edges) {
        if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v)
            edges_.back().w += e.w;
        else
            edges_.push_back(e);
    }
    // drop zero-weight edges after merging
    edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                                [](const Edge& e) { return e.w == 0.0; }),
                 edges_.end());

    ptr_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
        ++ptr_[e.u + 1];
        ++ptr_[e.v + 1];
    }
    for (int v = 0; v < n_; ++v) ptr_[v + 1] += ptr_[v];
    eid_.resize(2 * edges_.size());
    std::vector<int> cur(ptr_.begin(), ptr_.end() - 1);
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
        eid_[cur[edges_[id].u]++] = id;
        eid_[cur[edges_[id].v]++] = id;
    }
}

double WeightedGraph::total_weight() const {
    double s = 0;
    for (const auto& e : edges_) s += e.w;
    return s;
}

SparseSymMatrix::SparseSymMatrix(int n, std::vector<double> diag, std::vector<Off> off)
    : n_(n), diag_(std::move(diag)), off_(std::move(off)) {
    if (static_cast<int>(diag_.size()) != n) throw std::invalid_argument("matrix: diag size");
    for (auto& e : off_) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n || e.i == e.j)
            throw std::invalid_argument("matrix: bad off-diagonal index");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(off_.begin(), off_.end(),
              [](const Off& a, const Off& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
    for (std::size_t k = 1; k < off_.size(); ++k)
        if (off_[k - 1].i == off_[k].i && off_[k - 1].j == off_[k].j)
            throw std::invalid_argument("matrix: duplicate off-diagonal entry");
    off_.erase(std::remove_if(off_.begin(), off_.end(), [](const Off& e) { return e.v == 0.0; }),
               off_.end());

    ptr_.assign(n_ + 1, 0);
    for (const auto& e : off_) {
        ++ptr_[e.i + 1];
        ++ptr_[e.j + 1];
    }
    for (int v = 0; v < n_; ++v) ptr_[v + 1] += ptr_[v];
    aid_.resize(2 * off_.size());
    std::vector<int> cur(ptr_.begin(), ptr_.end() - 1);
    for (int id = 0; id < static_cast<int>(off_.size()); ++id) {
        aid_[cur[off_[id].i]++] = id;
        aid_[cur[off_[id].j]++] = id;
    }
}

SparseSymMatrix SparseSymMatrix::from_coordinates(int n, const std::vector<Off>& entries) {
    std::vector<double> diag(n, 0.0);
    std::vector<Off> upper;
    std::vector<Off> mirror;  // accumulated (i<j) from both triangles
    for (auto e : entries) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
            throw std::invalid_argument("matrix: index out of range");
        if (std::isnan(e.v) || std::isinf(e.v)) throw std::invalid_argument("matrix: bad value");
        if (e.i == e.j) {
            diag[e.i] += e.v;
        } else {
            if (e.i > e.j) std::swap(e.i, e.j);
            mirror.push_back(e);
        }
    }
    std::sort(mirror.begin(), mirror.end(),
              [](const Off& a, const Off& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });
    for (std::size_t k = 0; k < mirror.size(); ++k) {
        if (!upper.empty() && upper.back().i == mirror[k].i && upper.back().j == mirror[k].j)
            upper.back().v += mirror[k].v;
        else
            upper.push_back(mirror[k]);
    }
    return SparseSymMatrix(n, std::move(diag), std::move(upper));
}

Vector SparseSymMatrix::apply(const Vector& x) const {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("apply: dimension mismatch");
    Vector y(n_);
    for (int i = 0; i < n_; ++i) y[i] = diag_[i] * x[i];
    for (const auto& e : off_) {
        y[e.i] += e.v * x[e.j];
        y[e.j] += e.v * x[e.i];
    }
    return y;
}

double SparseSymMatrix::scale() const {
    Vector rowsum(n_, 0.0);
    for (const auto& e : off_) {
        rowsum[e.i] += std::abs(e.v);
        rowsum[e.j] += std::abs(e.v);
    }
    double s = 0;
    for (int i = 0; i < n_; ++i) s = std::max(s, std::abs(diag_[i]) + rowsum[i]);
    return s;
}

std::string to_string(MatrixKind k) {
    switch (k) {
        case MatrixKind::Laplacian: return "Laplacian";
        case MatrixKind::SDDM0: return "SDDM0";
        case MatrixKind::SDD0: return "SDD0";
        default: return "NotSDD";
    }
}

SparseSymMatrix laplacian_of(const WeightedGraph& g) {
    int n = g.num_vertices();
    std::vector<double> diag(n, 0.0);
    std::vector<SparseSymMatrix::Off> off;
    off.reserve(g.num_edges());
    for (const auto& e : g.edges()) {
        diag[e.u] += e.w;
        diag[e.v] += e.w;
        off.push_back({e.u, e.v, -e.w});
    }
    return SparseSymMatrix(n, std::move(diag), std::move(off));
}

WeightedGraph graph_of(const SparseSymMatrix& a) {
    std::vector<Edge> edges;
    edges.reserve(a.off().size());
    for (const auto& e : a.off()) {
        if (e.v > 0) throw std::invalid_argument("graph_of: positive off-diagonal");
        edges.push_back({e.i, e.j, -e.v});
    }
    return WeightedGraph(a.dim(), std::move(edges));
}

double quadratic_form(const WeightedGraph& g, const Vector& x) {
    if (static_cast<int>(x.size()) != g.num_vertices())
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    double s = 0;
    for (const auto& e : g.edges()) {
        double d = x[e.u] - x[e.v];
        s += e.w * d * d;
    }
    return s;
}

namespace {

std::vector<int> components_impl(int n, const std::vector<int>& ptr, const std::vector<int>& nbr,
                                 int* count) {
    std::vector<int> comp(n, -1);
    std::vector<int> stack;
    int c = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = c;
        stack.push_back(s);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int k = ptr[v]; k < ptr[v + 1]; ++k) {
                int u = nbr[k];
                if (comp[u] < 0) {
                    comp[u] = c;
                    stack.push_back(u);
                }
            }
        }
        ++c;
    }
    if (count) *count = c;
    return comp;
}

}  // namespace

std::vector<int> connected_components(const WeightedGraph& g, int* count) {
    int n = g.num_vertices();
    std::vector<int> ptr(n + 1, 0), nbr;
    nbr.reserve(2 * g.num_edges());
    for (int v = 0; v < n; ++v) {
        ptr[v + 1] = ptr[v] + g.degree(v);
        for (const int* it = g.incident_begin(v); it != g.incident_end(v); ++it)
            nbr.push_back(g.other(*it, v));
    }
    return components_impl(n, ptr, nbr, count);
}

std::vector<int> connected_components(const SparseSymMatrix& a, int* count) {
    int n = a.dim();
    std::vector<int> ptr(n + 1, 0), nbr;
    nbr.reserve(static_cast<std::size_t>(a.noff2()));
    for (int v = 0; v < n; ++v) {
        ptr[v + 1] = ptr[v] + a.off_degree(v);
        for (const int* it = a.adj_begin(v); it != a.adj_end(v); ++it)
            nbr.push_back(a.other(*it, v));
    }
    return components_impl(n, ptr, nbr, count);
}

MatrixClass classify(const SparseSymMatrix& a) {
    int n = a.dim();
    MatrixClass mc;
    double tol = 1e-12 * a.scale();

    std::vector<double> abs_off(n, 0.0), rowsum(n, 0.0);
    bool has_positive = false;
    for (const auto& e : a.off()) {
        abs_off[e.i] += std::abs(e.v);
        abs_off[e.j] += std::abs(e.v);
        rowsum[e.i] += e.v;
        rowsum[e.j] += e.v;
        if (e.v > tol) has_positive = true;
    }
    bool sdd = true, laplacian = true;
    for (int i = 0; i < n; ++i) {
        if (a.diag()[i] < -tol || a.diag()[i] + tol < abs_off[i]) sdd = false;
        if (std::abs(a.diag()[i] + rowsum[i]) > tol) laplacian = false;
    }

    int ncomp = 0;
    std::vector<int> comp = connected_components(a, &ncomp);
    mc.irreducible = (ncomp <= 1);

    if (!sdd) {
        mc.kind = MatrixKind::NotSDD;
        return mc;
    }
    if (has_positive) {
        mc.kind = MatrixKind::SDD0;
        return mc;
    }
    mc.kind = laplacian ? MatrixKind::Laplacian : MatrixKind::SDDM0;
    if (laplacian) {
        mc.singular = true;
        return mc;
    }
    // An SDDM0 component is singular exactly when it is a Laplacian block.
    std::vector<char> comp_singular(static_cast<std::size_t>(std::max(ncomp, 1)), 1);
    for (int i = 0; i < n; ++i)
        if (std::abs(a.diag()[i] + rowsum[i]) > tol) comp_singular[comp[i]] = 0;
    for (char s : comp_singular) mc.singular |= (s != 0);
    return mc;
}

void split_sddm(const SparseSymMatrix& a, SparseSymMatrix& a_l, Vector& a_d) {
    MatrixClass mc = classify(a);
    if (mc.kind != MatrixKind::Laplacian && mc.kind != MatrixKind::SDDM0)
        throw std::invalid_argument("split_sddm: matrix is not SDDM0");
    int n = a.dim();
    std::vector<double> ldiag(n, 0.0);
    for (const auto& e : a.off()) {
        ldiag[e.i] -= e.v;
        ldiag[e.j] -= e.v;
    }
    a_d.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        a_d[i] = a.diag()[i] - ldiag[i];
        if (a_d[i] < 0) a_d[i] = std::max(a_d[i], -1e-12 * a.scale());  // rounding guard
    }
    a_l = SparseSymMatrix(n, std::move(ldiag), a.off());
}

void gremban_reduce(const SparseSymMatrix& a, const Vector& b, SparseSymMatrix& a_hat,
                    Vector& b_hat) {
    MatrixClass mc = classify(a);
    if (mc.kind == MatrixKind::NotSDD) throw std::invalid_argument("gremban_reduce: not SDD0");
    if (static_cast<int>(b.size()) != a.dim())
        throw std::invalid_argument("gremban_reduce: rhs dimension mismatch");
    int n = a.dim();
    std::vector<double> diag(2 * n);
    for (int i = 0; i < n; ++i) diag[i] = diag[n + i] = a.diag()[i];
    std::vector<SparseSymMatrix::Off> off;
    off.reserve(2 * a.off().size());
    for (const auto& e : a.off()) {
        if (e.v < 0) {
            off.push_back({e.i, e.j, e.v});
            off.push_back({n + e.i, n + e.j, e.v});
        } else if (e.v > 0) {
            off.push_back({e.i, n + e.j, -e.v});
            off.push_back({e.j, n + e.i, -e.v});
        }
    }
    a_hat = SparseSymMatrix(2 * n, std::move(diag), std::move(off));
    b_hat.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        b_hat[i] = b[i];
        b_hat[n + i] = -b[i];
    }
}

Vector gremban_recover(const Vector& x_hat) {
    if (x_hat.size() % 2 != 0) throw std::invalid_argument("gremban_recover: odd length");
    std::size_t n = x_hat.size() / 2;
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (x_hat[i] - x_hat[n + i]) / 2.0;
    return x;
}

}  // namespace sdd
