#include "sdd/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace sdd {

void project_ones(Vector& x) {
    if (x.empty()) return;
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

int PartialCholFactor::l_nnz() const {
    int nnz = n1_;  // identity block diagonal
    for (const auto& c : cols_) nnz += 1 + (c.r1 >= 0) + (c.r2 >= 0);
    return nnz;
}

void PartialCholFactor::forward(Vector& x) const {
    for (int j = 0; j < n_ - n1_; ++j) {
        const LCol& c = cols_[j];
        x[j] /= c.d;
        if (c.r1 >= 0) x[c.r1] -= c.v1 * x[j];
        if (c.r2 >= 0) x[c.r2] -= c.v2 * x[j];
    }
}

void PartialCholFactor::backward(Vector& x) const {
    for (int j = n_ - n1_ - 1; j >= 0; --j) {
        const LCol& c = cols_[j];
        double s = x[j];
        if (c.r1 >= 0) s -= c.v1 * x[c.r1];
        if (c.r2 >= 0) s -= c.v2 * x[c.r2];
        x[j] = s / c.d;
    }
}

PartialCholFactor partial_cholesky(const SparseSymMatrix& b) {
    MatrixClass mc = classify(b);
    if (mc.kind != MatrixKind::Laplacian && mc.kind != MatrixKind::SDDM0)
        throw std::invalid_argument("partial_cholesky: matrix is not SDDM0");
    // purely diagonal matrices factor row by row; anything else must be
    // irreducible
    if (!mc.irreducible && b.noff() > 0)
        throw std::invalid_argument("partial_cholesky: reducible matrix");

    int n = b.dim();
    double ztol = 1e-12 * std::max(b.scale(), 1e-300);

    // mutable adjacency; ordered maps keep elimination deterministic
    std::vector<std::map<int, double>> adj(n);
    std::vector<double> diag = b.diag();
    for (const auto& e : b.off()) {
        adj[e.i][e.j] = e.v;
        adj[e.j][e.i] = e.v;
    }

    std::deque<int> queue;
    std::vector<char> queued(n, 0), eliminated(n, 0);
    for (int v = 0; v < n; ++v)
        if (adj[v].size() <= 2) {
            queue.push_back(v);
            queued[v] = 1;
        }

    PartialCholFactor f;
    f.n_ = n;
    f.projection_ = (mc.kind == MatrixKind::Laplacian);

    struct RawCol {
        int v;        // eliminated vertex
        double d;
        int u1 = -1;  // neighbor vertex ids (translated to positions later)
        double v1 = 0.0;
        int u2 = -1;
        double v2 = 0.0;
    };
    std::vector<RawCol> raw;
    raw.reserve(n);
    int remaining = n;

    auto push_if_ready = [&](int u) {
        if (!eliminated[u] && !queued[u] && adj[u].size() <= 2) {
            queue.push_back(u);
            queued[u] = 1;
        }
    };

    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        queued[v] = 0;
        if (eliminated[v]) continue;
        std::size_t deg = adj[v].size();
        if (deg > 2) continue;
        double pivot = diag[v];

        if (deg == 0) {
            RawCol c{v, 1.0};
            if (pivot > ztol) {
                c.d = std::sqrt(pivot);
                f.cdiag_.push_back(1.0);
            } else if (remaining == 1) {
                c.d = 1.0;  // singular Laplacian bottom: zero slot in C
                f.cdiag_.push_back(0.0);
            } else {
                throw std::runtime_error("partial_cholesky: singular block before the last row");
            }
            raw.push_back(c);
            eliminated[v] = 1;
            --remaining;
            continue;
        }
        if (pivot <= ztol) throw std::runtime_error("partial_cholesky: nonpositive pivot");
        double s = std::sqrt(pivot);
        RawCol c{v, s};
        auto it = adj[v].begin();
        int u1 = it->first;
        double a1 = it->second;
        c.u1 = u1;
        c.v1 = a1 / s;
        if (deg == 2) {
            ++it;
            int u2 = it->first;
            double a2 = it->second;
            c.u2 = u2;
            c.v2 = a2 / s;
            diag[u1] -= a1 * a1 / pivot;
            diag[u2] -= a2 * a2 / pivot;
            adj[u1].erase(v);
            adj[u2].erase(v);
            double fill = -a1 * a2 / pivot;  // stays nonpositive
            adj[u1][u2] += fill;
            adj[u2][u1] += fill;
            push_if_ready(u1);
            push_if_ready(u2);
        } else {
            diag[u1] -= a1 * a1 / pivot;
            adj[u1].erase(v);
            push_if_ready(u1);
        }
        f.cdiag_.push_back(1.0);
        raw.push_back(c);
        eliminated[v] = 1;
        --remaining;
    }

    // permutation: eliminated in order, then the remaining rows ascending
    f.perm_.reserve(n);
    for (const auto& c : raw) f.perm_.push_back(c.v);
    std::vector<int> rest;
    for (int v = 0; v < n; ++v)
        if (!eliminated[v]) rest.push_back(v);
    f.n1_ = static_cast<int>(rest.size());
    for (int v : rest) f.perm_.push_back(v);
    f.inv_perm_.assign(n, -1);
    for (int pos = 0; pos < n; ++pos) f.inv_perm_[f.perm_[pos]] = pos;

    f.cols_.reserve(raw.size());
    for (const auto& c : raw) {
        PartialCholFactor::LCol col;
        col.d = c.d;
        if (c.u1 >= 0) {
            col.r1 = f.inv_perm_[c.u1];
            col.v1 = c.v1;
        }
        if (c.u2 >= 0) {
            col.r2 = f.inv_perm_[c.u2];
            col.v2 = c.v2;
        }
        if (col.r1 > col.r2 && col.r2 >= 0) {
            std::swap(col.r1, col.r2);
            std::swap(col.v1, col.v2);
        }
        f.cols_.push_back(col);
    }

    // reduced matrix over the remaining rows
    std::vector<int> local(n, -1);
    for (int i = 0; i < f.n1_; ++i) local[rest[i]] = i;
    std::vector<double> rdiag(f.n1_);
    std::vector<SparseSymMatrix::Off> roff;
    for (int i = 0; i < f.n1_; ++i) {
        int v = rest[i];
        rdiag[i] = diag[v];
        for (const auto& [u, val] : adj[v])
            if (local[u] > i) roff.push_back({i, local[u], val});
    }
    f.reduced_ = SparseSymMatrix(f.n1_, std::move(rdiag), std::move(roff));
    return f;
}

Vector apply_factored_pinv(const PartialCholFactor& f,
                           const std::function<Vector(const Vector&)>& inner, const Vector& b) {
    if (static_cast<int>(b.size()) != f.dim())
        throw std::invalid_argument("apply_factored_pinv: dimension mismatch");
    Vector x = b;
    if (f.projection()) project_ones(x);
    Vector s(f.dim());
    for (int pos = 0; pos < f.dim(); ++pos) s[pos] = x[f.perm()[pos]];
    f.forward(s);
    int ne = f.eliminated_count();
    for (int j = 0; j < ne; ++j) s[j] *= f.cdiag()[j];
    if (f.reduced_dim() > 0) {
        Vector s1(s.begin() + ne, s.end());
        Vector y1 = inner(s1);
        if (static_cast<int>(y1.size()) != f.reduced_dim())
            throw std::invalid_argument("apply_factored_pinv: inner dimension mismatch");
        std::copy(y1.begin(), y1.end(), s.begin() + ne);
    }
    f.backward(s);
    for (int pos = 0; pos < f.dim(); ++pos) x[f.perm()[pos]] = s[pos];
    if (f.projection()) project_ones(x);
    return x;
}

Vector apply_factored_pinv(const PartialCholFactor& f, const Vector& b) {
    if (f.reduced_dim() != 0)
        throw std::invalid_argument("apply_factored_pinv: inner solver required");
    return apply_factored_pinv(f, [](const Vector& v) { return v; }, b);
}

BaseFactor ldl_base(const SparseSymMatrix& a) {
    MatrixClass mc = classify(a);
    if (mc.kind != MatrixKind::Laplacian && mc.kind != MatrixKind::SDDM0)
        throw std::invalid_argument("ldl_base: matrix is not SDDM0");
    if (!mc.irreducible && a.noff() > 0)
        throw std::invalid_argument("ldl_base: reducible matrix");

    int n = a.dim();
    BaseFactor f;
    f.n = n;
    f.projection = (mc.kind == MatrixKind::Laplacian);
    f.d.assign(n, 1.0);
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = a.diag()[i];
    for (const auto& e : a.off()) {
        m[static_cast<std::size_t>(e.i) * n + e.j] = e.v;
        m[static_cast<std::size_t>(e.j) * n + e.i] = e.v;
    }
    double ztol = 1e-12 * std::max(a.scale(), 1e-300);

    f.l.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto L = [&](int i, int j) -> double& { return f.l[static_cast<std::size_t>(i) * n + j]; };
    auto M = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };

    for (int k = 0; k < n; ++k) {
        double pivot = M(k, k);
        if (pivot <= ztol) {
            if (k != n - 1)
                throw std::runtime_error("ldl_base: singular pivot before the last row");
            L(k, k) = 1.0;
            f.d[k] = 0.0;
            break;
        }
        double s = std::sqrt(pivot);
        L(k, k) = s;
        for (int i = k + 1; i < n; ++i) L(i, k) = M(i, k) / s;
        for (int i = k + 1; i < n; ++i) {
            double lik = L(i, k);
            if (lik == 0.0) continue;
            for (int j = k + 1; j <= i; ++j) M(i, j) -= lik * L(j, k);
        }
    }
    return f;
}

Vector apply_base_pinv(const BaseFactor& f, const Vector& b) {
    if (static_cast<int>(b.size()) != f.n)
        throw std::invalid_argument("apply_base_pinv: dimension mismatch");
    int n = f.n;
    Vector x = b;
    if (f.projection) project_ones(x);
    auto L = [&](int i, int j) { return f.l[static_cast<std::size_t>(i) * n + j]; };
    // forward solve L y = x
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= L(i, j) * x[j];
        x[i] = s / L(i, i);
    }
    for (int i = 0; i < n; ++i) x[i] *= f.d[i];
    // backward solve L^T z = y
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= L(j, i) * x[j];
        x[i] = s / L(i, i);
    }
    if (f.projection) project_ones(x);
    return x;
}

}  // namespace sdd
