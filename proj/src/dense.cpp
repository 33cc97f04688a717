#include "sdd/dense.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace sdd {

DenseEig sym_eig(const std::vector<double>& a, int n) {
    if (static_cast<int>(a.size()) != n * n) throw std::invalid_argument("sym_eig: size mismatch");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i) * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");
    DenseEig out;
    out.n = n;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            out.vectors[static_cast<std::size_t>(i) * n + k] = es.eigenvectors()(i, k);
    return out;
}

std::vector<double> densify(const SparseSymMatrix& a) {
    int n = a.dim();
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = a.diag()[i];
    for (const auto& e : a.off()) {
        m[static_cast<std::size_t>(e.i) * n + e.j] = e.v;
        m[static_cast<std::size_t>(e.j) * n + e.i] = e.v;
    }
    return m;
}

DensePinv::DensePinv(const SparseSymMatrix& a) : DensePinv(densify(a), a.dim()) {}

DensePinv::DensePinv(const std::vector<double>& dense, int n) : n_(n) {
    if (n == 0) return;
    eig_ = sym_eig(dense, n);
    double amax = 0;
    for (double v : eig_.values) amax = std::max(amax, std::abs(v));
    double tol = amax * n * 1e-14;
    inv_values_.assign(n, 0.0);
    for (int k = 0; k < n; ++k)
        if (std::abs(eig_.values[k]) > tol) {
            inv_values_[k] = 1.0 / eig_.values[k];
            ++rank_;
        }
}

Vector DensePinv::apply(const Vector& b) const {
    if (static_cast<int>(b.size()) != n_) throw std::invalid_argument("pinv: dimension mismatch");
    Vector t(n_, 0.0), out(n_, 0.0);
    for (int k = 0; k < n_; ++k) {
        if (inv_values_[k] == 0.0) continue;
        double s = 0;
        for (int i = 0; i < n_; ++i) s += eig_.vectors[static_cast<std::size_t>(i) * n_ + k] * b[i];
        t[k] = s * inv_values_[k];
    }
    for (int i = 0; i < n_; ++i) {
        double s = 0;
        for (int k = 0; k < n_; ++k) s += eig_.vectors[static_cast<std::size_t>(i) * n_ + k] * t[k];
        out[i] = s;
    }
    return out;
}

std::vector<double> generalized_eigenvalues(const SparseSymMatrix& a, const SparseSymMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("pencil: dimension mismatch");
    int n = a.dim();
    DenseEig eb = sym_eig(densify(b), n);
    double bmax = 0;
    for (double v : eb.values) bmax = std::max(bmax, std::abs(v));
    double tol = std::max(bmax * n * 1e-12, 1e-300);

    // nullspace agreement: null(B) vectors must be annihilated by A
    std::vector<double> ad = densify(a);
    double amax_entry = 0;
    for (double v : ad) amax_entry = std::max(amax_entry, std::abs(v));
    std::vector<int> range;
    for (int k = 0; k < n; ++k) {
        if (std::abs(eb.values[k]) > tol) {
            range.push_back(k);
            continue;
        }
        double norm2 = 0;
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int j = 0; j < n; ++j)
                s += ad[static_cast<std::size_t>(i) * n + j] *
                     eb.vectors[static_cast<std::size_t>(j) * n + k];
            norm2 += s * s;
        }
        if (std::sqrt(norm2) > 1e-8 * std::max(amax_entry, 1.0))
            throw std::invalid_argument("pencil: nullspace mismatch");
    }
    int r = static_cast<int>(range.size());
    if (r == 0) return {};

    // S = Lambda^{-1/2} V^T A V Lambda^{-1/2} over the range of B
    Eigen::MatrixXd am(n, n), vs(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) am(i, j) = ad[static_cast<std::size_t>(i) * n + j];
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < r; ++c)
            vs(i, c) = eb.vectors[static_cast<std::size_t>(i) * n + range[c]] /
                       std::sqrt(eb.values[range[c]]);
    Eigen::MatrixXd s = vs.transpose() * am * vs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw std::runtime_error("pencil: eigensolver failed");
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + r);
}

double finite_condition_number(const SparseSymMatrix& a, const SparseSymMatrix& b, int dim_cap) {
    if (a.dim() > dim_cap)
        throw std::invalid_argument("finite_condition_number: dimension over oracle cap");
    // verify the nullspaces agree in both directions
    std::vector<double> mu = generalized_eigenvalues(a, b);
    (void)generalized_eigenvalues(b, a);
    double lo = 0, hi = 0;
    bool first = true;
    for (double v : mu) {
        if (first) {
            lo = hi = v;
            first = false;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (first || lo <= 0) throw std::runtime_error("finite_condition_number: degenerate pencil");
    return hi / lo;
}

}  // namespace sdd
