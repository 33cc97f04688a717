#include "sdd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "sdd/kernels.hpp"

namespace sdd {

namespace {

constexpr double kChebyEps = 2.0 * 0.1353352832366127;  // 2 e^{-2}

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

SparseSymMatrix add_diagonal(const SparseSymMatrix& a, const Vector& d) {
    Vector diag = a.diag();
    for (int i = 0; i < a.dim(); ++i) diag[i] += d[i];
    return SparseSymMatrix(a.dim(), std::move(diag), a.off());
}

}  // namespace

LinearOperator operator_of(const SparseSymMatrix& a) {
    return {a.dim(), [&a](const Vector& x) { return a.apply(x); }};
}

Vector precond_cheby(const LinearOperator& a, const Vector& b, int t, const LinearOperator& f,
                     double lambda_min, double lambda_max) {
    if (t < 1) throw std::invalid_argument("precond_cheby: t must be >= 1");
    if (!(lambda_min > 0) || lambda_max < lambda_min)
        throw std::invalid_argument("precond_cheby: bad eigenvalue interval");
    const std::size_t n = b.size();
    const double d = (lambda_max + lambda_min) / 2.0;
    const double c = (lambda_max - lambda_min) / 2.0;

    Vector x(n, 0.0), r = b, p;
    double alpha = 0.0;
    for (int i = 1; i <= t; ++i) {
        Vector z = f.apply(r);
        if (i == 1) {
            p = std::move(z);
            alpha = 1.0 / d;
        } else {
            double beta = (c * alpha / 2.0) * (c * alpha / 2.0);
            if (i == 2) beta *= 2.0;  // T_0 -> T_1 ratio
            alpha = 1.0 / (d - beta / alpha);
            kernels::xpay(z.data(), beta, p.data(), n);
        }
        kernels::axpy(alpha, p.data(), x.data(), n);
        if (i < t) {
            Vector ax = a.apply(x);
            kernels::sub(b.data(), ax.data(), r.data(), n);
        }
    }
    return x;
}

PcgResult pcg(const LinearOperator& a, const LinearOperator& precond, const Vector& b, double eps,
              long long max_iters, const Vector* x0) {
    const std::size_t n = b.size();
    PcgResult out;
    out.x.assign(n, 0.0);
    Vector r = b;
    if (x0) {
        out.x = *x0;
        Vector ax = a.apply(out.x);
        kernels::sub(b.data(), ax.data(), r.data(), n);
    }
    Vector z = precond.apply(r);
    double rz = kernels::dot(r.data(), z.data(), n);
    double delta0 = std::sqrt(std::max(rz, 0.0));
    if (delta0 == 0.0) {
        out.converged = true;
        return out;
    }
    Vector p = z;
    while (out.iterations < max_iters) {
        ++out.iterations;
        Vector ap = a.apply(p);
        double pap = kernels::dot(p.data(), ap.data(), n);
        if (!(pap > 0) || !std::isfinite(pap)) {
            out.breakdown = true;
            return out;
        }
        double alpha = rz / pap;
        kernels::axpy(alpha, p.data(), out.x.data(), n);
        kernels::axpy(-alpha, ap.data(), r.data(), n);
        z = precond.apply(r);
        double rz_new = kernels::dot(r.data(), z.data(), n);
        if (std::sqrt(std::max(rz_new, 0.0)) <= eps * delta0) {
            out.converged = true;
            return out;
        }
        if (!std::isfinite(rz_new)) {
            out.breakdown = true;
            return out;
        }
        double beta = rz_new / rz;
        rz = rz_new;
        kernels::xpay(z.data(), beta, p.data(), n);
    }
    return out;
}

ResolvedChainParams resolve_chain_params(const ChainConfig& cfg, int n) {
    ResolvedChainParams out;
    double logn = std::log2(std::max(2.0, static_cast<double>(n)));
    double chi = cfg.chi > 0 ? cfg.chi : std::max(1.0, cfg.c3 * std::pow(logn, cfg.c4));
    if (cfg.k > 0) {
        out.k = cfg.k;
    } else {
        chi = std::min(chi, std::max((std::sqrt(static_cast<double>(n)) - 1.0) / 14.0, 1e-3));
        out.k = (14.0 * chi + 1.0) * (14.0 * chi + 1.0);
    }
    out.chi = chi;
    out.threshold = cfg.base_dim_threshold > 0
                        ? cfg.base_dim_threshold
                        : static_cast<int>(std::min(66.0 * chi + 6.0, 512.0));
    out.threshold = std::max(out.threshold, 1);
    return out;
}

namespace {

struct LevelB {
    SparseSymMatrix b;
    double k_level = 1.0;  // 0 means "no deterministic bound, estimate only"
};

LevelB make_level_b(const SparseSymMatrix& a_cur, const ChainConfig& cfg,
                    const ResolvedChainParams& params, int level, std::uint64_t seed) {
    int n = a_cur.dim();
    SparseSymMatrix a_l;
    Vector a_d;
    split_sddm(a_cur, a_l, a_d);
    WeightedGraph g = graph_of(a_l);

    if (cfg.presparsify && level == 0 &&
        g.num_edges() > 4 * std::max(n, 1)) {
        std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);
        WeightedGraph hs =
            default_sparsifier(g, 1.0 / (2.0 * std::max(n, 1)), cfg.sparsifier_q, rng);
        return {add_diagonal(laplacian_of(hs), a_d), 0.0};
    }

    if (cfg.policy == ChainConfig::Policy::Worstcase) {
        UltraSparsifyOptions opts;
        opts.tree = cfg.tree;
        opts.sparsifier = cfg.sparsifier;
        opts.sparsifier_q = cfg.sparsifier_q;
        opts.seed = seed;
        UltraSparsifier u = ultra_sparsify(g, std::max(params.k, 1.0), opts);
        return {add_diagonal(laplacian_of(u.graph(n)), a_d), std::max(params.k, 1.0)};
    }

    // adaptive: tree plus bridges sized for geometric dimension decay
    int m = g.num_edges();
    if (m <= (n - 1) + std::max(4, n / 64)) return {a_cur, 1.0};

    SpanningTree t = build_tree(g, cfg.tree, seed);
    StretchTable st = compute_stretch(t, g.edges());
    long long j_target = std::max<long long>(8, static_cast<long long>(
                                                    std::ceil(n / (2.0 * cfg.shrink))));
    long long t_aug = std::max<long long>(
        2, static_cast<long long>(std::ceil(std::sqrt(2.0 * (static_cast<double>(j_target) + 1)))));
    t_aug = std::min(t_aug, static_cast<long long>(std::floor(st.eta_total)));
    if (t_aug <= 1) return {a_cur, 1.0};

    std::vector<int> f = augment_tree(t, g.edges(), t_aug);
    std::vector<Edge> kept = t.edges();
    for (int id : f) {
        const Edge& e = g.edge(id);
        if (!t.is_tree_edge(e.u, e.v)) kept.push_back(e);
    }
    WeightedGraph u(n, std::move(kept));
    return {add_diagonal(laplacian_of(u), a_d), 12.0 * st.eta_total / static_cast<double>(t_aug)};
}

// Power-iteration estimate of the largest eigenvalue of Z*A on the range.
double estimate_lambda_max(const LinearOperator& a, const LinearOperator& z, bool laplacian,
                           int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xbb67ae8584caa73bULL);
    std::normal_distribution<double> gauss;
    Vector v(a.n);
    for (double& x : v) x = gauss(rng);
    if (laplacian) project_ones(v);
    double lam = 1.0;
    for (int s = 0; s < steps; ++s) {
        Vector av = a.apply(v);
        Vector w = z.apply(av);
        double num = kernels::dot(w.data(), av.data(), w.size());
        double den = kernels::dot(v.data(), av.data(), v.size());
        if (den > 0 && num > 0) lam = num / den;
        double nw = kernels::nrm2(w.data(), w.size());
        if (!(nw > 0)) break;
        kernels::scal(1.0 / nw, w.data(), w.size());
        if (laplacian) project_ones(w);
        v = std::move(w);
    }
    return lam;
}

}  // namespace

SolverChain build_preconditioners(const SparseSymMatrix& a0, const ChainConfig& cfg) {
    MatrixClass mc = classify(a0);
    if (mc.kind != MatrixKind::Laplacian && mc.kind != MatrixKind::SDDM0)
        throw std::invalid_argument("build_preconditioners: matrix is not SDDM0");
    if (!mc.irreducible) throw std::invalid_argument("build_preconditioners: reducible matrix");

    SolverChain chain;
    chain.n = a0.dim();
    chain.laplacian = (mc.kind == MatrixKind::Laplacian);
    chain.cfg = cfg;
    chain.params = resolve_chain_params(cfg, a0.dim());

    const SparseSymMatrix* a_cur = &a0;
    int level = 0;
    while (a_cur->dim() >= chain.params.threshold && a_cur->dim() > 1) {
        std::uint64_t seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (level + 1);
        LevelB lb = make_level_b(*a_cur, cfg, chain.params, level, seed);

        int ncomp = 0;
        connected_components(lb.b, &ncomp);
        for (int retry = 0; ncomp != 1 && retry < cfg.max_retries; ++retry) {
            lb = make_level_b(*a_cur, cfg, chain.params, level, seed + retry + 1);
            connected_components(lb.b, &ncomp);
        }
        if (ncomp != 1)
            throw std::runtime_error("build_preconditioners: disconnected preconditioner");

        PartialCholFactor factor = partial_cholesky(lb.b);
        if (factor.reduced().dim() >= a_cur->dim()) {
            // no progress (dense sparsifier output); force the augment route
            ChainConfig forced = cfg;
            forced.policy = ChainConfig::Policy::Adaptive;
            forced.presparsify = false;
            lb = make_level_b(*a_cur, forced, chain.params, level, seed);
            factor = partial_cholesky(lb.b);
            if (factor.reduced().dim() >= a_cur->dim())
                throw std::runtime_error("build_preconditioners: chain failed to shrink");
        }

        ChainLevel cl;
        cl.b = std::move(lb.b);
        cl.a = factor.reduced();
        cl.factor = std::move(factor);
        cl.k_level = lb.k_level;
        chain.levels.push_back(std::move(cl));
        a_cur = &chain.levels.back().a;
        if (++level > 200) throw std::runtime_error("build_preconditioners: chain too deep");
    }
    if (a_cur->dim() > 0) chain.base = DensePinv(*a_cur);

    // Chebyshev intervals bottom-up: level idx preconditions its input
    // matrix (A_{idx-1}) by Solve_{B_{idx+1}}.
    for (int idx = static_cast<int>(chain.levels.size()) - 1; idx >= 0; --idx) {
        ChainLevel& cl = chain.levels[idx];
        double kl = cl.k_level;
        double lmin = 1.0 - kChebyEps;
        double lmax = (1.0 + kChebyEps) * std::max(kl, 1.0);
        // calib_steps == 0 keeps the deterministic interval (the augment
        // bound); presparsified levels have no bound and always calibrate
        bool want_calibration =
            (kl == 0.0) ||
            (cfg.policy == ChainConfig::Policy::Adaptive && cfg.calib_steps > 0 && kl > 4.0);
        if (want_calibration) {
            const SparseSymMatrix& input = (idx == 0) ? a0 : chain.levels[idx - 1].a;
            if (input.dim() >= 2) {
                LinearOperator z = solve_level_operator(chain, idx + 1);
                double est = estimate_lambda_max(operator_of(input), z, chain.laplacian,
                                                 std::max(cfg.calib_steps, 12), cfg.seed + idx);
                double headroom = (kl == 0.0) ? 1.5 : 1.3;
                double cal = std::max(est * headroom, 1.0 + 1e-9);
                lmax = (kl == 0.0) ? cal : std::min(cal, lmax);
                lmin = (1.0 - kChebyEps) * 0.98;
            }
        }
        cl.cheb.lambda_min = lmin;
        cl.cheb.lambda_max = lmax;
        cl.cheb.t = std::max(1, static_cast<int>(std::ceil(std::sqrt(lmax / lmin))));
    }
    if (!chain.levels.empty()) chain.outer = chain.levels.front().cheb;
    return chain;
}

Vector solve_level(const SolverChain& chain, int i, const Vector& b) {
    if (i < 1 || i > static_cast<int>(chain.levels.size()))
        throw std::invalid_argument("solve_level: level index out of range");
    int idx = i - 1;
    const ChainLevel& cl = chain.levels[idx];
    auto inner = [&](const Vector& s1) -> Vector {
        if (idx + 1 == static_cast<int>(chain.levels.size())) return chain.base.apply(s1);
        const ChebyParams& cp = chain.levels[idx + 1].cheb;
        return precond_cheby(operator_of(cl.a), s1, cp.t, solve_level_operator(chain, i + 1),
                             cp.lambda_min, cp.lambda_max);
    };
    return apply_factored_pinv(cl.factor, inner, b);
}

LinearOperator solve_level_operator(const SolverChain& chain, int i) {
    int n = (i == 1) ? chain.n : chain.levels[i - 2].a.dim();
    return {n, [&chain, i](const Vector& b) { return solve_level(chain, i, b); }};
}

SolveMode solve_mode_from_string(const std::string& s) {
    if (s == "recursive") return SolveMode::Recursive;
    if (s == "one-level") return SolveMode::OneLevel;
    if (s == "pcg-tree") return SolveMode::PcgTree;
    throw std::invalid_argument("unknown solve mode: " + s);
}

std::string to_string(SolveMode m) {
    switch (m) {
        case SolveMode::Recursive: return "recursive";
        case SolveMode::OneLevel: return "one-level";
        default: return "pcg-tree";
    }
}

namespace {

SparseSymMatrix extract_block(const SparseSymMatrix& a, const std::vector<int>& verts,
                              const std::vector<int>& local) {
    std::vector<double> diag(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) diag[i] = a.diag()[verts[i]];
    std::vector<SparseSymMatrix::Off> off;
    for (const auto& e : a.off())
        if (local[e.i] >= 0 && local[e.j] >= 0) off.push_back({local[e.i], local[e.j], e.v});
    return SparseSymMatrix(static_cast<int>(verts.size()), std::move(diag), std::move(off));
}

// Estimate of the relative A-norm error using the preconditioner Z as a
// stand-in for pinv(A): sqrt(r'Zr / b'Zb).
double anorm_surrogate(const SparseSymMatrix& a, const LinearOperator& z, const Vector& b,
                       const Vector& x) {
    Vector ax = a.apply(x);
    Vector r(b.size());
    kernels::sub(b.data(), ax.data(), r.data(), b.size());
    Vector zr = z.apply(r);
    Vector zb = z.apply(b);
    double num = std::max(kernels::dot(r.data(), zr.data(), r.size()), 0.0);
    double den = std::max(kernels::dot(b.data(), zb.data(), b.size()), 0.0);
    if (den == 0.0) return std::sqrt(num) > 0 ? 1.0 : 0.0;
    return std::sqrt(num / den);
}

struct BlockContext {
    double eps;
    const SolveOptions* opts;
    SolveReport* report;
    std::uint64_t sub_seed = 0;
};

// Iteratively refine x with PCG until the surrogate certifies eps (or the
// refinement budget runs out). Returns the final surrogate value.
double refine_until(const SparseSymMatrix& a, const LinearOperator& z, const Vector& b, Vector& x,
                    double eps, int rounds, SolveReport& report) {
    double est = anorm_surrogate(a, z, b, x);
    long long cap = 20 * static_cast<long long>(std::sqrt(static_cast<double>(a.dim()))) + 200;
    for (int round = 0; est > eps * 0.9 && round < rounds; ++round) {
        double target = std::clamp(0.4 * eps / est, 1e-14, 0.5);
        PcgResult pr = pcg(operator_of(a), z, b, target, cap, &x);
        x = std::move(pr.x);
        report.outer_iterations += pr.iterations;
        if (pr.breakdown) break;
        est = anorm_surrogate(a, z, b, x);
    }
    return est;
}

void note_flag(SolveReport& report, bool ok) {
    if (!ok) report.status = "flagged";
}

Vector solve_sddm_irreducible(const SparseSymMatrix& a, const Vector& b, BlockContext ctx) {
    SolveReport& report = *ctx.report;
    const SolveOptions& opts = *ctx.opts;
    const double eps = ctx.eps;
    int n = a.dim();
    MatrixClass mc = classify(a);

    Vector rhs = b;
    if (mc.kind == MatrixKind::Laplacian) {
        double s = 0;
        for (double v : rhs) s += v;
        double bn = kernels::nrm2(rhs.data(), rhs.size());
        if (std::abs(s) > 1e-10 * std::max(bn, 1e-300) * std::sqrt(static_cast<double>(n)))
            report.rhs_projected = true;
        project_ones(rhs);
    }

    ResolvedChainParams params = resolve_chain_params(opts.chain, n);
    double build_start = now_ms();

    if (opts.mode == SolveMode::Recursive) {
        if (n < params.threshold || n <= 2) {
            DensePinv z(a);
            report.base_dim = std::max(report.base_dim, n);
            report.build_ms += now_ms() - build_start;
            double solve_start = now_ms();
            Vector x = z.apply(rhs);
            report.solve_ms += now_ms() - solve_start;
            return x;
        }
        ChainConfig cc = opts.chain;
        cc.seed = opts.chain.seed + ctx.sub_seed;
        SolverChain chain = build_preconditioners(a, cc);
        report.build_ms += now_ms() - build_start;
        if (static_cast<int>(chain.levels.size()) >= static_cast<int>(report.levels.size())) {
            report.levels.clear();
            for (const auto& cl : chain.levels)
                report.levels.push_back(
                    {cl.a.dim(), cl.a.noff(), cl.b.noff(), cl.k_level, cl.cheb.t});
            report.base_dim = chain.levels.empty() ? n : chain.levels.back().a.dim();
        }

        double solve_start = now_ms();
        LinearOperator z = solve_level_operator(chain, 1);
        double ratio = chain.outer.lambda_max / chain.outer.lambda_min;
        int t_outer = std::max(
            1, static_cast<int>(std::ceil(0.5 * std::sqrt(ratio) *
                                          std::log(2.0 / std::clamp(eps, 1e-300, 1.9)))));
        Vector x = precond_cheby(operator_of(a), rhs, t_outer, z, chain.outer.lambda_min,
                                 chain.outer.lambda_max);
        report.outer_iterations += t_outer;
        double est = refine_until(a, z, rhs, x, eps, opts.max_refine_rounds, report);
        report.anorm_estimate = std::max(report.anorm_estimate, est);
        note_flag(report, est <= eps);
        if (chain.laplacian) project_ones(x);
        report.solve_ms += now_ms() - solve_start;
        return x;
    }

    if (opts.mode == SolveMode::OneLevel) {
        if (n <= 2) {
            DensePinv z(a);
            report.base_dim = std::max(report.base_dim, n);
            return z.apply(rhs);
        }
        SparseSymMatrix a_l;
        Vector a_d;
        split_sddm(a, a_l, a_d);
        WeightedGraph g = graph_of(a_l);
        UltraSparsifyOptions uopts;
        uopts.tree = opts.chain.tree;
        uopts.sparsifier = opts.chain.sparsifier;
        uopts.sparsifier_q = opts.chain.sparsifier_q;
        uopts.seed = opts.chain.seed + ctx.sub_seed;
        double k = std::max(std::sqrt(static_cast<double>(std::max(a.noff(), 1))), 1.0);
        UltraSparsifier u = ultra_sparsify(g, k, uopts);
        SparseSymMatrix bmat = add_diagonal(laplacian_of(u.graph(n)), a_d);
        PartialCholFactor factor = partial_cholesky(bmat);
        const SparseSymMatrix& a1 = factor.reduced();
        bool a1_singular = false;
        if (a1.dim() > 0) a1_singular = classify(a1).singular;

        LinearOperator ident{a1.dim(), [](const Vector& v) { return v; }};
        auto inner = [&](const Vector& s1) -> Vector {
            Vector in = s1;
            if (a1_singular) project_ones(in);
            PcgResult pr = pcg(operator_of(a1), ident, in, 1e-13,
                               4 * static_cast<long long>(a1.dim()) + 50);
            if (a1_singular) project_ones(pr.x);
            return pr.x;
        };
        LinearOperator z{n, [&](const Vector& v) { return apply_factored_pinv(factor, inner, v); }};
        report.build_ms += now_ms() - build_start;

        double solve_start = now_ms();
        long long cap = 10 * static_cast<long long>(std::sqrt(static_cast<double>(n))) + 50;
        PcgResult pr = pcg(operator_of(a), z, rhs, eps * 0.4, cap);
        report.outer_iterations += pr.iterations;
        Vector x = std::move(pr.x);
        double est = refine_until(a, z, rhs, x, eps, opts.max_refine_rounds, report);
        report.anorm_estimate = std::max(report.anorm_estimate, est);
        note_flag(report, est <= eps);
        if (mc.kind == MatrixKind::Laplacian) project_ones(x);
        report.solve_ms += now_ms() - solve_start;
        return x;
    }

    // PcgTree
    SparseSymMatrix a_l;
    Vector a_d;
    split_sddm(a, a_l, a_d);
    WeightedGraph g = graph_of(a_l);
    Vector x;
    if (g.num_edges() == 0) {
        DensePinv z(a);
        x = z.apply(rhs);
        report.build_ms += now_ms() - build_start;
        return x;
    }
    SpanningTree t = build_tree(g, opts.chain.tree, opts.chain.seed + ctx.sub_seed);
    SparseSymMatrix bmat = add_diagonal(laplacian_of(WeightedGraph(n, t.edges())), a_d);
    PartialCholFactor factor = partial_cholesky(bmat);
    LinearOperator z{n, [&factor](const Vector& v) { return apply_factored_pinv(factor, v); }};
    report.build_ms += now_ms() - build_start;

    double solve_start = now_ms();
    long long cap = 40 * static_cast<long long>(std::sqrt(static_cast<double>(n))) + 100;
    PcgResult pr = pcg(operator_of(a), z, rhs, eps * 0.4, cap);
    report.outer_iterations += pr.iterations;
    x = std::move(pr.x);
    double est = refine_until(a, z, rhs, x, eps, opts.max_refine_rounds, report);
    report.anorm_estimate = std::max(report.anorm_estimate, est);
    note_flag(report, est <= eps);
    if (mc.kind == MatrixKind::Laplacian) project_ones(x);
    report.solve_ms += now_ms() - solve_start;
    return x;
}

Vector solve_block(const SparseSymMatrix& a, const Vector& b, BlockContext ctx);

Vector solve_by_components(const SparseSymMatrix& a, const Vector& b, BlockContext ctx) {
    int ncomp = 0;
    std::vector<int> comp = connected_components(a, &ncomp);
    if (ncomp <= 1) return solve_block(a, b, ctx);
    ctx.report->components = std::max(ctx.report->components, ncomp);
    Vector x(a.dim(), 0.0);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> verts;
        std::vector<int> local(a.dim(), -1);
        for (int v = 0; v < a.dim(); ++v)
            if (comp[v] == c) {
                local[v] = static_cast<int>(verts.size());
                verts.push_back(v);
            }
        SparseSymMatrix sub = extract_block(a, verts, local);
        Vector bs(verts.size());
        for (std::size_t i = 0; i < verts.size(); ++i) bs[i] = b[verts[i]];
        BlockContext sub_ctx = ctx;
        sub_ctx.sub_seed = ctx.sub_seed + 0x100 * (c + 1);
        Vector xs = solve_block(sub, bs, sub_ctx);
        for (std::size_t i = 0; i < verts.size(); ++i) x[verts[i]] = xs[i];
    }
    return x;
}

Vector solve_block(const SparseSymMatrix& a, const Vector& b, BlockContext ctx) {
    MatrixClass mc = classify(a);
    if (mc.kind == MatrixKind::SDD0) {
        SparseSymMatrix a_hat;
        Vector b_hat;
        gremban_reduce(a, b, a_hat, b_hat);
        ctx.report->gremban = true;
        BlockContext sub_ctx = ctx;
        sub_ctx.sub_seed = ctx.sub_seed + 0x10000;
        Vector x_hat = solve_by_components(a_hat, b_hat, sub_ctx);
        return gremban_recover(x_hat);
    }
    return solve_sddm_irreducible(a, b, ctx);
}

void snapshot_config(SolveReport& report, const SolveOptions& opts, int n) {
    ResolvedChainParams p = resolve_chain_params(opts.chain, n);
    report.mode = to_string(opts.mode);
    report.seed = opts.chain.seed;
    report.tree = to_string(opts.chain.tree);
    report.sparsifier = opts.chain.sparsifier;
    report.policy = opts.chain.policy == ChainConfig::Policy::Worstcase ? "worstcase" : "adaptive";
    report.cfg_chi = p.chi;
    report.cfg_k = p.k;
    report.cfg_threshold = p.threshold;
    report.threads = opts.chain.threads;
    report.presparsify = opts.chain.presparsify;
}

}  // namespace

std::pair<Vector, SolveReport> solve(const SparseSymMatrix& a, const Vector& b, double eps,
                                     const SolveOptions& opts) {
    if (static_cast<int>(b.size()) != a.dim())
        throw SolveInputError("rhs dimension mismatch");
    for (double v : b)
        if (!std::isfinite(v)) throw SolveInputError("rhs has non-finite entries");
    MatrixClass mc = classify(a);
    if (mc.kind == MatrixKind::NotSDD)
        throw SolveInputError("matrix classification failed: input is not SDD0");

    SolveReport report;
    report.eps_requested = eps;
    snapshot_config(report, opts, a.dim());
    if (a.dim() == 0) return {Vector{}, report};
    double t0 = now_ms();

    BlockContext ctx{eps, &opts, &report, 0};
    Vector x = solve_by_components(a, b, ctx);

    Vector ax = a.apply(x);
    Vector r(b.size());
    kernels::sub(b.data(), ax.data(), r.data(), b.size());
    double bn = kernels::nrm2(b.data(), b.size());
    report.residual_achieved = kernels::nrm2(r.data(), r.size()) / std::max(bn, 1e-300);
    report.total_ms = now_ms() - t0;
    return {std::move(x), report};
}

std::pair<Vector, SolveReport> one_level_solve(const SparseSymMatrix& a, const Vector& b,
                                               double eps, const SolveOptions& opts) {
    SolveOptions o = opts;
    o.mode = SolveMode::OneLevel;
    return solve(a, b, eps, o);
}

}  // namespace sdd
