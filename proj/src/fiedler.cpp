#include "sdd/fiedler.hpp"

#include <cmath>
#include <random>
#include <thread>

#include "sdd/kernels.hpp"

namespace sdd {

double rayleigh_quotient(const SparseSymMatrix& a, const Vector& v) {
    if (static_cast<int>(v.size()) != a.dim())
        throw std::invalid_argument("rayleigh_quotient: dimension mismatch");
    double vv = kernels::dot(v.data(), v.data(), v.size());
    if (vv == 0.0) throw std::invalid_argument("rayleigh_quotient: zero vector");
    Vector av = a.apply(v);
    return kernels::dot(v.data(), av.data(), v.size()) / vv;
}

namespace {

struct TrialResult {
    Vector v;
    double rayleigh = 0.0;
};

TrialResult run_trial(const SparseSymMatrix& a, double eps, const ChainConfig& cfg,
                      std::uint64_t trial_seed, int k_power) {
    int n = a.dim();
    ChainConfig cc = cfg;
    cc.seed = trial_seed;
    ResolvedChainParams params = resolve_chain_params(cc, n);

    std::mt19937_64 rng(trial_seed ^ 0x3c6ef372fe94f82bULL);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (double& x : v) x = gauss(rng);
    project_ones(v);
    double nv = kernels::nrm2(v.data(), v.size());
    kernels::scal(1.0 / nv, v.data(), v.size());

    auto step = [&](const LinearOperator& z, int t, double lmin, double lmax) {
        for (int b = 0; b < k_power; ++b) {
            v = precond_cheby(operator_of(a), v, t, z, lmin, lmax);
            // scale invariance of the Rayleigh quotient permits
            // re-projection and normalization after every application
            project_ones(v);
            double norm = kernels::nrm2(v.data(), v.size());
            if (!(norm > 0)) throw std::runtime_error("approx_fiedler: iterate vanished");
            kernels::scal(1.0 / norm, v.data(), v.size());
        }
    };

    if (n < params.threshold || n <= 2) {
        DensePinv base(a);
        LinearOperator z{n, [&base](const Vector& x) { return base.apply(x); }};
        step(z, 1, 1.0, 1.0);
    } else {
        SolverChain chain = build_preconditioners(a, cc);
        LinearOperator z = solve_level_operator(chain, 1);
        double ratio = chain.outer.lambda_max / chain.outer.lambda_min;
        int t = std::max(1, static_cast<int>(std::ceil(
                                0.5 * std::sqrt(ratio) * std::log(8.0 / eps))));
        step(z, t, chain.outer.lambda_min, chain.outer.lambda_max);
    }
    return {v, rayleigh_quotient(a, v)};
}

}  // namespace

FiedlerResult approx_fiedler(const SparseSymMatrix& a, double eps, double p,
                             const ChainConfig& cfg) {
    if (!(eps > 0) || eps > 1) throw std::invalid_argument("approx_fiedler: eps out of (0,1]");
    if (!(p > 0) || !(p < 1)) throw std::invalid_argument("approx_fiedler: p out of (0,1)");
    MatrixClass mc = classify(a);
    if (mc.kind != MatrixKind::Laplacian)
        throw std::invalid_argument("approx_fiedler: matrix is not a Laplacian");
    if (!mc.irreducible) throw std::invalid_argument("approx_fiedler: reducible matrix");
    int n = a.dim();
    if (n < 2) throw std::invalid_argument("approx_fiedler: need at least two vertices");

    int trials = std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / p))));
    int k_power = std::max(
        1, static_cast<int>(std::ceil(8.0 * std::log(18.0 * (n - 1) / eps) / eps)));

    std::vector<TrialResult> results(trials);
    auto work = [&](int t) {
        results[t] = run_trial(a, eps, cfg, cfg.seed + 0x51ed2700 + 977 * t, k_power);
    };
    if (cfg.threads > 1 && trials > 1) {
        std::vector<std::thread> pool;
        for (int t = 0; t < trials; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    } else {
        for (int t = 0; t < trials; ++t) work(t);
    }

    int best = 0;
    for (int t = 1; t < trials; ++t)
        if (results[t].rayleigh < results[best].rayleigh) best = t;

    FiedlerResult out;
    out.v = std::move(results[best].v);
    out.rayleigh = results[best].rayleigh;
    out.trials = trials;
    out.seed = cfg.seed;
    return out;
}

}  // namespace sdd
