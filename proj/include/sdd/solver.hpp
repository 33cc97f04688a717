#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdd/dense.hpp"
#include "sdd/factorization.hpp"
#include "sdd/graph.hpp"
#include "sdd/preconditioner.hpp"
#include "sdd/spanning_tree.hpp"

namespace sdd {

struct LinearOperator {
    int n = 0;
    std::function<Vector(const Vector&)> apply;
};

LinearOperator operator_of(const SparseSymMatrix& a);

struct ChebyParams {
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    int t = 1;
};

// Fixed-iteration preconditioned Chebyshev. Runs exactly t iterations from
// x0 = 0, so the induced map b -> x is a symmetric linear operator whenever
// f is one. The spectrum of f*A must lie in [lambda_min, lambda_max] for
// the (1 +- eps) operator contract to hold at t from the Chebyshev bound.
Vector precond_cheby(const LinearOperator& a, const Vector& b, int t, const LinearOperator& f,
                     double lambda_min, double lambda_max);

struct PcgResult {
    Vector x;
    long long iterations = 0;
    bool converged = false;
    bool breakdown = false;
};

// Preconditioned conjugate gradient; stops when the preconditioned residual
// norm sqrt(r'z) drops below eps times its initial value.
PcgResult pcg(const LinearOperator& a, const LinearOperator& precond, const Vector& b, double eps,
              long long max_iters, const Vector* x0 = nullptr);

struct ChainConfig {
    double c3 = 1.0;
    double c4 = 2.0;
    double chi = 0.0;            // 0 = derived from c3, c4, n
    double k = 0.0;              // 0 = (14 chi + 1)^2, chi clamped so k <= n
    int base_dim_threshold = 0;  // 0 = min(66 chi + 6, 512)

    // "worstcase": ultra_sparsify(k) at every level with its full budget
    // "adaptive": tree-plus-augment levels sized for geometric dimension
    // decay, Chebyshev intervals tightened by power-iteration estimates.
    enum class Policy { Worstcase, Adaptive };
    Policy policy = Policy::Adaptive;

    TreeStrategy tree = TreeStrategy::ClusterLowStretch;
    std::string sparsifier = "default";
    double sparsifier_q = 4.0;
    std::uint64_t seed = 0;
    int max_retries = 3;
    double shrink = 8.0;    // adaptive per-level dimension decay target
    int calib_steps = 20;   // power-iteration steps for interval estimates
    bool presparsify = false;
    int threads = 1;
};

struct ResolvedChainParams {
    double chi = 1.0;
    double k = 1.0;
    int threshold = 72;
};

ResolvedChainParams resolve_chain_params(const ChainConfig& cfg, int n);

struct ChainLevel {
    SparseSymMatrix b;          // B_i, preconditioner of A_{i-1}
    PartialCholFactor factor;   // partial Cholesky of B_i
    SparseSymMatrix a;          // A_i = reduced matrix
    double k_level = 1.0;       // bound/estimate for kappa_f(A_{i-1}, B_i)
    ChebyParams cheb;           // parameters for preconditioning A_i by level i+1
};

struct SolverChain {
    int n = 0;
    bool laplacian = false;
    std::vector<ChainLevel> levels;
    DensePinv base;  // pseudo-inverse of the last reduced matrix (or of A0)
    ChebyParams outer;  // interval for preconditioning A0 by Solve_{B_1}
    ResolvedChainParams params;
    ChainConfig cfg;
};

// BuildPreconditioners: alternate sparsification and partial Cholesky until
// the reduced dimension falls below the base threshold, then take a dense
// pseudo-inverse.
SolverChain build_preconditioners(const SparseSymMatrix& a0, const ChainConfig& cfg);

// Solve_{B_i} for 1 <= i <= levels: substitution down the factor of B_i,
// recursive Chebyshev (or the base pseudo-inverse) on the reduced block,
// substitution back up. A symmetric linear operator in b.
Vector solve_level(const SolverChain& chain, int i, const Vector& b);

LinearOperator solve_level_operator(const SolverChain& chain, int i);

struct SolveReport {
    std::string status = "ok";  // ok | flagged
    std::string mode;
    double eps_requested = 0.0;
    double residual_achieved = 0.0;  // ||b - Ax|| / ||b||
    double anorm_estimate = 0.0;     // preconditioner-weighted error surrogate
    long long outer_iterations = 0;
    int components = 1;
    bool gremban = false;
    bool rhs_projected = false;
    std::uint64_t seed = 0;
    struct LevelStat {
        int dim = 0;
        int noff = 0;
        int b_noff = 0;
        double k_level = 0.0;
        int cheb_t = 0;
    };
    std::vector<LevelStat> levels;  // of the largest component's chain
    int base_dim = 0;
    double build_ms = 0.0, solve_ms = 0.0, total_ms = 0.0;
    std::string tree, sparsifier, policy;
    double cfg_chi = 0.0, cfg_k = 0.0;
    int cfg_threshold = 0;
    int threads = 1;
    bool presparsify = false;
};

enum class SolveMode { Recursive, OneLevel, PcgTree };

SolveMode solve_mode_from_string(const std::string& s);
std::string to_string(SolveMode m);

struct SolveOptions {
    SolveMode mode = SolveMode::Recursive;
    ChainConfig chain;
    int max_refine_rounds = 4;
};

// Thrown for inputs outside the SDD0 class or malformed systems; the CLI
// maps it to exit code 1.
class SolveInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Top-level solve: classifies, splits reducible systems by component,
// routes positive off-diagonals through the Gremban reduction, and solves
// each irreducible SDDM0 block by the selected mode. Accuracy is checked a
// posteriori with a residual surrogate; "flagged" status means the check
// did not certify eps.
std::pair<Vector, SolveReport> solve(const SparseSymMatrix& a, const Vector& b, double eps,
                                     const SolveOptions& opts = {});

// One-level algorithm: PCG outer iteration preconditioned by a sqrt(m)
// ultra-sparsifier factored once, inner systems solved by CG run as an
// exact solver.
std::pair<Vector, SolveReport> one_level_solve(const SparseSymMatrix& a, const Vector& b,
                                               double eps, const SolveOptions& opts = {});

}  // namespace sdd
