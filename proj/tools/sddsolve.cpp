#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "sdd/dense.hpp"
#include "sdd/fiedler.hpp"
#include "sdd/io.hpp"
#include "sdd/kernels.hpp"
#include "sdd/preconditioner.hpp"
#include "sdd/solver.hpp"

namespace {

using namespace sdd;

struct CommonFlags {
    double eps = 1e-8;
    std::uint64_t seed = 0;
    std::string mode = "recursive";
    std::string tree = "cluster";
    std::string sparsifier = "default";
    double k = 0, chi = 0;
    int threads = 1;
    bool presparsify = false;
    bool worstcase_policy = false;
    int base_dim_threshold = 0;
    bool stable_report = false;
};

void add_chain_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--tree", f.tree, "tree strategy: max-weight|shortest-path|cluster");
    cmd->add_option("--sparsifier", f.sparsifier, "sparsifier plugin: default|identity|none");
    cmd->add_option("--k", f.k, "condition target per level (0 = auto)");
    cmd->add_option("--chi", f.chi, "chi constant (0 = auto)");
    cmd->add_option("--base-dim-threshold", f.base_dim_threshold,
                    "dense base-case dimension (0 = auto)");
    cmd->add_option("--threads", f.threads, "parallel sections (1 = reproducible)");
    cmd->add_flag("--presparsify", f.presparsify, "sparsify once up front when m >> n");
    cmd->add_flag("--worstcase-policy", f.worstcase_policy,
                  "build every level with the full worst-case ultra-sparsify budgets");
}

ChainConfig chain_config(const CommonFlags& f) {
    ChainConfig c;
    c.seed = f.seed;
    c.tree = tree_strategy_from_string(f.tree);
    c.sparsifier = f.sparsifier;
    c.k = f.k;
    c.chi = f.chi;
    c.base_dim_threshold = f.base_dim_threshold;
    c.threads = f.threads;
    c.presparsify = f.presparsify;
    c.policy = f.worstcase_policy ? ChainConfig::Policy::Worstcase : ChainConfig::Policy::Adaptive;
    return c;
}

Vector make_rhs(const std::string& spec, int n, std::uint64_t seed) {
    if (spec == "ones") return Vector(n, 1.0);
    if (spec == "random") {
        std::mt19937_64 rng(seed ^ 0x1f83d9abfb41bd6bULL);
        std::normal_distribution<double> gauss;
        Vector b(n);
        for (double& v : b) v = gauss(rng);
        return b;
    }
    return read_vector(spec);
}

int cmd_solve(const CommonFlags& f, const std::string& matrix_path, const std::string& rhs_spec,
              const std::string& out_path, const std::string& report_path) {
    SparseSymMatrix a = read_matrix(matrix_path);
    Vector b = make_rhs(rhs_spec, a.dim(), f.seed);
    if (static_cast<int>(b.size()) != a.dim()) {
        std::cerr << "error: rhs dimension " << b.size() << " does not match matrix dimension "
                  << a.dim() << "\n";
        return 1;
    }
    SolveOptions opts;
    opts.mode = solve_mode_from_string(f.mode);
    opts.chain = chain_config(f);
    auto [x, report] = solve(a, b, f.eps, opts);
    if (!out_path.empty()) write_vector(out_path, x);
    std::string rj = report_to_json(report, !f.stable_report);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << rj;
    }
    std::cout << rj;
    return report.status == "ok" ? 0 : 2;
}

int cmd_fiedler(const CommonFlags& f, double p, const std::string& graph_path,
                const std::string& out_path) {
    WeightedGraph g = read_edge_list(graph_path);
    int ncomp = 0;
    connected_components(g, &ncomp);
    if (ncomp != 1) {
        std::cerr << "error: graph is disconnected (" << ncomp << " components)\n";
        return 1;
    }
    SparseSymMatrix a = laplacian_of(g);
    FiedlerResult r = approx_fiedler(a, f.eps, p, chain_config(f));
    if (!out_path.empty()) write_vector(out_path, r.v);
    std::printf("rayleigh %.17g\n", r.rayleigh);
    std::printf("trials %d\n", r.trials);
    return 0;
}

int cmd_precondition(const CommonFlags& f, const std::string& graph_path,
                     const std::string& method, long long t_param, const std::string& out_path,
                     bool kappa) {
    WeightedGraph g = read_edge_list(graph_path);
    int ncomp = 0;
    connected_components(g, &ncomp);
    if (ncomp != 1) {
        std::cerr << "error: graph is disconnected (" << ncomp << " components)\n";
        return 1;
    }
    WeightedGraph u;
    double bound = 0;
    if (method == "ultra-simple") {
        if (t_param <= 0) {
            std::cerr << "error: ultra-simple needs --t\n";
            return 1;
        }
        u = ultra_simple(g, t_param, tree_strategy_from_string(f.tree), f.seed);
        if (t_param < g.num_vertices()) {
            SpanningTree t = build_tree(g, tree_strategy_from_string(f.tree), f.seed);
            StretchTable st = compute_stretch(t, g.edges());
            bound = 12.0 * st.eta_total / static_cast<double>(t_param);
        }
    } else if (method == "ultra-sparsify") {
        if (f.k < 1) {
            std::cerr << "error: ultra-sparsify needs --k >= 1\n";
            return 1;
        }
        UltraSparsifyOptions opts;
        opts.tree = tree_strategy_from_string(f.tree);
        opts.sparsifier = f.sparsifier;
        opts.seed = f.seed;
        u = ultra_sparsify(g, f.k, opts).graph(g.num_vertices());
        bound = f.k;
    } else {
        std::cerr << "error: unknown method " << method << "\n";
        return 1;
    }
    std::string trailer;
    if (kappa && g.num_vertices() <= 400) {
        double measured =
            finite_condition_number(laplacian_of(g), laplacian_of(u));
        if (bound == 0) bound = 1.0;  // unchanged graph
        char buf[160];
        std::snprintf(buf, sizeof(buf), "# kappa_measured %.17g\n# kappa_bound %.17g\n", measured,
                      bound);
        trailer = buf;
        std::cout << buf;
    }
    write_edge_list(out_path, u, trailer);
    return 0;
}

int cmd_bench(const CommonFlags& f, const std::string& family, const std::string& sizes_csv,
              const std::string& modes_csv, const std::string& report_path) {
    std::vector<int> sizes;
    {
        std::stringstream ss(sizes_csv);
        std::string item;
        while (std::getline(ss, item, ',')) sizes.push_back(std::stoi(item));
    }
    std::vector<std::string> modes;
    {
        std::stringstream ss(modes_csv);
        std::string item;
        while (std::getline(ss, item, ',')) modes.push_back(item);
    }
    std::ostringstream table;
    table << "family size n mode iterations time_ms residual\n";
    for (int size : sizes) {
        WeightedGraph g;
        if (family == "grid2d")
            g = gen_grid2d(size);
        else if (family == "path")
            g = gen_path(size);
        else if (family == "random-regular")
            g = gen_random_regular(size, 4, f.seed);
        else if (family == "random-weighted")
            g = gen_random_weighted(size, 2 * size, f.seed);
        else {
            std::cerr << "error: unknown family " << family << "\n";
            return 1;
        }
        SparseSymMatrix a = laplacian_of(g);
        Vector b(a.dim());
        std::mt19937_64 rng(f.seed ^ 0x9159015a3070dd17ULL);
        std::normal_distribution<double> gauss;
        for (double& v : b) v = gauss(rng);
        project_ones(b);
        for (const auto& mode : modes) {
            SolveOptions opts;
            opts.mode = solve_mode_from_string(mode);
            opts.chain = chain_config(f);
            auto start = std::chrono::steady_clock::now();
            auto [x, report] = solve(a, b, f.eps, opts);
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%s %d %d %s %lld %.1f %.3e\n", family.c_str(), size,
                          a.dim(), mode.c_str(), report.outer_iterations, ms,
                          report.residual_achieved);
            table << buf;
        }
    }
    std::cout << table.str();
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << table.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SDD linear solver toolkit: graph preconditioners, recursive "
                 "Chebyshev solves, and approximate Fiedler vectors"};
    app.require_subcommand(1);

    CommonFlags f;
    std::string matrix_path, rhs_spec = "ones", out_path, report_path;
    std::string graph_path, method = "ultra-simple";
    std::string family = "grid2d", sizes_csv = "16", modes_csv = "recursive";
    double p = 0.25;
    long long t_param = 0;
    bool kappa = false;

    auto* solve_cmd = app.add_subcommand("solve", "solve A x = b to relative accuracy eps");
    solve_cmd->add_option("--matrix", matrix_path, "matrix file (.mtx or edge list)")->required();
    solve_cmd->add_option("--rhs", rhs_spec, "rhs file, 'ones' or 'random'");
    solve_cmd->add_option("--eps", f.eps, "target relative error");
    solve_cmd->add_option("--mode", f.mode, "recursive|one-level|pcg-tree");
    solve_cmd->add_option("--out", out_path, "solution output file");
    solve_cmd->add_option("--report", report_path, "JSON report output file");
    solve_cmd->add_flag("--stable-report", f.stable_report, "omit wall-clock timings");
    add_chain_flags(solve_cmd, f);

    auto* fiedler_cmd = app.add_subcommand("fiedler", "approximate Fiedler vector");
    fiedler_cmd->add_option("--graph", graph_path, "edge list file")->required();
    fiedler_cmd->add_option("--eps", f.eps, "approximation target");
    fiedler_cmd->add_option("--p", p, "failure probability");
    fiedler_cmd->add_option("--out", out_path, "vector output file");
    add_chain_flags(fiedler_cmd, f);

    auto* pre_cmd = app.add_subcommand("precondition", "emit an ultra-sparsifier subgraph");
    pre_cmd->add_option("--graph", graph_path, "edge list file")->required();
    pre_cmd->add_option("--method", method, "ultra-simple|ultra-sparsify");
    pre_cmd->add_option("--t", t_param, "decomposition budget (ultra-simple)");
    pre_cmd->add_option("--out", out_path, "edge list output file")->required();
    pre_cmd->add_flag("--kappa", kappa, "append measured and bound condition numbers");
    add_chain_flags(pre_cmd, f);

    auto* bench_cmd = app.add_subcommand("bench", "benchmark table over instance families");
    bench_cmd->add_option("--family", family, "grid2d|path|random-regular|random-weighted");
    bench_cmd->add_option("--sizes", sizes_csv, "comma-separated sizes");
    bench_cmd->add_option("--modes", modes_csv, "comma-separated solve modes");
    bench_cmd->add_option("--eps", f.eps, "target relative error");
    bench_cmd->add_option("--report", report_path, "table output file");
    add_chain_flags(bench_cmd, f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return cmd_solve(f, matrix_path, rhs_spec, out_path, report_path);
        if (fiedler_cmd->parsed()) return cmd_fiedler(f, p, graph_path, out_path);
        if (pre_cmd->parsed())
            return cmd_precondition(f, graph_path, method, t_param, out_path, kappa);
        if (bench_cmd->parsed()) return cmd_bench(f, family, sizes_csv, modes_csv, report_path);
    } catch (const SolveInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
