#include "sdd/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace sdd {

namespace {

using json = nlohmann::json;

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
    throw ParseError(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

WeightedGraph read_edge_list(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    return read_edge_list_stream(in, path);
}

WeightedGraph read_edge_list_stream(std::istream& in, const std::string& name) {
    std::vector<Edge> edges;
    int max_id = -1;
    std::string line;
    int lineno = 0;
    int rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        long long u, v;
        double w;
        if (!(ls >> u)) continue;  // blank
        if (!(ls >> v >> w)) parse_fail(name, lineno, "expected 'u v w'");
        std::string rest;
        if (ls >> rest) parse_fail(name, lineno, "trailing tokens");
        if (u < 0 || v < 0) parse_fail(name, lineno, "negative vertex id");
        if (u == v) parse_fail(name, lineno, "self-loop");
        if (!std::isfinite(w)) parse_fail(name, lineno, "non-finite weight");
        if (w <= 0) parse_fail(name, lineno, "weight must be positive");
        edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
        max_id = std::max(max_id, static_cast<int>(std::max(u, v)));
        ++rows;
    }
    if (rows == 0) throw ParseError(name + ": empty edge list");
    return WeightedGraph(max_id + 1, std::move(edges));
}

void write_edge_list(const std::string& path, const WeightedGraph& g,
                     const std::string& trailer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    char buf[64];
    for (const auto& e : g.edges()) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.w);
        out << e.u << ' ' << e.v << ' ' << buf << '\n';
    }
    if (!trailer.empty()) out << trailer;
}

SparseSymMatrix read_matrix_market(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    return read_matrix_market_stream(in, path);
}

SparseSymMatrix read_matrix_market_stream(std::istream& in, const std::string& name) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError(name + ": empty file");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, format, field, symmetry;
        hs >> banner >> object >> format >> field >> symmetry;
        for (auto* s : {&object, &format, &field, &symmetry})
            std::transform(s->begin(), s->end(), s->begin(),
                           [](unsigned char c) { return std::tolower(c); });
        if (banner != "%%MatrixMarket" || object != "matrix")
            parse_fail(name, lineno, "not a MatrixMarket matrix header");
        if (format != "coordinate") parse_fail(name, lineno, "only coordinate format supported");
        if (field == "pattern") parse_fail(name, lineno, "pattern matrices are rejected");
        if (field != "real" && field != "integer")
            parse_fail(name, lineno, "unsupported field: " + field);
        if (symmetry != "symmetric" && symmetry != "general")
            parse_fail(name, lineno, "unsupported symmetry: " + symmetry);
    }
    long long rows = -1, cols = -1, nnz = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        std::istringstream ls(line);
        if (!(ls >> rows >> cols >> nnz)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            parse_fail(name, lineno, "expected size line 'rows cols nnz'");
        }
        break;
    }
    if (rows < 0) throw ParseError(name + ": missing size line");
    if (rows != cols) parse_fail(name, lineno, "matrix must be square");

    std::vector<SparseSymMatrix::Off> lower, upper;
    std::vector<double> diag(rows, 0.0);
    long long seen = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] == '%') continue;
        std::istringstream ls(line);
        long long i, j;
        double v;
        if (!(ls >> i)) continue;
        if (!(ls >> j >> v)) parse_fail(name, lineno, "expected 'i j value'");
        if (!std::isfinite(v)) parse_fail(name, lineno, "non-finite value");
        if (i < 1 || j < 1 || i > rows || j > rows)
            parse_fail(name, lineno, "index out of range");
        ++seen;
        if (i == j) {
            diag[i - 1] += v;
        } else if (i > j) {
            lower.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
        } else {
            upper.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
        }
    }
    if (seen != nnz) throw ParseError(name + ": entry count does not match header");

    auto key_sort = [](std::vector<SparseSymMatrix::Off>& v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return a.i < b.i || (a.i == b.i && a.j < b.j);
        });
    };
    auto merge_dups = [](std::vector<SparseSymMatrix::Off>& v) {
        std::vector<SparseSymMatrix::Off> out;
        for (const auto& e : v) {
            if (!out.empty() && out.back().i == e.i && out.back().j == e.j)
                out.back().v += e.v;
            else
                out.push_back(e);
        }
        v = std::move(out);
    };
    key_sort(lower);
    key_sort(upper);
    merge_dups(lower);
    merge_dups(upper);

    double scale = 0;
    for (const auto& e : lower) scale = std::max(scale, std::abs(e.v));
    for (const auto& e : upper) scale = std::max(scale, std::abs(e.v));
    for (double d : diag) scale = std::max(scale, std::abs(d));

    std::vector<SparseSymMatrix::Off> off;
    if (upper.empty() || lower.empty()) {
        off = upper.empty() ? std::move(lower) : std::move(upper);
    } else {
        // general kind with both triangles present: must match
        if (lower.size() != upper.size()) throw ParseError(name + ": asymmetric entries");
        for (std::size_t k = 0; k < lower.size(); ++k) {
            if (lower[k].i != upper[k].i || lower[k].j != upper[k].j ||
                std::abs(lower[k].v - upper[k].v) > 1e-12 * std::max(scale, 1.0))
                throw ParseError(name + ": asymmetric entries");
        }
        off = std::move(upper);
    }
    return SparseSymMatrix(static_cast<int>(rows), std::move(diag), std::move(off));
}

SparseSymMatrix read_matrix(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".mtx") return read_matrix_market(path);
    return laplacian_of(read_edge_list(path));
}

Vector read_vector(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    Vector x;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double v;
        if (!(ls >> v)) continue;
        if (!std::isfinite(v)) parse_fail(path, lineno, "non-finite value");
        x.push_back(v);
    }
    return x;
}

void write_vector(const std::string& path, const Vector& x) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    char buf[64];
    for (double v : x) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf << '\n';
    }
}

std::string report_to_json(const SolveReport& r, bool with_timings) {
    json j;
    j["schema"] = "sddsolve-report/1";
    j["status"] = r.status;
    j["mode"] = r.mode;
    j["eps_requested"] = r.eps_requested;
    j["residual_achieved"] = r.residual_achieved;
    j["anorm_estimate"] = r.anorm_estimate;
    j["outer_iterations"] = r.outer_iterations;
    j["components"] = r.components;
    j["gremban"] = r.gremban;
    j["rhs_projected"] = r.rhs_projected;
    j["seed"] = r.seed;
    j["base_dim"] = r.base_dim;
    json levels = json::array();
    for (const auto& l : r.levels) {
        json jl;
        jl["dim"] = l.dim;
        jl["noff"] = l.noff;
        jl["b_noff"] = l.b_noff;
        jl["k_level"] = l.k_level;
        jl["cheb_t"] = l.cheb_t;
        levels.push_back(jl);
    }
    j["levels"] = levels;
    json cfg;
    cfg["tree"] = r.tree;
    cfg["sparsifier"] = r.sparsifier;
    cfg["policy"] = r.policy;
    cfg["chi"] = r.cfg_chi;
    cfg["k"] = r.cfg_k;
    cfg["base_dim_threshold"] = r.cfg_threshold;
    cfg["threads"] = r.threads;
    cfg["presparsify"] = r.presparsify;
    j["config"] = cfg;
    if (with_timings) {
        json t;
        t["build_ms"] = r.build_ms;
        t["solve_ms"] = r.solve_ms;
        t["total_ms"] = r.total_ms;
        j["timings"] = t;
    }
    return j.dump(2) + "\n";
}

SolveReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    SolveReport r;
    r.status = j.at("status").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.eps_requested = j.at("eps_requested").get<double>();
    r.residual_achieved = j.at("residual_achieved").get<double>();
    r.anorm_estimate = j.at("anorm_estimate").get<double>();
    r.outer_iterations = j.at("outer_iterations").get<long long>();
    r.components = j.at("components").get<int>();
    r.gremban = j.at("gremban").get<bool>();
    r.rhs_projected = j.at("rhs_projected").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.base_dim = j.at("base_dim").get<int>();
    for (const auto& jl : j.at("levels")) {
        SolveReport::LevelStat l;
        l.dim = jl.at("dim").get<int>();
        l.noff = jl.at("noff").get<int>();
        l.b_noff = jl.at("b_noff").get<int>();
        l.k_level = jl.at("k_level").get<double>();
        l.cheb_t = jl.at("cheb_t").get<int>();
        r.levels.push_back(l);
    }
    const auto& cfg = j.at("config");
    r.tree = cfg.at("tree").get<std::string>();
    r.sparsifier = cfg.at("sparsifier").get<std::string>();
    r.policy = cfg.at("policy").get<std::string>();
    r.cfg_chi = cfg.at("chi").get<double>();
    r.cfg_k = cfg.at("k").get<double>();
    r.cfg_threshold = cfg.at("base_dim_threshold").get<int>();
    r.threads = cfg.at("threads").get<int>();
    r.presparsify = cfg.at("presparsify").get<bool>();
    if (j.contains("timings")) {
        r.build_ms = j["timings"].at("build_ms").get<double>();
        r.solve_ms = j["timings"].at("solve_ms").get<double>();
        r.total_ms = j["timings"].at("total_ms").get<double>();
    }
    return r;
}

WeightedGraph gen_grid2d(int side) {
    if (side < 1) throw std::invalid_argument("gen_grid2d: side must be positive");
    std::vector<Edge> edges;
    auto id = [side](int r, int c) { return r * side + c; };
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            if (c + 1 < side) edges.push_back({id(r, c), id(r, c + 1), 1.0});
            if (r + 1 < side) edges.push_back({id(r, c), id(r + 1, c), 1.0});
        }
    return WeightedGraph(side * side, std::move(edges));
}

WeightedGraph gen_path(int n) {
    if (n < 2) throw std::invalid_argument("gen_path: need at least two vertices");
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, 1.0});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph gen_random_regular(int n, int degree, std::uint64_t seed) {
    if (n * degree % 2 != 0) throw std::invalid_argument("gen_random_regular: n*d must be even");
    std::mt19937_64 rng(seed ^ 0xa54ff53a5f1d36f1ULL);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(n * degree);
        for (int v = 0; v < n; ++v)
            for (int d = 0; d < degree; ++d) stubs.push_back(v);
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::vector<Edge> edges;
        bool ok = true;
        std::vector<std::pair<int, int>> seen;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            seen.push_back({std::min(u, v), std::max(u, v)});
            edges.push_back({u, v, 1.0});
        }
        if (!ok) continue;
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) continue;
        WeightedGraph g(n, std::move(edges));
        int ncomp = 0;
        connected_components(g, &ncomp);
        if (ncomp == 1) return g;
    }
    throw std::runtime_error("gen_random_regular: no simple connected pairing found");
}

WeightedGraph gen_random_weighted(int n, int extra_edges, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_random_weighted: need at least two vertices");
    std::mt19937_64 rng(seed ^ 0x510e527fade682d1ULL);
    std::uniform_real_distribution<double> logw(std::log(0.1), std::log(10.0));
    std::vector<Edge> edges;
    // random spanning tree first, then extra chords
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        edges.push_back({pick(rng), v, std::exp(logw(rng))});
    }
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int e = 0; e < extra_edges; ++e) {
        int u = pick(rng), v = pick(rng);
        if (u == v) continue;
        edges.push_back({std::min(u, v), std::max(u, v), std::exp(logw(rng))});
    }
    return WeightedGraph(n, std::move(edges));
}

}  // namespace sdd
