#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sdd/decompose.hpp"
#include "sdd/graph.hpp"
#include "sdd/spanning_tree.hpp"

namespace sdd {

// Bridge edges between decomposition sets: sigma(i,j) maximizes w/eta among
// edges with rho(e) = {W_i, W_j} (lexicographically least edge on ties),
// omega is the total weight between the pair, psi = omega / w(sigma).
struct BridgeSelection {
    struct Bridge {
        int i = 0, j = 0;   // set indices, i < j
        int sigma = -1;     // edge id into the queried edge list
        double omega = 0.0;
        double psi = 0.0;
    };
    std::vector<Bridge> bridges;  // sorted by (i, j)
};

// `exclude` masks edges out of the sigma argmax (augment_tree masks the
// tree edges: they already support themselves inside T).
BridgeSelection select_bridges(const TreeDecomposition& d, const std::vector<Edge>& edges,
                               const std::vector<double>& eta,
                               const std::vector<char>* exclude = nullptr);

// AugmentTree: the sigma-selected bridge edges of a (T,E)-decomposition
// with budget t. |F| <= t^2/2 and E <= (12 eta(E)/t) * (T u F) in the
// Loewner order. Returns edge ids into `edges`. Requires 1 < t <= eta(E).
std::vector<int> augment_tree(const SpanningTree& t, const std::vector<Edge>& edges,
                              long long t_param);

// UltraSimple: T u F for T a low-stretch tree of the connected edge set.
// When t >= n the input is returned unchanged.
WeightedGraph ultra_simple(const WeightedGraph& g, long long t_param,
                           TreeStrategy strategy = TreeStrategy::ClusterLowStretch,
                           std::uint64_t seed = 0);

// Sparsifier plugin contract: H_s = plugin(H, p, rng) with support(H_s) a
// subset of support(H) and per-vertex reweighting bounded by twice the
// degree. The spectral target A_s <= A <= (5/4) A_s is best-effort for the
// default plugin and exact for "identity".
using SparsifierPlugin =
    std::function<WeightedGraph(const WeightedGraph&, double, std::mt19937_64&)>;

// Registered plugins: "default" (stretch-based importance sampling),
// "identity" (returns H), "none" (drops every quotient edge, leaving the
// tree alone).
SparsifierPlugin sparsifier_by_name(const std::string& name, double q = 4.0);

// Importance sampling by w(e) * tree-path resistance in a fresh spanning
// forest of H, with per-vertex reweight capping. Keeps at most
// q*n*log2(n/p) edges; graphs already that sparse pass through unchanged.
WeightedGraph default_sparsifier(const WeightedGraph& h, double p, double q,
                                 std::mt19937_64& rng);

// RootedUltraSparsify: requires r on the tree path of every edge. Buckets
// the psi-reweighted bridges by phi(f) = max(psi, stretch), sparsifies each
// bucket's quotient graph, and lifts the survivors back. Returns edge ids.
// t == 1 keeps nothing; t >= |E| keeps everything.
std::vector<int> rooted_ultra_sparsify(const std::vector<Edge>& edges, const SpanningTree& t,
                                       int r, long long t_param, double p,
                                       const SparsifierPlugin& plugin, std::mt19937_64& rng,
                                       std::vector<int>* bucket_sizes = nullptr);

// TreeUltraSparsify: splitter recursion distributing the real-valued budget
// t' by eta mass; every edge is handled by exactly one rooted call.
// `er_sets`, when given, records the edge ids of each splitter's
// through-the-root set (the partition of E).
std::vector<int> tree_ultra_sparsify(const std::vector<Edge>& edges, double t_budget,
                                     const SpanningTree& t, double p,
                                     const SparsifierPlugin& plugin, std::mt19937_64& rng,
                                     std::vector<int>* bucket_sizes = nullptr,
                                     int* rooted_calls = nullptr,
                                     std::vector<std::vector<int>>* er_sets = nullptr);

struct UltraSparsifier {
    std::vector<Edge> tree_edges;
    std::vector<Edge> extra_edges;  // disjoint from tree_edges, original weights
    double k = 1.0;
    struct Stats {
        double eta_total = 0.0;
        double t_used = 0.0;
        double p_used = 0.0;
        int rooted_calls = 0;
        std::vector<int> bucket_sizes;
        std::uint64_t seed = 0;
    } stats;

    WeightedGraph graph(int n) const;
};

struct UltraSparsifyOptions {
    TreeStrategy tree = TreeStrategy::ClusterLowStretch;
    std::string sparsifier = "default";
    double sparsifier_q = 4.0;
    std::uint64_t seed = 0;
};

// UltraSparsify: t = 517 * max(1, log2 eta(E)) * ceil(log_{3/2} n) * eta(E)/k,
// p = 1/(2 ceil(log2 eta(E)) n^2); keeps everything when t >= eta(E).
UltraSparsifier ultra_sparsify(const WeightedGraph& g, double k,
                               const UltraSparsifyOptions& opts = {});

}  // namespace sdd
