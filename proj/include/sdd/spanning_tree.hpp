#pragma once

#include <cstdint>
#include <vector>

#include "sdd/graph.hpp"

namespace sdd {

enum class TreeStrategy { MaxWeightSpanning, ShortestPathByResistance, ClusterLowStretch };

TreeStrategy tree_strategy_from_string(const std::string& s);
std::string to_string(TreeStrategy s);

// Rooted spanning tree with per-edge resistances. Immutable after
// construction; depth and cumulative resistance-to-root support path
// queries.
class SpanningTree {
public:
    SpanningTree() = default;

    // parent[root] == root; every (v, parent[v]) pair must be an edge of g
    // with identical weight.
    SpanningTree(const WeightedGraph& g, std::vector<int> parent, int root);

    int num_vertices() const { return n_; }
    int root() const { return root_; }
    int parent(int v) const { return parent_[v]; }
    double parent_weight(int v) const { return parent_weight_[v]; }
    double parent_resistance(int v) const { return parent_res_[v]; }
    int depth(int v) const { return depth_[v]; }
    double resistance_to_root(int v) const { return res_to_root_[v]; }
    // Vertices in top-down (parent before child) order.
    const std::vector<int>& order() const { return order_; }

    // The n-1 tree edges at original weights.
    std::vector<Edge> edges() const;

    // True if (u,v) is a tree edge (either orientation).
    bool is_tree_edge(int u, int v) const;

private:
    int n_ = 0;
    int root_ = 0;
    std::vector<int> parent_;
    std::vector<double> parent_weight_;
    std::vector<double> parent_res_;
    std::vector<int> depth_;
    std::vector<double> res_to_root_;
    std::vector<int> order_;
};

// Spanning tree of a connected graph by the chosen strategy. The
// ClusterLowStretch strategy is an AKPW-style iterated clustering; no
// stretch guarantee is asserted, the measured eta drives everything
// downstream. Root is a splitter of the built tree.
SpanningTree build_tree(const WeightedGraph& g, TreeStrategy strategy, std::uint64_t seed = 0);

// Vertex whose removal leaves components of size <= 2n/3 (a centroid,
// which gives <= n/2). Single vertex returns itself.
int find_splitter(const SpanningTree& t);

// Sum of edge resistances along the tree path between u and v; 0 if u == v.
double path_resistance(const SpanningTree& t, int u, int v);

struct StretchTable {
    std::vector<double> stretch;  // per edge of the queried list
    std::vector<double> eta;      // max(stretch, 1)
    double eta_total = 0.0;
};

// Stretch of every edge in `edges` with respect to t, computed by the
// splitter recursion (resistances to the splitter per subtree). Tree edges
// get stretch exactly 1.
StretchTable compute_stretch(const SpanningTree& t, const std::vector<Edge>& edges);

// Fills the eta fields of a table that has stretch populated.
void eta_of(StretchTable& table);

}  // namespace sdd
