#pragma once

#include <vector>

#include "sdd/graph.hpp"
#include "sdd/spanning_tree.hpp"

namespace sdd {

// (T,E)-decomposition: vertex sets inducing subtrees of T, pairwise
// overlapping in at most one vertex, plus a map rho from each edge to the
// one or two sets responsible for it.
struct TreeDecomposition {
    struct Rho {
        int a = -1;
        int b = -1;  // -1 when the edge maps to a single set

        int size() const { return (a >= 0) + (b >= 0); }
        bool contains(int s) const { return a == s || b == s; }
        void add(int s) {
            if (a == s || b == s) return;
            if (a < 0)
                a = s;
            else if (b < 0)
                b = s;
            else
                throw std::logic_error("rho: more than two sets for an edge");
        }
    };

    std::vector<std::vector<int>> sets;  // W_1..W_h (0-indexed), sorted vertex ids
    std::vector<Rho> rho;                // one entry per edge of E
    double phi_threshold = 0.0;          // 2 * sum(eta) / t

    int count() const { return static_cast<int>(sets.size()); }
};

// Greedy bottom-up tree decomposition: a single traversal of T from its
// stored root, forming a set whenever the accumulated eta mass of the
// gathered edges passes phi = 2*sum(eta)/t. Guarantees h <= t and, for
// every non-singleton W_i, sum of eta over edges mapped to W_i is at most
// (4/t)*sum(eta). When t >= n the decomposition is one singleton per
// vertex.
//
// Requires 1 < t <= sum(eta) and eta >= 0 elementwise.
TreeDecomposition decompose(const SpanningTree& t, const std::vector<Edge>& edges,
                            const std::vector<double>& eta, long long t_param);

}  // namespace sdd
