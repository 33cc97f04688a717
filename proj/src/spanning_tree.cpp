#include "sdd/spanning_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>

namespace sdd {

TreeStrategy tree_strategy_from_string(const std::string& s) {
    if (s == "max-weight") return TreeStrategy::MaxWeightSpanning;
    if (s == "shortest-path") return TreeStrategy::ShortestPathByResistance;
    if (s == "cluster") return TreeStrategy::ClusterLowStretch;
    throw std::invalid_argument("unknown tree strategy: " + s);
}

std::string to_string(TreeStrategy s) {
    switch (s) {
        case TreeStrategy::MaxWeightSpanning: return "max-weight";
        case TreeStrategy::ShortestPathByResistance: return "shortest-path";
        default: return "cluster";
    }
}

SpanningTree::SpanningTree(const WeightedGraph& g, std::vector<int> parent, int root)
    : n_(g.num_vertices()), root_(root), parent_(std::move(parent)) {
    if (static_cast<int>(parent_.size()) != n_ || root_ < 0 || root_ >= n_ ||
        parent_[root_] != root_)
        throw std::invalid_argument("spanning tree: bad parent array");
    parent_weight_.assign(n_, 0.0);
    parent_res_.assign(n_, 0.0);
    for (int v = 0; v < n_; ++v) {
        if (v == root_) continue;
        int p = parent_[v];
        if (p < 0 || p >= n_) throw std::invalid_argument("spanning tree: bad parent");
        bool found = false;
        for (const int* it = g.incident_begin(v); it != g.incident_end(v); ++it) {
            if (g.other(*it, v) == p) {
                parent_weight_[v] = g.edge(*it).w;
                parent_res_[v] = 1.0 / g.edge(*it).w;
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("spanning tree: edge missing from graph");
    }

    // top-down order via child lists; also validates connectivity/acyclicity
    std::vector<int> cnt(n_ + 1, 0);
    for (int v = 0; v < n_; ++v)
        if (v != root_) ++cnt[parent_[v] + 1];
    std::vector<int> cptr(cnt.begin(), cnt.end());
    std::partial_sum(cptr.begin(), cptr.end(), cptr.begin());
    std::vector<int> child(n_ > 0 ? n_ - 1 : 0);
    {
        std::vector<int> cur(cptr.begin(), cptr.end() - 1);
        for (int v = 0; v < n_; ++v)
            if (v != root_) child[cur[parent_[v]]++] = v;
    }
    order_.reserve(n_);
    depth_.assign(n_, 0);
    res_to_root_.assign(n_, 0.0);
    std::vector<double> comp(n_, 0.0);  // Kahan compensation along root paths
    order_.push_back(root_);
    for (std::size_t h = 0; h < order_.size(); ++h) {
        int v = order_[h];
        for (int k = cptr[v]; k < cptr[v + 1]; ++k) {
            int c = child[k];
            depth_[c] = depth_[v] + 1;
            double y = parent_res_[c] - comp[v];
            double t = res_to_root_[v] + y;
            comp[c] = (t - res_to_root_[v]) - y;
            res_to_root_[c] = t;
            order_.push_back(c);
        }
    }
    if (static_cast<int>(order_.size()) != n_)
        throw std::invalid_argument("spanning tree: not connected or cyclic");
}

std::vector<Edge> SpanningTree::edges() const {
    std::vector<Edge> es;
    es.reserve(n_ > 0 ? n_ - 1 : 0);
    for (int v = 0; v < n_; ++v) {
        if (v == root_) continue;
        int p = parent_[v];
        es.push_back({std::min(v, p), std::max(v, p), parent_weight_[v]});
    }
    std::sort(es.begin(), es.end(),
              [](const Edge& a, const Edge& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    return es;
}

bool SpanningTree::is_tree_edge(int u, int v) const {
    return (u != root_ && parent_[u] == v) || (v != root_ && parent_[v] == u);
}

int find_splitter(const SpanningTree& t) {
    int n = t.num_vertices();
    if (n <= 1) return t.root();
    std::vector<int> size(n, 1);
    std::vector<int> best_child(n, 0);
    const auto& order = t.order();
    for (int h = n - 1; h >= 1; --h) {
        int v = order[h];
        int p = t.parent(v);
        size[p] += size[v];
        best_child[p] = std::max(best_child[p], size[v]);
    }
    int best = -1, best_max = n + 1;
    for (int v = 0; v < n; ++v) {
        int worst = std::max(n - size[v], best_child[v]);
        if (worst < best_max) {
            best_max = worst;
            best = v;
        }
    }
    return best;
}

double path_resistance(const SpanningTree& t, int u, int v) {
    if (u < 0 || v < 0 || u >= t.num_vertices() || v >= t.num_vertices())
        throw std::invalid_argument("path_resistance: vertex out of range");
    double s = 0;
    while (t.depth(u) > t.depth(v)) {
        s += t.parent_resistance(u);
        u = t.parent(u);
    }
    while (t.depth(v) > t.depth(u)) {
        s += t.parent_resistance(v);
        v = t.parent(v);
    }
    while (u != v) {
        s += t.parent_resistance(u) + t.parent_resistance(v);
        u = t.parent(u);
        v = t.parent(v);
    }
    return s;
}

namespace {

// Adjacency of the tree itself: neighbor + edge resistance.
struct TreeAdj {
    std::vector<int> ptr, nbr;
    std::vector<double> res;

    explicit TreeAdj(const SpanningTree& t) {
        int n = t.num_vertices();
        ptr.assign(n + 1, 0);
        for (int v = 0; v < n; ++v) {
            if (v == t.root()) continue;
            ++ptr[v + 1];
            ++ptr[t.parent(v) + 1];
        }
        std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
        nbr.resize(n > 0 ? 2 * (n - 1) : 0);
        res.resize(nbr.size());
        std::vector<int> cur(ptr.begin(), ptr.end() - 1);
        for (int v = 0; v < n; ++v) {
            if (v == t.root()) continue;
            int p = t.parent(v);
            double r = t.parent_resistance(v);
            nbr[cur[v]] = p;
            res[cur[v]++] = r;
            nbr[cur[p]] = v;
            res[cur[p]++] = r;
        }
    }
};

// Centroid of the subtree spanned by `verts` (alive-stamped).
int subset_centroid(const TreeAdj& adj, const std::vector<int>& verts,
                    const std::vector<int>& stamp, int epoch, std::vector<int>& size,
                    std::vector<int>& parent_ws) {
    int m = static_cast<int>(verts.size());
    if (m == 1) return verts[0];
    int start = verts[0];
    // iterative DFS computing subtree sizes within the subset
    std::vector<int> order;
    order.reserve(m);
    parent_ws[start] = -1;
    order.push_back(start);
    for (std::size_t h = 0; h < order.size(); ++h) {
        int v = order[h];
        for (int k = adj.ptr[v]; k < adj.ptr[v + 1]; ++k) {
            int u = adj.nbr[k];
            if (stamp[u] != epoch || u == parent_ws[v]) continue;
            parent_ws[u] = v;
            order.push_back(u);
        }
    }
    for (int h = static_cast<int>(order.size()) - 1; h >= 0; --h) {
        int v = order[h];
        size[v] = 1;
        for (int k = adj.ptr[v]; k < adj.ptr[v + 1]; ++k) {
            int u = adj.nbr[k];
            if (stamp[u] == epoch && parent_ws[u] == v) size[v] += size[u];
        }
    }
    int best = start, best_max = m + 1;
    for (int v : order) {
        int worst = m - size[v];
        for (int k = adj.ptr[v]; k < adj.ptr[v + 1]; ++k) {
            int u = adj.nbr[k];
            if (stamp[u] == epoch && parent_ws[u] == v) worst = std::max(worst, size[u]);
        }
        if (worst < best_max || (worst == best_max && v < best)) {
            best_max = worst;
            best = v;
        }
    }
    return best;
}

struct StretchWork {
    const TreeAdj& adj;
    const std::vector<Edge>& edges;
    std::vector<double>& out;
    std::vector<int> stamp;       // alive epoch per vertex
    std::vector<int> comp;        // component label after splitter removal
    std::vector<double> res;      // resistance to current splitter
    std::vector<double> kahan;    // compensation for res accumulation
    std::vector<int> size_ws, parent_ws;
    int epoch = 0;

    StretchWork(const TreeAdj& a, const std::vector<Edge>& e, std::vector<double>& o, int n)
        : adj(a), edges(e), out(o), stamp(n, -1), comp(n, -1), res(n, 0.0), kahan(n, 0.0),
          size_ws(n, 0), parent_ws(n, -1) {}

    void run(std::vector<int> verts, std::vector<int> eids) {
        while (!eids.empty()) {
            ++epoch;
            for (int v : verts) stamp[v] = epoch;
            int r = subset_centroid(adj, verts, stamp, epoch, size_ws, parent_ws);

            // resistances to r and component label per vertex (BFS from r)
            res[r] = 0.0;
            kahan[r] = 0.0;
            comp[r] = -1;
            parent_ws[r] = -1;
            std::vector<int> bfs{r};
            std::vector<std::vector<int>> comp_verts;
            for (std::size_t h = 0; h < bfs.size(); ++h) {
                int v = bfs[h];
                for (int k = adj.ptr[v]; k < adj.ptr[v + 1]; ++k) {
                    int u = adj.nbr[k];
                    if (stamp[u] != epoch || u == parent_ws[v]) continue;
                    parent_ws[u] = v;
                    double y = adj.res[k] - kahan[v];
                    double t = res[v] + y;
                    kahan[u] = (t - res[v]) - y;
                    res[u] = t;
                    if (v == r) {
                        comp[u] = static_cast<int>(comp_verts.size());
                        comp_verts.emplace_back();
                    } else {
                        comp[u] = comp[v];
                    }
                    comp_verts[comp[u]].push_back(u);
                    bfs.push_back(u);
                }
            }

            std::vector<std::vector<int>> comp_eids(comp_verts.size());
            for (int id : eids) {
                const Edge& e = edges[id];
                if (e.u == r || e.v == r || comp[e.u] != comp[e.v]) {
                    out[id] = e.w * (res[e.u] + res[e.v]);
                } else {
                    comp_eids[comp[e.u]].push_back(id);
                }
            }

            // recurse on the largest piece iteratively, others by recursion
            int next = -1;
            for (std::size_t c = 0; c < comp_verts.size(); ++c) {
                if (comp_eids[c].empty()) continue;
                if (next < 0) {
                    next = static_cast<int>(c);
                } else {
                    run(comp_verts[c], std::move(comp_eids[c]));
                }
            }
            if (next < 0) return;
            verts = std::move(comp_verts[next]);
            eids = std::move(comp_eids[next]);
        }
    }
};

}  // namespace

StretchTable compute_stretch(const SpanningTree& t, const std::vector<Edge>& edges) {
    int n = t.num_vertices();
    StretchTable table;
    table.stretch.assign(edges.size(), 0.0);
    TreeAdj adj(t);
    std::vector<int> pending;
    for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
        const Edge& e = edges[id];
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw std::invalid_argument("compute_stretch: endpoint outside tree");
        if (t.is_tree_edge(e.u, e.v)) {
            int child = (t.parent(e.u) == e.v) ? e.u : e.v;
            if (e.w == t.parent_weight(child)) {
                table.stretch[id] = 1.0;  // the path is the edge itself
                continue;
            }
        }
        pending.push_back(id);
    }
    if (!pending.empty()) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        StretchWork work(adj, edges, table.stretch, n);
        work.run(std::move(all), std::move(pending));
    }
    eta_of(table);
    return table;
}

void eta_of(StretchTable& table) {
    table.eta.resize(table.stretch.size());
    double total = 0;
    for (std::size_t i = 0; i < table.stretch.size(); ++i) {
        table.eta[i] = std::max(table.stretch[i], 1.0);
        total += table.eta[i];
    }
    table.eta_total = total;
}

namespace {

std::vector<int> parents_from_edges(const WeightedGraph& g, const std::vector<int>& tree_eids,
                                    int root) {
    int n = g.num_vertices();
    std::vector<int> ptr(n + 1, 0), nbr, cur;
    for (int id : tree_eids) {
        ++ptr[g.edge(id).u + 1];
        ++ptr[g.edge(id).v + 1];
    }
    std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
    nbr.resize(2 * tree_eids.size());
    cur.assign(ptr.begin(), ptr.end() - 1);
    for (int id : tree_eids) {
        nbr[cur[g.edge(id).u]++] = g.edge(id).v;
        nbr[cur[g.edge(id).v]++] = g.edge(id).u;
    }
    std::vector<int> parent(n, -1);
    parent[root] = root;
    std::vector<int> bfs{root};
    for (std::size_t h = 0; h < bfs.size(); ++h) {
        int v = bfs[h];
        for (int k = ptr[v]; k < ptr[v + 1]; ++k) {
            int u = nbr[k];
            if (parent[u] < 0) {
                parent[u] = v;
                bfs.push_back(u);
            }
        }
    }
    for (int v = 0; v < n; ++v)
        if (parent[v] < 0) throw std::invalid_argument("build_tree: edge set does not span");
    return parent;
}

std::vector<int> kruskal_max_weight(const WeightedGraph& g) {
    std::vector<int> ids(g.num_edges());
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
        return g.edge(a).w > g.edge(b).w;  // ids break ties (stable, lexicographic)
    });
    std::vector<int> dsu(g.num_vertices());
    std::iota(dsu.begin(), dsu.end(), 0);
    auto find = [&](int x) {
        while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
        return x;
    };
    std::vector<int> tree;
    tree.reserve(g.num_vertices() - 1);
    for (int id : ids) {
        int a = find(g.edge(id).u), b = find(g.edge(id).v);
        if (a != b) {
            dsu[a] = b;
            tree.push_back(id);
        }
    }
    return tree;
}

std::vector<int> dijkstra_resistance_tree(const WeightedGraph& g, int src) {
    int n = g.num_vertices();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> via(n, -1);  // incident edge id used to reach v
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.push({0.0, src});
    std::vector<char> done(n, 0);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (done[v]) continue;
        done[v] = 1;
        for (const int* it = g.incident_begin(v); it != g.incident_end(v); ++it) {
            int u = g.other(*it, v);
            double nd = d + 1.0 / g.edge(*it).w;
            if (nd < dist[u] || (nd == dist[u] && via[u] >= 0 && *it < via[u])) {
                dist[u] = nd;
                via[u] = *it;
                pq.push({nd, u});
            }
        }
    }
    std::vector<int> tree;
    tree.reserve(n - 1);
    for (int v = 0; v < n; ++v)
        if (v != src && via[v] >= 0) tree.push_back(via[v]);
    return tree;
}

// AKPW-flavored iterated clustering: work down weight classes, cover the
// cluster graph by small-hop balls grown in random order, take the BFS
// edges of each ball into the tree, contract, repeat.
std::vector<int> akpw_cluster_tree(const WeightedGraph& g, std::uint64_t seed) {
    int n = g.num_vertices();
    int m = g.num_edges();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<int> cluster(n);
    std::iota(cluster.begin(), cluster.end(), 0);
    auto find = [&](int x) {
        while (cluster[x] != x) x = cluster[x] = cluster[cluster[x]];
        return x;
    };

    double wmax = 0;
    for (const auto& e : g.edges()) wmax = std::max(wmax, e.w);
    const double z = 4.0;
    double threshold = wmax / z;
    std::vector<int> tree;
    tree.reserve(n - 1);
    int clusters_left = n;

    for (int round = 0; round < 300 && clusters_left > 1; ++round) {
        // cluster-level adjacency over heavy-enough edges
        std::vector<int> eids;
        for (int id = 0; id < m; ++id) {
            const Edge& e = g.edge(id);
            if (e.w >= threshold && find(e.u) != find(e.v)) eids.push_back(id);
        }
        threshold /= z;
        if (eids.empty()) continue;

        std::vector<int> verts;  // cluster representatives present this round
        std::unordered_map<int, int> index;
        auto vid = [&](int c) {
            auto it = index.find(c);
            if (it != index.end()) return it->second;
            int id = static_cast<int>(verts.size());
            index.emplace(c, id);
            verts.push_back(c);
            return id;
        };
        std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor vid, edge id)
        for (int id : eids) {
            int a = vid(find(g.edge(id).u));
            int b = vid(find(g.edge(id).v));
            if (static_cast<int>(adj.size()) < static_cast<int>(verts.size()))
                adj.resize(verts.size());
            adj[a].push_back({b, id});
            adj[b].push_back({a, id});
        }
        int h = static_cast<int>(verts.size());
        adj.resize(h);

        std::vector<int> order(h);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        double p = 1.0 / (std::log2(static_cast<double>(h) + 2.0) + 1.0);
        std::geometric_distribution<int> radius_dist(p);
        int radius_cap = 2 * static_cast<int>(std::log2(static_cast<double>(h) + 2.0)) + 1;

        std::vector<int> ball(h, -1);
        for (int c : order) {
            if (ball[c] >= 0) continue;
            int radius = std::min(radius_dist(rng) + 1, radius_cap);
            ball[c] = c;
            std::vector<int> frontier{c};
            for (int hop = 0; hop < radius && !frontier.empty(); ++hop) {
                std::vector<int> next;
                for (int v : frontier) {
                    for (auto [u, eid] : adj[v]) {
                        if (ball[u] >= 0) continue;
                        ball[u] = c;
                        tree.push_back(eid);
                        cluster[find(verts[u])] = find(verts[c]);
                        --clusters_left;
                        next.push_back(u);
                    }
                }
                frontier = std::move(next);
            }
        }
    }
    if (clusters_left > 1) {
        // stalled (pathological weights): fall back to the resistance SPT
        return dijkstra_resistance_tree(g, 0);
    }
    return tree;
}

}  // namespace

SpanningTree build_tree(const WeightedGraph& g, TreeStrategy strategy, std::uint64_t seed) {
    int n = g.num_vertices();
    if (n == 0) throw std::invalid_argument("build_tree: empty graph");
    int ncomp = 0;
    connected_components(g, &ncomp);
    if (ncomp != 1) throw std::invalid_argument("build_tree: disconnected graph");
    if (n == 1) return SpanningTree(g, {0}, 0);

    std::vector<int> tree_eids;
    switch (strategy) {
        case TreeStrategy::MaxWeightSpanning: tree_eids = kruskal_max_weight(g); break;
        case TreeStrategy::ShortestPathByResistance: {
            SpanningTree prelim(g, parents_from_edges(g, dijkstra_resistance_tree(g, 0), 0), 0);
            tree_eids = dijkstra_resistance_tree(g, find_splitter(prelim));
            break;
        }
        case TreeStrategy::ClusterLowStretch: tree_eids = akpw_cluster_tree(g, seed); break;
    }
    if (static_cast<int>(tree_eids.size()) != n - 1)
        throw std::runtime_error("build_tree: strategy produced a non-spanning edge set");

    SpanningTree prelim(g, parents_from_edges(g, tree_eids, g.edge(tree_eids[0]).u),
                        g.edge(tree_eids[0]).u);
    int root = find_splitter(prelim);
    return SpanningTree(g, parents_from_edges(g, tree_eids, root), root);
}

}  // namespace sdd
