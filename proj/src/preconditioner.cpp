#include "sdd/preconditioner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace sdd {

namespace {

bool edge_pair_less(const Edge& a, const Edge& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
}

}  // namespace

BridgeSelection select_bridges(const TreeDecomposition& d, const std::vector<Edge>& edges,
                               const std::vector<double>& eta,
                               const std::vector<char>* exclude) {
    if (d.rho.size() != edges.size() || eta.size() != edges.size())
        throw std::invalid_argument("select_bridges: size mismatch");
    std::map<std::pair<int, int>, BridgeSelection::Bridge> acc;
    for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
        const auto& r = d.rho[id];
        if (r.size() != 2) continue;
        if (exclude && (*exclude)[id]) continue;
        std::pair<int, int> key{std::min(r.a, r.b), std::max(r.a, r.b)};
        double ratio = edges[id].w / eta[id];
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc[key] = {key.first, key.second, id, edges[id].w, 0.0};
        } else {
            it->second.omega += edges[id].w;
            double best_ratio = edges[it->second.sigma].w / eta[it->second.sigma];
            if (ratio > best_ratio ||
                (ratio == best_ratio && edge_pair_less(edges[id], edges[it->second.sigma])))
                it->second.sigma = id;
        }
    }
    BridgeSelection out;
    out.bridges.reserve(acc.size());
    for (auto& [key, b] : acc) {
        b.psi = b.omega / edges[b.sigma].w;
        out.bridges.push_back(b);
    }
    return out;
}

std::vector<int> augment_tree(const SpanningTree& t, const std::vector<Edge>& edges,
                              long long t_param) {
    StretchTable st = compute_stretch(t, edges);
    if (t_param <= 1 || static_cast<double>(t_param) > st.eta_total)
        throw std::invalid_argument("augment_tree: t out of range");
    TreeDecomposition d = decompose(t, edges, st.eta, t_param);
    // tree edges support themselves inside T and never enter F
    std::vector<char> exclude(edges.size(), 0);
    for (std::size_t id = 0; id < edges.size(); ++id)
        if (t.is_tree_edge(edges[id].u, edges[id].v)) exclude[id] = 1;
    BridgeSelection bs = select_bridges(d, edges, st.eta, &exclude);
    std::vector<int> f;
    f.reserve(bs.bridges.size());
    for (const auto& b : bs.bridges) f.push_back(b.sigma);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

WeightedGraph ultra_simple(const WeightedGraph& g, long long t_param, TreeStrategy strategy,
                           std::uint64_t seed) {
    int ncomp = 0;
    connected_components(g, &ncomp);
    if (ncomp != 1) throw std::invalid_argument("ultra_simple: disconnected input");
    if (t_param >= g.num_vertices()) return g;

    SpanningTree t = build_tree(g, strategy, seed);
    std::vector<int> f = augment_tree(t, g.edges(), t_param);

    std::vector<Edge> kept = t.edges();
    for (int id : f) kept.push_back(g.edge(id));
    return WeightedGraph(g.num_vertices(), std::move(kept));
}

WeightedGraph default_sparsifier(const WeightedGraph& h, double p, double q,
                                 std::mt19937_64& rng) {
    int n = h.num_vertices();
    int m = h.num_edges();
    if (m == 0) return h;
    p = std::min(std::max(p, 1e-300), 0.999);
    double per_vertex = q * std::log2(std::max(2.0, static_cast<double>(n) / p));
    int maxdeg = 0;
    for (int v = 0; v < n; ++v) maxdeg = std::max(maxdeg, h.degree(v));
    if (static_cast<double>(maxdeg) <= per_vertex) return h;  // nothing to sparsify

    // maximum-weight spanning forest, kept at original weights
    std::vector<char> in_forest(m, 0);
    long long forest_size = 0;
    {
        std::vector<int> dsu(n);
        std::iota(dsu.begin(), dsu.end(), 0);
        auto find = [&](int x) {
            while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
            return x;
        };
        std::vector<int> ids(m);
        std::iota(ids.begin(), ids.end(), 0);
        std::stable_sort(ids.begin(), ids.end(),
                         [&](int a, int b) { return h.edge(a).w > h.edge(b).w; });
        for (int id : ids) {
            int a = find(h.edge(id).u), b = find(h.edge(id).v);
            if (a != b) {
                dsu[a] = b;
                in_forest[id] = 1;
                ++forest_size;
            }
        }
    }

    // forest path resistances drive the sampling probabilities
    std::vector<int> parent(n, -1), depth(n, 0);
    std::vector<double> res_step(n, 0.0);  // resistance of the edge to parent
    {
        std::vector<int> ptr(n + 1, 0), nbr, eid;
        for (int id = 0; id < m; ++id) {
            if (!in_forest[id]) continue;
            ++ptr[h.edge(id).u + 1];
            ++ptr[h.edge(id).v + 1];
        }
        std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
        nbr.resize(2 * forest_size);
        eid.resize(nbr.size());
        std::vector<int> cur(ptr.begin(), ptr.end() - 1);
        for (int id = 0; id < m; ++id) {
            if (!in_forest[id]) continue;
            const Edge& e = h.edge(id);
            nbr[cur[e.u]] = e.v;
            eid[cur[e.u]++] = id;
            nbr[cur[e.v]] = e.u;
            eid[cur[e.v]++] = id;
        }
        std::vector<int> bfs;
        for (int s = 0; s < n; ++s) {
            if (parent[s] >= 0) continue;
            parent[s] = s;
            bfs.push_back(s);
            for (std::size_t head = bfs.size() - 1; head < bfs.size(); ++head) {
                int v = bfs[head];
                for (int k = ptr[v]; k < ptr[v + 1]; ++k) {
                    int u = nbr[k];
                    if (parent[u] >= 0) continue;
                    parent[u] = v;
                    depth[u] = depth[v] + 1;
                    res_step[u] = 1.0 / h.edge(eid[k]).w;
                    bfs.push_back(u);
                }
            }
        }
    }
    auto path_res = [&](int u, int v) {
        double s = 0;
        while (depth[u] > depth[v]) {
            s += res_step[u];
            u = parent[u];
        }
        while (depth[v] > depth[u]) {
            s += res_step[v];
            v = parent[v];
        }
        while (u != v) {
            s += res_step[u] + res_step[v];
            u = parent[u];
            v = parent[v];
        }
        return s;
    };

    std::vector<double> weight_s(m, 0.0);
    std::vector<double> prob(m, 0.0);
    double prob_total = 0;
    for (int id = 0; id < m; ++id) {
        if (in_forest[id]) {
            weight_s[id] = h.edge(id).w;
        } else {
            prob[id] = std::max(h.edge(id).w * path_res(h.edge(id).u, h.edge(id).v), 1e-300);
            prob_total += prob[id];
        }
    }
    long long budget = static_cast<long long>(std::ceil(per_vertex * static_cast<double>(n)));
    long long samples = std::max<long long>(budget - forest_size, 0);
    // Systematic resampling over the cdf (one random offset, fixed stride)
    // keeps the per-cut sampled mass within one draw of its expectation.
    // The sampled mass is shaded below expectation so the output sits under
    // the input in the Loewner order (Def. target A_s <= A).
    const double shade = 0.88;
    if (prob_total > 0 && samples > 0) {
        std::vector<double> cdf;
        std::vector<int> cdf_id;
        double run = 0;
        for (int id = 0; id < m; ++id) {
            if (in_forest[id]) continue;
            run += prob[id] / prob_total;
            cdf.push_back(run);
            cdf_id.push_back(id);
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double offset = unif(rng) / static_cast<double>(samples);
        std::size_t pos = 0;
        for (long long s = 0; s < samples; ++s) {
            double x = offset + static_cast<double>(s) / static_cast<double>(samples);
            while (pos + 1 < cdf.size() && cdf[pos] < x) ++pos;
            int id = cdf_id[pos];
            weight_s[id] += shade * h.edge(id).w /
                            (static_cast<double>(samples) * (prob[id] / prob_total));
        }
    }

    // per-vertex reweight cap: sum_j w_s/w <= 2 deg_H
    std::vector<double> ratio_sum(n, 0.0);
    for (int id = 0; id < m; ++id) {
        if (weight_s[id] <= 0) continue;
        double r = weight_s[id] / h.edge(id).w;
        ratio_sum[h.edge(id).u] += r;
        ratio_sum[h.edge(id).v] += r;
    }
    std::vector<double> alpha(n, 1.0);
    for (int v = 0; v < n; ++v) {
        double cap = 2.0 * h.degree(v);
        if (ratio_sum[v] > cap) alpha[v] = cap / ratio_sum[v];
    }
    std::vector<Edge> kept;
    for (int id = 0; id < m; ++id) {
        if (weight_s[id] <= 0) continue;
        const Edge& e = h.edge(id);
        kept.push_back({e.u, e.v, weight_s[id] * std::min(alpha[e.u], alpha[e.v])});
    }
    return WeightedGraph(n, std::move(kept));
}

SparsifierPlugin sparsifier_by_name(const std::string& name, double q) {
    if (name == "identity")
        return [](const WeightedGraph& h, double, std::mt19937_64&) { return h; };
    if (name == "none")
        return [](const WeightedGraph& h, double, std::mt19937_64&) {
            return WeightedGraph(h.num_vertices(), {});
        };
    if (name == "default")
        return [q](const WeightedGraph& h, double p, std::mt19937_64& rng) {
            return default_sparsifier(h, p, q, rng);
        };
    throw std::invalid_argument("unknown sparsifier plugin: " + name);
}

namespace {

// Stretch of the edges of E with respect to a tree in which every path runs
// through r: resistance to r from both endpoints.
std::vector<double> stretch_through_root(const SpanningTree& t, const std::vector<Edge>& edges,
                                         int r) {
    int n = t.num_vertices();
    std::vector<double> res(n, 0.0);
    std::vector<int> comp(n, -1);
    std::vector<int> stackv{r};
    std::vector<int> par(n, -1);
    par[r] = r;
    // BFS over tree adjacency from r
    std::vector<int> ptr(n + 1, 0), nbr;
    std::vector<double> rres;
    for (int v = 0; v < n; ++v) {
        if (v == t.root()) continue;
        ++ptr[v + 1];
        ++ptr[t.parent(v) + 1];
    }
    std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
    nbr.resize(n > 0 ? 2 * (n - 1) : 0);
    rres.resize(nbr.size());
    {
        std::vector<int> cur(ptr.begin(), ptr.end() - 1);
        for (int v = 0; v < n; ++v) {
            if (v == t.root()) continue;
            int p = t.parent(v);
            nbr[cur[v]] = p;
            rres[cur[v]++] = t.parent_resistance(v);
            nbr[cur[p]] = v;
            rres[cur[p]++] = t.parent_resistance(v);
        }
    }
    for (std::size_t h = 0; h < stackv.size(); ++h) {
        int v = stackv[h];
        for (int k = ptr[v]; k < ptr[v + 1]; ++k) {
            int u = nbr[k];
            if (par[u] >= 0) continue;
            par[u] = v;
            res[u] = res[v] + rres[k];
            comp[u] = (v == r) ? u : comp[v];
            stackv.push_back(u);
        }
    }
    std::vector<double> stretch(edges.size());
    for (std::size_t id = 0; id < edges.size(); ++id) {
        const Edge& e = edges[id];
        bool through = (e.u == r || e.v == r || comp[e.u] != comp[e.v]);
        if (!through)
            throw std::invalid_argument("rooted_ultra_sparsify: edge avoiding the root");
        stretch[id] = e.w * (res[e.u] + res[e.v]);
    }
    return stretch;
}

}  // namespace

std::vector<int> rooted_ultra_sparsify(const std::vector<Edge>& edges, const SpanningTree& t,
                                       int r, long long t_param, double p,
                                       const SparsifierPlugin& plugin, std::mt19937_64& rng,
                                       std::vector<int>* bucket_sizes) {
    if (t_param < 1) throw std::invalid_argument("rooted_ultra_sparsify: t < 1");
    if (t_param == 1) return {};
    std::vector<double> stretch = stretch_through_root(t, edges, r);
    std::vector<double> eta(stretch.size());
    double eta_total = 0;
    for (std::size_t i = 0; i < stretch.size(); ++i) {
        eta[i] = std::max(stretch[i], 1.0);
        eta_total += eta[i];
    }
    std::vector<int> all(edges.size());
    std::iota(all.begin(), all.end(), 0);
    if (t_param >= static_cast<long long>(edges.size())) return all;

    TreeDecomposition d = decompose(t, edges, eta, t_param);
    BridgeSelection bs = select_bridges(d, edges, eta);

    int h = d.count();
    int nbuckets = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(eta_total, 2.0)))));
    if (bucket_sizes && static_cast<int>(bucket_sizes->size()) < nbuckets)
        bucket_sizes->resize(nbuckets, 0);

    std::vector<std::vector<const BridgeSelection::Bridge*>> buckets(nbuckets);
    for (const auto& b : bs.bridges) {
        double phi = std::max(b.psi, b.psi * stretch[b.sigma]);
        int idx = (phi <= 2.0) ? 0 : static_cast<int>(std::ceil(std::log2(phi))) - 1;
        idx = std::clamp(idx, 0, nbuckets - 1);
        buckets[idx].push_back(&b);
        if (bucket_sizes) ++(*bucket_sizes)[idx];
    }

    std::vector<int> kept;
    for (const auto& bucket : buckets) {
        if (bucket.empty()) continue;
        std::vector<Edge> quotient;
        quotient.reserve(bucket.size());
        std::map<std::pair<int, int>, int> sigma_of;
        for (const auto* b : bucket) {
            quotient.push_back({b->i, b->j, b->omega});
            sigma_of[{b->i, b->j}] = b->sigma;
        }
        WeightedGraph hb(h, quotient);
        WeightedGraph hs = plugin(hb, p, rng);
        if (hs.num_vertices() != h)
            throw std::logic_error("sparsifier plugin changed the vertex set");
        for (const auto& e : hs.edges()) {
            auto it = sigma_of.find({e.u, e.v});
            if (it == sigma_of.end())
                throw std::logic_error("sparsifier plugin introduced an edge outside H");
            kept.push_back(it->second);
        }
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return kept;
}

namespace {

struct TreeUltraWorker {
    const std::vector<Edge>& edges;      // master edge list
    const std::vector<double>& eta;      // per master edge
    double p;
    const SparsifierPlugin& plugin;
    std::mt19937_64& rng;
    std::vector<int>* bucket_sizes;
    std::vector<std::vector<int>>* er_sets = nullptr;
    int rooted_calls = 0;
    std::vector<int> result;

    // verts: original vertex ids of the current subtree; tree_pairs: (child,
    // parent, weight) pairs of the current subtree; eids: master edge ids.
    void run(const std::vector<int>& verts, const std::vector<Edge>& tree_edges,
             const std::vector<int>& eids, double t_budget) {
        if (eids.empty()) return;

        // local reindex
        std::unordered_map<int, int> local;
        local.reserve(verts.size() * 2);
        for (int i = 0; i < static_cast<int>(verts.size()); ++i) local[verts[i]] = i;
        std::vector<Edge> ltree;
        ltree.reserve(tree_edges.size());
        for (const auto& e : tree_edges) ltree.push_back({local[e.u], local[e.v], e.w});
        WeightedGraph lg(static_cast<int>(verts.size()), ltree);
        // parents from BFS at vertex 0, then re-root at the splitter
        SpanningTree lt = materialize(lg, 0);
        int r = find_splitter(lt);
        if (r != lt.root()) lt = materialize(lg, r);

        // split edges: through r vs. per-component
        int n = lg.num_vertices();
        std::vector<int> comp(n, -1);
        for (int v : lt.order()) {
            if (v == r) continue;
            comp[v] = (lt.parent(v) == r) ? v : comp[lt.parent(v)];
        }
        std::vector<int> er;
        std::unordered_map<int, std::vector<int>> per_comp;
        double eta_total = 0, eta_r = 0;
        for (int id : eids) eta_total += eta[id];
        for (int id : eids) {
            int u = local[edges[id].u], v = local[edges[id].v];
            if (u == r || v == r || comp[u] != comp[v]) {
                er.push_back(id);
                eta_r += eta[id];
            } else {
                per_comp[comp[u]].push_back(id);
            }
        }

        if (er_sets && !er.empty()) er_sets->push_back(er);
        long long t_r = static_cast<long long>(std::ceil(t_budget * eta_r / eta_total));
        if (!er.empty() && t_r > 1) {
            ++rooted_calls;
            std::vector<Edge> ler;
            ler.reserve(er.size());
            for (int id : er) ler.push_back({local[edges[id].u], local[edges[id].v], edges[id].w});
            std::vector<int> kept =
                rooted_ultra_sparsify(ler, lt, r, t_r, p, plugin, rng, bucket_sizes);
            for (int k : kept) result.push_back(er[k]);
        }

        // recurse on the subtrees obtained by removing r
        std::unordered_map<int, std::vector<int>> comp_verts;
        for (int v = 0; v < n; ++v)
            if (v != r) comp_verts[comp[v]].push_back(v);
        for (auto& [c, cl] : per_comp) {
            if (cl.empty()) continue;
            const auto& vs = comp_verts[c];
            std::vector<int> overts;
            overts.reserve(vs.size());
            for (int v : vs) overts.push_back(verts[v]);
            std::vector<Edge> sub_tree;
            for (int v : vs) {
                int pv = lt.parent(v);
                if (pv != r && v != lt.root())
                    sub_tree.push_back({verts[v], verts[pv], lt.parent_weight(v)});
            }
            double eta_c = 0;
            for (int id : cl) eta_c += eta[id];
            run(overts, sub_tree, cl, t_budget * eta_c / eta_total);
        }
    }

    static SpanningTree materialize(const WeightedGraph& g, int root) {
        int n = g.num_vertices();
        std::vector<int> parent(n, -1);
        parent[root] = root;
        std::vector<int> bfs{root};
        for (std::size_t h = 0; h < bfs.size(); ++h) {
            int v = bfs[h];
            for (const int* it = g.incident_begin(v); it != g.incident_end(v); ++it) {
                int u = g.other(*it, v);
                if (parent[u] < 0) {
                    parent[u] = v;
                    bfs.push_back(u);
                }
            }
        }
        return SpanningTree(g, std::move(parent), root);
    }
};

}  // namespace

std::vector<int> tree_ultra_sparsify(const std::vector<Edge>& edges, double t_budget,
                                     const SpanningTree& t, double p,
                                     const SparsifierPlugin& plugin, std::mt19937_64& rng,
                                     std::vector<int>* bucket_sizes, int* rooted_calls,
                                     std::vector<std::vector<int>>* er_sets) {
    if (edges.empty()) return {};
    StretchTable st = compute_stretch(t, edges);
    TreeUltraWorker worker{edges, st.eta, p, plugin, rng, bucket_sizes, er_sets, 0, {}};
    std::vector<int> verts(t.num_vertices());
    std::iota(verts.begin(), verts.end(), 0);
    std::vector<int> eids(edges.size());
    std::iota(eids.begin(), eids.end(), 0);
    worker.run(verts, t.edges(), eids, t_budget);
    if (rooted_calls) *rooted_calls = worker.rooted_calls;
    std::sort(worker.result.begin(), worker.result.end());
    return worker.result;
}

WeightedGraph UltraSparsifier::graph(int n) const {
    std::vector<Edge> all = tree_edges;
    all.insert(all.end(), extra_edges.begin(), extra_edges.end());
    return WeightedGraph(n, std::move(all));
}

UltraSparsifier ultra_sparsify(const WeightedGraph& g, double k, const UltraSparsifyOptions& opts) {
    if (k < 1) throw std::invalid_argument("ultra_sparsify: k must be >= 1");
    int ncomp = 0;
    connected_components(g, &ncomp);
    if (ncomp > 1) throw std::invalid_argument("ultra_sparsify: disconnected input");

    UltraSparsifier out;
    out.k = k;
    out.stats.seed = opts.seed;
    SpanningTree t = build_tree(g, opts.tree, opts.seed);
    out.tree_edges = t.edges();

    StretchTable st = compute_stretch(t, g.edges());
    double eta_total = st.eta_total;
    out.stats.eta_total = eta_total;

    int n = g.num_vertices();
    double log32n = (n > 1) ? std::ceil(std::log(static_cast<double>(n)) / std::log(1.5)) : 0.0;
    double t_real = 517.0 * std::max(1.0, std::log2(std::max(eta_total, 1.0))) * log32n *
                    eta_total / k;
    double p = 1.0 / (2.0 * std::max(1.0, std::ceil(std::log2(std::max(eta_total, 1.0)))) *
                      static_cast<double>(n) * static_cast<double>(n));
    out.stats.t_used = t_real;
    out.stats.p_used = p;

    std::vector<Edge> offtree;
    for (const auto& e : g.edges())
        if (!t.is_tree_edge(e.u, e.v)) offtree.push_back(e);

    if (t_real >= eta_total) {
        out.extra_edges = std::move(offtree);
        return out;
    }
    std::mt19937_64 rng(opts.seed ^ 0xda3e39cb94b95bdbULL);
    SparsifierPlugin plugin = sparsifier_by_name(opts.sparsifier, opts.sparsifier_q);
    std::vector<int> kept = tree_ultra_sparsify(offtree, t_real, t, p, plugin, rng,
                                                &out.stats.bucket_sizes, &out.stats.rooted_calls);
    out.extra_edges.reserve(kept.size());
    for (int id : kept) out.extra_edges.push_back(offtree[id]);
    return out;
}

}  // namespace sdd
