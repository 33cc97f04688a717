#include "sdd/decompose.hpp"

#include <algorithm>
#include <numeric>

namespace sdd {

namespace {

struct Frame {
    int v = 0;
    int next_child = 0;   // index into the child list of v
    double w_sub = 0.0;
    std::vector<int> f_sub;  // gathered edge ids (may repeat across gatherings)
    std::vector<int> u_sub;  // completed child subtree vertices

    explicit Frame(int vertex) : v(vertex) {}
};

}  // namespace

TreeDecomposition decompose(const SpanningTree& tree, const std::vector<Edge>& edges,
                            const std::vector<double>& eta, long long t_param) {
    int n = tree.num_vertices();
    if (eta.size() != edges.size()) throw std::invalid_argument("decompose: eta size mismatch");
    double eta_sum = 0;
    for (double e : eta) {
        if (e < 0) throw std::invalid_argument("decompose: negative eta");
        eta_sum += e;
    }
    if (t_param <= 1 || (t_param < n && static_cast<double>(t_param) > eta_sum))
        throw std::invalid_argument("decompose: t out of range");

    TreeDecomposition out;
    out.rho.assign(edges.size(), {});
    out.phi_threshold = 2.0 * eta_sum / static_cast<double>(t_param);

    if (t_param >= n) {
        // one singleton per vertex
        out.sets.resize(n);
        for (int v = 0; v < n; ++v) out.sets[v] = {v};
        for (std::size_t id = 0; id < edges.size(); ++id) {
            out.rho[id].add(edges[id].u);
            out.rho[id].add(edges[id].v);
        }
        return out;
    }

    const double phi = out.phi_threshold;

    // children in ascending vertex id; incident edge ids per vertex
    std::vector<int> cptr(n + 1, 0);
    for (int v = 0; v < n; ++v)
        if (v != tree.root()) ++cptr[tree.parent(v) + 1];
    std::partial_sum(cptr.begin(), cptr.end(), cptr.begin());
    std::vector<int> child(n > 0 ? n - 1 : 0);
    {
        std::vector<int> cur(cptr.begin(), cptr.end() - 1);
        for (int v = 0; v < n; ++v)
            if (v != tree.root()) child[cur[tree.parent(v)]++] = v;
    }
    std::vector<int> iptr(n + 1, 0);
    for (const auto& e : edges) {
        ++iptr[e.u + 1];
        ++iptr[e.v + 1];
    }
    std::partial_sum(iptr.begin(), iptr.end(), iptr.begin());
    std::vector<int> inc(2 * edges.size());
    {
        std::vector<int> cur(iptr.begin(), iptr.end() - 1);
        for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
            inc[cur[edges[id].u]++] = id;
            inc[cur[edges[id].v]++] = id;
        }
    }

    auto form = [&](std::vector<int> verts, const std::vector<int>& eids) {
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        int idx = static_cast<int>(out.sets.size());
        out.sets.push_back(std::move(verts));
        for (int id : eids) out.rho[id].add(idx);
    };

    std::vector<Frame> stack;
    stack.push_back(Frame(tree.root()));
    // return value of the last completed sub() call
    double ret_w = 0.0;
    std::vector<int> ret_f, ret_u;
    bool have_ret = false;

    while (!stack.empty()) {
        Frame& f = stack.back();

        if (have_ret) {
            // merge a finished child, then check the in-loop threshold
            f.w_sub += ret_w;
            f.f_sub.insert(f.f_sub.end(), ret_f.begin(), ret_f.end());
            f.u_sub.insert(f.u_sub.end(), ret_u.begin(), ret_u.end());
            have_ret = false;
            if (f.w_sub > phi) {
                std::vector<int> verts = f.u_sub;
                verts.push_back(f.v);
                form(std::move(verts), f.f_sub);
                f.w_sub = 0;
                f.f_sub.clear();
                f.u_sub.clear();
            }
        }

        if (f.next_child < cptr[f.v + 1] - cptr[f.v]) {
            int c = child[cptr[f.v] + f.next_child++];
            stack.push_back(Frame(c));
            continue;
        }

        // post-visit: gather the edges attached to v
        double w_v = 0;
        const int v = f.v;
        for (int k = iptr[v]; k < iptr[v + 1]; ++k) w_v += eta[inc[k]];
        double total = w_v + f.w_sub;

        if (total > phi && total <= 2 * phi) {
            std::vector<int> verts = f.u_sub;
            verts.push_back(v);
            std::vector<int> eids = f.f_sub;
            eids.insert(eids.end(), inc.begin() + iptr[v], inc.begin() + iptr[v + 1]);
            form(std::move(verts), eids);
            ret_w = 0;
            ret_f.clear();
            ret_u.clear();
        } else if (total > 2 * phi) {
            if (!f.u_sub.empty()) {
                // v joins so the set induces a subtree; it overlaps the
                // singleton formed next in exactly that one vertex
                std::vector<int> verts = f.u_sub;
                verts.push_back(v);
                form(std::move(verts), f.f_sub);
            }
            form({v}, std::vector<int>(inc.begin() + iptr[v], inc.begin() + iptr[v + 1]));
            ret_w = 0;
            ret_f.clear();
            ret_u.clear();
        } else {
            ret_w = total;
            ret_f = std::move(f.f_sub);
            ret_f.insert(ret_f.end(), inc.begin() + iptr[v], inc.begin() + iptr[v + 1]);
            ret_u = std::move(f.u_sub);
            ret_u.push_back(v);
        }
        have_ret = true;
        stack.pop_back();
    }

    // leftover set at the root
    if (!ret_u.empty()) form(std::move(ret_u), ret_f);
    return out;
}

}  // namespace sdd
