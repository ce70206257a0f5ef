#include "tergm/graph.hpp"

#include "tergm/util.hpp"

namespace tergm {

DirectedGraph::DirectedGraph(std::vector<std::string> node_ids,
                             std::vector<std::uint8_t> adjacency)
    : n_(static_cast<int>(node_ids.size())), adj_(std::move(adjacency)), ids_(std::move(node_ids)) {
    if (adj_.size() != static_cast<std::size_t>(n_) * n_)
        throw Error("adjacency size does not match node count");
    for (std::size_t c = 0; c < adj_.size(); ++c) {
        if (adj_[c] > 1) throw Error("adjacency entries must be 0 or 1");
    }
    for (int i = 0; i < n_; ++i) {
        auto d = static_cast<std::size_t>(i) * n_ + i;
        if (adj_[d] != 0) {
            adj_[d] = 0;
            ++zeroed_diag_;
        }
    }
}

DirectedGraph DirectedGraph::empty(std::vector<std::string> node_ids) {
    std::size_t n = node_ids.size();
    return DirectedGraph(std::move(node_ids), std::vector<std::uint8_t>(n * n, 0));
}

long long DirectedGraph::edge_count() const {
    long long e = 0;
    for (std::uint8_t v : adj_) e += v;
    return e;
}

DirectedGraph DirectedGraph::with_edge(int i, int j, bool present) const {
    if (i == j) throw Error("self-ties are not representable");
    DirectedGraph g = *this;
    g.adj_[static_cast<std::size_t>(i) * n_ + j] = present ? 1 : 0;
    return g;
}

DirectedGraph DirectedGraph::relabeled(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != n_) throw Error("permutation size mismatch");
    std::vector<std::string> ids(static_cast<std::size_t>(n_));
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n_) * n_, 0);
    for (int i = 0; i < n_; ++i) ids[i] = ids_[perm[i]];
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            adj[static_cast<std::size_t>(i) * n_ + j] =
                adj_[static_cast<std::size_t>(perm[i]) * n_ + perm[j]];
    return DirectedGraph(std::move(ids), std::move(adj));
}

WeightedGraph::WeightedGraph(std::vector<std::string> node_ids, std::vector<long long> weights)
    : n_(static_cast<int>(node_ids.size())), w_(std::move(weights)), ids_(std::move(node_ids)) {
    if (w_.size() != static_cast<std::size_t>(n_) * n_)
        throw Error("weight matrix size does not match node count");
    for (long long v : w_) {
        if (v < 0) throw Error("weights must be nonnegative");
    }
    for (int i = 0; i < n_; ++i) {
        auto d = static_cast<std::size_t>(i) * n_ + i;
        if (w_[d] != 0) {
            w_[d] = 0;
            ++zeroed_diag_;
        }
    }
}

DirectedGraph threshold(const WeightedGraph& graph, long long k) {
    if (k < 0) throw Error("threshold must be nonnegative");
    int n = graph.size();
    std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && graph.weight(i, j) > k)
                adj[static_cast<std::size_t>(i) * n + j] = 1;
    return DirectedGraph(graph.node_ids(), std::move(adj));
}

Degrees degrees(AdjView g) {
    Degrees d;
    d.in.assign(static_cast<std::size_t>(g.n), 0);
    d.out.assign(static_cast<std::size_t>(g.n), 0);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (g.edge(i, j)) {
                ++d.out[i];
                ++d.in[j];
            }
    return d;
}

Degrees degrees(const DirectedGraph& graph) { return degrees(graph.view()); }

}  // namespace tergm
