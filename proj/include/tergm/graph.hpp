#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tergm {

// Read-only adjacency window used by the statistics kernels so they can run
// on either a frozen DirectedGraph or a sampler's working buffer.
struct AdjView {
    int n = 0;
    const std::uint8_t* a = nullptr;
    bool edge(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j] != 0; }
};

// Directed binary network over an ordered node roster. Immutable after
// construction; the diagonal is forced to zero (self-ties are impossible)
// and any nonzero input diagonal is counted so ingestion can warn.
class DirectedGraph {
public:
    DirectedGraph() = default;
    DirectedGraph(std::vector<std::string> node_ids, std::vector<std::uint8_t> adjacency);

    static DirectedGraph empty(std::vector<std::string> node_ids);

    int size() const { return n_; }
    bool edge(int i, int j) const { return adj_[static_cast<std::size_t>(i) * n_ + j] != 0; }
    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::vector<std::uint8_t>& adjacency() const { return adj_; }
    AdjView view() const { return {n_, adj_.data()}; }

    long long edge_count() const;
    int zeroed_diagonal_entries() const { return zeroed_diag_; }

    // Copy with one cell changed; used by the two-evaluation change-statistic
    // path and by toggle-style tests.
    DirectedGraph with_edge(int i, int j, bool present) const;

    // Copy with rows/columns permuted: node k of the result is node perm[k]
    // of the original. Used by relabeling-invariance tests.
    DirectedGraph relabeled(const std::vector<int>& perm) const;

    bool operator==(const DirectedGraph& o) const {
        return n_ == o.n_ && ids_ == o.ids_ && adj_ == o.adj_;
    }

private:
    int n_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::string> ids_;
    int zeroed_diag_ = 0;
};

// Weighted directed network: weights[i][j] counts interactions sent from i
// to j (e.g. bills of j's that i cosponsored). Kept alongside the binary
// network so alternative thresholds are a config change, not a re-ingest.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(std::vector<std::string> node_ids, std::vector<long long> weights);

    int size() const { return n_; }
    long long weight(int i, int j) const { return w_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::vector<long long>& weights() const { return w_; }
    int zeroed_diagonal_entries() const { return zeroed_diag_; }

    bool operator==(const WeightedGraph& o) const {
        return n_ == o.n_ && ids_ == o.ids_ && w_ == o.w_;
    }

private:
    int n_ = 0;
    std::vector<long long> w_;
    std::vector<std::string> ids_;
    int zeroed_diag_ = 0;
};

// adjacency[i][j] = 1 iff weights[i][j] > k (strict: "more than k").
DirectedGraph threshold(const WeightedGraph& graph, long long k);

struct Degrees {
    std::vector<int> in;
    std::vector<int> out;
};

Degrees degrees(const DirectedGraph& graph);
Degrees degrees(AdjView g);

}  // namespace tergm
