#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csgad/graph.hpp"
#include "csgad/rng.hpp"

namespace csgad {

/// Undirected weighted graph in CSR form, the input to random walks.
/// Nodes are dense indices; TripartiteGraph maps onto it with its global
/// node ordering. Immutable after finalize().
class WalkGraph {
public:
    WalkGraph() = default;
    explicit WalkGraph(std::size_t node_count)
        : node_count_(node_count), adjacency_(node_count) {}

    void add_edge(std::uint32_t u, std::uint32_t v, double weight);
    void finalize();

    static WalkGraph from_tripartite(const TripartiteGraph& graph);

    std::size_t node_count() const { return node_count_; }
    std::size_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }

    std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
        return {neighbors_.data() + offsets_[v], degree(v)};
    }
    std::span<const double> weights(std::uint32_t v) const {
        return {weights_.data() + offsets_[v], degree(v)};
    }

    bool has_edge(std::uint32_t u, std::uint32_t v) const;

    /// Alias table over v's incident edge weights (first-order sampling).
    const AliasTable& neighbor_sampler(std::uint32_t v) const { return samplers_[v]; }

private:
    bool finalized_ = false;
    std::size_t node_count_ = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency_;  // until finalize
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> neighbors_;
    std::vector<double> weights_;
    std::vector<AliasTable> samplers_;
};

struct WalkConfig {
    double p = 1.0;
    double q = 1.0;
    int walk_length = 40;
    int walks_per_node = 10;
    std::uint64_t seed = 1;
};

/// Second-order transition distribution out of `curr`, given the previous
/// node when the walk has one. Unnormalized score of candidate x is
/// w(curr,x) * alpha, alpha = 1/p if x == prev, 1 if x neighbors prev,
/// 1/q otherwise (uniform alpha on the first step). Probabilities sum to 1.
/// Throws ComputeError when curr has no neighbors.
std::vector<std::pair<std::uint32_t, double>> transition_distribution(
    const WalkGraph& graph, std::optional<std::uint32_t> prev, std::uint32_t curr,
    const WalkConfig& config);

struct WalkCorpus {
    std::vector<std::vector<std::uint32_t>> walks;
    std::vector<std::uint64_t> frequencies;  // per node, corpus occurrence counts
    std::size_t vocab_size = 0;              // node count of the source graph
};

/// walks_per_node walks from every node of degree >= 1, each stepping by
/// transition_distribution. Per-walk RNG is seeded from (seed, start node,
/// walk index), so the corpus is reproducible and order-independent.
WalkCorpus generate_walks(const WalkGraph& graph, const WalkConfig& config);

/// One walk per line, space-separated node names.
std::string corpus_to_text(const WalkCorpus& corpus, std::span<const std::string> node_names);

}  // namespace csgad
