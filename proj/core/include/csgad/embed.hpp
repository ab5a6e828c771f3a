#pragma once

#include "csgad/embedding.hpp"
#include "csgad/graph.hpp"
#include "csgad/skipgram.hpp"
#include "csgad/walks.hpp"

namespace csgad {

struct EmbedConfig {
    WalkConfig walk;
    SkipGramConfig sg;
};

struct EmbedResult {
    EmbeddingMatrix embedding;
    TrainStats stats;
};

/// Full embedding pass over one window graph: biased walks, then skip-gram
/// with negative sampling. Row ids carry the node role prefix ("u:", "a:",
/// "s:") so user rows stay distinguishable downstream.
EmbedResult embed_graph(const TripartiteGraph& graph, const EmbedConfig& config);

/// Convenience view: ids and rows restricted to user nodes, in graph order.
std::vector<std::pair<std::string, std::span<const double>>> user_rows(
    const EmbeddingMatrix& embedding);

}  // namespace csgad
