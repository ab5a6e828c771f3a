#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csgad/embedding.hpp"
#include "csgad/events.hpp"
#include "csgad/graph.hpp"
#include "csgad/score.hpp"

namespace csgad {

/// Unweighted user-service graph for one window: an edge exists when the
/// user touched the service at least once, however many events there were.
struct BipartiteGraph {
    std::vector<std::string> users;     // first-appearance order
    std::vector<std::string> services;  // first-appearance order
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t user_count() const { return users.size(); }
    std::size_t service_count() const { return services.size(); }
};

BipartiteGraph build_bipartite(std::span<const AuditEvent> events, const WindowSpec& window);

/// Spectral user embeddings: top-d left singular vectors of the
/// degree-normalized biadjacency D_u^(-1/2) B D_s^(-1/2), scaled by their
/// singular values. Each vector's largest-magnitude component is made
/// positive so the output is sign-deterministic. Requires at least one edge
/// and d <= min(#users, #services).
EmbeddingMatrix spectral_embed(const BipartiteGraph& graph, int d);

/// NN scoring with the zero rule inverted relative to anomaly_scores: a user
/// already seen on the service scores 0, a first-time user scores its
/// nearest-neighbor distance within the service group. Easy to get backwards,
/// so: returning users are the zeros here.
std::vector<ScoreRow> baseline_scores(const EmbeddingMatrix& embeddings,
                                      const BipartiteGraph& graph,
                                      const GroupHistory& history);

/// Per-service groups of the bipartite graph, reusable for history updates.
std::vector<UserGroup> bipartite_groups(const BipartiteGraph& graph);

}  // namespace csgad
