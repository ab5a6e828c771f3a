#include "csgad/baseline.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "csgad/errors.hpp"

namespace csgad {

BipartiteGraph build_bipartite(std::span<const AuditEvent> events, const WindowSpec& window) {
    BipartiteGraph graph;
    std::unordered_map<std::string, std::uint32_t> user_index;
    std::unordered_map<std::string, std::uint32_t> service_index;
    const std::int64_t t_start = window.t_start();
    for (const auto& event : events) {
        if (event.timestamp < t_start || event.timestamp >= window.t_end) continue;
        auto [uit, uinserted] =
            user_index.emplace(event.user_id, static_cast<std::uint32_t>(graph.users.size()));
        if (uinserted) graph.users.push_back(event.user_id);
        auto [sit, sinserted] = service_index.emplace(
            event.service, static_cast<std::uint32_t>(graph.services.size()));
        if (sinserted) graph.services.push_back(event.service);
        graph.edges.emplace(uit->second, sit->second);
    }
    return graph;
}

EmbeddingMatrix spectral_embed(const BipartiteGraph& graph, int d) {
    if (graph.edges.empty()) throw InputError("spectral_embed: graph has no edges");
    const auto nu = static_cast<Eigen::Index>(graph.user_count());
    const auto ns = static_cast<Eigen::Index>(graph.service_count());
    if (d < 1) throw ConfigError("spectral_embed: d must be >= 1");
    if (d > std::min<Eigen::Index>(nu, ns))
        throw ConfigError("spectral_embed: d exceeds min(user count, service count)");

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nu, ns);
    for (const auto& [u, s] : graph.edges) b(u, s) = 1.0;

    Eigen::VectorXd du = b.rowwise().sum();
    Eigen::VectorXd ds = b.colwise().sum();
    Eigen::VectorXd du_inv(nu);
    Eigen::VectorXd ds_inv(ns);
    for (Eigen::Index i = 0; i < nu; ++i) du_inv(i) = du(i) > 0.0 ? 1.0 / std::sqrt(du(i)) : 0.0;
    for (Eigen::Index j = 0; j < ns; ++j) ds_inv(j) = ds(j) > 0.0 ? 1.0 / std::sqrt(ds(j)) : 0.0;

    Eigen::MatrixXd normalized = du_inv.asDiagonal() * b * ds_inv.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized, Eigen::ComputeThinU);
    Eigen::MatrixXd u_vectors = svd.matrixU().leftCols(d);
    Eigen::VectorXd sigma = svd.singularValues().head(d);

    for (Eigen::Index c = 0; c < d; ++c) {
        Eigen::Index arg_max = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < nu; ++r) {
            const double mag = std::abs(u_vectors(r, c));
            if (mag > best) {
                best = mag;
                arg_max = r;
            }
        }
        if (u_vectors(arg_max, c) < 0.0) u_vectors.col(c) = -u_vectors.col(c);
    }

    std::vector<std::string> ids;
    std::vector<NodeRole> roles(graph.user_count(), NodeRole::User);
    ids.reserve(graph.user_count());
    for (const auto& name : graph.users) ids.push_back(node_uid(NodeRole::User, name));
    EmbeddingMatrix embedding(d, std::move(ids), std::move(roles));
    for (Eigen::Index r = 0; r < nu; ++r) {
        auto row = embedding.row(static_cast<std::size_t>(r));
        for (int c = 0; c < d; ++c) row[c] = u_vectors(r, c) * sigma(c);
    }
    return embedding;
}

std::vector<UserGroup> bipartite_groups(const BipartiteGraph& graph) {
    std::vector<std::vector<std::uint32_t>> members(graph.service_count());
    for (const auto& [u, s] : graph.edges) members[s].push_back(u);
    std::vector<UserGroup> groups;
    groups.reserve(graph.service_count());
    for (std::size_t s = 0; s < graph.service_count(); ++s) {
        std::sort(members[s].begin(), members[s].end());
        UserGroup g;
        g.key = graph.services[s];
        for (auto u : members[s]) g.members.push_back(graph.users[u]);
        groups.push_back(std::move(g));
    }
    return groups;
}

std::vector<ScoreRow> baseline_scores(const EmbeddingMatrix& embeddings,
                                      const BipartiteGraph& graph,
                                      const GroupHistory& history) {
    std::vector<ScoreRow> rows;
    std::vector<std::span<const double>> vectors;
    for (const auto& group : bipartite_groups(graph)) {
        vectors.clear();
        for (const auto& user : group.members) {
            auto row = embeddings.find(node_uid(NodeRole::User, user));
            if (row.empty())
                throw ComputeError("baseline_scores: no embedding for user '" + user + "'");
            vectors.push_back(row);
        }
        for (std::size_t i = 0; i < group.members.size(); ++i) {
            ScoreRow row;
            row.user = group.members[i];
            row.group_key = group.key;
            row.is_new_member = !history.contains(group.key, group.members[i]);
            if (!row.is_new_member || group.members.size() < 2) {
                row.score = 0.0;
                row.eligible = false;
            } else {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < group.members.size(); ++j) {
                    if (j == i) continue;
                    double sum = 0.0;
                    for (std::size_t k = 0; k < vectors[i].size(); ++k) {
                        const double diff = vectors[i][k] - vectors[j][k];
                        sum += diff * diff;
                    }
                    best = std::min(best, std::sqrt(sum));
                }
                row.score = best;
                row.eligible = true;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace csgad
