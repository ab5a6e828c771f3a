#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csgad/graph.hpp"

namespace csgad {

/// Row-major matrix of node embeddings keyed by prefixed node id
/// ("u:alice", "a:Login", "s:s3.amazonaws.com").
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(int dim, std::vector<std::string> ids, std::vector<NodeRole> roles);

    int dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    NodeRole role(std::size_t i) const { return roles_[i]; }

    std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }

    /// Row for a node id, or an empty span when the id is unknown.
    std::span<const double> find(std::string_view id) const;
    bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

private:
    int dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<NodeRole> roles_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Plain-text dump: '#'-prefixed header lines carrying the dimension, node
/// count, and the settings recorded in `header_info`, then one line per node:
/// "<node_id> <role> <v1> ... <vd>". Values round-trip exactly.
std::string embedding_to_text(const EmbeddingMatrix& embedding,
                              const std::vector<std::pair<std::string, std::string>>& header_info);

EmbeddingMatrix embedding_from_text(std::string_view text);

void write_embedding_file(const std::string& path, const EmbeddingMatrix& embedding,
                          const std::vector<std::pair<std::string, std::string>>& header_info);

EmbeddingMatrix read_embedding_file(const std::string& path);

}  // namespace csgad
