#include "csgad/embed.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "csgad/errors.hpp"
#include "csgad/util.hpp"

namespace csgad {

EmbeddingMatrix::EmbeddingMatrix(int dim, std::vector<std::string> ids,
                                 std::vector<NodeRole> roles)
    : dim_(dim), ids_(std::move(ids)), roles_(std::move(roles)) {
    if (dim_ < 1) throw ConfigError("embedding: dim must be >= 1");
    if (ids_.size() != roles_.size()) throw ComputeError("embedding: ids/roles size mismatch");
    values_.assign(ids_.size() * static_cast<std::size_t>(dim_), 0.0);
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw ComputeError("embedding: duplicate node id " + ids_[i]);
    }
}

std::span<const double> EmbeddingMatrix::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return {};
    return row(it->second);
}

EmbedResult embed_graph(const TripartiteGraph& graph, const EmbedConfig& config) {
    if (graph.node_count() == 0) throw InputError("embed: graph has no nodes");

    WalkGraph wg = WalkGraph::from_tripartite(graph);
    WalkCorpus corpus = generate_walks(wg, config.walk);
    TrainResult trained = train_skipgram(corpus, config.sg);

    std::vector<std::string> ids;
    std::vector<NodeRole> roles;
    ids.reserve(graph.node_count());
    roles.reserve(graph.node_count());
    for (const auto& name : graph.users()) {
        ids.push_back(node_uid(NodeRole::User, name));
        roles.push_back(NodeRole::User);
    }
    for (const auto& name : graph.actions()) {
        ids.push_back(node_uid(NodeRole::Action, name));
        roles.push_back(NodeRole::Action);
    }
    for (const auto& name : graph.services()) {
        ids.push_back(node_uid(NodeRole::Service, name));
        roles.push_back(NodeRole::Service);
    }

    EmbedResult result{EmbeddingMatrix(trained.dim, std::move(ids), std::move(roles)),
                       trained.stats};
    for (std::size_t i = 0; i < result.embedding.size(); ++i) {
        auto dst = result.embedding.row(i);
        const double* src = trained.input.data() + i * static_cast<std::size_t>(trained.dim);
        std::memcpy(dst.data(), src, sizeof(double) * dst.size());
    }
    return result;
}

std::vector<std::pair<std::string, std::span<const double>>> user_rows(
    const EmbeddingMatrix& embedding) {
    std::vector<std::pair<std::string, std::span<const double>>> rows;
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (embedding.role(i) != NodeRole::User) continue;
        const auto& id = embedding.ids()[i];
        rows.emplace_back(id.substr(2), embedding.row(i));
    }
    return rows;
}

namespace {

const char* role_name(NodeRole role) {
    switch (role) {
        case NodeRole::User: return "user";
        case NodeRole::Action: return "action";
        case NodeRole::Service: return "service";
    }
    return "user";
}

NodeRole role_from_name(std::string_view name) {
    if (name == "user") return NodeRole::User;
    if (name == "action") return NodeRole::Action;
    if (name == "service") return NodeRole::Service;
    throw InputError("embedding text: unknown role '" + std::string(name) + "'");
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ') ++end;
        if (end > pos) parts.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return parts;
}

}  // namespace

std::string embedding_to_text(const EmbeddingMatrix& embedding,
                              const std::vector<std::pair<std::string, std::string>>& header_info) {
    std::string out = "# csgad-embedding v1\n";
    out += "# dim " + std::to_string(embedding.dim()) + "\n";
    out += "# nodes " + std::to_string(embedding.size()) + "\n";
    for (const auto& [key, value] : header_info) out += "# " + key + " " + value + "\n";
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        out += embedding.ids()[i];
        out += ' ';
        out += role_name(embedding.role(i));
        for (double v : embedding.row(i)) {
            out += ' ';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

EmbeddingMatrix embedding_from_text(std::string_view text) {
    int dim = -1;
    std::size_t declared_nodes = 0;
    bool have_nodes = false;
    std::vector<std::string> ids;
    std::vector<NodeRole> roles;
    std::vector<double> values;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto parts = split_spaces(line.substr(1));
            if (parts.size() == 2 && parts[0] == "dim") dim = std::atoi(std::string(parts[1]).c_str());
            if (parts.size() == 2 && parts[0] == "nodes") {
                declared_nodes = static_cast<std::size_t>(std::atoll(std::string(parts[1]).c_str()));
                have_nodes = true;
            }
            continue;
        }
        if (dim < 1) throw InputError("embedding text: data row before dim header");
        auto parts = split_spaces(line);
        if (parts.size() < static_cast<std::size_t>(dim) + 2)
            throw InputError("embedding text: row has too few fields");
        // values are the trailing dim tokens, role precedes them, the id is the rest
        const std::size_t value_start = parts.size() - static_cast<std::size_t>(dim);
        std::string id(parts[0]);
        for (std::size_t k = 1; k + 1 < value_start; ++k) {
            id += ' ';
            id += parts[k];
        }
        roles.push_back(role_from_name(parts[value_start - 1]));
        ids.push_back(std::move(id));
        for (std::size_t k = value_start; k < parts.size(); ++k) {
            std::string token(parts[k]);
            char* end = nullptr;
            double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0')
                throw InputError("embedding text: bad value '" + token + "'");
            values.push_back(v);
        }
    }
    if (dim < 1) throw InputError("embedding text: missing dim header");
    if (have_nodes && declared_nodes != ids.size())
        throw InputError("embedding text: node count does not match header");

    EmbeddingMatrix m(dim, std::move(ids), std::move(roles));
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto dst = m.row(i);
        std::memcpy(dst.data(), values.data() + i * static_cast<std::size_t>(dim),
                    sizeof(double) * dst.size());
    }
    return m;
}

void write_embedding_file(const std::string& path, const EmbeddingMatrix& embedding,
                          const std::vector<std::pair<std::string, std::string>>& header_info) {
    write_file(path, embedding_to_text(embedding, header_info));
}

EmbeddingMatrix read_embedding_file(const std::string& path) {
    return embedding_from_text(read_file(path));
}

}  // namespace csgad
