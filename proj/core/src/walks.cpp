#include "csgad/walks.hpp"

#include <algorithm>
#include <cmath>

#include "csgad/errors.hpp"

namespace csgad {

void WalkGraph::add_edge(std::uint32_t u, std::uint32_t v, double weight) {
    if (finalized_) throw ComputeError("WalkGraph: add_edge after finalize");
    if (u >= adjacency_.size() || v >= adjacency_.size())
        throw ComputeError("WalkGraph: edge endpoint out of range");
    if (u == v) throw ComputeError("WalkGraph: self loops are not supported");
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw ComputeError("WalkGraph: edge weight must be finite and positive");
    adjacency_[u].emplace_back(v, weight);
    adjacency_[v].emplace_back(u, weight);
}

void WalkGraph::finalize() {
    if (finalized_) return;
    const std::size_t n = adjacency_.size();
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + adjacency_[v].size();
    neighbors_.resize(offsets_[n]);
    weights_.resize(offsets_[n]);
    samplers_.resize(n);
    std::vector<double> local_weights;
    for (std::size_t v = 0; v < n; ++v) {
        auto& adj = adjacency_[v];
        std::sort(adj.begin(), adj.end());
        for (std::size_t k = 1; k < adj.size(); ++k)
            if (adj[k].first == adj[k - 1].first)
                throw ComputeError("WalkGraph: duplicate edge");
        local_weights.clear();
        for (std::size_t k = 0; k < adj.size(); ++k) {
            neighbors_[offsets_[v] + k] = adj[k].first;
            weights_[offsets_[v] + k] = adj[k].second;
            local_weights.push_back(adj[k].second);
        }
        if (!local_weights.empty()) samplers_[v] = AliasTable(local_weights);
    }
    adjacency_.clear();
    adjacency_.shrink_to_fit();
    finalized_ = true;
}

WalkGraph WalkGraph::from_tripartite(const TripartiteGraph& graph) {
    WalkGraph wg(graph.node_count());
    const auto user_base = 0u;
    const auto action_base = static_cast<std::uint32_t>(graph.users().size());
    const auto service_base =
        static_cast<std::uint32_t>(graph.users().size() + graph.actions().size());
    for (const auto& [key, count] : graph.user_action_edges())
        wg.add_edge(user_base + key.first, action_base + key.second,
                    static_cast<double>(count));
    for (const auto& [key, count] : graph.action_service_edges())
        wg.add_edge(action_base + key.first, service_base + key.second,
                    static_cast<double>(count));
    wg.finalize();
    return wg;
}

bool WalkGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
    auto nbrs = neighbors(u);
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

namespace {

void validate_walk_config(const WalkConfig& config) {
    if (!(config.p > 0.0) || !std::isfinite(config.p))
        throw ConfigError("walk config: p must be finite and positive");
    if (!(config.q > 0.0) || !std::isfinite(config.q))
        throw ConfigError("walk config: q must be finite and positive");
    if (config.walk_length < 2) throw ConfigError("walk config: walk_length must be >= 2");
    if (config.walks_per_node < 1)
        throw ConfigError("walk config: walks_per_node must be >= 1");
}

// Unnormalized second-order scores for the neighbors of curr, in neighbor order.
void biased_scores(const WalkGraph& graph, std::optional<std::uint32_t> prev,
                   std::uint32_t curr, const WalkConfig& config,
                   std::vector<double>& scores) {
    auto nbrs = graph.neighbors(curr);
    auto wts = graph.weights(curr);
    scores.resize(nbrs.size());
    if (!prev) {
        for (std::size_t k = 0; k < nbrs.size(); ++k) scores[k] = wts[k];
        return;
    }
    const double inv_p = 1.0 / config.p;
    const double inv_q = 1.0 / config.q;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
        double alpha;
        if (nbrs[k] == *prev)
            alpha = inv_p;
        else if (graph.has_edge(*prev, nbrs[k]))
            alpha = 1.0;
        else
            alpha = inv_q;
        scores[k] = wts[k] * alpha;
    }
}

std::uint32_t sample_scores(const WalkGraph& graph, std::uint32_t curr,
                            const std::vector<double>& scores, Rng& rng) {
    double total = 0.0;
    for (double s : scores) total += s;
    double r = rng.uniform01() * total;
    auto nbrs = graph.neighbors(curr);
    double acc = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        acc += scores[k];
        if (r < acc) return nbrs[k];
    }
    return nbrs.back();
}

}  // namespace

std::vector<std::pair<std::uint32_t, double>> transition_distribution(
    const WalkGraph& graph, std::optional<std::uint32_t> prev, std::uint32_t curr,
    const WalkConfig& config) {
    validate_walk_config(config);
    if (curr >= graph.node_count()) throw ComputeError("transition: node out of range");
    if (graph.degree(curr) == 0) throw ComputeError("transition: node has no neighbors");
    std::vector<double> scores;
    biased_scores(graph, prev, curr, config, scores);
    double total = 0.0;
    for (double s : scores) total += s;
    auto nbrs = graph.neighbors(curr);
    std::vector<std::pair<std::uint32_t, double>> dist;
    dist.reserve(nbrs.size());
    for (std::size_t k = 0; k < nbrs.size(); ++k) dist.emplace_back(nbrs[k], scores[k] / total);
    return dist;
}

WalkCorpus generate_walks(const WalkGraph& graph, const WalkConfig& config) {
    validate_walk_config(config);
    if (graph.node_count() == 0) throw InputError("generate_walks: graph has no nodes");

    const bool unbiased = config.p == 1.0 && config.q == 1.0;
    WalkCorpus corpus;
    corpus.vocab_size = graph.node_count();
    corpus.frequencies.assign(graph.node_count(), 0);

    std::vector<double> scores;
    for (std::uint32_t start = 0; start < graph.node_count(); ++start) {
        if (graph.degree(start) == 0) continue;
        for (int j = 0; j < config.walks_per_node; ++j) {
            Rng rng(mix_seed(config.seed, start, static_cast<std::uint64_t>(j)));
            std::vector<std::uint32_t> walk;
            walk.reserve(static_cast<std::size_t>(config.walk_length));
            walk.push_back(start);
            std::optional<std::uint32_t> prev;
            std::uint32_t curr = start;
            while (walk.size() < static_cast<std::size_t>(config.walk_length)) {
                if (graph.degree(curr) == 0) break;  // cannot happen on undirected graphs
                std::uint32_t next;
                if (unbiased || !prev) {
                    std::size_t k = graph.neighbor_sampler(curr).sample(rng);
                    next = graph.neighbors(curr)[k];
                } else {
                    biased_scores(graph, prev, curr, config, scores);
                    next = sample_scores(graph, curr, scores, rng);
                }
                walk.push_back(next);
                prev = curr;
                curr = next;
            }
            for (std::uint32_t node : walk) ++corpus.frequencies[node];
            corpus.walks.push_back(std::move(walk));
        }
    }
    return corpus;
}

std::string corpus_to_text(const WalkCorpus& corpus, std::span<const std::string> node_names) {
    std::string out;
    for (const auto& walk : corpus.walks) {
        for (std::size_t k = 0; k < walk.size(); ++k) {
            if (k > 0) out += ' ';
            out += node_names[walk[k]];
        }
        out += '\n';
    }
    return out;
}

}  // namespace csgad
