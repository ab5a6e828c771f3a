#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csgad/walks.hpp"

namespace csgad {

struct SkipGramConfig {
    int dim = 128;
    int context = 5;    // symmetric window radius
    int negatives = 5;  // noise samples per positive pair
    int epochs = 5;
    double lr_initial = 0.025;
    double lr_final = 1e-4;
    std::uint64_t seed = 1;
    int threads = 1;  // >1 trains lock-free and gives up exact reproducibility
};

/// Dense symmetric co-occurrence counts: entry (i, j) is how many ordered
/// (center=i, context=j) pairs the corpus produces within the window.
struct CooccurrenceMatrix {
    std::size_t n = 0;
    std::vector<std::int64_t> counts;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * n + j]; }
    std::int64_t total() const;
};

CooccurrenceMatrix build_cooccurrence(const WalkCorpus& corpus, int context);

struct TrainStats {
    std::vector<double> epoch_mean_loss;
    std::size_t pairs_per_epoch = 0;
};

struct TrainResult {
    int dim = 0;
    std::size_t vocab = 0;
    std::vector<double> input;   // vocab x dim, the embeddings
    std::vector<double> output;  // vocab x dim, context vectors
    TrainStats stats;
};

/// Skip-gram with negative sampling over the walk corpus. Noise distribution
/// is unigram frequency raised to 0.75. Learning rate decays linearly from
/// lr_initial to lr_final across all pair updates. Deterministic for a fixed
/// config when threads == 1.
TrainResult train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& config);

/// Loss of one (center, positive, negatives...) sample:
/// -log sigmoid(u.v+) - sum_k log sigmoid(-u.v-_k).
double sgns_pair_loss(std::span<const double> center, std::span<const double> positive,
                      std::span<const std::span<const double>> negatives);

/// Analytic gradients of sgns_pair_loss with respect to every vector.
/// Output spans must match the input dimensions; they are overwritten.
void sgns_pair_grad(std::span<const double> center, std::span<const double> positive,
                    std::span<const std::span<const double>> negatives,
                    std::span<double> grad_center, std::span<double> grad_positive,
                    std::span<std::span<double>> grad_negatives);

/// Exact corpus-level skip-gram objective (full softmax, no sampling):
/// mean over positive pairs of -log softmax(u_center . V_out)[context].
/// Meant for small-vocabulary verification; refuses vocab > 50.
double exact_softmax_objective(std::span<const double> input, std::span<const double> output,
                               std::size_t vocab, int dim, const WalkCorpus& corpus,
                               int context);

}  // namespace csgad
