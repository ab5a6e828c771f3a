#include "csgad/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "csgad/errors.hpp"

namespace csgad {

std::int64_t CooccurrenceMatrix::total() const {
    std::int64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
}

CooccurrenceMatrix build_cooccurrence(const WalkCorpus& corpus, int context) {
    if (context < 1) throw ConfigError("co-occurrence: context must be >= 1");
    CooccurrenceMatrix m;
    m.n = corpus.vocab_size;
    m.counts.assign(m.n * m.n, 0);
    for (const auto& walk : corpus.walks) {
        const auto len = static_cast<std::ptrdiff_t>(walk.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - context);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + context);
            for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                ++m.counts[static_cast<std::size_t>(walk[i]) * m.n + walk[j]];
            }
        }
    }
    return m;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// -log sigmoid(x) == softplus(-x)
double neg_log_sigmoid(double x) { return softplus(-x); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

void validate_sg_config(const SkipGramConfig& config) {
    if (config.dim < 1) throw ConfigError("skip-gram config: dim must be >= 1");
    if (config.context < 1) throw ConfigError("skip-gram config: context must be >= 1");
    if (config.negatives < 0) throw ConfigError("skip-gram config: negatives must be >= 0");
    if (config.epochs < 1) throw ConfigError("skip-gram config: epochs must be >= 1");
    if (!(config.lr_initial > 0.0) || !(config.lr_final > 0.0))
        throw ConfigError("skip-gram config: learning rates must be positive");
    if (config.lr_final > config.lr_initial)
        throw ConfigError("skip-gram config: lr_final must not exceed lr_initial");
    if (config.threads < 1) throw ConfigError("skip-gram config: threads must be >= 1");
}

std::size_t pairs_in_walk(std::size_t len, int context) {
    std::size_t pairs = 0;
    const auto l = static_cast<std::ptrdiff_t>(len);
    for (std::ptrdiff_t i = 0; i < l; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - context);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(l - 1, i + context);
        pairs += static_cast<std::size_t>(hi - lo);
    }
    return pairs;
}

struct TrainerShared {
    const WalkCorpus* corpus;
    SkipGramConfig config;
    AliasTable noise;
    std::size_t total_updates;
    double* input;
    double* output;
};

// One SGD pass over walks [first, last). `t` is the global update index used
// for the learning-rate schedule; returns the summed pair loss.
double train_span(const TrainerShared& sh, std::size_t first, std::size_t last,
                  std::size_t t, Rng& rng) {
    const int dim = sh.config.dim;
    const int context = sh.config.context;
    const double lr0 = sh.config.lr_initial;
    const double lr1 = sh.config.lr_final;
    const double denom = static_cast<double>(std::max<std::size_t>(1, sh.total_updates - 1));
    std::vector<double> neu1e(static_cast<std::size_t>(dim));
    double loss_sum = 0.0;

    for (std::size_t w = first; w < last; ++w) {
        const auto& walk = sh.corpus->walks[w];
        const auto len = static_cast<std::ptrdiff_t>(walk.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            double* u = sh.input + static_cast<std::size_t>(walk[i]) * dim;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - context);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + context);
            for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                const double lr = lr0 + (lr1 - lr0) * (static_cast<double>(t) / denom);
                const std::uint32_t ctx = walk[j];
                double* vp = sh.output + static_cast<std::size_t>(ctx) * dim;
                std::fill(neu1e.begin(), neu1e.end(), 0.0);

                const double dp = dot({u, static_cast<std::size_t>(dim)},
                                      {vp, static_cast<std::size_t>(dim)});
                double pair_loss = neg_log_sigmoid(dp);
                const double gp = sigmoid(dp) - 1.0;
                for (int k = 0; k < dim; ++k) neu1e[k] += gp * vp[k];
                for (int k = 0; k < dim; ++k) vp[k] -= lr * gp * u[k];

                for (int s = 0; s < sh.config.negatives; ++s) {
                    const auto target = static_cast<std::uint32_t>(sh.noise.sample(rng));
                    if (target == ctx) continue;
                    double* vn = sh.output + static_cast<std::size_t>(target) * dim;
                    const double dn = dot({u, static_cast<std::size_t>(dim)},
                                          {vn, static_cast<std::size_t>(dim)});
                    pair_loss += neg_log_sigmoid(-dn);
                    const double gn = sigmoid(dn);
                    for (int k = 0; k < dim; ++k) neu1e[k] += gn * vn[k];
                    for (int k = 0; k < dim; ++k) vn[k] -= lr * gn * u[k];
                }

                for (int k = 0; k < dim; ++k) u[k] -= lr * neu1e[k];
                loss_sum += pair_loss;
                ++t;
            }
        }
    }
    return loss_sum;
}

}  // namespace

TrainResult train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& config) {
    validate_sg_config(config);
    if (corpus.walks.empty()) throw InputError("skip-gram: walk corpus is empty");
    const std::size_t vocab = corpus.vocab_size;
    std::size_t active = 0;
    for (auto f : corpus.frequencies)
        if (f > 0) ++active;
    if (active < 2) throw InputError("skip-gram: vocabulary has fewer than 2 distinct nodes");

    const int dim = config.dim;
    TrainResult result;
    result.dim = dim;
    result.vocab = vocab;
    result.input.resize(vocab * static_cast<std::size_t>(dim));
    result.output.assign(vocab * static_cast<std::size_t>(dim), 0.0);

    Rng init_rng(mix_seed(config.seed, 0x1A17));
    for (auto& x : result.input) x = (init_rng.uniform01() - 0.5) / dim;

    std::vector<double> noise_weights(vocab);
    for (std::size_t v = 0; v < vocab; ++v)
        noise_weights[v] = std::pow(static_cast<double>(corpus.frequencies[v]), 0.75);
    AliasTable noise(noise_weights);

    std::vector<std::size_t> pairs_before(corpus.walks.size() + 1, 0);
    for (std::size_t w = 0; w < corpus.walks.size(); ++w)
        pairs_before[w + 1] =
            pairs_before[w] + pairs_in_walk(corpus.walks[w].size(), config.context);
    const std::size_t pairs_per_epoch = pairs_before.back();
    if (pairs_per_epoch == 0) throw InputError("skip-gram: corpus yields no training pairs");

    TrainerShared shared{&corpus, config, std::move(noise),
                         pairs_per_epoch * static_cast<std::size_t>(config.epochs),
                         result.input.data(), result.output.data()};
    result.stats.pairs_per_epoch = pairs_per_epoch;

    const int threads = std::min<int>(config.threads, static_cast<int>(corpus.walks.size()));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const std::size_t base_t = static_cast<std::size_t>(epoch) * pairs_per_epoch;
        double loss_sum = 0.0;
        if (threads <= 1) {
            Rng rng(mix_seed(config.seed, 0xE90C, static_cast<std::uint64_t>(epoch)));
            loss_sum = train_span(shared, 0, corpus.walks.size(), base_t, rng);
        } else {
            std::vector<double> losses(static_cast<std::size_t>(threads), 0.0);
            std::vector<std::thread> pool;
            const std::size_t per = (corpus.walks.size() + threads - 1) / threads;
            for (int ti = 0; ti < threads; ++ti) {
                const std::size_t first = std::min(corpus.walks.size(), per * ti);
                const std::size_t last = std::min(corpus.walks.size(), first + per);
                if (first >= last) continue;
                pool.emplace_back([&, ti, first, last] {
                    Rng rng(mix_seed(config.seed ^ (0x7000u + static_cast<std::uint64_t>(ti)),
                                     0xE90C, static_cast<std::uint64_t>(epoch)));
                    losses[ti] = train_span(shared, first, last, base_t + pairs_before[first], rng);
                });
            }
            for (auto& th : pool) th.join();
            for (double l : losses) loss_sum += l;
        }
        const double mean_loss = loss_sum / static_cast<double>(pairs_per_epoch);
        if (!std::isfinite(mean_loss))
            throw ComputeError("skip-gram: training diverged at epoch " +
                               std::to_string(epoch + 1));
        result.stats.epoch_mean_loss.push_back(mean_loss);
    }
    return result;
}

double sgns_pair_loss(std::span<const double> center, std::span<const double> positive,
                      std::span<const std::span<const double>> negatives) {
    double loss = neg_log_sigmoid(dot(center, positive));
    for (const auto& neg : negatives) loss += neg_log_sigmoid(-dot(center, neg));
    return loss;
}

void sgns_pair_grad(std::span<const double> center, std::span<const double> positive,
                    std::span<const std::span<const double>> negatives,
                    std::span<double> grad_center, std::span<double> grad_positive,
                    std::span<std::span<double>> grad_negatives) {
    const std::size_t dim = center.size();
    const double gp = sigmoid(dot(center, positive)) - 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        grad_center[k] = gp * positive[k];
        grad_positive[k] = gp * center[k];
    }
    for (std::size_t s = 0; s < negatives.size(); ++s) {
        const double gn = sigmoid(dot(center, negatives[s]));
        for (std::size_t k = 0; k < dim; ++k) {
            grad_center[k] += gn * negatives[s][k];
            grad_negatives[s][k] = gn * center[k];
        }
    }
}

double exact_softmax_objective(std::span<const double> input, std::span<const double> output,
                               std::size_t vocab, int dim, const WalkCorpus& corpus,
                               int context) {
    if (vocab > 50) throw ComputeError("exact softmax objective is limited to vocab <= 50");
    if (context < 1) throw ConfigError("exact softmax objective: context must be >= 1");
    std::vector<double> logits(vocab);
    double total_loss = 0.0;
    std::size_t pairs = 0;
    for (const auto& walk : corpus.walks) {
        const auto len = static_cast<std::ptrdiff_t>(walk.size());
        for (std::ptrdiff_t i = 0; i < len; ++i) {
            const double* u = input.data() + static_cast<std::size_t>(walk[i]) * dim;
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - context);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + context);
            if (lo == i && hi == i) continue;
            double max_logit = -1e300;
            for (std::size_t w = 0; w < vocab; ++w) {
                logits[w] = dot({u, static_cast<std::size_t>(dim)},
                                {output.data() + w * dim, static_cast<std::size_t>(dim)});
                max_logit = std::max(max_logit, logits[w]);
            }
            double lse = 0.0;
            for (std::size_t w = 0; w < vocab; ++w) lse += std::exp(logits[w] - max_logit);
            lse = max_logit + std::log(lse);
            for (std::ptrdiff_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                total_loss += lse - logits[walk[j]];
                ++pairs;
            }
        }
    }
    if (pairs == 0) throw InputError("exact softmax objective: corpus yields no pairs");
    return total_loss / static_cast<double>(pairs);
}

}  // namespace csgad
