#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csgad/categorize.hpp"
#include "csgad/embed.hpp"
#include "csgad/errors.hpp"
#include "csgad/graph.hpp"
#include "csgad/rng.hpp"
#include "csgad/skipgram.hpp"
#include "csgad/walks.hpp"
#include "support/oracles.hpp"

using namespace csgad;

namespace {

WalkGraph path_graph(double w_ab = 1.0, double w_bc = 1.0) {
    WalkGraph g(3);
    g.add_edge(0, 1, w_ab);
    g.add_edge(1, 2, w_bc);
    g.finalize();
    return g;
}

WalkGraph triangle_graph() {
    WalkGraph g(3);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 1.0);
    g.add_edge(0, 2, 1.0);
    g.finalize();
    return g;
}

std::map<std::uint32_t, double> as_map(
    const std::vector<std::pair<std::uint32_t, double>>& dist) {
    return {dist.begin(), dist.end()};
}

AuditEvent ev(std::int64_t ts, std::string user, std::string service, std::string name) {
    AuditEvent e;
    e.timestamp = ts;
    e.user_id = std::move(user);
    e.service = std::move(service);
    e.event_name = std::move(name);
    e.category = categorize(e.event_name);
    return e;
}

TripartiteGraph small_tripartite() {
    std::vector<AuditEvent> events = {
        ev(10, "alice", "s3.amazonaws.com", "GetObject"),
        ev(20, "bob", "s3.amazonaws.com", "GetObject"),
        ev(30, "alice", "iam.amazonaws.com", "AttachUserPolicy"),
        ev(40, "carol", "kms.amazonaws.com", "Decrypt"),
        ev(50, "bob", "kms.amazonaws.com", "ListKeys"),
    };
    WindowSpec w{0, 100, WindowScheme::AdditiveDay, 0, 86400};
    return build_graph(events, w);
}

}  // namespace

TEST_CASE("walk graph exposes csr neighbors and degrees") {
    auto g = path_graph();
    CHECK(g.node_count() == 3);
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(1) == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK_FALSE(g.has_edge(0, 2));
    auto nb = g.neighbors(1);
    CHECK(std::set<std::uint32_t>(nb.begin(), nb.end()) == std::set<std::uint32_t>{0, 2});
}

TEST_CASE("from_tripartite carries the weighted two-layer structure") {
    auto tg = small_tripartite();
    auto wg = WalkGraph::from_tripartite(tg);
    CHECK(wg.node_count() == tg.node_count());
    for (const auto& [edge, count] : tg.user_action_edges()) {
        const auto u = static_cast<std::uint32_t>(tg.global_user(edge.first));
        const auto a = static_cast<std::uint32_t>(tg.global_action(edge.second));
        REQUIRE(wg.has_edge(u, a));
        auto nbors = wg.neighbors(u);
        auto weights = wg.weights(u);
        for (std::size_t i = 0; i < nbors.size(); ++i)
            if (nbors[i] == a) CHECK(weights[i] == static_cast<double>(count));
    }
    // no user-service shortcuts
    for (std::size_t ui = 0; ui < tg.users().size(); ++ui)
        for (std::size_t si = 0; si < tg.services().size(); ++si)
            CHECK_FALSE(wg.has_edge(static_cast<std::uint32_t>(tg.global_user(ui)),
                                    static_cast<std::uint32_t>(tg.global_service(si))));
}

TEST_CASE("first step is weight-proportional with uniform bias") {
    auto g = path_graph(2.0, 1.0);
    auto dist = as_map(transition_distribution(g, std::nullopt, 1, {}));
    CHECK(dist.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dist.at(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("return bias splits a path walk by 1/p versus 1/q") {
    WalkConfig cfg;
    cfg.q = 1.0;

    cfg.p = 3.0;
    auto d3 = as_map(transition_distribution(path_graph(), 0, 1, cfg));
    CHECK(d3.at(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d3.at(2) == doctest::Approx(0.75).epsilon(1e-12));

    cfg.p = 4.0;
    auto d4 = as_map(transition_distribution(path_graph(), 0, 1, cfg));
    CHECK(d4.at(0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d4.at(2) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("a common neighbor of prev keeps bias 1") {
    WalkConfig cfg;
    cfg.p = 2.0;
    cfg.q = 1.0;
    auto dist = as_map(transition_distribution(triangle_graph(), 0, 1, cfg));
    CHECK(dist.at(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(dist.at(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("edge weights scale the biased scores") {
    WalkConfig cfg;
    auto dist = as_map(transition_distribution(path_graph(2.0, 1.0), 2, 1, cfg));
    CHECK(dist.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dist.at(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("transition from an isolated node refuses") {
    WalkGraph g(2);
    g.add_edge(0, 1, 1.0);
    g.finalize();
    WalkGraph lonely(3);
    lonely.add_edge(0, 1, 1.0);
    lonely.finalize();
    CHECK_THROWS_AS(transition_distribution(lonely, std::nullopt, 2, {}), ComputeError);
}

TEST_CASE("walk corpus has the advertised shape") {
    auto g = triangle_graph();
    WalkConfig cfg;
    cfg.walk_length = 12;
    cfg.walks_per_node = 4;
    cfg.seed = 9;
    auto corpus = generate_walks(g, cfg);
    CHECK(corpus.vocab_size == 3);
    CHECK(corpus.walks.size() == 12);  // 3 nodes x 4 walks
    std::map<std::uint32_t, int> starts;
    std::vector<std::uint64_t> freq(3, 0);
    for (const auto& walk : corpus.walks) {
        REQUIRE(walk.size() == 12);
        starts[walk.front()]++;
        for (auto node : walk) {
            REQUIRE(node < 3);
            freq[node]++;
        }
    }
    for (std::uint32_t v = 0; v < 3; ++v) CHECK(starts[v] == 4);
    CHECK(corpus.frequencies == freq);
}

TEST_CASE("isolated nodes get no walks but stay in the vocabulary") {
    WalkGraph g(4);
    g.add_edge(0, 1, 1.0);
    g.finalize();
    WalkConfig cfg;
    cfg.walks_per_node = 3;
    cfg.walk_length = 5;
    auto corpus = generate_walks(g, cfg);
    CHECK(corpus.vocab_size == 4);
    CHECK(corpus.walks.size() == 6);  // only nodes 0 and 1 walk
    CHECK(corpus.frequencies[2] == 0);
    CHECK(corpus.frequencies[3] == 0);
}

TEST_CASE("walk generation is reproducible for a fixed seed") {
    auto g = triangle_graph();
    WalkConfig cfg;
    cfg.seed = 31;
    auto a = generate_walks(g, cfg);
    auto b = generate_walks(g, cfg);
    CHECK(a.walks == b.walks);
    cfg.seed = 32;
    auto c = generate_walks(g, cfg);
    CHECK(a.walks != c.walks);
}

TEST_CASE("corpus_to_text joins node names per walk line") {
    WalkCorpus corpus;
    corpus.walks = {{0, 1, 2}, {2, 0}};
    corpus.vocab_size = 3;
    std::vector<std::string> names = {"u:alice", "a:Login", "s:x"};
    CHECK(corpus_to_text(corpus, names) == "u:alice a:Login s:x\ns:x u:alice\n");
}

TEST_CASE("co-occurrence counts match the brute-force scan") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t vocab = 2 + rng.uniform_index(8);
        WalkCorpus corpus;
        corpus.vocab_size = vocab;
        const int walks = 1 + static_cast<int>(rng.uniform_index(6));
        for (int i = 0; i < walks; ++i) {
            std::vector<std::uint32_t> walk(1 + rng.uniform_index(15));
            for (auto& node : walk) node = static_cast<std::uint32_t>(rng.uniform_index(vocab));
            corpus.walks.push_back(std::move(walk));
        }
        const int context = 1 + static_cast<int>(rng.uniform_index(4));
        auto got = build_cooccurrence(corpus, context);
        auto want = oracle::cooccurrence(corpus.walks, vocab, context);
        REQUIRE(got.n == vocab);
        for (std::size_t i = 0; i < vocab; ++i)
            for (std::size_t j = 0; j < vocab; ++j)
                CHECK(got.at(i, j) == want[i * vocab + j]);
    }
}

TEST_CASE("co-occurrence total matches the pair count and is symmetric") {
    WalkCorpus corpus;
    corpus.walks = {{0, 1, 2, 1}};
    corpus.vocab_size = 3;
    auto m = build_cooccurrence(corpus, 2);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) {
            sum += m.at(i, j);
            CHECK(m.at(i, j) == m.at(j, i));
        }
    CHECK(m.total() == sum);
}

TEST_CASE("pair loss matches the closed form on aligned vectors") {
    // center.positive = 1 and center.negative = -1 give loss 2*log(1+e^-1)
    std::vector<double> center = {1.0, 0.0};
    std::vector<double> positive = {1.0, 0.0};
    std::vector<double> negative = {-1.0, 0.0};
    std::vector<std::span<const double>> negs = {negative};
    const double loss = sgns_pair_loss(center, positive, negs);
    CHECK(loss == doctest::Approx(0.6265233750364457).epsilon(1e-12));
}

TEST_CASE("pair gradients match central finite differences") {
    Rng rng(13);
    const int dim = 6;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> center(dim), positive(dim), neg1(dim), neg2(dim);
        for (auto* vec : {&center, &positive, &neg1, &neg2})
            for (auto& x : *vec) x = rng.uniform01() * 2.0 - 1.0;

        std::vector<std::span<const double>> negs = {neg1, neg2};
        std::vector<double> g_center(dim), g_positive(dim), g_neg1(dim), g_neg2(dim);
        std::vector<std::span<double>> g_negs = {g_neg1, g_neg2};
        sgns_pair_grad(center, positive, negs, g_center, g_positive, g_negs);

        auto numeric = [&](std::vector<double>& param, int i) {
            const double h = 1e-6;
            const double save = param[i];
            param[i] = save + h;
            const double hi = sgns_pair_loss(center, positive, negs);
            param[i] = save - h;
            const double lo = sgns_pair_loss(center, positive, negs);
            param[i] = save;
            return (hi - lo) / (2.0 * h);
        };
        for (int i = 0; i < dim; ++i) {
            CHECK(g_center[i] == doctest::Approx(numeric(center, i)).epsilon(1e-5));
            CHECK(g_positive[i] == doctest::Approx(numeric(positive, i)).epsilon(1e-5));
            CHECK(g_neg1[i] == doctest::Approx(numeric(neg1, i)).epsilon(1e-5));
            CHECK(g_neg2[i] == doctest::Approx(numeric(neg2, i)).epsilon(1e-5));
        }
    }
}

TEST_CASE("training reduces the mean epoch loss and is deterministic") {
    auto g = WalkGraph(6);
    g.add_edge(0, 1, 3.0);
    g.add_edge(1, 2, 1.0);
    g.add_edge(2, 3, 2.0);
    g.add_edge(3, 4, 1.0);
    g.add_edge(4, 5, 2.0);
    g.add_edge(5, 0, 1.0);
    g.finalize();
    WalkConfig wc;
    wc.walk_length = 20;
    wc.walks_per_node = 8;
    wc.seed = 3;
    auto corpus = generate_walks(g, wc);

    SkipGramConfig sc;
    sc.dim = 16;
    sc.epochs = 5;
    sc.seed = 3;
    auto first = train_skipgram(corpus, sc);
    auto second = train_skipgram(corpus, sc);
    CHECK(first.vocab == 6);
    CHECK(first.dim == 16);
    CHECK(first.input.size() == 6 * 16);
    CHECK(first.output.size() == 6 * 16);
    REQUIRE(first.stats.epoch_mean_loss.size() == 5);
    CHECK(first.stats.epoch_mean_loss.back() < first.stats.epoch_mean_loss.front());
    CHECK(first.stats.pairs_per_epoch > 0);
    CHECK(first.input == second.input);
    CHECK(first.output == second.output);
}

TEST_CASE("trained embeddings beat the uniform softmax baseline") {
    auto g = triangle_graph();
    WalkConfig wc;
    wc.walk_length = 15;
    wc.walks_per_node = 10;
    wc.seed = 5;
    auto corpus = generate_walks(g, wc);
    SkipGramConfig sc;
    sc.dim = 8;
    sc.epochs = 8;
    sc.seed = 5;
    auto result = train_skipgram(corpus, sc);
    const double objective =
        exact_softmax_objective(result.input, result.output, result.vocab, sc.dim, corpus,
                                sc.context);
    CHECK(objective < std::log(3.0));
    CHECK(objective > 0.0);
}

TEST_CASE("exact softmax objective refuses large vocabularies") {
    WalkCorpus corpus;
    corpus.vocab_size = 51;
    corpus.walks = {{0, 1}};
    std::vector<double> mat(51 * 2, 0.0);
    CHECK_THROWS_AS(exact_softmax_objective(mat, mat, 51, 2, corpus, 2), ComputeError);
}

TEST_CASE("embed_graph labels rows with role prefixes") {
    auto tg = small_tripartite();
    EmbedConfig cfg;
    cfg.walk.walk_length = 10;
    cfg.walk.walks_per_node = 4;
    cfg.walk.seed = 17;
    cfg.sg.dim = 12;
    cfg.sg.epochs = 2;
    cfg.sg.seed = 17;
    auto result = embed_graph(tg, cfg);
    CHECK(result.embedding.size() == tg.node_count());
    CHECK(result.embedding.dim() == 12);
    CHECK(result.embedding.contains("u:alice"));
    CHECK(result.embedding.contains("a:DownloadUploadObjects"));
    CHECK(result.embedding.contains("s:kms.amazonaws.com"));
    CHECK_FALSE(result.embedding.contains("alice"));

    auto users = user_rows(result.embedding);
    REQUIRE(users.size() == 3);
    CHECK(users[0].first == "alice");
    CHECK(users[1].first == "bob");
    CHECK(users[2].first == "carol");
    for (const auto& [name, row] : users) CHECK(row.size() == 12);
}

TEST_CASE("embedding text dump round-trips exactly") {
    auto tg = small_tripartite();
    EmbedConfig cfg;
    cfg.walk.walk_length = 8;
    cfg.walk.walks_per_node = 2;
    cfg.sg.dim = 5;
    cfg.sg.epochs = 1;
    auto result = embed_graph(tg, cfg);
    auto text = embedding_to_text(result.embedding, {{"window", "0"}});
    auto parsed = embedding_from_text(text);
    REQUIRE(parsed.size() == result.embedding.size());
    CHECK(parsed.dim() == result.embedding.dim());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed.ids()[i] == result.embedding.ids()[i]);
        CHECK(parsed.role(i) == result.embedding.role(i));
        auto a = parsed.row(i);
        auto b = result.embedding.row(i);
        for (int d = 0; d < parsed.dim(); ++d) CHECK(a[d] == b[d]);
    }
}
