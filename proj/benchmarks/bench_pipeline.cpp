#include <benchmark/benchmark.h>

#include <vector>

#include "csgad/baseline.hpp"
#include "csgad/embed.hpp"
#include "csgad/graph.hpp"
#include "csgad/ingest.hpp"
#include "csgad/simgen.hpp"
#include "csgad/skipgram.hpp"
#include "csgad/walks.hpp"

using namespace csgad;

namespace {

std::vector<AuditEvent> sample_events(int days) {
    Scenario scenario;
    scenario.profiles = default_roles();
    scenario.users_per_role = 4;
    scenario.days = days;
    scenario.start_ts = 1614556800;
    scenario.seed = 3;
    return generate_scenario(scenario).events;
}

WindowSpec full_window(std::span<const AuditEvent> events) {
    return window_partition(events, WindowScheme::AdditiveDay).back();
}

void bm_parse_cloudtrail(benchmark::State& state) {
    const auto events = sample_events(static_cast<int>(state.range(0)));
    const auto text = events_to_cloudtrail_json(events);
    for (auto _ : state) {
        auto parsed = parse_cloudtrail(text);
        benchmark::DoNotOptimize(parsed.events.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}

void bm_build_graph(benchmark::State& state) {
    const auto events = sample_events(static_cast<int>(state.range(0)));
    const auto window = full_window(events);
    for (auto _ : state) {
        auto graph = build_graph(events, window);
        benchmark::DoNotOptimize(graph.node_count());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}

void bm_generate_walks(benchmark::State& state) {
    const auto events = sample_events(8);
    const auto graph = build_graph(events, full_window(events));
    const auto walk_graph = WalkGraph::from_tripartite(graph);
    WalkConfig config;
    config.walk_length = static_cast<int>(state.range(0));
    config.walks_per_node = 10;
    for (auto _ : state) {
        auto corpus = generate_walks(walk_graph, config);
        benchmark::DoNotOptimize(corpus.walks.data());
    }
}

void bm_train_epoch(benchmark::State& state) {
    const auto events = sample_events(8);
    const auto graph = build_graph(events, full_window(events));
    const auto walk_graph = WalkGraph::from_tripartite(graph);
    WalkConfig walk_config;
    const auto corpus = generate_walks(walk_graph, walk_config);
    SkipGramConfig config;
    config.dim = static_cast<int>(state.range(0));
    config.epochs = 1;
    for (auto _ : state) {
        auto result = train_skipgram(corpus, config);
        benchmark::DoNotOptimize(result.input.data());
    }
}

void bm_spectral_embed(benchmark::State& state) {
    const auto events = sample_events(static_cast<int>(state.range(0)));
    const auto graph = build_bipartite(events, full_window(events));
    const int d = static_cast<int>(std::min<std::size_t>(
        16, std::min(graph.user_count(), graph.service_count())));
    for (auto _ : state) {
        auto embedding = spectral_embed(graph, d);
        benchmark::DoNotOptimize(embedding.size());
    }
}

BENCHMARK(bm_parse_cloudtrail)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_build_graph)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_generate_walks)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_train_epoch)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_spectral_embed)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
