#include "csgad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "csgad/baseline.hpp"
#include "csgad/categorize.hpp"
#include "csgad/embed.hpp"
#include "csgad/errors.hpp"
#include "csgad/ingest.hpp"
#include "csgad/rng.hpp"
#include "csgad/util.hpp"
#include "json.hpp"

namespace csgad {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kPipelineVersion = "1.0.0";

// seed-stream tags so walks, training, and generation never share a stream
constexpr std::uint64_t kWalkStream = 0x77A1;
constexpr std::uint64_t kTrainStream = 0x5D39;

bool wants_csgad(const RunConfig& c) { return c.method != "baseline"; }
bool wants_baseline(const RunConfig& c) { return c.method != "csgad"; }

template <typename Fn>
auto staged(const char* stage, std::size_t window, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string(stage) + " stage failed at window " + std::to_string(window) +
                        ": " + e.what(),
                    e.exit_code());
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Persistence seam for per-window embeddings; detect_events runs without
/// one, run_detect plugs in a directory-backed store for dumps and resume.
struct EmbeddingStore {
    virtual ~EmbeddingStore() = default;
    virtual std::optional<EmbeddingMatrix> load(std::size_t window, const char* method) = 0;
    virtual void save(std::size_t window, const char* method, const EmbeddingMatrix& embedding,
                      const std::vector<std::pair<std::string, std::string>>& info) = 0;
    virtual void save_graph(std::size_t window, const TripartiteGraph& graph) = 0;
};

struct WindowWork {
    TripartiteGraph graph;
    BipartiteGraph bgraph;
    std::optional<EmbeddingMatrix> embedding;
    std::optional<EmbeddingMatrix> baseline_embedding;
    std::vector<double> losses;
    bool resumed = false;
};

EmbedConfig embed_config_for(const RunConfig& config, std::size_t window) {
    EmbedConfig ec;
    ec.walk.p = config.walk_p;
    ec.walk.q = config.walk_q;
    ec.walk.walk_length = config.walk_length;
    ec.walk.walks_per_node = config.walks_per_node;
    ec.walk.seed = mix_seed(config.seed, kWalkStream, window);
    ec.sg.dim = config.dim;
    ec.sg.context = config.context;
    ec.sg.negatives = config.negatives;
    ec.sg.epochs = config.epochs;
    ec.sg.lr_initial = config.lr_initial;
    ec.sg.lr_final = config.lr_final;
    ec.sg.seed = mix_seed(config.seed, kTrainStream, window);
    ec.sg.threads = 1;
    return ec;
}

void embed_window(const RunConfig& config, std::size_t k, WindowWork& work,
                  EmbeddingStore* store) {
    if (wants_csgad(config) && work.graph.node_count() > 0) {
        if (store && config.resume) {
            if (auto loaded = store->load(k, "csgad")) {
                work.embedding = std::move(*loaded);
                work.resumed = true;
            }
        }
        if (!work.embedding) {
            EmbedResult result = staged("embed", k, [&] {
                return embed_graph(work.graph, embed_config_for(config, k));
            });
            work.embedding = std::move(result.embedding);
            work.losses = std::move(result.stats.epoch_mean_loss);
            if (store) {
                store->save(k, "csgad", *work.embedding,
                            {{"window", std::to_string(k)},
                             {"seed", std::to_string(config.seed)}});
            }
        }
    }
    if (wants_baseline(config) && !work.bgraph.edges.empty()) {
        if (store && config.resume) {
            if (auto loaded = store->load(k, "baseline")) {
                work.baseline_embedding = std::move(*loaded);
            }
        }
        if (!work.baseline_embedding) {
            const int d = static_cast<int>(std::min({static_cast<std::size_t>(config.baseline_dim),
                                                     work.bgraph.user_count(),
                                                     work.bgraph.service_count()}));
            work.baseline_embedding =
                staged("baseline embed", k, [&] { return spectral_embed(work.bgraph, d); });
            if (store) {
                store->save(k, "baseline", *work.baseline_embedding,
                            {{"window", std::to_string(k)},
                             {"dim", std::to_string(d)}});
            }
        }
    }
}

PipelineRun run_pipeline(const RunConfig& config, std::span<const AuditEvent> events,
                         EmbeddingStore* store) {
    validate_run_config(config);
    if (events.empty()) throw InputError("detect: no events");

    PipelineRun run;
    auto graph_start = std::chrono::steady_clock::now();
    run.windows = window_partition(events, config.scheme, config.granularity);

    std::vector<WindowWork> work(run.windows.size());
    for (std::size_t k = 0; k < run.windows.size(); ++k) {
        work[k].graph = staged("graph", k, [&] { return build_graph(events, run.windows[k]); });
        if (wants_baseline(config))
            work[k].bgraph =
                staged("graph", k, [&] { return build_bipartite(events, run.windows[k]); });
        if (store && config.dump_artifacts) store->save_graph(k, work[k].graph);
    }
    run.stage_seconds["graph"] = seconds_since(graph_start);

    auto embed_start = std::chrono::steady_clock::now();
    const int workers =
        config.deterministic ? 1 : std::max(1, std::min<int>(config.jobs, work.size()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < work.size(); ++k) embed_window(config, k, work[k], store);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex fail_mutex;
        std::exception_ptr failure;
        auto worker = [&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= work.size()) return;
                try {
                    embed_window(config, k, work[k], store);
                } catch (...) {
                    std::lock_guard lock(fail_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    run.stage_seconds["embed"] = seconds_since(embed_start);

    auto score_start = std::chrono::steady_clock::now();
    GroupHistory history;
    GroupHistory baseline_history;
    for (std::size_t k = 0; k < run.windows.size(); ++k) {
        if (work[k].resumed) run.resumed_windows.push_back(k);
        if (wants_csgad(config)) {
            ScoreTable table;
            table.window = run.windows[k];
            if (work[k].graph.node_count() > 0) {
                auto groups =
                    staged("group", k, [&] { return group_users(work[k].graph, config.grouping); });
                table.rows = staged("score", k, [&] {
                    return anomaly_scores(*work[k].embedding, groups, history);
                });
                if (config.per_group_threshold)
                    finalize_scores_per_group(table, config.threshold_n);
                else
                    finalize_scores(table, config.threshold_n);
                history.update(groups);
            } else {
                finalize_scores(table, config.threshold_n);
            }
            run.csgad_tables.push_back(std::move(table));
            run.epoch_losses.push_back(std::move(work[k].losses));
        }
        if (wants_baseline(config)) {
            ScoreTable table;
            table.window = run.windows[k];
            if (!work[k].bgraph.edges.empty()) {
                auto groups = bipartite_groups(work[k].bgraph);
                table.rows = staged("score", k, [&] {
                    return baseline_scores(*work[k].baseline_embedding, work[k].bgraph,
                                           baseline_history);
                });
                if (config.per_group_threshold)
                    finalize_scores_per_group(table, config.threshold_n);
                else
                    finalize_scores(table, config.threshold_n);
                baseline_history.update(groups);
            } else {
                finalize_scores(table, config.threshold_n);
            }
            run.baseline_tables.push_back(std::move(table));
        }
    }
    run.stage_seconds["score"] = seconds_since(score_start);
    return run;
}

struct DirectoryStore final : EmbeddingStore {
    fs::path out_dir;
    bool write_enabled = false;

    fs::path path_for(std::size_t window, const char* method) const {
        return out_dir / "embeddings" /
               ("window_" + std::to_string(window) + "_" + method + ".txt");
    }

    std::optional<EmbeddingMatrix> load(std::size_t window, const char* method) override {
        const fs::path path = path_for(window, method);
        std::error_code ec;
        if (!fs::exists(path, ec)) return std::nullopt;
        return read_embedding_file(path.string());
    }

    void save(std::size_t window, const char* method, const EmbeddingMatrix& embedding,
              const std::vector<std::pair<std::string, std::string>>& info) override {
        if (!write_enabled) return;
        write_embedding_file(path_for(window, method).string(), embedding, info);
    }

    void save_graph(std::size_t window, const TripartiteGraph& graph) override {
        dump_graph(graph,
                   (out_dir / "graphs" / ("window_" + std::to_string(window))).string());
    }
};

std::string scores_csv(const std::vector<ScoreTable>& tables) {
    std::string out;
    bool header = true;
    for (const auto& table : tables) {
        out += score_table_to_csv(table, header);
        header = false;
    }
    if (header) out = "window_index,user,group_key,score,is_new,threshold,flagged\n";
    return out;
}

std::string thresholds_csv(const PipelineRun& run) {
    std::string out = "window_index,method,scope,threshold\n";
    auto emit = [&out](const ScoreTable& table, const char* method) {
        if (table.group_thresholds.empty()) {
            out += std::to_string(table.window.index);
            out += ',';
            out += method;
            out += ",window,";
            out += format_double(table.threshold_value);
            out += '\n';
            return;
        }
        for (const auto& [key, value] : table.group_thresholds) {
            out += std::to_string(table.window.index);
            out += ',';
            out += method;
            out += ',';
            out += csv_escape(key);
            out += ',';
            out += format_double(value);
            out += '\n';
        }
    };
    for (const auto& table : run.csgad_tables) emit(table, "csgad");
    for (const auto& table : run.baseline_tables) emit(table, "baseline");
    return out;
}

std::string flags_csv(const PipelineRun& run) {
    std::string out = "window_index,method,user\n";
    auto emit = [&out](const std::vector<ScoreTable>& tables, const char* method) {
        for (const auto& table : tables)
            for (const auto& user : table.flags) {
                out += std::to_string(table.window.index);
                out += ',';
                out += method;
                out += ',';
                out += csv_escape(user);
                out += '\n';
            }
    };
    emit(run.csgad_tables, "csgad");
    emit(run.baseline_tables, "baseline");
    return out;
}

std::string losses_csv(const PipelineRun& run) {
    std::string out = "window_index,epoch,mean_loss\n";
    for (std::size_t k = 0; k < run.epoch_losses.size(); ++k)
        for (std::size_t e = 0; e < run.epoch_losses[k].size(); ++e) {
            out += std::to_string(run.csgad_tables[k].window.index);
            out += ',';
            out += std::to_string(e);
            out += ',';
            out += format_double(run.epoch_losses[k][e]);
            out += '\n';
        }
    return out;
}

std::vector<ScoreCsvRow> csv_rows_of(const std::vector<ScoreTable>& tables) {
    return parse_score_csv(scores_csv(tables));
}

}  // namespace

void validate_run_config(const RunConfig& config) {
    if (config.method != "csgad" && config.method != "baseline" && config.method != "both")
        throw ConfigError("config: method must be csgad, baseline, or both (got '" +
                          config.method + "')");
    if (config.scheme == WindowScheme::Fixed && config.granularity <= 0)
        throw ConfigError("config: the fixed window scheme needs a positive granularity");
    if (config.granularity < 0) throw ConfigError("config: granularity must be nonnegative");
    if (!(config.walk_p > 0.0) || !(config.walk_q > 0.0))
        throw ConfigError("config: walk p and q must be positive");
    if (config.walk_length < 1) throw ConfigError("config: walk length must be >= 1");
    if (config.walks_per_node < 1) throw ConfigError("config: walks per node must be >= 1");
    if (config.dim < 1) throw ConfigError("config: embedding dim must be >= 1");
    if (config.context < 1) throw ConfigError("config: context window must be >= 1");
    if (config.negatives < 1) throw ConfigError("config: negatives must be >= 1");
    if (config.epochs < 1) throw ConfigError("config: epochs must be >= 1");
    if (!(config.lr_initial > 0.0) || !(config.lr_final > 0.0))
        throw ConfigError("config: learning rates must be positive");
    if (config.lr_final > config.lr_initial)
        throw ConfigError("config: final learning rate exceeds the initial rate");
    if (config.threshold_n < 0) throw ConfigError("config: threshold n must be nonnegative");
    if (config.baseline_dim < 1) throw ConfigError("config: baseline dim must be >= 1");
    if (config.jobs < 1) throw ConfigError("config: jobs must be >= 1");
}

std::string run_config_to_json(const RunConfig& config) {
    nlohmann::ordered_json j;
    j["input"] = config.input_path;
    j["labels"] = config.labels_path;
    j["output_dir"] = config.output_dir;
    j["category_overrides"] = config.category_overrides_path;
    j["scheme"] = std::string(to_string(config.scheme));
    j["granularity_seconds"] = config.granularity;
    j["grouping"] = std::string(grouping_mode_name(config.grouping));
    j["walk"] = {{"p", config.walk_p},
                 {"q", config.walk_q},
                 {"length", config.walk_length},
                 {"per_node", config.walks_per_node}};
    j["embedding"] = {{"dim", config.dim},
                      {"context", config.context},
                      {"negatives", config.negatives},
                      {"epochs", config.epochs},
                      {"lr_initial", config.lr_initial},
                      {"lr_final", config.lr_final}};
    j["threshold_n"] = config.threshold_n;
    j["per_group_threshold"] = config.per_group_threshold;
    j["method"] = config.method;
    j["seed"] = config.seed;
    j["baseline_dim"] = config.baseline_dim;
    j["jobs"] = config.jobs;
    j["deterministic"] = config.deterministic;
    j["resume"] = config.resume;
    j["dump_artifacts"] = config.dump_artifacts;
    j["emit_svg"] = config.emit_svg;
    return j.dump(2) + "\n";
}

RunConfig parse_run_config_json(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config: expected a JSON object");

    static const std::set<std::string> known = {
        "input",       "labels",        "output_dir", "category_overrides",
        "scheme",      "granularity_seconds", "grouping",   "walk",
        "embedding",   "threshold_n",   "per_group_threshold", "method",
        "seed",        "baseline_dim",  "jobs",       "deterministic",
        "resume",      "dump_artifacts", "emit_svg"};
    for (const auto& [key, value] : root.items())
        if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");

    RunConfig config;
    try {
        config.input_path = root.value("input", config.input_path);
        config.labels_path = root.value("labels", config.labels_path);
        config.output_dir = root.value("output_dir", config.output_dir);
        config.category_overrides_path =
            root.value("category_overrides", config.category_overrides_path);
        if (root.contains("scheme"))
            config.scheme = window_scheme_from_name(root["scheme"].get<std::string>());
        config.granularity = root.value("granularity_seconds", config.granularity);
        if (root.contains("grouping"))
            config.grouping = grouping_mode_from_name(root["grouping"].get<std::string>());
        if (root.contains("walk")) {
            const auto& w = root["walk"];
            static const std::set<std::string> walk_keys = {"p", "q", "length", "per_node"};
            for (const auto& [key, value] : w.items())
                if (!walk_keys.count(key))
                    throw ConfigError("config: unknown walk key '" + key + "'");
            config.walk_p = w.value("p", config.walk_p);
            config.walk_q = w.value("q", config.walk_q);
            config.walk_length = w.value("length", config.walk_length);
            config.walks_per_node = w.value("per_node", config.walks_per_node);
        }
        if (root.contains("embedding")) {
            const auto& e = root["embedding"];
            static const std::set<std::string> emb_keys = {"dim",    "context",    "negatives",
                                                           "epochs", "lr_initial", "lr_final"};
            for (const auto& [key, value] : e.items())
                if (!emb_keys.count(key))
                    throw ConfigError("config: unknown embedding key '" + key + "'");
            config.dim = e.value("dim", config.dim);
            config.context = e.value("context", config.context);
            config.negatives = e.value("negatives", config.negatives);
            config.epochs = e.value("epochs", config.epochs);
            config.lr_initial = e.value("lr_initial", config.lr_initial);
            config.lr_final = e.value("lr_final", config.lr_final);
        }
        config.threshold_n = root.value("threshold_n", config.threshold_n);
        config.per_group_threshold =
            root.value("per_group_threshold", config.per_group_threshold);
        config.method = root.value("method", config.method);
        config.seed = root.value("seed", config.seed);
        config.baseline_dim = root.value("baseline_dim", config.baseline_dim);
        config.jobs = root.value("jobs", config.jobs);
        config.deterministic = root.value("deterministic", config.deterministic);
        config.resume = root.value("resume", config.resume);
        config.dump_artifacts = root.value("dump_artifacts", config.dump_artifacts);
        config.emit_svg = root.value("emit_svg", config.emit_svg);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate_run_config(config);
    return config;
}

std::string config_digest(const RunConfig& config) {
    return fnv1a_hex(run_config_to_json(config));
}

PipelineRun detect_events(const RunConfig& config, std::span<const AuditEvent> events) {
    return run_pipeline(config, events, nullptr);
}

PipelineRun run_detect(const RunConfig& config) {
    validate_run_config(config);
    if (config.input_path.empty()) throw ConfigError("detect: input path required");

    const auto parse_start = std::chrono::steady_clock::now();
    CategoryRules rules = CategoryRules::defaults();
    if (!config.category_overrides_path.empty())
        rules = rules.with_overrides(
            CategoryRules::parse_override_csv(read_file(config.category_overrides_path)));
    ParseResult parsed = parse_cloudtrail_file(config.input_path, rules);
    if (parsed.events.empty()) throw InputError("detect: no events in " + config.input_path);
    const double parse_seconds = seconds_since(parse_start);

    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("detect: cannot create output directory " + out_dir.string());

    DirectoryStore store;
    store.out_dir = out_dir;
    store.write_enabled = config.dump_artifacts || config.resume;
    if (store.write_enabled) fs::create_directories(out_dir / "embeddings");
    if (config.dump_artifacts) fs::create_directories(out_dir / "graphs");

    PipelineRun run = run_pipeline(config, parsed.events, &store);
    run.stage_seconds["parse"] = parse_seconds;

    const auto write_start = std::chrono::steady_clock::now();
    write_file((out_dir / "windows.csv").string(), windows_to_csv(run.windows));
    if (wants_csgad(config)) {
        write_file((out_dir / "scores_csgad.csv").string(), scores_csv(run.csgad_tables));
        write_file((out_dir / "losses.csv").string(), losses_csv(run));
        write_file((out_dir / "plot_csgad.csv").string(),
                   plot_csv_from_scores(csv_rows_of(run.csgad_tables)));
    }
    if (wants_baseline(config)) {
        write_file((out_dir / "scores_baseline.csv").string(),
                   scores_csv(run.baseline_tables));
        write_file((out_dir / "plot_baseline.csv").string(),
                   plot_csv_from_scores(csv_rows_of(run.baseline_tables)));
    }
    write_file((out_dir / "thresholds.csv").string(), thresholds_csv(run));
    write_file((out_dir / "flags.csv").string(), flags_csv(run));
    if (config.emit_svg) {
        fs::create_directories(out_dir / "plots");
        auto emit_plots = [&](const std::vector<ScoreTable>& tables, const char* method) {
            const auto rows = csv_rows_of(tables);
            for (const auto& table : tables) {
                const auto name = "window_" + std::to_string(table.window.index) + "_" + method +
                                  ".svg";
                write_file((out_dir / "plots" / name).string(),
                           plot_svg_for_window(rows, static_cast<int>(table.window.index)));
            }
        };
        if (wants_csgad(config)) emit_plots(run.csgad_tables, "csgad");
        if (wants_baseline(config)) emit_plots(run.baseline_tables, "baseline");
    }
    run.stage_seconds["write"] = seconds_since(write_start);

    nlohmann::ordered_json manifest;
    manifest["version"] = std::string(kPipelineVersion);
    manifest["config_digest"] = config_digest(config);
    manifest["config"] = nlohmann::ordered_json::parse(run_config_to_json(config));
    manifest["event_count"] = parsed.events.size();
    manifest["skipped_records"] = parsed.skipped;
    manifest["window_count"] = run.windows.size();
    manifest["resumed_windows"] = run.resumed_windows;
    nlohmann::ordered_json stages;
    for (const auto& [stage, secs] : run.stage_seconds) stages[stage] = secs;
    manifest["stage_seconds"] = std::move(stages);
    write_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return run;
}

std::vector<EvalReport> evaluate_scores(std::span<const ScoreCsvRow> rows,
                                        const std::vector<WindowSpec>& windows,
                                        std::vector<GroundTruth> labels, const std::string& method,
                                        int n, const std::string& digest) {
    if (labels.empty()) throw InputError("evaluate: no attacks in the labels file");

    std::map<int, std::set<std::string>> flags_by_window;
    std::map<int, std::set<std::string>> users_by_window;
    for (const auto& row : rows) {
        users_by_window[row.window_index].insert(row.user);
        if (row.flagged) flags_by_window[row.window_index].insert(row.user);
    }

    std::set<std::string> all_attackers;
    for (auto& label : labels) {
        label.attack_windows = attack_windows_for(windows, label.start_ts, label.end_ts);
        all_attackers.insert(label.attackers.begin(), label.attackers.end());
    }

    std::vector<EvalReport> reports;
    for (const auto& label : labels) {
        // users compromised in a different attack are neither clean negatives
        // nor positives of this one, so they sit out of this report entirely
        std::set<std::string> foreign;
        std::set_difference(all_attackers.begin(), all_attackers.end(), label.attackers.begin(),
                            label.attackers.end(), std::inserter(foreign, foreign.begin()));
        std::map<int, std::set<std::string>> users_filtered;
        std::map<int, std::set<std::string>> flags_filtered;
        for (const auto& [w, users] : users_by_window)
            for (const auto& user : users)
                if (!foreign.count(user)) users_filtered[w].insert(user);
        for (const auto& [w, users] : flags_by_window)
            for (const auto& user : users)
                if (!foreign.count(user)) flags_filtered[w].insert(user);

        EvalReport report;
        report.scenario = label.attack_name;
        report.method = method;
        report.n = n;
        report.counts = confusion(flags_filtered, users_filtered, label);
        report.mets = metrics(report.counts);

        std::vector<double> pooled;
        for (const auto& row : rows) {
            if (!label.attack_windows.count(row.window_index)) continue;
            if (foreign.count(row.user)) continue;
            if (row.is_new_member && row.score == 0.0) continue;
            pooled.push_back(row.score);
        }
        if (pooled.size() >= 2)
            report.variance = population_variance(pooled);
        else
            report.variance = std::nullopt;

        int detected = 0;
        for (const auto& attacker : label.attackers) {
            bool hit = false;
            for (int w : label.attack_windows) {
                auto it = flags_by_window.find(w);
                if (it != flags_by_window.end() && it->second.count(attacker)) {
                    hit = true;
                    break;
                }
            }
            if (hit) ++detected;
        }
        report.any_window_detection =
            static_cast<double>(detected) / static_cast<double>(label.attackers.size());
        report.config_digest = digest;
        reports.push_back(std::move(report));
    }

    // the overall row judges every decision against the union of the attacks
    EvalReport overall;
    overall.scenario = "overall";
    overall.method = method;
    overall.n = n;
    auto is_positive = [&labels](const std::string& user, int window) {
        for (const auto& label : labels)
            if (label.attackers.count(user) && label.attack_windows.count(window)) return true;
        return false;
    };
    static const std::set<std::string> kNone;
    for (const auto& [w, users] : users_by_window) {
        auto fit = flags_by_window.find(w);
        const auto& flagged = fit == flags_by_window.end() ? kNone : fit->second;
        for (const auto& user : users) {
            const bool positive = is_positive(user, w);
            const bool predicted = flagged.count(user) > 0;
            if (positive && predicted)
                ++overall.counts.tp;
            else if (positive)
                ++overall.counts.fn;
            else if (predicted)
                ++overall.counts.fp;
            else
                ++overall.counts.tn;
        }
    }
    overall.mets = metrics(overall.counts);
    int detected = 0;
    int attackers = 0;
    for (const auto& label : labels) {
        for (const auto& attacker : label.attackers) {
            ++attackers;
            bool hit = false;
            for (int w : label.attack_windows) {
                auto it = flags_by_window.find(w);
                if (it != flags_by_window.end() && it->second.count(attacker)) {
                    hit = true;
                    break;
                }
            }
            if (hit) ++detected;
        }
    }
    overall.any_window_detection =
        attackers == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(attackers);
    overall.config_digest = digest;
    reports.push_back(std::move(overall));
    return reports;
}

std::vector<EvalReport> run_evaluate(const RunConfig& config) {
    if (config.labels_path.empty()) throw ConfigError("evaluate: labels path required");
    const fs::path dir(config.output_dir);

    const auto windows = parse_windows_csv(read_file((dir / "windows.csv").string()));
    const auto labels = parse_labels_json(read_file(config.labels_path));

    std::string digest = config_digest(config);
    std::error_code ec;
    if (fs::exists(dir / "manifest.json", ec)) {
        try {
            auto manifest = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
            if (manifest.contains("config_digest"))
                digest = manifest["config_digest"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
            // unusable manifest; the recomputed digest stands
        }
    }

    std::vector<EvalReport> reports;
    auto evaluate_method = [&](const char* method, const char* file) {
        const auto rows = parse_score_csv(read_file((dir / file).string()));
        auto batch = evaluate_scores(rows, windows, labels, method, config.threshold_n, digest);
        reports.insert(reports.end(), std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
    };
    if (wants_csgad(config)) evaluate_method("csgad", "scores_csgad.csv");
    if (wants_baseline(config)) evaluate_method("baseline", "scores_baseline.csv");

    for (const auto& report : reports) {
        const auto name = "eval_" + report.scenario + "_" + report.method + ".json";
        write_file((dir / name).string(), eval_report_to_json(report));
    }
    write_file((dir / "comparison_fpr.csv").string(), comparison_fpr_csv(reports));
    write_file((dir / "comparison_metrics.csv").string(), comparison_metrics_csv(reports));
    write_file((dir / "comparison_variance.csv").string(), comparison_variance_csv(reports));
    return reports;
}

std::string windows_to_csv(const std::vector<WindowSpec>& windows) {
    std::string out = "index,t0,t_start,t_end,scheme,granularity\n";
    for (const auto& w : windows) {
        out += std::to_string(w.index);
        out += ',';
        out += std::to_string(w.t0);
        out += ',';
        out += std::to_string(w.t_start());
        out += ',';
        out += std::to_string(w.t_end);
        out += ',';
        out += to_string(w.scheme);
        out += ',';
        out += std::to_string(w.granularity);
        out += '\n';
    }
    return out;
}

std::vector<WindowSpec> parse_windows_csv(std::string_view text) {
    std::vector<WindowSpec> windows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("index,", 0) == 0) continue;
        }
        const auto fields = csv_split(line);
        if (fields.size() != 6) throw InputError("windows csv: expected 6 fields per row");
        WindowSpec w;
        try {
            w.index = static_cast<std::size_t>(std::stoull(fields[0]));
            w.t0 = std::stoll(fields[1]);
            w.t_end = std::stoll(fields[3]);
            w.scheme = window_scheme_from_name(fields[4]);
            w.granularity = std::stoll(fields[5]);
        } catch (const std::logic_error&) {
            throw InputError("windows csv: bad numeric field in row");
        }
        windows.push_back(w);
    }
    if (windows.empty()) throw InputError("windows csv: no windows");
    return windows;
}

std::string plot_csv_from_scores(std::span<const ScoreCsvRow> rows) {
    struct Point {
        double score = 0.0;
        double threshold = 0.0;
        bool flagged = false;
    };
    std::map<std::pair<int, std::string>, Point> points;
    for (const auto& row : rows) {
        auto& p = points[{row.window_index, row.user}];
        if (row.score >= p.score) {
            p.score = row.score;
            p.threshold = row.threshold;
        }
        p.flagged = p.flagged || row.flagged;
    }
    std::string out = "window_index,user,score,threshold,flagged\n";
    for (const auto& [key, p] : points) {
        out += std::to_string(key.first);
        out += ',';
        out += csv_escape(key.second);
        out += ',';
        out += format_double(p.score);
        out += ',';
        out += format_double(p.threshold);
        out += ',';
        out += p.flagged ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string plot_svg_for_window(std::span<const ScoreCsvRow> rows, int window_index) {
    auto xml_escape = [](const std::string& text) {
        std::string out;
        out.reserve(text.size());
        for (char c : text) {
            if (c == '&')
                out += "&amp;";
            else if (c == '<')
                out += "&lt;";
            else if (c == '>')
                out += "&gt;";
            else
                out += c;
        }
        return out;
    };
    struct Point {
        double score = 0.0;
        bool flagged = false;
    };
    std::map<std::string, Point> users;
    double cutoff = 0.0;
    for (const auto& row : rows) {
        if (row.window_index != window_index) continue;
        auto& p = users[row.user];
        p.score = std::max(p.score, row.score);
        p.flagged = p.flagged || row.flagged;
        cutoff = std::max(cutoff, row.threshold);
    }

    const double width = 900.0, height = 420.0;
    const double left = 60.0, right = 20.0, top = 30.0, bottom = 80.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    double max_y = cutoff;
    for (const auto& [user, p] : users) max_y = std::max(max_y, p.score);
    if (max_y <= 0.0) max_y = 1.0;
    max_y *= 1.1;

    auto num = [](double v) { return format_double(v); };
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                      "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " +
                      num(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(left) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
           "window " + std::to_string(window_index) + " scores</text>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(top + plot_h) + "\" stroke=\"black\"/>\n";

    const double cutoff_y = top + plot_h * (1.0 - cutoff / max_y);
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(cutoff_y) + "\" x2=\"" +
           num(left + plot_w) + "\" y2=\"" + num(cutoff_y) +
           "\" stroke=\"red\" stroke-dasharray=\"6 4\"/>\n";
    svg += "<text x=\"" + num(left + plot_w - 4) + "\" y=\"" + num(cutoff_y - 6) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"red\" text-anchor=\"end\">"
           "threshold " + format_double(cutoff) + "</text>\n";

    const std::size_t count = users.size();
    std::size_t i = 0;
    for (const auto& [user, p] : users) {
        const double x = count <= 1 ? left + plot_w / 2.0
                                    : left + plot_w * (static_cast<double>(i) /
                                                       static_cast<double>(count - 1));
        const double y = top + plot_h * (1.0 - p.score / max_y);
        svg += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4\" fill=\"" +
               (p.flagged ? "red" : "steelblue") + "\"/>\n";
        svg += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 12) +
               "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\" transform=\""
               "rotate(-60 " + num(x) + " " + num(top + plot_h + 12) + ")\">" +
               xml_escape(user) + "</text>\n";
        ++i;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace csgad
