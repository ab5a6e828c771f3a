#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "csgad/evaluate.hpp"
#include "csgad/events.hpp"
#include "csgad/graph.hpp"
#include "csgad/score.hpp"

namespace csgad {

/// Everything one detection run needs, serializable so runs are repeatable.
struct RunConfig {
    std::string input_path;
    std::string labels_path;
    std::string output_dir = ".";
    std::string category_overrides_path;

    WindowScheme scheme = WindowScheme::AdditiveDay;
    std::int64_t granularity = 0;  // seconds; required for the fixed scheme
    GroupingMode grouping = GroupingMode::ByAction;

    double walk_p = 1.0;
    double walk_q = 1.0;
    int walk_length = 40;
    int walks_per_node = 10;

    int dim = 128;
    int context = 5;
    int negatives = 5;
    int epochs = 5;
    double lr_initial = 0.025;
    double lr_final = 1e-4;

    int threshold_n = 2;
    std::string method = "csgad";  // csgad | baseline | both
    std::uint64_t seed = 1;
    int baseline_dim = 16;

    int jobs = 1;              // window-level workers for the embedding stage
    bool deterministic = true;  // forces sequential execution
    bool resume = false;        // reuse dumped embeddings of completed windows
    bool dump_artifacts = false;  // write per-window graph + embedding dumps
    bool per_group_threshold = false;
    bool emit_svg = false;  // per-window score charts next to the data CSVs
};

void validate_run_config(const RunConfig& config);
RunConfig parse_run_config_json(std::string_view text);
std::string run_config_to_json(const RunConfig& config);

/// Stable digest of the serialized config; stamped into every artifact.
std::string config_digest(const RunConfig& config);

struct PipelineRun {
    std::vector<WindowSpec> windows;
    std::vector<ScoreTable> csgad_tables;     // per window (empty when method=baseline)
    std::vector<ScoreTable> baseline_tables;  // per window (empty when method=csgad)
    std::vector<std::vector<double>> epoch_losses;  // per window, CS-GAD training
    std::vector<std::size_t> resumed_windows;       // embeddings loaded instead of trained
    std::map<std::string, double> stage_seconds;
};

/// Run detection over already-parsed events. Embedding work can fan out to
/// `jobs` workers when deterministic mode is off; scoring always replays
/// windows in order because group history is sequential.
PipelineRun detect_events(const RunConfig& config, std::span<const AuditEvent> events);

/// File-level detect: parse the input, run, and write windows.csv, per-method
/// score CSVs, thresholds.csv, flags.csv, and manifest.json into output_dir
/// (plus graphs/ and embeddings/ dumps when dump_artifacts is on).
PipelineRun run_detect(const RunConfig& config);

/// Read a detect output directory plus the labels file, write per-scenario
/// EvalReport JSONs and the comparison CSVs, and return the reports.
std::vector<EvalReport> run_evaluate(const RunConfig& config);

/// Builds the reports in memory from score rows + windows (shared by
/// run_evaluate and tests).
std::vector<EvalReport> evaluate_scores(std::span<const ScoreCsvRow> rows,
                                        const std::vector<WindowSpec>& windows,
                                        std::vector<GroundTruth> labels, const std::string& method,
                                        int n, const std::string& digest);

std::string windows_to_csv(const std::vector<WindowSpec>& windows);
std::vector<WindowSpec> parse_windows_csv(std::string_view text);

/// Score-vs-user chart data: one row per (window, user) with the user's
/// maximum row score: "window_index,user,score,threshold,flagged".
std::string plot_csv_from_scores(std::span<const ScoreCsvRow> rows);

/// Minimal self-contained SVG chart of one window's user scores with the
/// threshold line.
std::string plot_svg_for_window(std::span<const ScoreCsvRow> rows, int window_index);

}  // namespace csgad
