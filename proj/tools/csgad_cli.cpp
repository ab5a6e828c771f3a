#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "csgad/errors.hpp"
#include "csgad/evaluate.hpp"
#include "csgad/pipeline.hpp"
#include "csgad/simgen.hpp"
#include "csgad/util.hpp"

namespace fs = std::filesystem;

namespace {

struct DetectFlags {
    std::string config_path;
    std::string input;
    std::string labels;
    std::string output_dir;
    std::string overrides;
    std::string scheme;
    std::string grouping;
    std::string method;
    std::int64_t granularity = 0;
    double p = 1.0, q = 1.0;
    int walk_length = 0, walks_per_node = 0;
    int dim = 0, context = 0, negatives = 0, epochs = 0;
    int threshold_n = -1;
    int baseline_dim = 0;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool per_group = false;
    bool resume = false;
    bool dump_artifacts = false;
    bool emit_svg = false;
    bool no_deterministic = false;
};

csgad::RunConfig load_config(const DetectFlags& f, const CLI::App& cmd) {
    csgad::RunConfig cfg;
    if (!f.config_path.empty())
        cfg = csgad::parse_run_config_json(csgad::read_file(f.config_path));

    auto given = [&cmd](const std::string& name) { return cmd.count(name) > 0; };
    if (given("--input")) cfg.input_path = f.input;
    if (given("--labels")) cfg.labels_path = f.labels;
    if (given("--output-dir")) cfg.output_dir = f.output_dir;
    if (given("--category-overrides")) cfg.category_overrides_path = f.overrides;
    if (given("--scheme")) cfg.scheme = csgad::window_scheme_from_name(f.scheme);
    if (given("--granularity")) cfg.granularity = f.granularity;
    if (given("--grouping")) cfg.grouping = csgad::grouping_mode_from_name(f.grouping);
    if (given("--method")) cfg.method = f.method;
    if (given("--p")) cfg.walk_p = f.p;
    if (given("--q")) cfg.walk_q = f.q;
    if (given("--walk-length")) cfg.walk_length = f.walk_length;
    if (given("--walks-per-node")) cfg.walks_per_node = f.walks_per_node;
    if (given("--dim")) cfg.dim = f.dim;
    if (given("--context")) cfg.context = f.context;
    if (given("--negatives")) cfg.negatives = f.negatives;
    if (given("--epochs")) cfg.epochs = f.epochs;
    if (given("--threshold-n")) cfg.threshold_n = f.threshold_n;
    if (given("--baseline-dim")) cfg.baseline_dim = f.baseline_dim;
    if (given("--jobs")) cfg.jobs = f.jobs;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--per-group-threshold")) cfg.per_group_threshold = true;
    if (given("--resume")) cfg.resume = true;
    if (given("--dump-artifacts")) cfg.dump_artifacts = true;
    if (given("--emit-svg")) cfg.emit_svg = true;
    if (given("--no-deterministic")) cfg.deterministic = false;
    csgad::validate_run_config(cfg);
    return cfg;
}

void add_detect_flags(CLI::App* cmd, DetectFlags& f, bool needs_input) {
    cmd->add_option("--config", f.config_path, "run configuration JSON; flags override it");
    auto* input = cmd->add_option("--input", f.input, "audit log file (CloudTrail JSON or NDJSON)");
    if (needs_input) input->check(CLI::ExistingFile);
    cmd->add_option("--labels", f.labels, "ground-truth labels JSON");
    cmd->add_option("--output-dir", f.output_dir, "directory for run artifacts");
    cmd->add_option("--category-overrides", f.overrides, "extra event-name category rules (CSV)");
    cmd->add_option("--scheme", f.scheme, "window scheme: additive-day, additive-hour, fixed");
    cmd->add_option("--granularity", f.granularity, "window granularity in seconds");
    cmd->add_option("--grouping", f.grouping, "peer grouping: by-action or by-service");
    cmd->add_option("--method", f.method, "csgad, baseline, or both");
    cmd->add_option("--p", f.p, "walk return bias");
    cmd->add_option("--q", f.q, "walk in-out bias");
    cmd->add_option("--walk-length", f.walk_length, "steps per walk");
    cmd->add_option("--walks-per-node", f.walks_per_node, "walks started per node");
    cmd->add_option("--dim", f.dim, "embedding dimension");
    cmd->add_option("--context", f.context, "skip-gram context radius");
    cmd->add_option("--negatives", f.negatives, "noise samples per pair");
    cmd->add_option("--epochs", f.epochs, "training epochs");
    cmd->add_option("--threshold-n", f.threshold_n, "alert at mean + n sigma");
    cmd->add_option("--baseline-dim", f.baseline_dim, "spectral baseline dimension");
    cmd->add_option("--jobs", f.jobs, "parallel window workers (needs --no-deterministic)");
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_flag("--per-group-threshold", f.per_group, "threshold each peer group separately");
    cmd->add_flag("--resume", f.resume, "reuse embeddings dumped by an earlier run");
    cmd->add_flag("--dump-artifacts", f.dump_artifacts, "persist per-window graphs and embeddings");
    cmd->add_flag("--emit-svg", f.emit_svg, "write per-window score charts");
    cmd->add_flag("--no-deterministic", f.no_deterministic, "allow parallel, non-reproducible runs");
}

int cmd_generate(const std::string& scenario_path, const std::string& out_path,
                 const std::string& labels_path, std::uint64_t seed, bool seed_given) {
    csgad::Scenario scenario;
    if (!scenario_path.empty())
        scenario = csgad::parse_scenario_json(csgad::read_file(scenario_path));
    else
        scenario = csgad::default_scenario(seed);
    if (seed_given) scenario.seed = seed;

    csgad::GeneratedScenario generated = csgad::generate_scenario(scenario);
    csgad::write_file(out_path, csgad::events_to_cloudtrail_json(generated.events));
    if (!labels_path.empty())
        csgad::write_file(labels_path, csgad::labels_to_json(generated.labels));

    std::cout << "wrote " << generated.events.size() << " events to " << out_path;
    if (!labels_path.empty())
        std::cout << " and " << generated.labels.size() << " attack labels to " << labels_path;
    std::cout << "\n";
    return 0;
}

int cmd_detect(const csgad::RunConfig& cfg) {
    csgad::PipelineRun run = csgad::run_detect(cfg);
    std::cout << "windows: " << run.windows.size() << "\n";
    auto count_flags = [](const std::vector<csgad::ScoreTable>& tables) {
        std::size_t total = 0;
        for (const auto& t : tables) total += t.flags.size();
        return total;
    };
    if (!run.csgad_tables.empty())
        std::cout << "csgad flags: " << count_flags(run.csgad_tables) << "\n";
    if (!run.baseline_tables.empty())
        std::cout << "baseline flags: " << count_flags(run.baseline_tables) << "\n";
    if (!run.resumed_windows.empty())
        std::cout << "resumed embeddings for " << run.resumed_windows.size() << " windows\n";
    std::cout << "artifacts in " << cfg.output_dir << "\n";

    if (!cfg.labels_path.empty()) {
        auto reports = csgad::run_evaluate(cfg);
        for (const auto& r : reports)
            std::cout << "eval " << r.scenario << " " << r.method << ": fpr="
                      << csgad::format_double(r.mets.fpr)
                      << " detection=" << csgad::format_double(r.any_window_detection) << "\n";
    }
    return 0;
}

int cmd_evaluate(const csgad::RunConfig& cfg) {
    auto reports = csgad::run_evaluate(cfg);
    for (const auto& r : reports)
        std::cout << "eval " << r.scenario << " " << r.method << ": fpr="
                  << csgad::format_double(r.mets.fpr) << " recall="
                  << csgad::format_double(r.mets.recall)
                  << " detection=" << csgad::format_double(r.any_window_detection) << "\n";
    std::cout << "reports in " << cfg.output_dir << "\n";
    return 0;
}

int cmd_report(const std::string& dir, bool emit_svg) {
    const auto windows =
        csgad::parse_windows_csv(csgad::read_file((fs::path(dir) / "windows.csv").string()));
    std::cout << windows.size() << " windows, scheme " << csgad::to_string(windows[0].scheme)
              << "\n";
    for (const char* method : {"csgad", "baseline"}) {
        const fs::path scores = fs::path(dir) / (std::string("scores_") + method + ".csv");
        std::error_code ec;
        if (!fs::exists(scores, ec)) continue;
        const auto rows = csgad::parse_score_csv(csgad::read_file(scores.string()));
        std::map<int, std::set<std::string>> flagged;
        std::map<int, double> cutoff;
        for (const auto& row : rows) {
            cutoff[row.window_index] = std::max(cutoff[row.window_index], row.threshold);
            if (row.flagged) flagged[row.window_index].insert(row.user);
        }
        std::cout << method << ":\n";
        for (const auto& w : windows) {
            const int k = static_cast<int>(w.index);
            std::cout << "  window " << k << " threshold "
                      << csgad::format_double(cutoff.count(k) ? cutoff[k] : 0.0) << " flags";
            if (!flagged.count(k) || flagged[k].empty()) {
                std::cout << " none\n";
                continue;
            }
            for (const auto& user : flagged[k]) std::cout << " " << user;
            std::cout << "\n";
        }
        if (emit_svg) {
            fs::create_directories(fs::path(dir) / "plots");
            for (const auto& w : windows) {
                const auto name = "window_" + std::to_string(w.index) + "_" + method + ".svg";
                csgad::write_file((fs::path(dir) / "plots" / name).string(),
                                  csgad::plot_svg_for_window(rows, static_cast<int>(w.index)));
            }
            std::cout << "  charts in " << (fs::path(dir) / "plots").string() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-based anomaly detection for cloud audit logs"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "synthesize a labeled audit-log dataset");
    std::string gen_scenario, gen_out = "dataset.json", gen_labels;
    std::uint64_t gen_seed = 1;
    generate->add_option("--scenario", gen_scenario, "scenario JSON (defaults to the stock run)")
        ->check(CLI::ExistingFile);
    generate->add_option("--out", gen_out, "output CloudTrail-format JSON path");
    generate->add_option("--labels", gen_labels, "output labels JSON path");
    generate->add_option("--seed", gen_seed, "generation seed");

    auto* detect = app.add_subcommand("detect", "score users window by window");
    DetectFlags detect_flags;
    add_detect_flags(detect, detect_flags, true);

    auto* evaluate = app.add_subcommand("evaluate", "compare a scored run against labels");
    DetectFlags eval_flags;
    add_detect_flags(evaluate, eval_flags, false);

    auto* report = app.add_subcommand("report", "summarize an existing run directory");
    std::string report_dir = ".";
    bool report_svg = false;
    report->add_option("--scores-dir", report_dir, "detect output directory");
    report->add_flag("--emit-svg", report_svg, "write per-window score charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed())
            return cmd_generate(gen_scenario, gen_out, gen_labels, gen_seed,
                                generate->count("--seed") > 0);
        if (detect->parsed()) return cmd_detect(load_config(detect_flags, *detect));
        if (evaluate->parsed()) return cmd_evaluate(load_config(eval_flags, *evaluate));
        if (report->parsed()) return cmd_report(report_dir, report_svg);
    } catch (const csgad::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
