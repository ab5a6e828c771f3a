#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csgad/graph.hpp"
#include "csgad/score.hpp"

namespace csgad {

struct GroundTruth {
    std::string attack_name;
    std::set<std::string> attackers;
    std::int64_t start_ts = 0;
    std::int64_t end_ts = 0;  // timestamp of the last attack event, inclusive
    std::set<int> attack_windows;
};

/// Window indices whose span intersects [start_ts, end_ts].
std::set<int> attack_windows_for(const std::vector<WindowSpec>& windows, std::int64_t start_ts,
                                 std::int64_t end_ts);

struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
};

/// Tallies (user, window) decisions: a decision is positive-labelled when
/// the user is an attacker and the window is an attack window, and
/// positive-predicted when the user was flagged in that window. Only scored
/// users count as decisions. Throws when a ground-truth attacker never
/// appears among the scored users.
Confusion confusion(const std::map<int, std::set<std::string>>& flags_by_window,
                    const std::map<int, std::set<std::string>>& users_by_window,
                    const GroundTruth& truth);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double fpr = 0.0;
    bool division_warning = false;  // some ratio had a zero denominator and was reported as 0
};

Metrics metrics(const Confusion& counts);

double population_variance(std::span<const double> values);

/// Population variance of the window's scores with new-member zeros
/// excluded. Throws when fewer than two scores remain.
double score_variance(const ScoreTable& table);

struct EvalReport {
    std::string scenario;
    std::string method;
    int n = 2;
    Confusion counts;
    Metrics mets;
    std::optional<double> variance;
    double any_window_detection = 0.0;  // attackers flagged in >= 1 attack window / attackers
    std::string config_digest;
};

std::string eval_report_to_json(const EvalReport& report);

std::string comparison_fpr_csv(std::span<const EvalReport> reports);
std::string comparison_metrics_csv(std::span<const EvalReport> reports);
std::string comparison_variance_csv(std::span<const EvalReport> reports);

/// Labels file: {"attacks": [{attack_name, users, start_ts, end_ts}]} with
/// ISO 8601 timestamps. attack_windows is derived per run, not stored.
std::string labels_to_json(std::span<const GroundTruth> labels);
std::vector<GroundTruth> parse_labels_json(std::string_view text);

}  // namespace csgad
