#include "csgad/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "csgad/errors.hpp"
#include "csgad/util.hpp"

namespace csgad {

GroupingMode grouping_mode_from_name(std::string_view name) {
    if (name == "by-action") return GroupingMode::ByAction;
    if (name == "by-service") return GroupingMode::ByService;
    throw ConfigError("unknown grouping mode '" + std::string(name) +
                      "' (expected by-action or by-service)");
}

std::string_view grouping_mode_name(GroupingMode mode) {
    return mode == GroupingMode::ByAction ? "by-action" : "by-service";
}

std::vector<UserGroup> group_users(const TripartiteGraph& graph, GroupingMode mode) {
    const std::size_t action_count = graph.actions().size();

    // users adjacent to each action, as sorted user indices
    std::vector<std::vector<std::uint32_t>> action_users(action_count);
    for (const auto& [key, count] : graph.user_action_edges())
        action_users[key.second].push_back(key.first);
    for (auto& users : action_users) std::sort(users.begin(), users.end());

    std::vector<UserGroup> groups;
    if (mode == GroupingMode::ByAction) {
        groups.reserve(action_count);
        for (std::size_t a = 0; a < action_count; ++a) {
            UserGroup g;
            g.key = graph.actions()[a];
            for (auto u : action_users[a]) g.members.push_back(graph.users()[u]);
            groups.push_back(std::move(g));
        }
        return groups;
    }

    std::vector<std::vector<std::uint32_t>> service_actions(graph.services().size());
    for (const auto& [key, count] : graph.action_service_edges())
        service_actions[key.second].push_back(key.first);

    groups.reserve(graph.services().size());
    for (std::size_t s = 0; s < graph.services().size(); ++s) {
        std::set<std::uint32_t> member_set;
        for (auto a : service_actions[s])
            member_set.insert(action_users[a].begin(), action_users[a].end());
        UserGroup g;
        g.key = graph.services()[s];
        for (auto u : member_set) g.members.push_back(graph.users()[u]);
        groups.push_back(std::move(g));
    }
    return groups;
}

bool GroupHistory::contains(const std::string& key, const std::string& user) const {
    auto it = seen_.find(key);
    return it != seen_.end() && it->second.count(user) > 0;
}

void GroupHistory::update(const std::vector<UserGroup>& groups) {
    for (const auto& g : groups)
        seen_[g.key].insert(g.members.begin(), g.members.end());
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
    }
    return std::sqrt(sum);
}

}  // namespace

std::vector<ScoreRow> anomaly_scores(const EmbeddingMatrix& embeddings,
                                     const std::vector<UserGroup>& groups,
                                     const GroupHistory& history) {
    std::vector<ScoreRow> rows;
    std::vector<std::span<const double>> vectors;
    for (const auto& group : groups) {
        vectors.clear();
        for (const auto& user : group.members) {
            auto row = embeddings.find(node_uid(NodeRole::User, user));
            if (row.empty())
                throw ComputeError("anomaly_scores: no embedding for user '" + user + "'");
            vectors.push_back(row);
        }
        for (std::size_t i = 0; i < group.members.size(); ++i) {
            ScoreRow row;
            row.user = group.members[i];
            row.group_key = group.key;
            row.is_new_member = !history.contains(group.key, group.members[i]);
            if (row.is_new_member || group.members.size() < 2) {
                row.score = 0.0;
                row.eligible = false;
            } else {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < group.members.size(); ++j) {
                    if (j == i) continue;
                    best = std::min(best, euclidean(vectors[i], vectors[j]));
                }
                row.score = best;
                row.eligible = true;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double threshold(std::span<const double> scores, int n) {
    if (scores.empty()) throw ComputeError("threshold: no scores");
    if (n < 0) throw ConfigError("threshold: n must be nonnegative");
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    var /= static_cast<double>(scores.size());
    return mean + n * std::sqrt(var);
}

double ScoreTable::cutoff_for(const std::string& group_key) const {
    if (group_thresholds.empty()) return threshold_value;
    auto it = group_thresholds.find(group_key);
    if (it == group_thresholds.end())
        throw ComputeError("score table: no threshold recorded for group " + group_key);
    return it->second;
}

std::set<std::string> flag(const ScoreTable& table) {
    std::set<std::string> flagged;
    for (const auto& row : table.rows)
        if (row.score > table.cutoff_for(row.group_key)) flagged.insert(row.user);
    return flagged;
}

void finalize_scores(ScoreTable& table, int n) {
    table.threshold_n = n;
    table.group_thresholds.clear();
    std::vector<double> eligible;
    for (const auto& row : table.rows)
        if (row.eligible) eligible.push_back(row.score);
    table.threshold_value = eligible.empty() ? 0.0 : threshold(eligible, n);
    table.flags = flag(table);
}

void finalize_scores_per_group(ScoreTable& table, int n) {
    table.threshold_n = n;
    table.threshold_value = 0.0;
    table.group_thresholds.clear();
    std::map<std::string, std::vector<double>> eligible;
    for (const auto& row : table.rows) {
        eligible[row.group_key];
        if (row.eligible) eligible[row.group_key].push_back(row.score);
    }
    for (const auto& [key, scores] : eligible)
        table.group_thresholds[key] = scores.empty() ? 0.0 : threshold(scores, n);
    table.flags = flag(table);
}

std::string score_table_to_csv(const ScoreTable& table, bool with_header) {
    std::string out;
    if (with_header) out = "window_index,user,group_key,score,is_new,threshold,flagged\n";
    for (const auto& row : table.rows) {
        out += std::to_string(table.window.index);
        out += ',';
        out += csv_escape(row.user);
        out += ',';
        out += csv_escape(row.group_key);
        out += ',';
        out += format_double(row.score);
        out += ',';
        out += row.is_new_member ? '1' : '0';
        const double cutoff = table.cutoff_for(row.group_key);
        out += ',';
        out += format_double(cutoff);
        out += ',';
        out += row.score > cutoff ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<ScoreCsvRow> parse_score_csv(std::string_view text) {
    std::vector<ScoreCsvRow> rows;
    std::size_t pos = 0;
    bool first = true;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (first && line.rfind("window_index,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        auto fields = csv_split(line);
        if (fields.size() != 7) throw InputError("score csv: expected 7 fields per row");
        ScoreCsvRow row;
        row.window_index = std::atoi(fields[0].c_str());
        row.user = fields[1];
        row.group_key = fields[2];
        row.score = std::strtod(fields[3].c_str(), nullptr);
        row.is_new_member = fields[4] == "1";
        row.threshold = std::strtod(fields[5].c_str(), nullptr);
        row.flagged = fields[6] == "1";
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace csgad
