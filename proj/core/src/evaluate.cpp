#include "csgad/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "csgad/errors.hpp"
#include "csgad/timeparse.hpp"
#include "csgad/util.hpp"
#include "json.hpp"

namespace csgad {

std::set<int> attack_windows_for(const std::vector<WindowSpec>& windows, std::int64_t start_ts,
                                 std::int64_t end_ts) {
    std::set<int> hit;
    for (const auto& w : windows)
        if (w.t_start() <= end_ts && start_ts < w.t_end) hit.insert(w.index);
    return hit;
}

Confusion confusion(const std::map<int, std::set<std::string>>& flags_by_window,
                    const std::map<int, std::set<std::string>>& users_by_window,
                    const GroundTruth& truth) {
    for (const auto& attacker : truth.attackers) {
        bool seen = false;
        for (const auto& [w, users] : users_by_window)
            if (users.count(attacker)) {
                seen = true;
                break;
            }
        if (!seen)
            throw InputError("confusion: ground-truth user '" + attacker +
                             "' never appears among scored users");
    }

    Confusion counts;
    static const std::set<std::string> kNone;
    for (const auto& [w, users] : users_by_window) {
        auto fit = flags_by_window.find(w);
        const auto& flagged = fit == flags_by_window.end() ? kNone : fit->second;
        const bool attack_window = truth.attack_windows.count(w) > 0;
        for (const auto& user : users) {
            const bool positive = attack_window && truth.attackers.count(user) > 0;
            const bool predicted = flagged.count(user) > 0;
            if (positive && predicted)
                ++counts.tp;
            else if (positive && !predicted)
                ++counts.fn;
            else if (!positive && predicted)
                ++counts.fp;
            else
                ++counts.tn;
        }
    }
    return counts;
}

Metrics metrics(const Confusion& counts) {
    if (counts.tp < 0 || counts.fp < 0 || counts.tn < 0 || counts.fn < 0)
        throw InputError("metrics: negative confusion count");
    if (counts.total() == 0) throw InputError("metrics: confusion counts are all zero");

    Metrics m;
    auto ratio = [&m](std::int64_t num, std::int64_t den) {
        if (den == 0) {
            m.division_warning = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.accuracy = ratio(counts.tp + counts.tn, counts.total());
    m.precision = ratio(counts.tp, counts.tp + counts.fp);
    m.recall = ratio(counts.tp, counts.tp + counts.fn);
    m.fpr = ratio(counts.fp, counts.fp + counts.tn);
    if (m.precision + m.recall == 0.0) {
        m.division_warning = true;
        m.f1 = 0.0;
    } else {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    return m;
}

double population_variance(std::span<const double> values) {
    if (values.size() < 2) throw ComputeError("variance: need at least two scores");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return var / static_cast<double>(values.size());
}

double score_variance(const ScoreTable& table) {
    // Zeros stamped by the new-member rule are definitional and stay out;
    // every behavioral score stays in. Under the baseline's inverted rule the
    // returning users' zeros are behavioral zeros, so they are kept, which is
    // what keeps baseline variances near zero.
    std::vector<double> kept;
    for (const auto& row : table.rows)
        if (!(row.is_new_member && row.score == 0.0)) kept.push_back(row.score);
    return population_variance(kept);
}

std::string eval_report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["scenario"] = report.scenario;
    j["method"] = report.method;
    j["n"] = report.n;
    j["confusion"] = {{"tp", report.counts.tp},
                      {"fp", report.counts.fp},
                      {"tn", report.counts.tn},
                      {"fn", report.counts.fn}};
    j["metrics"] = {{"accuracy", report.mets.accuracy}, {"precision", report.mets.precision},
                    {"recall", report.mets.recall},     {"f1", report.mets.f1},
                    {"fpr", report.mets.fpr},           {"division_warning", report.mets.division_warning}};
    if (report.variance)
        j["variance"] = *report.variance;
    else
        j["variance"] = nullptr;
    j["any_window_detection"] = report.any_window_detection;
    j["config_digest"] = report.config_digest;
    return j.dump(2) + "\n";
}

std::string comparison_fpr_csv(std::span<const EvalReport> reports) {
    std::string out = "attack,method,n,fpr\n";
    for (const auto& r : reports) {
        out += csv_escape(r.scenario);
        out += ',';
        out += r.method;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.mets.fpr);
        out += '\n';
    }
    return out;
}

std::string comparison_metrics_csv(std::span<const EvalReport> reports) {
    std::map<std::pair<std::string, int>, Confusion> pooled;
    for (const auto& r : reports) {
        auto& c = pooled[{r.method, r.n}];
        c.tp += r.counts.tp;
        c.fp += r.counts.fp;
        c.tn += r.counts.tn;
        c.fn += r.counts.fn;
    }
    std::string out = "method,n,accuracy,precision,recall,f1\n";
    for (const auto& [key, counts] : pooled) {
        Metrics m = metrics(counts);
        out += key.first;
        out += ',';
        out += std::to_string(key.second);
        out += ',';
        out += format_double(m.accuracy);
        out += ',';
        out += format_double(m.precision);
        out += ',';
        out += format_double(m.recall);
        out += ',';
        out += format_double(m.f1);
        out += '\n';
    }
    return out;
}

std::string comparison_variance_csv(std::span<const EvalReport> reports) {
    std::map<std::string, std::map<std::string, std::optional<double>>> by_attack;
    for (const auto& r : reports) by_attack[r.scenario][r.method] = r.variance;
    std::string out = "attack,csgad_variance,baseline_variance\n";
    for (const auto& [attack, methods] : by_attack) {
        out += csv_escape(attack);
        auto emit = [&](const char* method) {
            out += ',';
            auto it = methods.find(method);
            if (it != methods.end() && it->second) out += format_double(*it->second);
        };
        emit("csgad");
        emit("baseline");
        out += '\n';
    }
    return out;
}

std::string labels_to_json(std::span<const GroundTruth> labels) {
    nlohmann::ordered_json attacks = nlohmann::ordered_json::array();
    for (const auto& label : labels) {
        nlohmann::ordered_json j;
        j["attack_name"] = label.attack_name;
        j["users"] = label.attackers;
        j["start_ts"] = format_iso8601_utc(label.start_ts);
        j["end_ts"] = format_iso8601_utc(label.end_ts);
        attacks.push_back(std::move(j));
    }
    nlohmann::ordered_json root;
    root["attacks"] = std::move(attacks);
    return root.dump(2) + "\n";
}

std::vector<GroundTruth> parse_labels_json(std::string_view text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("labels: malformed JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("attacks") || !root["attacks"].is_array())
        throw InputError("labels: expected an object with an 'attacks' array");
    std::vector<GroundTruth> labels;
    for (const auto& entry : root["attacks"]) {
        GroundTruth truth;
        truth.attack_name = entry.value("attack_name", std::string());
        if (truth.attack_name.empty()) throw InputError("labels: attack entry missing attack_name");
        if (!entry.contains("users") || !entry["users"].is_array() || entry["users"].empty())
            throw InputError("labels: attack '" + truth.attack_name + "' has no users");
        for (const auto& user : entry["users"]) truth.attackers.insert(user.get<std::string>());
        auto parse_ts = [&](const char* key) {
            if (!entry.contains(key)) throw InputError("labels: attack missing " + std::string(key));
            auto ts = parse_iso8601_utc(entry[key].get<std::string>());
            if (!ts) throw InputError("labels: bad timestamp in " + std::string(key));
            return *ts;
        };
        truth.start_ts = parse_ts("start_ts");
        truth.end_ts = parse_ts("end_ts");
        if (truth.end_ts < truth.start_ts)
            throw InputError("labels: attack '" + truth.attack_name + "' ends before it starts");
        labels.push_back(std::move(truth));
    }
    return labels;
}

}  // namespace csgad
