#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csgad/embedding.hpp"
#include "csgad/graph.hpp"

namespace csgad {

enum class GroupingMode { ByAction, ByService };

GroupingMode grouping_mode_from_name(std::string_view name);
std::string_view grouping_mode_name(GroupingMode mode);

/// Peer group for one window: the users active on one action (or service,
/// per grouping mode) within the window.
struct UserGroup {
    std::string key;
    std::vector<std::string> members;  // graph user order, no duplicates
};

/// by-action: one group per action node with its adjacent users.
/// by-service: one group per service node with the users that reach it
/// through some action. Empty graph gives an empty sequence.
std::vector<UserGroup> group_users(const TripartiteGraph& graph, GroupingMode mode);

/// Which users have been seen on which group key in prior windows.
class GroupHistory {
public:
    bool contains(const std::string& key, const std::string& user) const;
    void update(const std::vector<UserGroup>& groups);
    const std::map<std::string, std::set<std::string>>& data() const { return seen_; }

private:
    std::map<std::string, std::set<std::string>> seen_;
};

struct ScoreRow {
    std::string user;
    std::string group_key;
    double score = 0.0;
    bool is_new_member = false;
    // true when the score is a real nearest-neighbor distance; structural
    // zeros (new members, singleton groups, returning users under the
    // baseline rule) stay out of the threshold and variance statistics
    bool eligible = false;
};

struct ScoreTable {
    WindowSpec window;
    std::vector<ScoreRow> rows;
    int threshold_n = 2;
    double threshold_value = 0.0;
    // filled only in per-group mode; when non-empty, a row is judged against
    // its own group's cutoff instead of threshold_value
    std::map<std::string, double> group_thresholds;
    std::set<std::string> flags;

    double cutoff_for(const std::string& group_key) const;
};

/// Nearest-neighbor anomaly scores. A member with no history on the group
/// key scores 0 and is marked new; a returning member scores the minimum
/// Euclidean distance to the other members; a singleton group scores 0.
/// Throws when a group member has no embedding row.
std::vector<ScoreRow> anomaly_scores(const EmbeddingMatrix& embeddings,
                                     const std::vector<UserGroup>& groups,
                                     const GroupHistory& history);

/// mean + n * population standard deviation. The caller passes only the
/// scores that should enter the statistics. Throws on empty input.
double threshold(std::span<const double> scores, int n);

/// Users with any row strictly above the threshold value.
std::set<std::string> flag(const ScoreTable& table);

/// Computes threshold_value over the eligible rows and fills flags. When no
/// row is eligible (a bootstrap window where everyone is new), the threshold
/// is 0 and nothing is flagged.
void finalize_scores(ScoreTable& table, int n);

/// Same cutoff rule applied group by group: each group's threshold comes
/// from its own eligible rows only.
void finalize_scores_per_group(ScoreTable& table, int n);

/// CSV schema: window_index,user,group_key,score,is_new,threshold,flagged
std::string score_table_to_csv(const ScoreTable& table, bool with_header);

struct ScoreCsvRow {
    int window_index = 0;
    std::string user;
    std::string group_key;
    double score = 0.0;
    bool is_new_member = false;
    double threshold = 0.0;
    bool flagged = false;
};

std::vector<ScoreCsvRow> parse_score_csv(std::string_view text);

}  // namespace csgad
