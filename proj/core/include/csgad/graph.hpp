#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csgad/events.hpp"

namespace csgad {

enum class WindowScheme { AdditiveDay, AdditiveHour, Fixed };

std::string_view to_string(WindowScheme scheme);
WindowScheme window_scheme_from_name(std::string_view name);

/// One time window [t0, t_end). Additive schemes share t0 across all
/// windows and grow by one granularity step per index; the fixed scheme
/// tiles disjoint windows.
struct WindowSpec {
    std::int64_t t0 = 0;
    std::int64_t t_end = 0;
    WindowScheme scheme = WindowScheme::AdditiveDay;
    std::size_t index = 0;
    std::int64_t granularity = 0;  // seconds

    /// Event inclusion bound. Additive windows start at t0; fixed windows
    /// at t0 + index*granularity.
    std::int64_t t_start() const {
        return scheme == WindowScheme::Fixed
                   ? t0 + static_cast<std::int64_t>(index) * granularity
                   : t0;
    }
};

/// Partition a sorted event stream into windows covering the max timestamp.
/// granularity_seconds is required for Fixed and optional for the additive
/// schemes (defaults: 1 day / 1 hour). Throws InputError on empty input.
std::vector<WindowSpec> window_partition(std::span<const AuditEvent> events,
                                         WindowScheme scheme,
                                         std::int64_t granularity_seconds = 0);

enum class NodeRole : std::uint8_t { User, Action, Service };

std::string_view to_string(NodeRole role);

/// Prefixed node identifier ("u:", "a:", "s:") so the three partitions
/// never collide in embedding tables.
std::string node_uid(NodeRole role, std::string_view name);

/// Weighted tripartite user–action–service graph for one window. Node
/// order within each partition is first-appearance order; the global node
/// ordering is [users | actions | services]. Immutable after build.
class TripartiteGraph {
public:
    WindowSpec window;

    const std::vector<std::string>& users() const { return users_; }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::vector<std::string>& services() const { return services_; }

    std::size_t node_count() const { return users_.size() + actions_.size() + services_.size(); }
    std::size_t event_count() const { return event_count_; }

    NodeRole role_of(std::size_t global_index) const;
    const std::string& name_of(std::size_t global_index) const;
    std::size_t global_user(std::size_t i) const { return i; }
    std::size_t global_action(std::size_t i) const { return users_.size() + i; }
    std::size_t global_service(std::size_t i) const {
        return users_.size() + actions_.size() + i;
    }

    /// (user index, action index) -> count, deterministic iteration order.
    const std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t>& user_action_edges()
        const {
        return ua_edges_;
    }
    const std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t>& action_service_edges()
        const {
        return as_edges_;
    }

    /// -1 when the name is not a node of this graph.
    int user_index(std::string_view name) const;
    int action_index(std::string_view name) const;
    int service_index(std::string_view name) const;

    friend TripartiteGraph build_graph(std::span<const AuditEvent> events,
                                       const WindowSpec& window);

private:
    std::vector<std::string> users_, actions_, services_;
    std::unordered_map<std::string, std::uint32_t> user_index_, action_index_, service_index_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> ua_edges_, as_edges_;
    std::size_t event_count_ = 0;
};

/// Count every event with timestamp in [window.t_start(), window.t_end):
/// +1 on the (user, action) edge and +1 on the (action, service) edge.
TripartiteGraph build_graph(std::span<const AuditEvent> events, const WindowSpec& window);

/// Dense symmetric adjacency over the ordering [users | actions | services].
struct AdjacencyMatrix {
    std::size_t n = 0;
    std::vector<std::int64_t> values;  // row-major n*n

    std::int64_t at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

AdjacencyMatrix adjacency(const TripartiteGraph& graph);

/// Users with a user→action→service 2-hop path to `service` in any window
/// closing at or before `t`. Unknown service -> empty set.
std::set<std::string> service_history(std::span<const TripartiteGraph> windows,
                                      std::string_view service, std::int64_t t);

/// Edge-list dump "src,dst,weight,partition_src,partition_dst" plus a JSON
/// window-metadata header, written to <path>.edges.csv / <path>.window.json.
void dump_graph(const TripartiteGraph& graph, const std::string& path_prefix);

}  // namespace csgad
