#include "csgad/graph.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "csgad/errors.hpp"
#include "csgad/timeparse.hpp"
#include "csgad/util.hpp"

namespace csgad {

std::string_view to_string(WindowScheme scheme) {
    switch (scheme) {
        case WindowScheme::AdditiveDay: return "additive-day";
        case WindowScheme::AdditiveHour: return "additive-hour";
        case WindowScheme::Fixed: return "fixed";
    }
    return "?";
}

WindowScheme window_scheme_from_name(std::string_view name) {
    if (name == "additive-day") return WindowScheme::AdditiveDay;
    if (name == "additive-hour") return WindowScheme::AdditiveHour;
    if (name == "fixed") return WindowScheme::Fixed;
    throw ConfigError("unknown window scheme '" + std::string(name) +
                      "' (expected additive-day, additive-hour, or fixed)");
}

std::string_view to_string(NodeRole role) {
    switch (role) {
        case NodeRole::User: return "user";
        case NodeRole::Action: return "action";
        case NodeRole::Service: return "service";
    }
    return "?";
}

std::string node_uid(NodeRole role, std::string_view name) {
    const char prefix = role == NodeRole::User ? 'u' : role == NodeRole::Action ? 'a' : 's';
    std::string uid;
    uid.reserve(name.size() + 2);
    uid.push_back(prefix);
    uid.push_back(':');
    uid.append(name);
    return uid;
}

std::vector<WindowSpec> window_partition(std::span<const AuditEvent> events,
                                         WindowScheme scheme,
                                         std::int64_t granularity_seconds) {
    if (events.empty()) throw InputError("no events: cannot partition an empty stream");

    std::int64_t granularity = granularity_seconds;
    if (granularity <= 0) {
        switch (scheme) {
            case WindowScheme::AdditiveDay: granularity = 86400; break;
            case WindowScheme::AdditiveHour: granularity = 3600; break;
            case WindowScheme::Fixed:
                throw ConfigError("fixed window scheme requires a positive granularity");
        }
    }

    const std::int64_t t0 = events.front().timestamp;
    const std::int64_t t_max = events.back().timestamp;
    const std::size_t count = static_cast<std::size_t>((t_max - t0) / granularity) + 1;

    std::vector<WindowSpec> windows;
    windows.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        WindowSpec w;
        w.t0 = t0;
        w.t_end = t0 + static_cast<std::int64_t>(k + 1) * granularity;
        w.scheme = scheme;
        w.index = k;
        w.granularity = granularity;
        windows.push_back(w);
    }
    return windows;
}

NodeRole TripartiteGraph::role_of(std::size_t global_index) const {
    if (global_index < users_.size()) return NodeRole::User;
    if (global_index < users_.size() + actions_.size()) return NodeRole::Action;
    return NodeRole::Service;
}

const std::string& TripartiteGraph::name_of(std::size_t global_index) const {
    if (global_index < users_.size()) return users_[global_index];
    global_index -= users_.size();
    if (global_index < actions_.size()) return actions_[global_index];
    return services_[global_index - actions_.size()];
}

namespace {

int find_index(const std::unordered_map<std::string, std::uint32_t>& index,
               std::string_view name) {
    auto it = index.find(std::string(name));
    return it == index.end() ? -1 : static_cast<int>(it->second);
}

std::uint32_t intern(std::vector<std::string>& names,
                     std::unordered_map<std::string, std::uint32_t>& index,
                     const std::string& name) {
    auto [it, inserted] = index.try_emplace(name, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
}

}  // namespace

int TripartiteGraph::user_index(std::string_view name) const {
    return find_index(user_index_, name);
}
int TripartiteGraph::action_index(std::string_view name) const {
    return find_index(action_index_, name);
}
int TripartiteGraph::service_index(std::string_view name) const {
    return find_index(service_index_, name);
}

TripartiteGraph build_graph(std::span<const AuditEvent> events, const WindowSpec& window) {
    if (window.t_start() > window.t_end)
        throw ConfigError("window start is after its end");

    TripartiteGraph graph;
    graph.window = window;
    const std::int64_t lo = window.t_start();
    const std::int64_t hi = window.t_end;
    for (const auto& event : events) {
        if (event.timestamp < lo || event.timestamp >= hi) continue;
        const std::uint32_t u = intern(graph.users_, graph.user_index_, event.user_id);
        const std::uint32_t a = intern(graph.actions_, graph.action_index_,
                                       std::string(to_string(event.category)));
        const std::uint32_t s = intern(graph.services_, graph.service_index_, event.service);
        graph.ua_edges_[{u, a}] += 1;
        graph.as_edges_[{a, s}] += 1;
        ++graph.event_count_;
    }
    return graph;
}

AdjacencyMatrix adjacency(const TripartiteGraph& graph) {
    AdjacencyMatrix m;
    m.n = graph.node_count();
    m.values.assign(m.n * m.n, 0);
    for (const auto& [edge, weight] : graph.user_action_edges()) {
        const std::size_t i = graph.global_user(edge.first);
        const std::size_t j = graph.global_action(edge.second);
        m.values[i * m.n + j] = weight;
        m.values[j * m.n + i] = weight;
    }
    for (const auto& [edge, weight] : graph.action_service_edges()) {
        const std::size_t i = graph.global_action(edge.first);
        const std::size_t j = graph.global_service(edge.second);
        m.values[i * m.n + j] = weight;
        m.values[j * m.n + i] = weight;
    }
    return m;
}

std::set<std::string> service_history(std::span<const TripartiteGraph> windows,
                                      std::string_view service, std::int64_t t) {
    std::set<std::string> users;
    for (const auto& graph : windows) {
        if (graph.window.t_end > t) continue;
        const int s = graph.service_index(service);
        if (s < 0) continue;
        // actions touching the service, then users touching those actions
        std::set<std::uint32_t> actions;
        for (const auto& [edge, weight] : graph.action_service_edges()) {
            (void)weight;
            if (edge.second == static_cast<std::uint32_t>(s)) actions.insert(edge.first);
        }
        for (const auto& [edge, weight] : graph.user_action_edges()) {
            (void)weight;
            if (actions.count(edge.second)) users.insert(graph.users()[edge.first]);
        }
    }
    return users;
}

void dump_graph(const TripartiteGraph& graph, const std::string& path_prefix) {
    std::ostringstream csv;
    csv << "src,dst,weight,partition_src,partition_dst\n";
    for (const auto& [edge, weight] : graph.user_action_edges()) {
        csv << csv_escape(graph.users()[edge.first]) << ','
            << csv_escape(graph.actions()[edge.second]) << ',' << weight << ",user,action\n";
    }
    for (const auto& [edge, weight] : graph.action_service_edges()) {
        csv << csv_escape(graph.actions()[edge.first]) << ','
            << csv_escape(graph.services()[edge.second]) << ',' << weight << ",action,service\n";
    }
    write_file(path_prefix + ".edges.csv", csv.str());

    nlohmann::json header = {
        {"t0", format_iso8601_utc(graph.window.t0)},
        {"t_end", format_iso8601_utc(graph.window.t_end)},
        {"scheme", std::string(to_string(graph.window.scheme))},
        {"index", graph.window.index},
        {"granularity_seconds", graph.window.granularity},
        {"users", graph.users().size()},
        {"actions", graph.actions().size()},
        {"services", graph.services().size()},
        {"events", graph.event_count()},
    };
    write_file(path_prefix + ".window.json", header.dump(2) + "\n");
}

}  // namespace csgad
