#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "csgad/baseline.hpp"
#include "csgad/categorize.hpp"
#include "csgad/errors.hpp"
#include "csgad/evaluate.hpp"
#include "csgad/graph.hpp"
#include "csgad/rng.hpp"
#include "csgad/score.hpp"
#include "support/oracles.hpp"

using namespace csgad;

namespace {

AuditEvent ev(std::int64_t ts, std::string user, std::string service, std::string name) {
    AuditEvent e;
    e.timestamp = ts;
    e.user_id = std::move(user);
    e.service = std::move(service);
    e.event_name = std::move(name);
    e.category = categorize(e.event_name);
    return e;
}

const WindowSpec kWindow{0, 1000, WindowScheme::AdditiveDay, 0, 86400};

EmbeddingMatrix user_embeddings(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::vector<std::string> ids;
    std::vector<NodeRole> roles;
    for (const auto& [name, vec] : rows) {
        ids.push_back(node_uid(NodeRole::User, name));
        roles.push_back(NodeRole::User);
    }
    const int dim = static_cast<int>(rows.front().second.size());
    EmbeddingMatrix m(dim, std::move(ids), std::move(roles));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto dst = m.row(i);
        for (int d = 0; d < dim; ++d) dst[d] = rows[i].second[d];
    }
    return m;
}

GroupHistory history_with(const std::string& key, const std::vector<std::string>& users) {
    GroupHistory h;
    std::vector<UserGroup> groups(1);
    groups[0].key = key;
    groups[0].members = users;
    h.update(groups);
    return h;
}

}  // namespace

TEST_CASE("by-action groups collect the users adjacent to each action") {
    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "bob", "s3.amazonaws.com", "PutObject"),
        ev(3, "carol", "iam.amazonaws.com", "AttachUserPolicy"),
        ev(4, "alice", "iam.amazonaws.com", "AttachUserPolicy"),
    };
    auto graph = build_graph(events, kWindow);
    auto groups = group_users(graph, GroupingMode::ByAction);
    std::map<std::string, std::vector<std::string>> by_key;
    for (const auto& g : groups) by_key[g.key] = g.members;
    REQUIRE(by_key.size() == 2);
    CHECK(by_key.at("DownloadUploadObjects") == std::vector<std::string>{"alice", "bob"});
    CHECK(by_key.at("GrantPermissions") == std::vector<std::string>{"carol", "alice"});
}

TEST_CASE("by-service groups reach users through shared action nodes") {
    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "bob", "kms.amazonaws.com", "GetObject"),
        ev(3, "carol", "iam.amazonaws.com", "AttachUserPolicy"),
    };
    auto graph = build_graph(events, kWindow);
    auto groups = group_users(graph, GroupingMode::ByService);
    std::map<std::string, std::vector<std::string>> by_key;
    for (const auto& g : groups) by_key[g.key] = g.members;
    REQUIRE(by_key.size() == 3);
    // alice and bob share the DownloadUploadObjects node, so each of their
    // services sees both of them through the two-hop path
    CHECK(by_key.at("s3.amazonaws.com") == std::vector<std::string>{"alice", "bob"});
    CHECK(by_key.at("kms.amazonaws.com") == std::vector<std::string>{"alice", "bob"});
    CHECK(by_key.at("iam.amazonaws.com") == std::vector<std::string>{"carol"});
}

TEST_CASE("grouping mode names round-trip and reject junk") {
    CHECK(grouping_mode_from_name("by-action") == GroupingMode::ByAction);
    CHECK(grouping_mode_from_name("by-service") == GroupingMode::ByService);
    CHECK(grouping_mode_name(GroupingMode::ByAction) == "by-action");
    CHECK(grouping_mode_name(GroupingMode::ByService) == "by-service");
    CHECK_THROWS_AS(grouping_mode_from_name("by-user"), ConfigError);
}

TEST_CASE("group history accumulates across updates") {
    GroupHistory h;
    CHECK_FALSE(h.contains("Login", "alice"));
    std::vector<UserGroup> first(1);
    first[0].key = "Login";
    first[0].members = {"alice"};
    h.update(first);
    CHECK(h.contains("Login", "alice"));
    CHECK_FALSE(h.contains("Login", "bob"));
    CHECK_FALSE(h.contains("Delete", "alice"));
    std::vector<UserGroup> second(1);
    second[0].key = "Login";
    second[0].members = {"bob"};
    h.update(second);
    CHECK(h.contains("Login", "alice"));
    CHECK(h.contains("Login", "bob"));
    CHECK(h.data().at("Login") == std::set<std::string>{"alice", "bob"});
}

TEST_CASE("returning members score their nearest-neighbor distance") {
    auto embeddings = user_embeddings({
        {"alice", {0.0, 0.0}},
        {"bob", {3.0, 4.0}},
        {"carol", {100.0, 0.0}},
    });
    std::vector<UserGroup> groups(1);
    groups[0].key = "Delete";
    groups[0].members = {"alice", "bob", "carol"};
    auto history = history_with("Delete", {"alice", "bob", "carol"});
    auto rows = anomaly_scores(embeddings, groups, history);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].score == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(rows[1].score == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(rows[2].score == doctest::Approx(97.082439194738).epsilon(1e-12));
    for (const auto& row : rows) {
        CHECK_FALSE(row.is_new_member);
        CHECK(row.eligible);
        CHECK(row.group_key == "Delete");
    }
}

TEST_CASE("first appearance on a group key scores a structural zero") {
    auto embeddings = user_embeddings({
        {"alice", {0.0, 0.0}},
        {"bob", {3.0, 4.0}},
    });
    std::vector<UserGroup> groups(1);
    groups[0].key = "Delete";
    groups[0].members = {"alice", "bob"};
    auto history = history_with("Delete", {"alice"});
    auto rows = anomaly_scores(embeddings, groups, history);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].user == "alice");
    CHECK(rows[0].score == doctest::Approx(5.0));
    CHECK(rows[0].eligible);
    CHECK(rows[1].user == "bob");
    CHECK(rows[1].is_new_member);
    CHECK(rows[1].score == 0.0);
    CHECK_FALSE(rows[1].eligible);
}

TEST_CASE("singleton groups cannot produce a distance") {
    auto embeddings = user_embeddings({{"alice", {1.0, 2.0}}});
    std::vector<UserGroup> groups(1);
    groups[0].key = "Login";
    groups[0].members = {"alice"};
    auto history = history_with("Login", {"alice"});
    auto rows = anomaly_scores(embeddings, groups, history);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].score == 0.0);
    CHECK_FALSE(rows[0].eligible);
    CHECK_FALSE(rows[0].is_new_member);
}

TEST_CASE("a group member without an embedding row is an error") {
    auto embeddings = user_embeddings({{"alice", {1.0}}});
    std::vector<UserGroup> groups(1);
    groups[0].key = "Login";
    groups[0].members = {"alice", "ghost"};
    CHECK_THROWS_AS(anomaly_scores(embeddings, groups, GroupHistory{}), ComputeError);
}

TEST_CASE("scores match the brute-force scan on random inputs") {
    Rng rng(101);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t count = 2 + rng.uniform_index(7);
        const int dim = 2 + static_cast<int>(rng.uniform_index(4));
        std::vector<std::pair<std::string, std::vector<double>>> spec;
        std::vector<std::vector<double>> points;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v) x = rng.uniform01() * 10.0 - 5.0;
            names.push_back("user-" + std::to_string(i));
            points.push_back(v);
            spec.emplace_back(names.back(), v);
        }
        auto embeddings = user_embeddings(spec);
        std::vector<UserGroup> groups(1);
        groups[0].key = "GetInfo";
        groups[0].members = names;
        auto history = history_with("GetInfo", names);
        auto rows = anomaly_scores(embeddings, groups, history);
        std::vector<std::size_t> all(count);
        for (std::size_t i = 0; i < count; ++i) all[i] = i;
        for (std::size_t i = 0; i < count; ++i) {
            const double want = oracle::nearest_neighbor(points, all, i);
            CHECK(rows[i].score == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("threshold is mean plus n population sigmas") {
    std::vector<double> flat = {1.0, 1.0, 1.0, 1.0};
    CHECK(threshold(flat, 2) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> pair = {2.0, 4.0};
    CHECK(threshold(pair, 1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(threshold(pair, 0) == doctest::Approx(3.0).epsilon(1e-12));
    std::vector<double> one = {5.0};
    CHECK(threshold(one, 3) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK_THROWS_AS(threshold({}, 2), ComputeError);
    CHECK_THROWS_AS(threshold(pair, -1), ConfigError);
}

TEST_CASE("flagging is strictly above the cutoff") {
    ScoreTable table;
    table.window = kWindow;
    table.threshold_value = 2.0;
    table.rows = {
        {"alice", "Delete", 2.0, false, true},
        {"bob", "Delete", 2.0000001, false, true},
        {"carol", "Delete", 1.0, false, true},
    };
    auto flagged = flag(table);
    CHECK(flagged == std::set<std::string>{"bob"});
}

TEST_CASE("finalize pools eligible rows into one window threshold") {
    ScoreTable table;
    table.window = kWindow;
    table.rows = {
        {"alice", "Delete", 2.0, false, true},
        {"bob", "Delete", 4.0, false, true},
        {"carol", "Login", 0.0, true, false},   // new member, stays out
        {"dave", "Login", 50.0, false, true},
    };
    finalize_scores(table, 1);
    // eligible scores 2, 4, 50: mean 56/3, sigma of the trio
    std::vector<double> eligible = {2.0, 4.0, 50.0};
    CHECK(table.threshold_value == doctest::Approx(threshold(eligible, 1)).epsilon(1e-12));
    CHECK(table.threshold_n == 1);
    CHECK(table.flags == std::set<std::string>{"dave"});
    CHECK(table.group_thresholds.empty());
}

TEST_CASE("a bootstrap window of new members flags nobody") {
    ScoreTable table;
    table.window = kWindow;
    table.rows = {
        {"alice", "Delete", 0.0, true, false},
        {"bob", "Delete", 0.0, true, false},
    };
    finalize_scores(table, 2);
    CHECK(table.threshold_value == 0.0);
    CHECK(table.flags.empty());
}

TEST_CASE("per-group mode thresholds each key from its own rows") {
    ScoreTable table;
    table.window = kWindow;
    table.rows = {
        {"alice", "Delete", 2.0, false, true},
        {"bob", "Delete", 4.0, false, true},
        {"carol", "Login", 1.0, false, true},
        {"dave", "Login", 9.0, false, true},
        {"erin", "GetInfo", 0.0, true, false},
    };
    finalize_scores_per_group(table, 0);
    REQUIRE(table.group_thresholds.size() == 3);
    CHECK(table.group_thresholds.at("Delete") == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(table.group_thresholds.at("Login") == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(table.group_thresholds.at("GetInfo") == 0.0);
    CHECK(table.cutoff_for("Login") == doctest::Approx(5.0).epsilon(1e-12));
    CHECK_THROWS_AS(table.cutoff_for("Logout"), ComputeError);
    CHECK(table.flags == std::set<std::string>{"bob", "dave"});
}

TEST_CASE("score tables round-trip through csv") {
    ScoreTable table;
    table.window = kWindow;
    table.window.index = 7;
    table.rows = {
        {"alice, the admin", "Delete", 2.25, false, true},
        {"bob", "Login", 0.0, true, false},
    };
    finalize_scores(table, 2);
    auto csv = score_table_to_csv(table, true);
    CHECK(csv.rfind("window_index,user,group_key,score,is_new,threshold,flagged\n", 0) == 0);
    auto rows = parse_score_csv(csv);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].window_index == 7);
    CHECK(rows[0].user == "alice, the admin");
    CHECK(rows[0].group_key == "Delete");
    CHECK(rows[0].score == 2.25);
    CHECK_FALSE(rows[0].is_new_member);
    CHECK(rows[0].threshold == table.threshold_value);
    CHECK(rows[1].is_new_member);
    CHECK_FALSE(rows[1].flagged);
    CHECK_THROWS_AS(parse_score_csv("a,b,c\n"), InputError);
}

TEST_CASE("bipartite graphs deduplicate repeated user-service pairs") {
    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "alice", "s3.amazonaws.com", "PutObject"),
        ev(3, "alice", "s3.amazonaws.com", "ListBuckets"),
        ev(4, "bob", "kms.amazonaws.com", "Decrypt"),
        ev(2000, "carol", "s3.amazonaws.com", "GetObject"),  // outside window
    };
    auto graph = build_bipartite(events, kWindow);
    CHECK(graph.users == std::vector<std::string>{"alice", "bob"});
    CHECK(graph.services == std::vector<std::string>{"s3.amazonaws.com", "kms.amazonaws.com"});
    CHECK(graph.edges.size() == 2);
    CHECK(graph.edges.count({0, 0}) == 1);
    CHECK(graph.edges.count({1, 1}) == 1);
}

TEST_CASE("bipartite groups list each service's users") {
    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "bob", "s3.amazonaws.com", "GetObject"),
        ev(3, "bob", "kms.amazonaws.com", "Decrypt"),
    };
    auto graph = build_bipartite(events, kWindow);
    auto groups = bipartite_groups(graph);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].key == "s3.amazonaws.com");
    CHECK(groups[0].members == std::vector<std::string>{"alice", "bob"});
    CHECK(groups[1].key == "kms.amazonaws.com");
    CHECK(groups[1].members == std::vector<std::string>{"bob"});
}

TEST_CASE("spectral embedding matches the brute-force svd") {
    Rng rng(2024);
    int verified = 0;
    for (int trial = 0; trial < 40 && verified < 20; ++trial) {
        const std::size_t nu = 3 + rng.uniform_index(5);
        const std::size_t ns = 3 + rng.uniform_index(5);
        std::vector<AuditEvent> events;
        for (std::size_t u = 0; u < nu; ++u)
            for (std::size_t s = 0; s < ns; ++s)
                if (rng.uniform01() < 0.5)
                    events.push_back(ev(static_cast<std::int64_t>(events.size() + 1),
                                        "user-" + std::to_string(u),
                                        "svc-" + std::to_string(s), "GetObject"));
        auto graph = build_bipartite(events, kWindow);
        if (graph.edges.empty()) continue;
        const int d = static_cast<int>(std::min(graph.user_count(), graph.service_count()));

        // hand-rolled normalized biadjacency
        const std::size_t m = graph.user_count();
        const std::size_t n = graph.service_count();
        std::vector<double> du(m, 0.0), ds(n, 0.0);
        for (const auto& [u, s] : graph.edges) {
            du[u] += 1.0;
            ds[s] += 1.0;
        }
        std::vector<double> normalized(m * n, 0.0);
        for (const auto& [u, s] : graph.edges)
            normalized[u * n + s] = 1.0 / std::sqrt(du[u] * ds[s]);
        auto svd = oracle::jacobi_svd(normalized, m, n);

        // eigenvector comparison needs a separated spectrum
        bool separated = true;
        for (int c = 0; c + 1 < d; ++c)
            if (svd.singulars[c] - svd.singulars[c + 1] < 1e-6) separated = false;
        if (static_cast<std::size_t>(d) < svd.singulars.size() &&
            svd.singulars[d - 1] - svd.singulars[d] < 1e-6)
            separated = false;
        if (!separated) continue;
        ++verified;

        auto embedding = spectral_embed(graph, d);
        REQUIRE(embedding.size() == m);
        for (int c = 0; c < d; ++c) {
            std::vector<double> want(m);
            for (std::size_t r = 0; r < m; ++r) want[r] = svd.u[c][r] * svd.singulars[c];
            std::size_t arg_max = 0;
            for (std::size_t r = 1; r < m; ++r)
                if (std::abs(want[r]) > std::abs(want[arg_max])) arg_max = r;
            if (want[arg_max] < 0.0)
                for (auto& x : want) x = -x;
            for (std::size_t r = 0; r < m; ++r)
                CHECK(embedding.row(r)[c] == doctest::Approx(want[r]).epsilon(1e-8).scale(1.0));
        }
    }
    CHECK(verified >= 20);
}

TEST_CASE("spectral embedding rejects degenerate requests") {
    BipartiteGraph empty;
    empty.users = {"alice"};
    empty.services = {"s3.amazonaws.com"};
    CHECK_THROWS_AS(spectral_embed(empty, 1), InputError);

    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "bob", "s3.amazonaws.com", "GetObject"),
    };
    auto graph = build_bipartite(events, kWindow);
    CHECK_THROWS_AS(spectral_embed(graph, 2), ConfigError);  // only one service
    CHECK_THROWS_AS(spectral_embed(graph, 0), ConfigError);
}

TEST_CASE("baseline scoring zeroes the returning users instead") {
    auto embeddings = user_embeddings({
        {"alice", {0.0, 0.0}},
        {"bob", {3.0, 4.0}},
        {"carol", {1.0, 1.0}},
    });
    std::vector<AuditEvent> events = {
        ev(1, "alice", "s3.amazonaws.com", "GetObject"),
        ev(2, "bob", "s3.amazonaws.com", "GetObject"),
        ev(3, "carol", "s3.amazonaws.com", "GetObject"),
    };
    auto graph = build_bipartite(events, kWindow);
    auto history = history_with("s3.amazonaws.com", {"alice"});
    auto rows = baseline_scores(embeddings, graph, history);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].user == "alice");
    CHECK(rows[0].score == 0.0);
    CHECK_FALSE(rows[0].eligible);
    CHECK_FALSE(rows[0].is_new_member);
    CHECK(rows[1].user == "bob");
    CHECK(rows[1].is_new_member);
    CHECK(rows[1].eligible);
    CHECK(rows[1].score == doctest::Approx(std::sqrt(13.0)).epsilon(1e-12));  // to carol
    CHECK(rows[2].user == "carol");
    CHECK(rows[2].score == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));  // to alice
}

TEST_CASE("attack windows are the spans intersecting the attack interval") {
    std::vector<WindowSpec> windows;
    for (int i = 0; i < 4; ++i)
        windows.push_back({0, (i + 1) * 100, WindowScheme::AdditiveDay,
                           static_cast<std::size_t>(i), 100});
    // additive windows all start at 0, so any attack hits every window whose
    // end passes its start
    CHECK(attack_windows_for(windows, 250, 260) == std::set<int>{2, 3});
    CHECK(attack_windows_for(windows, 0, 10) == std::set<int>{0, 1, 2, 3});
    CHECK(attack_windows_for(windows, 400, 500).empty());

    std::vector<WindowSpec> fixed;
    for (int i = 0; i < 4; ++i)
        fixed.push_back({0, (i + 1) * 100, WindowScheme::Fixed, static_cast<std::size_t>(i), 100});
    CHECK(attack_windows_for(fixed, 250, 260) == std::set<int>{2});
    CHECK(attack_windows_for(fixed, 150, 310) == std::set<int>{1, 2, 3});
}

TEST_CASE("confusion tallies user-window decisions") {
    std::map<int, std::set<std::string>> users = {
        {0, {"alice", "bob"}},
        {1, {"alice", "bob"}},
        {2, {"alice", "bob"}},
    };
    std::map<int, std::set<std::string>> flags = {
        {1, {"bob"}},
        {2, {"alice"}},
    };
    GroundTruth truth;
    truth.attack_name = "drill";
    truth.attackers = {"bob"};
    truth.attack_windows = {1, 2};
    auto counts = confusion(flags, users, truth);
    CHECK(counts.tp == 1);
    CHECK(counts.fn == 1);
    CHECK(counts.fp == 1);
    CHECK(counts.tn == 3);
    CHECK(counts.total() == 6);

    truth.attackers = {"mallory"};
    CHECK_THROWS_AS(confusion(flags, users, truth), InputError);
}

TEST_CASE("metrics match the hand-computed ratios") {
    Confusion c;
    c.tp = 57;
    c.fp = 29;
    c.tn = 183;
    c.fn = 10;
    auto m = metrics(c);
    CHECK(m.accuracy == doctest::Approx(0.8602150537634409).epsilon(1e-15));
    CHECK(m.precision == doctest::Approx(0.6627906976744186).epsilon(1e-15));
    CHECK(m.recall == doctest::Approx(0.8507462686567164).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(0.7450980392156863).epsilon(1e-15));
    CHECK(m.fpr == doctest::Approx(0.13679245283018868).epsilon(1e-15));
    CHECK_FALSE(m.division_warning);
}

TEST_CASE("zero denominators warn instead of dividing") {
    Confusion c;
    c.tn = 10;
    auto m = metrics(c);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
    CHECK(m.division_warning);
    Confusion zero;
    CHECK_THROWS_AS(metrics(zero), InputError);
}

TEST_CASE("population variance uses the n denominator") {
    std::vector<double> pair = {2.0, 4.0};
    CHECK(population_variance(pair) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> one = {3.0};
    CHECK_THROWS_AS(population_variance(one), ComputeError);
}

TEST_CASE("score variance drops definitional zeros and keeps behavioral ones") {
    ScoreTable table;
    table.rows = {
        {"alice", "Delete", 2.0, false, true},
        {"bob", "Delete", 4.0, false, true},
        {"carol", "Delete", 0.0, true, false},   // new member, dropped
        {"dave", "s3", 0.0, false, false},       // returning-user zero, kept
    };
    // kept scores: 2, 4, 0 -> mean 2, variance 8/3
    CHECK(score_variance(table) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

    ScoreTable thin;
    thin.rows = {
        {"alice", "Delete", 2.0, false, true},
        {"bob", "Delete", 0.0, true, false},
    };
    CHECK_THROWS_AS(score_variance(thin), ComputeError);
}

TEST_CASE("labels survive a json round-trip") {
    GroundTruth a;
    a.attack_name = "cryptojacking";
    a.attackers = {"developer-01"};
    a.start_ts = 1614556800;
    a.end_ts = 1614643199;
    GroundTruth b;
    b.attack_name = "lateral_movement";
    b.attackers = {"admin-01", "admin-02"};
    b.start_ts = 1615000000;
    b.end_ts = 1615000001;
    std::vector<GroundTruth> labels = {a, b};
    auto parsed = parse_labels_json(labels_to_json(labels));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].attack_name == "cryptojacking");
    CHECK(parsed[0].attackers == a.attackers);
    CHECK(parsed[0].start_ts == a.start_ts);
    CHECK(parsed[0].end_ts == a.end_ts);
    CHECK(parsed[1].attackers == b.attackers);
    CHECK(parsed[1].attack_windows.empty());
}

TEST_CASE("label parsing rejects malformed documents") {
    CHECK_THROWS_AS(parse_labels_json("not json"), InputError);
    CHECK_THROWS_AS(parse_labels_json("{}"), InputError);
    CHECK_THROWS_AS(parse_labels_json(R"({"attacks": [{"attack_name": "x"}]})"), InputError);
    CHECK_THROWS_AS(parse_labels_json(
                        R"({"attacks": [{"attack_name": "x", "users": ["u"],
                            "start_ts": "2021-03-02T00:00:00Z", "end_ts": "2021-03-01T00:00:00Z"}]})"),
                    InputError);
}

TEST_CASE("eval reports serialize their headline numbers") {
    EvalReport report;
    report.scenario = "overall";
    report.method = "csgad";
    report.n = 2;
    report.counts = {12, 3, 200, 1};
    report.mets = metrics(report.counts);
    report.variance = 0.25;
    report.any_window_detection = 1.0;
    report.config_digest = "deadbeef";
    auto json = eval_report_to_json(report);
    CHECK(json.find("\"scenario\": \"overall\"") != std::string::npos);
    CHECK(json.find("\"method\": \"csgad\"") != std::string::npos);
    CHECK(json.find("\"tp\": 12") != std::string::npos);
    CHECK(json.find("\"any_window_detection\": 1.0") != std::string::npos);
    CHECK(json.find("\"config_digest\": \"deadbeef\"") != std::string::npos);

    report.variance.reset();
    CHECK(eval_report_to_json(report).find("\"variance\": null") != std::string::npos);
}

TEST_CASE("comparison csvs carry one row per report or method") {
    EvalReport a;
    a.scenario = "cryptojacking";
    a.method = "csgad";
    a.n = 2;
    a.counts = {5, 1, 90, 0};
    a.mets = metrics(a.counts);
    a.variance = 0.3974;
    EvalReport b = a;
    b.method = "baseline";
    b.variance = 0.0084;
    std::vector<EvalReport> reports = {a, b};

    auto fpr = comparison_fpr_csv(reports);
    CHECK(fpr.rfind("attack,method,n,fpr\n", 0) == 0);
    CHECK(std::count(fpr.begin(), fpr.end(), '\n') == 3);

    auto mets = comparison_metrics_csv(reports);
    CHECK(mets.rfind("method,n,accuracy,precision,recall,f1\n", 0) == 0);
    CHECK(mets.find("csgad,2,") != std::string::npos);
    CHECK(mets.find("baseline,2,") != std::string::npos);

    auto var = comparison_variance_csv(reports);
    CHECK(var.rfind("attack,csgad_variance,baseline_variance\n", 0) == 0);
    CHECK(var.find("cryptojacking,") != std::string::npos);
}
