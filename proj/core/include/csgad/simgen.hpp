#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csgad/events.hpp"
#include "csgad/evaluate.hpp"

namespace csgad {

/// How one job function behaves day to day: what it does (category weights),
/// where (service affinity), how much (Poisson events/day), and when.
struct RoleProfile {
    std::string name;
    std::array<double, kActionCategoryCount> category_weights{};
    std::vector<std::string> services;
    double events_per_day = 0.0;
    int active_start_hour = 9;
    int active_end_hour = 17;
};

/// The three stock roles: developer, monitor, admin.
std::vector<RoleProfile> default_roles();

enum class AttackKind {
    Cryptojacking,
    Billing,
    LateralMovement,
    MonitorExploit,
    TargetedServices,
};

AttackKind attack_kind_from_name(std::string_view name);
std::string_view attack_kind_name(AttackKind kind);

struct AttackScript {
    AttackKind kind = AttackKind::Cryptojacking;
    std::vector<std::string> attackers;  // exactly 4 for lateral movement, 1 otherwise
    int day = 1;                         // day offset from scenario start; attacks never share a day
    // kind-specific intensity; 0 picks the default:
    //   cryptojacking    launch/terminate pairs        (default 200)
    //   billing          instance launches             (default 60)
    //   lateral_movement calls per compromised user    (default 120)
    //   monitor_exploit  services scanned              (default 66)
    //   targeted_services probe events, capped at 20   (default 16)
    int count = 0;
};

struct Scenario {
    std::vector<RoleProfile> profiles;
    int users_per_role = 0;
    int days = 1;
    std::int64_t start_ts = 0;
    std::vector<AttackScript> attacks;
    std::uint64_t seed = 1;
};

/// The stock five-attack run: 25 users across five role variants, 32 days,
/// one attack of each kind on its own day.
Scenario default_scenario(std::uint64_t seed);

/// Event names that map back to their own category, usable as generated
/// traffic. canonical_event_names(c) are all verified representatives;
/// canonical_event_name(c) is the first.
std::span<const std::string_view> canonical_event_names(ActionCategory category);
std::string_view canonical_event_name(ActionCategory category);

/// Day-to-day traffic: per user and day, Poisson(rate) events with categories
/// drawn from the profile weights, services from the affinity set, and times
/// uniform inside active hours. Users are named "<role>-NN". Output is sorted
/// by (timestamp, user, event_name). Pure function of its arguments.
std::vector<AuditEvent> gen_legit(const std::vector<RoleProfile>& profiles, int users_per_role,
                                  int days, std::uint64_t seed, std::int64_t start_ts);

struct AttackResult {
    std::vector<AuditEvent> events;  // sorted by (timestamp, user, event_name)
    GroundTruth truth;
};

/// The attack burst alone; the attackers' preceding legitimate traffic comes
/// from their regular role membership in gen_legit.
AttackResult inject_attack(const AttackScript& script, std::int64_t start_ts, std::uint64_t seed);

/// Sorted union of sorted streams, ordered by (timestamp, user, event_name).
std::vector<AuditEvent> merge(std::vector<std::vector<AuditEvent>> streams);

struct GeneratedScenario {
    std::vector<AuditEvent> events;
    std::vector<GroundTruth> labels;
};

GeneratedScenario generate_scenario(const Scenario& scenario);

std::string scenario_to_json(const Scenario& scenario);
Scenario parse_scenario_json(std::string_view text);

/// CloudTrail-shaped {"Records": [...]} document that ingest parses back
/// losslessly (user, service, event name, second-resolution time, category).
std::string events_to_cloudtrail_json(std::span<const AuditEvent> events);

/// Catalog of service endpoints the monitor-exploit scan walks through.
std::span<const std::string_view> service_catalog();

}  // namespace csgad
