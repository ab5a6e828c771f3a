#include "csgad/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "csgad/categorize.hpp"
#include "csgad/errors.hpp"
#include "csgad/rng.hpp"
#include "csgad/timeparse.hpp"
#include "csgad/util.hpp"
#include "json.hpp"

namespace csgad {

namespace {

constexpr std::string_view kServiceCatalog[] = {
    "ec2.amazonaws.com",          "s3.amazonaws.com",
    "iam.amazonaws.com",          "sts.amazonaws.com",
    "lambda.amazonaws.com",       "dynamodb.amazonaws.com",
    "rds.amazonaws.com",          "kms.amazonaws.com",
    "secretsmanager.amazonaws.com", "ssm.amazonaws.com",
    "monitoring.amazonaws.com",   "logs.amazonaws.com",
    "cloudtrail.amazonaws.com",   "config.amazonaws.com",
    "sns.amazonaws.com",          "sqs.amazonaws.com",
    "athena.amazonaws.com",       "glue.amazonaws.com",
    "elasticmapreduce.amazonaws.com", "redshift.amazonaws.com",
    "kinesis.amazonaws.com",      "firehose.amazonaws.com",
    "ecs.amazonaws.com",          "eks.amazonaws.com",
    "ecr.amazonaws.com",          "elasticloadbalancing.amazonaws.com",
    "autoscaling.amazonaws.com",  "route53.amazonaws.com",
    "cloudfront.amazonaws.com",   "apigateway.amazonaws.com",
    "appsync.amazonaws.com",      "batch.amazonaws.com",
    "backup.amazonaws.com",       "organizations.amazonaws.com",
    "account.amazonaws.com",      "acm.amazonaws.com",
    "waf.amazonaws.com",          "shield.amazonaws.com",
    "guardduty.amazonaws.com",    "securityhub.amazonaws.com",
    "inspector.amazonaws.com",    "macie.amazonaws.com",
    "detective.amazonaws.com",    "codebuild.amazonaws.com",
    "codecommit.amazonaws.com",   "codedeploy.amazonaws.com",
    "codepipeline.amazonaws.com", "cloud9.amazonaws.com",
    "cloudformation.amazonaws.com", "servicecatalog.amazonaws.com",
    "storagegateway.amazonaws.com", "datasync.amazonaws.com",
    "transfer.amazonaws.com",     "elasticfilesystem.amazonaws.com",
    "fsx.amazonaws.com",          "elasticache.amazonaws.com",
    "memorydb.amazonaws.com",     "neptune.amazonaws.com",
    "docdb.amazonaws.com",        "timestream.amazonaws.com",
    "qldb.amazonaws.com",         "sagemaker.amazonaws.com",
    "comprehend.amazonaws.com",   "translate.amazonaws.com",
    "rekognition.amazonaws.com",  "polly.amazonaws.com",
    "transcribe.amazonaws.com",   "appconfig.amazonaws.com",
    "amplify.amazonaws.com",      "states.amazonaws.com",
    "events.amazonaws.com",       "scheduler.amazonaws.com",
};

constexpr std::string_view kAssociateNames[] = {"AssociateAddress", "AttachVolume"};
constexpr std::string_view kCreateNames[] = {"CreateVolume", "RunInstances", "CreateBucket"};
constexpr std::string_view kDeleteNames[] = {"DeleteVolume", "TerminateInstances", "DeleteObject"};
constexpr std::string_view kDisableNames[] = {"DisableKey", "StopInstances"};
constexpr std::string_view kDownUpNames[] = {"GetObject", "PutObject"};
constexpr std::string_view kEnableNames[] = {"EnableKey", "StartInstances"};
constexpr std::string_view kGetInfoNames[] = {"GetCallerIdentity", "GetBucketLocation"};
constexpr std::string_view kGrantNames[] = {"AttachUserPolicy", "CreateAccessKey"};
constexpr std::string_view kListNames[] = {"DescribeInstances", "ListBuckets",
                                           "DescribeSecurityGroups"};
constexpr std::string_view kLoginNames[] = {"ConsoleLogin", "AssumeRole"};
constexpr std::string_view kLogoutNames[] = {"Logout"};
constexpr std::string_view kModifyNames[] = {"ModifyVolume", "UpdateTable"};
constexpr std::string_view kRemoveNames[] = {"DetachUserPolicy", "DeleteAccessKey"};
constexpr std::string_view kSensitiveNames[] = {"GetSecretValue", "GetParameter"};

std::array<double, kActionCategoryCount> make_weights(
    std::initializer_list<std::pair<ActionCategory, double>> entries) {
    std::array<double, kActionCategoryCount> w{};
    for (const auto& [category, weight] : entries)
        w[static_cast<std::size_t>(category)] = weight;
    return w;
}

std::string user_name(const std::string& role, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "-%02d", index + 1);
    return role + buf;
}

void validate_profile(const RoleProfile& profile) {
    if (profile.name.empty()) throw ConfigError("role profile: name must not be empty");
    if (!(profile.events_per_day > 0.0))
        throw ConfigError("role profile '" + profile.name + "': rate must be positive");
    if (profile.services.empty())
        throw ConfigError("role profile '" + profile.name + "': needs at least one service");
    if (profile.active_start_hour < 0 || profile.active_end_hour > 24 ||
        profile.active_start_hour >= profile.active_end_hour)
        throw ConfigError("role profile '" + profile.name + "': bad active hours");
    bool any_positive = false;
    for (double w : profile.category_weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw ConfigError("role profile '" + profile.name + "': negative category weight");
        if (w > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw ConfigError("role profile '" + profile.name + "': all category weights are zero");
}

AuditEvent make_event(std::int64_t ts, std::string user, std::string_view service,
                      std::string_view name) {
    AuditEvent e;
    e.timestamp = ts;
    e.user_id = std::move(user);
    e.service = service;
    e.event_name = name;
    e.category = categorize(name);
    return e;
}

bool event_less(const AuditEvent& a, const AuditEvent& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    return a.event_name < b.event_name;
}

int default_count(AttackKind kind) {
    switch (kind) {
        case AttackKind::Cryptojacking: return 200;
        case AttackKind::Billing: return 60;
        case AttackKind::LateralMovement: return 120;
        case AttackKind::MonitorExploit: return 66;
        case AttackKind::TargetedServices: return 16;
    }
    return 0;
}

}  // namespace

std::span<const std::string_view> service_catalog() { return kServiceCatalog; }

std::span<const std::string_view> canonical_event_names(ActionCategory category) {
    switch (category) {
        case ActionCategory::AssociateResources: return kAssociateNames;
        case ActionCategory::CreateObject: return kCreateNames;
        case ActionCategory::Delete: return kDeleteNames;
        case ActionCategory::DisableObjects: return kDisableNames;
        case ActionCategory::DownloadUploadObjects: return kDownUpNames;
        case ActionCategory::EnableObjects: return kEnableNames;
        case ActionCategory::GetInfo: return kGetInfoNames;
        case ActionCategory::GrantPermissions: return kGrantNames;
        case ActionCategory::ListResources: return kListNames;
        case ActionCategory::Login: return kLoginNames;
        case ActionCategory::Logout: return kLogoutNames;
        case ActionCategory::ModifyExistingResource: return kModifyNames;
        case ActionCategory::RemovePermissions: return kRemoveNames;
        case ActionCategory::SensitiveInfo: return kSensitiveNames;
    }
    return kGetInfoNames;
}

std::string_view canonical_event_name(ActionCategory category) {
    return canonical_event_names(category).front();
}

std::vector<RoleProfile> default_roles() {
    std::vector<RoleProfile> roles(3);

    // Each role concentrates on a few categories the other roles barely
    // touch, the way scoped IAM policies shake out in practice. Attack
    // scripts lean on the categories a role never uses, so keeping the
    // cores narrow is what makes the compromised accounts stand out.
    roles[0].name = "developer";
    roles[0].category_weights = make_weights({
        {ActionCategory::CreateObject, 0.28},
        {ActionCategory::ModifyExistingResource, 0.24},
        {ActionCategory::DownloadUploadObjects, 0.20},
        {ActionCategory::ListResources, 0.12},
        {ActionCategory::GetInfo, 0.08},
        {ActionCategory::Login, 0.05},
        {ActionCategory::Logout, 0.03},
    });
    roles[0].services = {"s3.amazonaws.com",        "lambda.amazonaws.com",
                         "logs.amazonaws.com",      "cloudformation.amazonaws.com",
                         "dynamodb.amazonaws.com",  "codebuild.amazonaws.com",
                         "codecommit.amazonaws.com", "codedeploy.amazonaws.com",
                         "codepipeline.amazonaws.com", "cloud9.amazonaws.com",
                         "apigateway.amazonaws.com", "appsync.amazonaws.com",
                         "states.amazonaws.com",    "batch.amazonaws.com"};
    roles[0].events_per_day = 40.0;
    roles[0].active_start_hour = 8;
    roles[0].active_end_hour = 18;

    roles[1].name = "monitor";
    roles[1].category_weights = make_weights({
        {ActionCategory::ListResources, 0.48},
        {ActionCategory::GetInfo, 0.40},
        {ActionCategory::Login, 0.07},
        {ActionCategory::Logout, 0.05},
    });
    roles[1].services = {"monitoring.amazonaws.com", "logs.amazonaws.com",
                         "cloudtrail.amazonaws.com", "config.amazonaws.com",
                         "sns.amazonaws.com",        "securityhub.amazonaws.com",
                         "guardduty.amazonaws.com",  "inspector.amazonaws.com"};
    roles[1].events_per_day = 16.0;
    roles[1].active_start_hour = 0;
    roles[1].active_end_hour = 24;

    roles[2].name = "admin";
    roles[2].category_weights = make_weights({
        {ActionCategory::GrantPermissions, 0.28},
        {ActionCategory::RemovePermissions, 0.22},
        {ActionCategory::Delete, 0.18},
        {ActionCategory::ListResources, 0.12},
        {ActionCategory::GetInfo, 0.08},
        {ActionCategory::Login, 0.07},
        {ActionCategory::Logout, 0.05},
    });
    roles[2].services = {"iam.amazonaws.com",     "sts.amazonaws.com",
                         "organizations.amazonaws.com", "kms.amazonaws.com",
                         "ec2.amazonaws.com",     "rds.amazonaws.com",
                         "account.amazonaws.com", "acm.amazonaws.com",
                         "backup.amazonaws.com",  "servicecatalog.amazonaws.com",
                         "transfer.amazonaws.com", "elasticache.amazonaws.com",
                         "memorydb.amazonaws.com"};
    roles[2].events_per_day = 24.0;
    roles[2].active_start_hour = 7;
    roles[2].active_end_hour = 19;

    return roles;
}

AttackKind attack_kind_from_name(std::string_view name) {
    if (name == "cryptojacking") return AttackKind::Cryptojacking;
    if (name == "billing") return AttackKind::Billing;
    if (name == "lateral_movement") return AttackKind::LateralMovement;
    if (name == "monitor_exploit") return AttackKind::MonitorExploit;
    if (name == "targeted_services") return AttackKind::TargetedServices;
    throw ConfigError("unknown attack kind '" + std::string(name) + "'");
}

std::string_view attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::Cryptojacking: return "cryptojacking";
        case AttackKind::Billing: return "billing";
        case AttackKind::LateralMovement: return "lateral_movement";
        case AttackKind::MonitorExploit: return "monitor_exploit";
        case AttackKind::TargetedServices: return "targeted_services";
    }
    return "cryptojacking";
}

Scenario default_scenario(std::uint64_t seed) {
    Scenario s;
    auto base = default_roles();

    RoleProfile platform = base[0];
    platform.name = "platform";
    platform.category_weights = make_weights({
        {ActionCategory::AssociateResources, 0.28},
        {ActionCategory::EnableObjects, 0.20},
        {ActionCategory::DisableObjects, 0.18},
        {ActionCategory::ListResources, 0.14},
        {ActionCategory::GetInfo, 0.10},
        {ActionCategory::Login, 0.05},
        {ActionCategory::Logout, 0.05},
    });
    platform.services = {"ec2.amazonaws.com", "ecs.amazonaws.com", "ecr.amazonaws.com",
                         "elasticloadbalancing.amazonaws.com", "autoscaling.amazonaws.com",
                         "route53.amazonaws.com", "eks.amazonaws.com", "sqs.amazonaws.com",
                         "events.amazonaws.com",  "scheduler.amazonaws.com",
                         "cloudfront.amazonaws.com", "waf.amazonaws.com",
                         "shield.amazonaws.com",  "elasticfilesystem.amazonaws.com"};
    platform.events_per_day = 30.0;
    platform.active_start_hour = 6;
    platform.active_end_hour = 20;

    RoleProfile data = base[0];
    data.name = "data-engineer";
    data.category_weights = make_weights({
        {ActionCategory::DownloadUploadObjects, 0.38},
        {ActionCategory::SensitiveInfo, 0.20},
        {ActionCategory::CreateObject, 0.14},
        {ActionCategory::ModifyExistingResource, 0.10},
        {ActionCategory::ListResources, 0.07},
        {ActionCategory::GetInfo, 0.05},
        {ActionCategory::Login, 0.04},
        {ActionCategory::Logout, 0.02},
    });
    data.services = {"s3.amazonaws.com",       "athena.amazonaws.com",
                     "glue.amazonaws.com",     "elasticmapreduce.amazonaws.com",
                     "dynamodb.amazonaws.com", "kinesis.amazonaws.com",
                     "secretsmanager.amazonaws.com", "kms.amazonaws.com",
                     "redshift.amazonaws.com", "firehose.amazonaws.com",
                     "sagemaker.amazonaws.com", "timestream.amazonaws.com",
                     "qldb.amazonaws.com",     "neptune.amazonaws.com",
                     "docdb.amazonaws.com"};
    data.events_per_day = 36.0;

    s.profiles = {base[0], platform, base[1], base[2], data};
    s.users_per_role = 5;
    s.days = 32;
    s.start_ts = *parse_iso8601_utc("2021-03-01T00:00:00Z");
    s.seed = seed;

    s.attacks = {
        {AttackKind::TargetedServices, {"monitor-03"}, 6, 0},
        {AttackKind::MonitorExploit, {"admin-03"}, 10, 0},
        {AttackKind::Billing, {"monitor-02"}, 14, 0},
        {AttackKind::Cryptojacking, {"developer-01"}, 18, 0},
        {AttackKind::LateralMovement,
         {"developer-02", "admin-01", "admin-02", "platform-01"},
         22,
         0},
    };
    return s;
}

std::vector<AuditEvent> gen_legit(const std::vector<RoleProfile>& profiles, int users_per_role,
                                  int days, std::uint64_t seed, std::int64_t start_ts) {
    if (profiles.empty()) throw InputError("gen_legit: empty profile set");
    if (users_per_role < 1) throw ConfigError("gen_legit: users_per_role must be >= 1");
    if (days < 1) throw ConfigError("gen_legit: days must be >= 1");
    std::set<std::string> names;
    for (const auto& profile : profiles) {
        validate_profile(profile);
        if (!names.insert(profile.name).second)
            throw ConfigError("gen_legit: duplicate role name '" + profile.name + "'");
    }

    std::vector<AuditEvent> events;
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        const auto& profile = profiles[pi];
        AliasTable categories(std::vector<double>(profile.category_weights.begin(),
                                                  profile.category_weights.end()));
        const double active_seconds =
            static_cast<double>(profile.active_end_hour - profile.active_start_hour) * 3600.0;
        for (int ui = 0; ui < users_per_role; ++ui) {
            Rng rng(mix_seed(seed, 0x9E37 + pi, static_cast<std::uint64_t>(ui)));
            const std::string user = user_name(profile.name, ui);
            for (int day = 0; day < days; ++day) {
                const std::int64_t day_base = start_ts + static_cast<std::int64_t>(day) * 86400 +
                                              profile.active_start_hour * 3600;
                const std::uint64_t n = rng.poisson(profile.events_per_day);
                for (std::uint64_t k = 0; k < n; ++k) {
                    const auto category = static_cast<ActionCategory>(categories.sample(rng));
                    const auto& service =
                        profile.services[rng.uniform_index(profile.services.size())];
                    auto pool = canonical_event_names(category);
                    const auto name = pool[rng.uniform_index(pool.size())];
                    const std::int64_t ts =
                        day_base + static_cast<std::int64_t>(rng.uniform01() * active_seconds);
                    events.push_back(make_event(ts, user, service, name));
                }
            }
        }
    }
    std::sort(events.begin(), events.end(), [](const AuditEvent& a, const AuditEvent& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        if (a.event_name != b.event_name) return a.event_name < b.event_name;
        return a.service < b.service;
    });
    return events;
}

namespace {

struct BurstWriter {
    std::vector<AuditEvent>& out;
    const std::string& user;

    void emit(std::int64_t ts, std::string_view service, std::string_view name, int times,
              Rng& rng, std::int64_t spacing, std::int64_t jitter) {
        for (int i = 0; i < times; ++i) {
            const std::int64_t j =
                jitter > 0 ? static_cast<std::int64_t>(rng.uniform_index(jitter)) : 0;
            out.push_back(make_event(ts + i * spacing + j, user, service, name));
        }
    }
};

}  // namespace

AttackResult inject_attack(const AttackScript& script, std::int64_t start_ts,
                           std::uint64_t seed) {
    const std::size_t expected = script.kind == AttackKind::LateralMovement ? 4 : 1;
    if (script.attackers.size() != expected)
        throw ConfigError(std::string("attack '") + std::string(attack_kind_name(script.kind)) +
                          "': expected " + std::to_string(expected) + " attacker(s), got " +
                          std::to_string(script.attackers.size()));
    if (std::set<std::string>(script.attackers.begin(), script.attackers.end()).size() !=
        script.attackers.size())
        throw ConfigError("attack: duplicate attacker user");
    if (script.day < 1)
        throw ConfigError("attack: day must be >= 1 so legitimate history precedes it");
    int count = script.count > 0 ? script.count : default_count(script.kind);
    if (script.kind == AttackKind::TargetedServices && count > 20)
        throw ConfigError("targeted_services: more than 20 probe events defeats the point");
    if (script.kind == AttackKind::LateralMovement && count < 30)
        throw ConfigError("lateral_movement: needs at least 30 calls per user");
    if (script.kind == AttackKind::MonitorExploit &&
        count > static_cast<int>(std::size(kServiceCatalog)))
        throw ConfigError("monitor_exploit: scan count exceeds the service catalog");

    Rng rng(mix_seed(seed, 0xA77A, static_cast<std::uint64_t>(script.day)));
    const std::int64_t day_base = start_ts + static_cast<std::int64_t>(script.day) * 86400;
    std::vector<AuditEvent> events;

    switch (script.kind) {
        case AttackKind::Cryptojacking: {
            BurstWriter w{events, script.attackers[0]};
            const std::int64_t burst = day_base + 3600;  // 01:00, two hours
            for (int i = 0; i < count; ++i) {
                const std::int64_t t = burst + (7200LL * i) / count;
                w.emit(t, "ec2.amazonaws.com", "RunInstances", 1, rng, 0, 0);
                w.emit(t + 45 + static_cast<std::int64_t>(rng.uniform_index(300)),
                       "ec2.amazonaws.com", "TerminateInstances", 1, rng, 0, 0);
            }
            break;
        }
        case AttackKind::Billing: {
            BurstWriter w{events, script.attackers[0]};
            const std::int64_t burst = day_base + 7200;  // 02:00, one hour
            for (int i = 0; i < count; ++i)
                w.emit(burst + (3600LL * i) / count, "ec2.amazonaws.com", "RunInstances", 1, rng,
                       0, 30);
            break;
        }
        case AttackKind::LateralMovement: {
            // one compromised account per half hour: a developer key mints
            // fresh credentials, one admin session drains the secrets vault,
            // another bridges an attacker VPC into the private DNS zones,
            // and a platform account hauls buckets out at the end
            const std::int64_t t0 = day_base + 3600;
            const int half = (count - 10) / 2;
            const int rest = count - 10 - half;
            {
                BurstWriter w{events, script.attackers[0]};
                w.emit(t0, "sts.amazonaws.com", "AssumeRole", 10, rng, 20, 8);
                w.emit(t0 + 300, "iam.amazonaws.com", "CreateAccessKey", half, rng, 20, 8);
                w.emit(t0 + 900, "iam.amazonaws.com", "AttachUserPolicy", rest, rng, 20, 8);
            }
            {
                BurstWriter w{events, script.attackers[1]};
                const std::int64_t t1 = t0 + 1800;
                w.emit(t1, "sts.amazonaws.com", "AssumeRole", 10, rng, 20, 8);
                w.emit(t1 + 300, "secretsmanager.amazonaws.com", "GetSecretValue", count - 10,
                       rng, 20, 8);
            }
            {
                BurstWriter w{events, script.attackers[2]};
                const std::int64_t t2 = t0 + 3600;
                w.emit(t2, "sts.amazonaws.com", "AssumeRole", 10, rng, 20, 8);
                w.emit(t2 + 300, "route53.amazonaws.com", "AssociateVPCWithHostedZone",
                       count - 10, rng, 20, 8);
            }
            {
                BurstWriter w{events, script.attackers[3]};
                const std::int64_t t3 = t0 + 5400;
                w.emit(t3, "sts.amazonaws.com", "AssumeRole", 10, rng, 20, 8);
                w.emit(t3 + 300, "s3.amazonaws.com", "GetObject", count - 10, rng, 20, 8);
            }
            break;
        }
        case AttackKind::MonitorExploit: {
            BurstWriter w{events, script.attackers[0]};
            const std::int64_t burst = day_base + 3600;
            for (int i = 0; i < count; ++i) {
                const auto& service = kServiceCatalog[i];
                const std::int64_t t = burst + 80LL * i;
                w.emit(t, service, "ListTagsForResource", 1, rng, 10, 5);
                w.emit(t + 30, service, "GetResourcePolicy", 2, rng, 10, 5);
            }
            break;
        }
        case AttackKind::TargetedServices: {
            BurstWriter w{events, script.attackers[0]};
            const std::int64_t burst = day_base + 7200;  // 02:00, slow probes over two hours
            for (int i = 0; i < count; ++i) {
                const std::int64_t t =
                    burst + (7200LL * i) / count + static_cast<std::int64_t>(rng.uniform_index(60));
                if (i % 8 < 5)
                    w.emit(t, "secretsmanager.amazonaws.com", "GetSecretValue", 1, rng, 0, 0);
                else
                    w.emit(t, "kms.amazonaws.com", "Decrypt", 1, rng, 0, 0);
            }
            break;
        }
    }

    std::sort(events.begin(), events.end(), event_less);
    AttackResult result;
    result.truth.attack_name = attack_kind_name(script.kind);
    result.truth.attackers.insert(script.attackers.begin(), script.attackers.end());
    result.truth.start_ts = events.front().timestamp;
    result.truth.end_ts = events.back().timestamp;
    result.events = std::move(events);
    return result;
}

std::vector<AuditEvent> merge(std::vector<std::vector<AuditEvent>> streams) {
    std::vector<AuditEvent> merged;
    for (auto& stream : streams) {
        if (merged.empty()) {
            merged = std::move(stream);
            continue;
        }
        std::vector<AuditEvent> next;
        next.reserve(merged.size() + stream.size());
        std::merge(merged.begin(), merged.end(), stream.begin(), stream.end(),
                   std::back_inserter(next), event_less);
        merged = std::move(next);
    }
    return merged;
}

GeneratedScenario generate_scenario(const Scenario& scenario) {
    if (scenario.days < 1) throw ConfigError("scenario: days must be >= 1");

    std::set<std::string> valid_users;
    for (const auto& profile : scenario.profiles)
        for (int ui = 0; ui < scenario.users_per_role; ++ui)
            valid_users.insert(user_name(profile.name, ui));

    std::set<int> attack_days;
    for (const auto& script : scenario.attacks) {
        if (script.day >= scenario.days)
            throw ConfigError("scenario: attack day " + std::to_string(script.day) +
                              " is outside the run");
        if (!attack_days.insert(script.day).second)
            throw ConfigError("scenario: two attacks share day " + std::to_string(script.day));
        for (const auto& attacker : script.attackers)
            if (!valid_users.count(attacker))
                throw ConfigError("scenario: attacker '" + attacker +
                                  "' is not one of the generated users");
    }

    std::vector<std::vector<AuditEvent>> streams;
    streams.push_back(gen_legit(scenario.profiles, scenario.users_per_role, scenario.days,
                                scenario.seed, scenario.start_ts));
    GeneratedScenario out;
    for (const auto& script : scenario.attacks) {
        AttackResult attack = inject_attack(script, scenario.start_ts, scenario.seed);
        streams.push_back(std::move(attack.events));
        out.labels.push_back(std::move(attack.truth));
    }
    out.events = merge(std::move(streams));
    return out;
}

std::string scenario_to_json(const Scenario& scenario) {
    nlohmann::ordered_json j;
    j["seed"] = scenario.seed;
    j["days"] = scenario.days;
    j["users_per_role"] = scenario.users_per_role;
    j["start"] = format_iso8601_utc(scenario.start_ts);
    auto profiles = nlohmann::ordered_json::array();
    for (const auto& p : scenario.profiles) {
        nlohmann::ordered_json pj;
        pj["name"] = p.name;
        pj["rate"] = p.events_per_day;
        pj["active_hours"] = {p.active_start_hour, p.active_end_hour};
        pj["services"] = p.services;
        nlohmann::ordered_json weights;
        for (auto category : all_action_categories()) {
            const double w = p.category_weights[static_cast<std::size_t>(category)];
            if (w > 0.0) weights[std::string(to_string(category))] = w;
        }
        pj["weights"] = std::move(weights);
        profiles.push_back(std::move(pj));
    }
    j["profiles"] = std::move(profiles);
    auto attacks = nlohmann::ordered_json::array();
    for (const auto& a : scenario.attacks) {
        nlohmann::ordered_json aj;
        aj["kind"] = std::string(attack_kind_name(a.kind));
        aj["users"] = a.attackers;
        aj["day"] = a.day;
        if (a.count > 0) aj["count"] = a.count;
        attacks.push_back(std::move(aj));
    }
    j["attacks"] = std::move(attacks);
    return j.dump(2) + "\n";
}

Scenario parse_scenario_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");

    Scenario s;
    s.seed = j.value("seed", std::uint64_t{1});
    s.days = j.value("days", 1);
    s.users_per_role = j.value("users_per_role", 1);
    if (j.contains("start")) {
        auto ts = parse_iso8601_utc(j["start"].get<std::string>());
        if (!ts) throw ConfigError("scenario: bad start timestamp");
        s.start_ts = *ts;
    }
    if (!j.contains("profiles") || !j["profiles"].is_array() || j["profiles"].empty())
        throw ConfigError("scenario: needs a nonempty profiles array");
    for (const auto& pj : j["profiles"]) {
        RoleProfile p;
        p.name = pj.value("name", std::string());
        p.events_per_day = pj.value("rate", 0.0);
        if (pj.contains("active_hours")) {
            p.active_start_hour = pj["active_hours"].at(0).get<int>();
            p.active_end_hour = pj["active_hours"].at(1).get<int>();
        }
        if (pj.contains("services"))
            p.services = pj["services"].get<std::vector<std::string>>();
        if (pj.contains("weights")) {
            for (const auto& [key, value] : pj["weights"].items()) {
                auto category = parse_action_category(key);
                if (!category)
                    throw ConfigError("scenario: unknown category '" + key + "' in weights");
                p.category_weights[static_cast<std::size_t>(*category)] = value.get<double>();
            }
        }
        validate_profile(p);
        s.profiles.push_back(std::move(p));
    }
    if (j.contains("attacks")) {
        for (const auto& aj : j["attacks"]) {
            AttackScript a;
            a.kind = attack_kind_from_name(aj.value("kind", std::string()));
            if (aj.contains("users"))
                a.attackers = aj["users"].get<std::vector<std::string>>();
            a.day = aj.value("day", 1);
            a.count = aj.value("count", 0);
            s.attacks.push_back(std::move(a));
        }
    }
    return s;
}

std::string events_to_cloudtrail_json(std::span<const AuditEvent> events) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    std::size_t counter = 0;
    for (const auto& e : events) {
        const std::string tag = e.user_id + "|" + std::to_string(e.timestamp) + "|" +
                                e.event_name + "|" + std::to_string(counter++);
        const std::string digest = fnv1a_hex(tag);
        nlohmann::ordered_json r;
        r["eventVersion"] = "1.08";
        r["eventTime"] = format_iso8601_utc(e.timestamp);
        r["eventSource"] = e.service;
        r["eventName"] = e.event_name;
        r["eventType"] = "AwsApiCall";
        r["awsRegion"] = "us-east-1";
        r["sourceIPAddress"] =
            "198.51.100." + std::to_string(1 + (fnv1a_hex(e.user_id)[0] % 16) * 12);
        nlohmann::ordered_json identity;
        identity["type"] = "IAMUser";
        identity["principalId"] = "AIDA" + fnv1a_hex(e.user_id).substr(0, 12);
        identity["userName"] = e.user_id;
        identity["accessKeyId"] = "AKIA" + fnv1a_hex(e.user_id).substr(4, 12);
        r["userIdentity"] = std::move(identity);
        r["eventID"] = digest.substr(0, 8) + "-" + digest.substr(8, 4) + "-" +
                       digest.substr(12, 4) + "-0000-000000000000";
        r["recipientAccountId"] = "123456789012";
        if (e.error_code) r["errorCode"] = *e.error_code;
        records.push_back(std::move(r));
    }
    nlohmann::ordered_json root;
    root["Records"] = std::move(records);
    return root.dump(2) + "\n";
}

}  // namespace csgad
