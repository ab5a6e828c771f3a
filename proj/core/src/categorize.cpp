#include "csgad/categorize.hpp"

#include <sstream>

#include "csgad/errors.hpp"
#include "csgad/util.hpp"

namespace csgad {

namespace {

constexpr std::string_view kCategoryNames[kActionCategoryCount] = {
    "AssociateResources", "CreateObject",   "Delete",
    "DisableObjects",     "DownloadUploadObjects", "EnableObjects",
    "GetInfo",            "GrantPermissions", "ListResources",
    "Login",              "Logout",          "ModifyExistingResource",
    "RemovePermissions",  "SensitiveInfo",
};

struct PrefixRule {
    std::string_view prefix;
    ActionCategory category;
};

// Checked in order after the exact-name overrides. The broad Get* rule sits
// after List*/Describe* so read-style scans land in ListResources.
constexpr PrefixRule kPrefixRules[] = {
    {"Create", ActionCategory::CreateObject},
    {"Run", ActionCategory::CreateObject},
    {"Delete", ActionCategory::Delete},
    {"Terminate", ActionCategory::Delete},
    {"List", ActionCategory::ListResources},
    {"Describe", ActionCategory::ListResources},
    {"Get", ActionCategory::GetInfo},
    {"Modify", ActionCategory::ModifyExistingResource},
    {"Update", ActionCategory::ModifyExistingResource},
    {"Put", ActionCategory::ModifyExistingResource},
    {"Enable", ActionCategory::EnableObjects},
    {"Disable", ActionCategory::DisableObjects},
    {"Associate", ActionCategory::AssociateResources},
    {"Attach", ActionCategory::AssociateResources},
    {"Detach", ActionCategory::RemovePermissions},
    {"Revoke", ActionCategory::RemovePermissions},
};

struct ExactRule {
    std::string_view name;
    ActionCategory category;
};

// Security-salient calls whose prefix rule would mislabel them.
constexpr ExactRule kExactRules[] = {
    // credential/session acquisition
    {"AssumeRole", ActionCategory::Login},
    {"AssumeRoleWithSAML", ActionCategory::Login},
    {"AssumeRoleWithWebIdentity", ActionCategory::Login},
    {"ConsoleLogin", ActionCategory::Login},
    {"GetSessionToken", ActionCategory::Login},
    {"GetFederationToken", ActionCategory::Login},
    {"SwitchRole", ActionCategory::Login},
    // secret material
    {"GetSecretValue", ActionCategory::SensitiveInfo},
    {"BatchGetSecretValue", ActionCategory::SensitiveInfo},
    {"GetPasswordData", ActionCategory::SensitiveInfo},
    {"GetParameter", ActionCategory::SensitiveInfo},
    {"GetParameters", ActionCategory::SensitiveInfo},
    {"GetParametersByPath", ActionCategory::SensitiveInfo},
    {"Decrypt", ActionCategory::SensitiveInfo},
    // policy documents spell out the security posture, so reads of them
    // are treated like reads of secret material
    {"GetResourcePolicy", ActionCategory::SensitiveInfo},
    {"GetBucketPolicy", ActionCategory::SensitiveInfo},
    {"GetKeyPolicy", ActionCategory::SensitiveInfo},
    {"GetRolePolicy", ActionCategory::SensitiveInfo},
    {"GetUserPolicy", ActionCategory::SensitiveInfo},
    // object transfer
    {"GetObject", ActionCategory::DownloadUploadObjects},
    {"PutObject", ActionCategory::DownloadUploadObjects},
    {"CopyObject", ActionCategory::DownloadUploadObjects},
    {"UploadPart", ActionCategory::DownloadUploadObjects},
    {"CreateMultipartUpload", ActionCategory::DownloadUploadObjects},
    {"CompleteMultipartUpload", ActionCategory::DownloadUploadObjects},
    {"DownloadDBLogFilePortion", ActionCategory::DownloadUploadObjects},
    // permission grants
    {"AttachRolePolicy", ActionCategory::GrantPermissions},
    {"AttachUserPolicy", ActionCategory::GrantPermissions},
    {"AttachGroupPolicy", ActionCategory::GrantPermissions},
    {"PutRolePolicy", ActionCategory::GrantPermissions},
    {"PutUserPolicy", ActionCategory::GrantPermissions},
    {"PutGroupPolicy", ActionCategory::GrantPermissions},
    {"PutBucketPolicy", ActionCategory::GrantPermissions},
    {"PutKeyPolicy", ActionCategory::GrantPermissions},
    {"AuthorizeSecurityGroupIngress", ActionCategory::GrantPermissions},
    {"AuthorizeSecurityGroupEgress", ActionCategory::GrantPermissions},
    {"AddUserToGroup", ActionCategory::GrantPermissions},
    {"CreateAccessKey", ActionCategory::GrantPermissions},
    // permission removal
    {"DeletePolicy", ActionCategory::RemovePermissions},
    {"DeleteRolePolicy", ActionCategory::RemovePermissions},
    {"DeleteUserPolicy", ActionCategory::RemovePermissions},
    {"DeleteGroupPolicy", ActionCategory::RemovePermissions},
    {"DeleteBucketPolicy", ActionCategory::RemovePermissions},
    {"DeleteAccessKey", ActionCategory::RemovePermissions},
    {"RemoveUserFromGroup", ActionCategory::RemovePermissions},
    {"RemoveRoleFromInstanceProfile", ActionCategory::RemovePermissions},
    {"DeactivateMFADevice", ActionCategory::RemovePermissions},
    // lifecycle state
    {"StartInstances", ActionCategory::EnableObjects},
    {"StartDBInstance", ActionCategory::EnableObjects},
    {"StopInstances", ActionCategory::DisableObjects},
    {"StopDBInstance", ActionCategory::DisableObjects},
    {"RebootInstances", ActionCategory::ModifyExistingResource},
    {"AddRoleToInstanceProfile", ActionCategory::AssociateResources},
};

}  // namespace

std::string_view to_string(ActionCategory category) {
    return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<ActionCategory> parse_action_category(std::string_view name) {
    for (std::size_t i = 0; i < kActionCategoryCount; ++i) {
        if (kCategoryNames[i] == name) return static_cast<ActionCategory>(i);
    }
    return std::nullopt;
}

const CategoryRules& CategoryRules::defaults() {
    static const CategoryRules instance = [] {
        CategoryRules rules;
        for (const auto& rule : kExactRules) rules.exact_.emplace(rule.name, rule.category);
        return rules;
    }();
    return instance;
}

CategoryRules CategoryRules::with_overrides(
    const std::vector<std::pair<std::string, ActionCategory>>& overrides) const {
    CategoryRules rules(*this);
    for (const auto& [name, category] : overrides) rules.exact_[name] = category;
    return rules;
}

std::vector<std::pair<std::string, ActionCategory>> CategoryRules::parse_override_csv(
    std::string_view csv_text) {
    std::vector<std::pair<std::string, ActionCategory>> overrides;
    std::istringstream in{std::string(csv_text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = csv_split(line);
        if (fields.size() != 2)
            throw InputError("category override line " + std::to_string(line_no) +
                             ": expected 2 fields");
        if (line_no == 1 && fields[0] == "event_name") continue;  // header
        auto category = parse_action_category(fields[1]);
        if (!category)
            throw InputError("category override line " + std::to_string(line_no) +
                             ": unknown category '" + fields[1] + "'");
        overrides.emplace_back(fields[0], *category);
    }
    return overrides;
}

ActionCategory CategoryRules::categorize(std::string_view event_name) const {
    if (auto it = exact_.find(std::string(event_name)); it != exact_.end()) return it->second;
    for (const auto& rule : kPrefixRules) {
        if (event_name.substr(0, rule.prefix.size()) == rule.prefix) return rule.category;
    }
    if (event_name.find("Logout") != std::string_view::npos) return ActionCategory::Logout;
    return ActionCategory::GetInfo;
}

ActionCategory categorize(std::string_view event_name) {
    return CategoryRules::defaults().categorize(event_name);
}

}  // namespace csgad
