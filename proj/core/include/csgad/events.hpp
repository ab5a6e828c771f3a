#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace csgad {

/// Closed set of 14 action categories every audit event maps into.
enum class ActionCategory : std::uint8_t {
    AssociateResources,
    CreateObject,
    Delete,
    DisableObjects,
    DownloadUploadObjects,
    EnableObjects,
    GetInfo,
    GrantPermissions,
    ListResources,
    Login,
    Logout,
    ModifyExistingResource,
    RemovePermissions,
    SensitiveInfo,
};

inline constexpr std::size_t kActionCategoryCount = 14;

std::string_view to_string(ActionCategory category);
std::optional<ActionCategory> parse_action_category(std::string_view name);

inline constexpr std::array<ActionCategory, kActionCategoryCount> all_action_categories() {
    return {ActionCategory::AssociateResources, ActionCategory::CreateObject,
            ActionCategory::Delete,             ActionCategory::DisableObjects,
            ActionCategory::DownloadUploadObjects, ActionCategory::EnableObjects,
            ActionCategory::GetInfo,            ActionCategory::GrantPermissions,
            ActionCategory::ListResources,      ActionCategory::Login,
            ActionCategory::Logout,             ActionCategory::ModifyExistingResource,
            ActionCategory::RemovePermissions,  ActionCategory::SensitiveInfo};
}

/// One normalized API-call record. Timestamps are UTC epoch seconds.
struct AuditEvent {
    std::int64_t timestamp = 0;
    std::string user_id;
    std::string service;
    std::string event_name;
    ActionCategory category = ActionCategory::GetInfo;
    std::optional<std::string> error_code;
};

}  // namespace csgad
