#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csgad/events.hpp"

namespace csgad {

/// Maps raw API event names to action categories. Total function:
/// exact-name overrides are checked first, then verb-prefix rules in fixed
/// order, then the GetInfo fallback. Immutable after construction and safe
/// to share across threads.
class CategoryRules {
public:
    /// Built-in rule set (exact overrides for security-salient calls plus
    /// the verb-prefix table).
    static const CategoryRules& defaults();

    /// Copy of this rule set with extra exact-name overrides layered on top
    /// (they win over both built-in overrides and prefix rules).
    CategoryRules with_overrides(
        const std::vector<std::pair<std::string, ActionCategory>>& overrides) const;

    /// Parse a two-column CSV "event_name,category" (header optional) into
    /// an override list. Throws InputError on unknown category names.
    static std::vector<std::pair<std::string, ActionCategory>> parse_override_csv(
        std::string_view csv_text);

    ActionCategory categorize(std::string_view event_name) const;

private:
    CategoryRules() = default;

    std::unordered_map<std::string, ActionCategory> exact_;
};

/// categorize with the built-in rules.
ActionCategory categorize(std::string_view event_name);

}  // namespace csgad
