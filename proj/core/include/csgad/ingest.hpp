#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csgad/categorize.hpp"
#include "csgad/events.hpp"

namespace csgad {

struct ParseResult {
    std::vector<AuditEvent> events;  // ascending timestamp
    std::size_t skipped = 0;         // records missing required fields / identity
};

/// Parse CloudTrail-format JSON: a {"Records":[...]} document, a bare JSON
/// array of records, or newline-delimited record objects. Normalized NDJSON
/// produced by to_ndjson() is accepted too, so parse∘serialize∘parse is
/// idempotent.
///
/// user_id precedence: userIdentity.arn, then userName, then accessKeyId,
/// then principalId; records with none are skipped and counted.
/// Throws InputError on malformed JSON (with byte offset) and when the
/// parsed record set is empty ("no events").
ParseResult parse_cloudtrail(std::string_view text,
                             const CategoryRules& rules = CategoryRules::defaults());

ParseResult parse_cloudtrail_file(const std::string& path,
                                  const CategoryRules& rules = CategoryRules::defaults());

/// Normalized NDJSON, one event per line:
/// {"ts":"...","user":"...","service":"...","event":"...","category":"...","error_code":...}
std::string to_ndjson(std::span<const AuditEvent> events);

}  // namespace csgad
