#include "csgad/ingest.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "csgad/errors.hpp"
#include "csgad/timeparse.hpp"
#include "csgad/util.hpp"

namespace csgad {

namespace {

using nlohmann::json;

std::string identity_from(const json& record) {
    if (auto it = record.find("userIdentity"); it != record.end() && it->is_object()) {
        for (const char* key : {"arn", "userName", "accessKeyId", "principalId"}) {
            if (auto f = it->find(key); f != it->end() && f->is_string()) {
                auto value = f->get<std::string>();
                if (!value.empty()) return value;
            }
        }
        // sessionContext carries the issuer identity for role sessions
        if (auto sc = it->find("sessionContext"); sc != it->end() && sc->is_object()) {
            if (auto si = sc->find("sessionIssuer"); si != sc->end() && si->is_object()) {
                for (const char* key : {"arn", "userName", "principalId"}) {
                    if (auto f = si->find(key); f != si->end() && f->is_string()) {
                        auto value = f->get<std::string>();
                        if (!value.empty()) return value;
                    }
                }
            }
        }
    }
    return {};
}

std::string string_field(const json& record, const char* key) {
    if (auto it = record.find(key); it != record.end() && it->is_string())
        return it->get<std::string>();
    return {};
}

// One CloudTrail record object -> event, or false when skippable fields are
// missing. Throws only on structural surprises that indicate a non-record.
bool record_to_event(const json& record, const CategoryRules& rules, AuditEvent& out) {
    if (!record.is_object()) return false;

    // normalized NDJSON form round-trips through here
    if (record.contains("ts") && record.contains("user") && record.contains("event") &&
        record.contains("service")) {
        const auto ts = parse_iso8601_utc(string_field(record, "ts"));
        const std::string user = string_field(record, "user");
        const std::string service = string_field(record, "service");
        const std::string event_name = string_field(record, "event");
        if (!ts || user.empty() || service.empty() || event_name.empty()) return false;
        out.timestamp = *ts;
        out.user_id = user;
        out.service = service;
        out.event_name = event_name;
        if (auto category = parse_action_category(string_field(record, "category")))
            out.category = *category;
        else
            out.category = rules.categorize(event_name);
        const std::string error_code = string_field(record, "error_code");
        out.error_code = error_code.empty() ? std::nullopt : std::make_optional(error_code);
        return true;
    }

    const auto ts = parse_iso8601_utc(string_field(record, "eventTime"));
    const std::string event_name = string_field(record, "eventName");
    const std::string service = string_field(record, "eventSource");
    if (!ts || event_name.empty() || service.empty()) return false;
    const std::string user = identity_from(record);
    if (user.empty()) return false;

    out.timestamp = *ts;
    out.user_id = user;
    out.service = service;
    out.event_name = event_name;
    out.category = rules.categorize(event_name);
    const std::string error_code = string_field(record, "errorCode");
    out.error_code = error_code.empty() ? std::nullopt : std::make_optional(error_code);
    return true;
}

void consume_record(const json& record, const CategoryRules& rules, ParseResult& result) {
    AuditEvent event;
    if (record_to_event(record, rules, event))
        result.events.push_back(std::move(event));
    else
        ++result.skipped;
}

bool looks_like_ndjson(std::string_view text) {
    // A single JSON document parses in one shot; NDJSON has a second
    // non-blank line starting another object.
    const auto first_newline = text.find('\n');
    if (first_newline == std::string_view::npos) return false;
    auto rest = text.substr(first_newline + 1);
    const auto next = rest.find_first_not_of(" \t\r\n");
    return next != std::string_view::npos && rest[next] == '{';
}

}  // namespace

ParseResult parse_cloudtrail(std::string_view text, const CategoryRules& rules) {
    ParseResult result;

    const auto start = text.find_first_not_of(" \t\r\n");
    if (start == std::string_view::npos) throw InputError("no events: input is empty");

    bool parsed_whole = false;
    if (!looks_like_ndjson(text) || text[start] == '[') {
        json doc;
        try {
            doc = json::parse(text);
            parsed_whole = true;
        } catch (const json::parse_error& e) {
            if (text[start] == '[')
                throw InputError("malformed JSON at byte " + std::to_string(e.byte) + ": " +
                                 e.what());
            // fall through to the NDJSON path
        }
        if (parsed_whole) {
            const json* records = nullptr;
            if (doc.is_object()) {
                if (auto it = doc.find("Records"); it != doc.end() && it->is_array())
                    records = &*it;
                else if (doc.contains("eventTime") || doc.contains("ts")) {
                    consume_record(doc, rules, result);  // single record document
                } else {
                    throw InputError("malformed input: expected a top-level Records array");
                }
            } else if (doc.is_array()) {
                records = &doc;
            } else {
                throw InputError("malformed input: expected an object or array of records");
            }
            if (records)
                for (const auto& record : *records) consume_record(record, rules, result);
        }
    }

    if (!parsed_whole) {
        std::size_t offset = 0;
        std::string_view rest = text;
        while (!rest.empty()) {
            const auto eol = rest.find('\n');
            const auto line = eol == std::string_view::npos ? rest : rest.substr(0, eol);
            const auto content = line.find_first_not_of(" \t\r");
            if (content != std::string_view::npos) {
                json record;
                try {
                    record = json::parse(line);
                } catch (const json::parse_error& e) {
                    throw InputError("malformed JSON at byte " +
                                     std::to_string(offset + e.byte) + ": " + e.what());
                }
                consume_record(record, rules, result);
            }
            if (eol == std::string_view::npos) break;
            offset += eol + 1;
            rest = rest.substr(eol + 1);
        }
    }

    if (result.events.empty()) throw InputError("no events: record set is empty");

    std::stable_sort(result.events.begin(), result.events.end(),
                     [](const AuditEvent& a, const AuditEvent& b) {
                         return a.timestamp < b.timestamp;
                     });
    return result;
}

ParseResult parse_cloudtrail_file(const std::string& path, const CategoryRules& rules) {
    return parse_cloudtrail(read_file(path), rules);
}

std::string to_ndjson(std::span<const AuditEvent> events) {
    std::string out;
    for (const auto& event : events) {
        json line = {
            {"ts", format_iso8601_utc(event.timestamp)},
            {"user", event.user_id},
            {"service", event.service},
            {"event", event.event_name},
            {"category", std::string(to_string(event.category))},
        };
        if (event.error_code) line["error_code"] = *event.error_code;
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace csgad
