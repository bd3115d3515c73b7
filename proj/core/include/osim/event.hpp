#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "osim/action.hpp"

namespace osim {

// One platform action: who did it, which conversation, which parent,
// what kind of action, and when (epoch seconds, UTC, 1 s resolution).
// For an initiation event node_id == parent_id == root_id.
struct Event {
    std::string user_id;
    std::string node_id;
    std::string parent_id;
    std::string root_id;
    ActionType action = ActionType::Initiate;
    int64_t timestamp = 0;

    bool operator==(const Event&) const = default;
};

// Time-ordered event sequence over a half-open interval [start, end).
struct EventLog {
    std::vector<Event> events; // sorted non-decreasing by timestamp
    int64_t start = 0;
    int64_t end = 0;                // exclusive
    int64_t resolution = 3600;      // bucket width in seconds

    int64_t bucket_count() const {
        if (end <= start) return 0;
        return (end - start + resolution - 1) / resolution;
    }
    int64_t bucket_of(int64_t ts) const { return (ts - start) / resolution; }
};

// Hourly (by default) activity counts for one user and one action type.
struct ActivitySeries {
    std::string user_id;
    ActionType action = ActionType::Initiate;
    std::vector<int32_t> counts;
};

// Interned form of an event log: every id mapped to a dense index so the
// simulator and the cascade analytics never touch strings in hot paths.
// parent/root encoding: >= 0 is a node index; -1 means the field was empty;
// <= -2 means the id was named but no such event exists (dangling), and
// missing_ids[-(v) - 2] holds the original string.
struct CompactEvent {
    int32_t user = -1;
    int32_t node = -1;
    int32_t parent = -1;
    int32_t root = -1;
    ActionType action = ActionType::Initiate;
    int64_t timestamp = 0;
};

struct CompactLog {
    std::vector<CompactEvent> events;
    std::vector<std::string> users;       // user index -> id
    std::vector<std::string> node_ids;    // node index -> id; node i belongs to events[i]
    std::vector<std::string> missing_ids; // dangling parent/root ids, see CompactEvent
    int64_t start = 0;
    int64_t end = 0;
    int64_t resolution = 3600;

    int64_t bucket_count() const {
        if (end <= start) return 0;
        return (end - start + resolution - 1) / resolution;
    }
};

// Interns user/node ids and resolves parent/root references. Parents or
// roots that never appear as a node_id in the log stay -1; the validation
// report, not this function, decides what to make of them.
CompactLog compact(const EventLog& log);

// Inverse of compact(): rebuild the string-keyed log for serialization.
// Unresolved (-1) parents/roots become empty strings.
EventLog expand(const CompactLog& log);

// Per (user, action) bucketed activity, one series per pair with >= 1
// event. Events at ts == end are excluded (half-open interval).
std::vector<ActivitySeries> bucket_series(const EventLog& log);

struct ValidationReport {
    size_t event_count = 0;
    size_t conversation_count = 0;
    std::vector<std::string> dangling_parents; // node ids whose parent_id is absent
    std::vector<std::string> dangling_roots;   // node ids whose root_id is absent
    std::vector<std::string> initiation_violations; // initiations with node!=parent or node!=root
};

ValidationReport validate_log(const EventLog& log);

} // namespace osim
