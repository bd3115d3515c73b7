#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "osim/event.hpp"

namespace osim {

// Fatal ingest problems (unreadable schema, empty log) throw this;
// per-row problems become RejectedRow entries instead.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RejectedRow {
    size_t line = 0;      // 1-based line number in the source
    std::string reason;
    std::string raw;      // offending input, verbatim
};

enum class LogFormat { Auto, Jsonl, Csv };

struct ParsedLog {
    EventLog log;
    std::vector<RejectedRow> rejects;
};

// Canonical interchange schema: six fields named user_id, node_id,
// parent_id, root_id, action, timestamp (ISO-8601). CSV must carry the
// same names in its header. Events are sorted by timestamp on return;
// the log interval defaults to [min_ts, max_ts + 1).
//
// Throws ParseError when the stream has no usable schema or yields zero
// valid events. Bad rows are collected, never silently dropped.
ParsedLog parse_event_log(std::istream& in, LogFormat format = LogFormat::Auto);
ParsedLog parse_event_log_file(const std::string& path, LogFormat format = LogFormat::Auto);

void write_jsonl(const EventLog& log, std::ostream& out);
void write_csv(const EventLog& log, std::ostream& out);
void write_rejects_jsonl(const std::vector<RejectedRow>& rejects, std::ostream& out);

} // namespace osim
