#include "osim/event_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "osim/time_utils.hpp"

namespace osim {

namespace {

using nlohmann::json;

const char* kFieldNames[6] = {"user_id", "node_id", "parent_id", "root_id", "action", "timestamp"};

// Minimal CSV field splitter: handles double-quoted fields with escaped
// quotes, which is as much CSV as the canonical schema ever needs.
bool split_csv_row(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF
        } else {
            field += c;
        }
    }
    if (quoted) return false;
    out.push_back(std::move(field));
    return true;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// Builds one Event from already-extracted field strings. Returns an error
// description on failure, empty string on success.
std::string make_event(const std::string& user, const std::string& node, const std::string& parent,
                       const std::string& root, const std::string& action_label,
                       const std::string& ts_text, Event& out) {
    if (user.empty()) return "empty user_id";
    if (node.empty()) return "empty node_id";
    const auto action = map_platform_action(action_label);
    if (!action) return "unknown action label '" + action_label + "'";
    const auto ts = parse_iso8601(ts_text);
    if (!ts) return "unparseable timestamp '" + ts_text + "'";
    out.user_id = user;
    out.node_id = node;
    out.parent_id = parent;
    out.root_id = root;
    out.action = *action;
    out.timestamp = *ts;
    if (out.action == ActionType::Initiate) {
        // Initiations are self-rooted; fill blanks rather than reject so
        // minimal feeds (user, node, action, time) remain ingestable.
        if (out.parent_id.empty()) out.parent_id = out.node_id;
        if (out.root_id.empty()) out.root_id = out.node_id;
        if (out.parent_id != out.node_id || out.root_id != out.node_id)
            return "initiation with node_id != parent_id or != root_id";
    } else {
        if (out.parent_id.empty()) return "empty parent_id on non-initiation";
        if (out.root_id.empty()) return "empty root_id on non-initiation";
    }
    return {};
}

void parse_jsonl(std::istream& in, ParsedLog& result) {
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t first = line.find_first_not_of(" \t\r");
        if (line.empty() || first == std::string::npos) continue;
        if (line[first] == '#') continue; // comment / provenance line
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            result.rejects.push_back({line_no, "invalid JSON object", line});
            continue;
        }
        if (row.contains("type")) continue; // header / metadata records
        std::string fields[6];
        bool missing = false;
        for (int f = 0; f < 6 && !missing; ++f) {
            auto it = row.find(kFieldNames[f]);
            if (it == row.end() || it->is_null()) {
                // parent_id / root_id may be omitted for initiations
                if (f == 2 || f == 3) continue;
                result.rejects.push_back({line_no, std::string("missing field '") + kFieldNames[f] + "'", line});
                missing = true;
            } else if (it->is_string()) {
                fields[f] = it->get<std::string>();
            } else {
                fields[f] = it->dump();
            }
        }
        if (missing) continue;
        Event e;
        const std::string err = make_event(fields[0], fields[1], fields[2], fields[3], fields[4], fields[5], e);
        if (!err.empty()) {
            result.rejects.push_back({line_no, err, line});
            continue;
        }
        result.log.events.push_back(std::move(e));
    }
}

void parse_csv(std::istream& in, ParsedLog& result) {
    std::string line;
    size_t line_no = 0;
    // Skip comment lines (e.g. a "# {...}" provenance header) ahead of the
    // CSV header row.
    do {
        if (!std::getline(in, line)) throw ParseError("empty input");
        ++line_no;
    } while (line.empty() || line[0] == '#');
    std::vector<std::string> header;
    if (!split_csv_row(line, header)) throw ParseError("malformed CSV header");
    int col_of[6];
    for (int f = 0; f < 6; ++f) {
        auto it = std::find(header.begin(), header.end(), kFieldNames[f]);
        if (it == header.end())
            throw ParseError(std::string("CSV header missing required column '") + kFieldNames[f] + "'");
        col_of[f] = static_cast<int>(it - header.begin());
    }
    std::vector<std::string> cols;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[0] == '#') continue;
        if (!split_csv_row(line, cols) || cols.size() < header.size()) {
            result.rejects.push_back({line_no, "malformed CSV row", line});
            continue;
        }
        Event e;
        const std::string err =
            make_event(cols[col_of[0]], cols[col_of[1]], cols[col_of[2]], cols[col_of[3]],
                       cols[col_of[4]], cols[col_of[5]], e);
        if (!err.empty()) {
            result.rejects.push_back({line_no, err, line});
            continue;
        }
        result.log.events.push_back(std::move(e));
    }
}

} // namespace

ParsedLog parse_event_log(std::istream& in, LogFormat format) {
    if (format == LogFormat::Auto) {
        // JSON-lines starts with '{' (possibly after whitespace); anything
        // else is treated as CSV with a header row.
        const int c = in.peek();
        format = (c == '{' || c == '[') ? LogFormat::Jsonl : LogFormat::Csv;
    }
    ParsedLog result;
    if (format == LogFormat::Jsonl) parse_jsonl(in, result);
    else parse_csv(in, result);

    if (result.log.events.empty())
        throw ParseError("no valid events in input (" + std::to_string(result.rejects.size()) +
                         " rejected rows)");

    std::stable_sort(result.log.events.begin(), result.log.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    result.log.start = result.log.events.front().timestamp;
    result.log.end = result.log.events.back().timestamp + 1;
    return result;
}

ParsedLog parse_event_log_file(const std::string& path, LogFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    if (format == LogFormat::Auto) {
        if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0) format = LogFormat::Csv;
    }
    return parse_event_log(in, format);
}

void write_jsonl(const EventLog& log, std::ostream& out) {
    for (const Event& e : log.events) {
        json row = {{"user_id", e.user_id},
                    {"node_id", e.node_id},
                    {"parent_id", e.parent_id},
                    {"root_id", e.root_id},
                    {"action", to_string(e.action)},
                    {"timestamp", format_iso8601(e.timestamp)}};
        out << row.dump() << '\n';
    }
}

void write_csv(const EventLog& log, std::ostream& out) {
    out << "user_id,node_id,parent_id,root_id,action,timestamp\n";
    for (const Event& e : log.events) {
        out << csv_escape(e.user_id) << ',' << csv_escape(e.node_id) << ',' << csv_escape(e.parent_id)
            << ',' << csv_escape(e.root_id) << ',' << to_string(e.action) << ','
            << format_iso8601(e.timestamp) << '\n';
    }
}

void write_rejects_jsonl(const std::vector<RejectedRow>& rejects, std::ostream& out) {
    for (const RejectedRow& r : rejects) {
        json row = {{"line", r.line}, {"reason", r.reason}, {"raw", r.raw}};
        out << row.dump() << '\n';
    }
}

} // namespace osim
