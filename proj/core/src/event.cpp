#include "osim/event.hpp"

#include <algorithm>
#include <unordered_set>

namespace osim {

CompactLog compact(const EventLog& log) {
    CompactLog out;
    out.start = log.start;
    out.end = log.end;
    out.resolution = log.resolution;
    out.events.reserve(log.events.size());
    out.node_ids.reserve(log.events.size());

    std::unordered_map<std::string, int32_t> user_idx;
    std::unordered_map<std::string, int32_t> node_idx;
    node_idx.reserve(log.events.size() * 2);

    for (const Event& e : log.events) {
        auto [uit, fresh] = user_idx.try_emplace(e.user_id, static_cast<int32_t>(out.users.size()));
        if (fresh) out.users.push_back(e.user_id);
        const auto ni = static_cast<int32_t>(out.node_ids.size());
        node_idx.emplace(e.node_id, ni);
        out.node_ids.push_back(e.node_id);
        CompactEvent ce;
        ce.user = uit->second;
        ce.node = ni;
        ce.action = e.action;
        ce.timestamp = e.timestamp;
        out.events.push_back(ce);
    }
    // Second pass: parents/roots may point forward in time for out-of-order
    // archives, so resolve only after all node ids are known. Dangling but
    // named ids are interned so cascade grouping can still key on them.
    std::unordered_map<std::string, int32_t> missing_idx;
    auto resolve = [&](const std::string& id) -> int32_t {
        if (id.empty()) return -1;
        auto it = node_idx.find(id);
        if (it != node_idx.end()) return it->second;
        auto [mit, fresh] = missing_idx.try_emplace(id, static_cast<int32_t>(out.missing_ids.size()));
        if (fresh) out.missing_ids.push_back(id);
        return -(mit->second) - 2;
    };
    for (size_t i = 0; i < log.events.size(); ++i) {
        const Event& e = log.events[i];
        out.events[i].parent = resolve(e.parent_id);
        out.events[i].root = resolve(e.root_id);
    }
    return out;
}

EventLog expand(const CompactLog& log) {
    EventLog out;
    out.start = log.start;
    out.end = log.end;
    out.resolution = log.resolution;
    out.events.reserve(log.events.size());
    auto id_of = [&log](int32_t v) -> std::string {
        if (v >= 0) return log.node_ids.at(static_cast<size_t>(v));
        if (v <= -2) return log.missing_ids.at(static_cast<size_t>(-v - 2));
        return {};
    };
    for (const auto& e : log.events) {
        Event ev;
        ev.user_id = log.users.at(static_cast<size_t>(e.user));
        ev.node_id = log.node_ids.at(static_cast<size_t>(e.node));
        ev.parent_id = id_of(e.parent);
        ev.root_id = id_of(e.root);
        ev.action = e.action;
        ev.timestamp = e.timestamp;
        out.events.push_back(std::move(ev));
    }
    return out;
}

std::vector<ActivitySeries> bucket_series(const EventLog& log) {
    const auto n_buckets = static_cast<size_t>(log.bucket_count());
    // (user, action) -> series slot, discovered in first-appearance order.
    std::unordered_map<std::string, std::array<int, kActionCount>> slots;
    std::vector<ActivitySeries> series;
    for (const Event& e : log.events) {
        if (e.timestamp < log.start || e.timestamp >= log.end) continue;
        auto [it, fresh] = slots.try_emplace(e.user_id, std::array<int, kActionCount>{-1, -1, -1});
        int& slot = it->second[static_cast<int>(e.action)];
        if (slot < 0) {
            slot = static_cast<int>(series.size());
            ActivitySeries s;
            s.user_id = e.user_id;
            s.action = e.action;
            s.counts.assign(n_buckets, 0);
            series.push_back(std::move(s));
        }
        series[static_cast<size_t>(slot)].counts[static_cast<size_t>(log.bucket_of(e.timestamp))] += 1;
    }
    return series;
}

ValidationReport validate_log(const EventLog& log) {
    ValidationReport report;
    report.event_count = log.events.size();

    std::unordered_set<std::string> nodes;
    std::unordered_set<std::string> roots;
    nodes.reserve(log.events.size() * 2);
    for (const Event& e : log.events) nodes.insert(e.node_id);
    for (const Event& e : log.events) {
        roots.insert(e.root_id);
        if (e.action == ActionType::Initiate) {
            if (e.node_id != e.parent_id || e.node_id != e.root_id)
                report.initiation_violations.push_back(e.node_id);
        } else {
            if (!nodes.count(e.parent_id)) report.dangling_parents.push_back(e.node_id);
            if (!nodes.count(e.root_id)) report.dangling_roots.push_back(e.node_id);
        }
    }
    report.conversation_count = roots.size();
    return report;
}

} // namespace osim
