#include "osim/analysis.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "osim/distribution.hpp"

namespace osim {

OverloadExposureResult overload_exposure_analysis(const std::vector<TraceRow>& traces,
                                                  const std::vector<LedgerRow>& ledger,
                                                  const std::vector<CascadeTree>& trees, const CompactLog& log,
                                                  const std::vector<int32_t>& load_edges) {
    if (load_edges.empty()) throw std::invalid_argument("need at least one load bucket edge");
    for (size_t i = 1; i < load_edges.size(); ++i)
        if (load_edges[i] <= load_edges[i - 1]) throw std::invalid_argument("load edges must increase");

    OverloadExposureResult out;
    const size_t n_buckets = load_edges.size();
    out.buckets.resize(n_buckets);
    for (size_t b = 0; b < n_buckets; ++b) {
        out.buckets[b].lo = load_edges[b];
        out.buckets[b].hi = b + 1 < n_buckets ? load_edges[b + 1] : std::numeric_limits<int32_t>::max();
    }
    if (ledger.empty()) return out;

    auto bucket_of = [&](int32_t load) -> std::ptrdiff_t {
        auto it = std::upper_bound(load_edges.begin(), load_edges.end(), load);
        return std::clamp<std::ptrdiff_t>(it - load_edges.begin() - 1, 0,
                                          static_cast<std::ptrdiff_t>(n_buckets) - 1);
    };

    // Load of each (step, agent) seen in the traces.
    const auto n_agents = static_cast<int64_t>(log.users.size());
    std::unordered_map<int64_t, int32_t> load_at;
    load_at.reserve(traces.size() * 2);
    for (const auto& r : traces) {
        load_at[static_cast<int64_t>(r.t) * n_agents + r.agent] = r.r_len + r.a_len;
        out.buckets[static_cast<size_t>(bucket_of(r.r_len + r.a_len))].agent_steps++;
    }

    const auto metrics = all_cascade_metrics(trees, log);
    std::vector<int32_t> tree_of(log.events.size(), -1);
    for (size_t k = 0; k < trees.size(); ++k)
        for (const int32_t e : trees[k].events) tree_of[static_cast<size_t>(e)] = static_cast<int32_t>(k);

    // Incoming side: one sample per delivered message.
    for (const auto& row : ledger) {
        const auto key = static_cast<int64_t>(row.delivered_at) * n_agents + row.recipient;
        const auto it = load_at.find(key);
        if (it == load_at.end()) continue;  // in flight past the last simulated step
        if (row.conversation < 0 || static_cast<size_t>(row.conversation) >= tree_of.size()) continue;
        const int32_t k = tree_of[static_cast<size_t>(row.conversation)];
        if (k < 0) continue;
        auto& b = out.buckets[static_cast<size_t>(bucket_of(it->second))];
        b.in_messages++;
        b.in_volume += static_cast<double>(metrics[static_cast<size_t>(k)].volume);
        b.in_virality += metrics[static_cast<size_t>(k)].virality;
        b.in_participants += static_cast<double>(metrics[static_cast<size_t>(k)].unique_users);
    }

    // Outgoing side: one sample per emitted event.
    for (const auto& e : log.events) {
        const auto t = static_cast<int32_t>((e.timestamp - log.start) / log.resolution);
        const auto it = load_at.find(static_cast<int64_t>(t) * n_agents + e.user);
        if (it == load_at.end()) continue;
        const int32_t k = tree_of[static_cast<size_t>(e.node)];
        if (k < 0) continue;
        auto& b = out.buckets[static_cast<size_t>(bucket_of(it->second))];
        b.out_events++;
        b.out_volume += static_cast<double>(metrics[static_cast<size_t>(k)].volume);
        b.out_virality += metrics[static_cast<size_t>(k)].virality;
        b.out_participants += static_cast<double>(metrics[static_cast<size_t>(k)].unique_users);
    }

    for (auto& b : out.buckets) {
        if (b.in_messages > 0) {
            b.in_volume /= static_cast<double>(b.in_messages);
            b.in_virality /= static_cast<double>(b.in_messages);
            b.in_participants /= static_cast<double>(b.in_messages);
        }
        if (b.out_events > 0) {
            b.out_volume /= static_cast<double>(b.out_events);
            b.out_virality /= static_cast<double>(b.out_events);
            b.out_participants /= static_cast<double>(b.out_events);
        }
    }

    // Neighborhood visibility: per (agent, conversation), the share of the
    // agent's received messages and of its distinct senders that mention the
    // conversation, against the conversation's global volume.
    struct Mention {
        int32_t recipient;
        int32_t conversation;
        int32_t sender;
    };
    std::vector<Mention> mentions;
    mentions.reserve(ledger.size());
    std::unordered_map<int64_t, int64_t> received_total;   // per agent
    for (const auto& row : ledger) {
        if (row.conversation < 0 || static_cast<size_t>(row.conversation) >= tree_of.size()) continue;
        if (tree_of[static_cast<size_t>(row.conversation)] < 0) continue;
        mentions.push_back({row.recipient, row.conversation, row.sender});
        received_total[row.recipient]++;
    }
    if (!mentions.empty()) {
        std::sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
            if (a.recipient != b.recipient) return a.recipient < b.recipient;
            if (a.conversation != b.conversation) return a.conversation < b.conversation;
            return a.sender < b.sender;
        });
        // Distinct senders per agent, over all conversations.
        std::unordered_map<int64_t, int64_t> senders_total;
        {
            std::vector<std::pair<int32_t, int32_t>> rs;
            rs.reserve(mentions.size());
            for (const auto& m : mentions) rs.emplace_back(m.recipient, m.sender);
            std::sort(rs.begin(), rs.end());
            rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
            for (const auto& [r, s] : rs) senders_total[r]++;
        }

        struct PairSample {
            double volume;
            double msg_fraction;
            double nbr_fraction;
        };
        std::vector<PairSample> samples;
        double max_volume = 1.0;
        size_t i = 0;
        while (i < mentions.size()) {
            size_t j = i;
            int64_t distinct_senders = 0;
            int32_t last_sender = -1;
            while (j < mentions.size() && mentions[j].recipient == mentions[i].recipient &&
                   mentions[j].conversation == mentions[i].conversation) {
                if (mentions[j].sender != last_sender) {
                    distinct_senders++;
                    last_sender = mentions[j].sender;
                }
                ++j;
            }
            const auto& m = mentions[i];
            const auto vol = static_cast<double>(
                metrics[static_cast<size_t>(tree_of[static_cast<size_t>(m.conversation)])].volume);
            max_volume = std::max(max_volume, vol);
            samples.push_back({vol,
                               static_cast<double>(j - i) / static_cast<double>(received_total[m.recipient]),
                               static_cast<double>(distinct_senders) /
                                   static_cast<double>(senders_total[m.recipient])});
            i = j;
        }

        const auto edges = log2_integer_edges(max_volume);
        out.neighborhood.resize(edges.size() - 1);
        for (size_t b = 0; b + 1 < edges.size(); ++b) {
            out.neighborhood[b].volume_lo = edges[b];
            out.neighborhood[b].volume_hi = edges[b + 1];
        }
        for (const auto& s : samples) {
            auto it = std::upper_bound(edges.begin(), edges.end(), s.volume);
            const auto b = static_cast<size_t>(std::clamp<std::ptrdiff_t>(
                it - edges.begin() - 1, 0, static_cast<std::ptrdiff_t>(out.neighborhood.size()) - 1));
            out.neighborhood[b].samples++;
            out.neighborhood[b].message_fraction += s.msg_fraction;
            out.neighborhood[b].neighbor_fraction += s.nbr_fraction;
        }
        for (auto& row : out.neighborhood) {
            if (row.samples > 0) {
                row.message_fraction /= static_cast<double>(row.samples);
                row.neighbor_fraction /= static_cast<double>(row.samples);
            }
        }
    }
    return out;
}

std::vector<ExposureResponseRow> exposure_response_curve(const std::vector<LedgerRow>& ledger) {
    struct Key {
        int32_t recipient;
        int32_t conversation;
        int32_t t;
        bool responded;
    };
    std::vector<Key> keys;
    keys.reserve(ledger.size());
    for (const auto& row : ledger)
        keys.push_back({row.recipient, row.conversation, row.delivered_at, row.responded_at >= 0});
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.recipient != b.recipient) return a.recipient < b.recipient;
        if (a.conversation != b.conversation) return a.conversation < b.conversation;
        return a.t < b.t;
    });

    std::vector<std::pair<int64_t, int64_t>> by_n;  // exposures -> (groups, responded)
    size_t i = 0;
    while (i < keys.size()) {
        size_t j = i;
        bool any = false;
        while (j < keys.size() && keys[j].recipient == keys[i].recipient &&
               keys[j].conversation == keys[i].conversation && keys[j].t == keys[i].t) {
            any = any || keys[j].responded;
            ++j;
        }
        const size_t n = j - i;
        if (by_n.size() < n + 1) by_n.resize(n + 1, {0, 0});
        by_n[n].first++;
        if (any) by_n[n].second++;
        i = j;
    }

    std::vector<ExposureResponseRow> out;
    for (size_t n = 1; n < by_n.size(); ++n) {
        if (by_n[n].first == 0) continue;
        ExposureResponseRow row;
        row.exposures = static_cast<int32_t>(n);
        row.groups = by_n[n].first;
        row.responded = by_n[n].second;
        row.probability = static_cast<double>(row.responded) / static_cast<double>(row.groups);
        out.push_back(row);
    }
    return out;
}

void write_load_buckets_csv(std::ostream& out, const std::vector<LoadBucketRow>& rows) {
    out << std::setprecision(12);
    out << "load_lo,load_hi,agent_steps,in_messages,out_events,in_volume,in_virality,in_participants,"
           "out_volume,out_virality,out_participants\n";
    for (const auto& r : rows) {
        out << r.lo << ',' << r.hi << ',' << r.agent_steps << ',' << r.in_messages << ',' << r.out_events << ','
            << r.in_volume << ',' << r.in_virality << ',' << r.in_participants << ',' << r.out_volume << ','
            << r.out_virality << ',' << r.out_participants << '\n';
    }
}

void write_neighborhood_csv(std::ostream& out, const std::vector<NeighborhoodRow>& rows) {
    out << std::setprecision(12);
    out << "volume_lo,volume_hi,samples,message_fraction,neighbor_fraction\n";
    for (const auto& r : rows) {
        out << r.volume_lo << ',' << r.volume_hi << ',' << r.samples << ',' << r.message_fraction << ','
            << r.neighbor_fraction << '\n';
    }
}

void write_exposure_response_csv(std::ostream& out, const std::vector<ExposureResponseRow>& rows) {
    out << std::setprecision(12);
    out << "exposures,groups,responded,probability\n";
    for (const auto& r : rows)
        out << r.exposures << ',' << r.groups << ',' << r.responded << ',' << r.probability << '\n';
}

}  // namespace osim
