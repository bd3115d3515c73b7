#include "support/fixtures.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace fixtures {

using osim::InfluenceEdge;
using osim::InfluenceNetwork;

InfluenceNetwork make_network(int n, std::vector<InfluenceEdge> edges) {
    InfluenceNetwork net;
    net.users.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) net.users.push_back("u" + std::to_string(i));
    net.edges = std::move(edges);
    net.sort_edges();
    return net;
}

InfluenceEdge edge(int src, int dst, ActionType sa, ActionType da, double q) {
    InfluenceEdge e;
    e.src_user = src;
    e.dst_user = dst;
    e.src_action = sa;
    e.dst_action = da;
    e.q = q;
    return e;
}

std::vector<int32_t> random_parents(int n, osim::Rng& rng) {
    std::vector<int32_t> parents(static_cast<size_t>(n), -1);
    for (int i = 1; i < n; ++i)
        parents[static_cast<size_t>(i)] = static_cast<int32_t>(rng.uniform_int(static_cast<uint64_t>(i)));
    return parents;
}

osim::CompactLog tree_log(const std::vector<int32_t>& parents, int user_pool) {
    osim::CompactLog log;
    const int n = static_cast<int>(parents.size());
    for (int i = 0; i < user_pool; ++i) log.users.push_back("u" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
        osim::CompactEvent e;
        e.user = i % user_pool;
        e.node = i;
        e.parent = i == 0 ? 0 : parents[static_cast<size_t>(i)];
        e.root = 0;
        e.action = i == 0 ? ActionType::Initiate : ActionType::Contribute;
        e.timestamp = i;
        log.events.push_back(e);
        log.node_ids.push_back("n" + std::to_string(i));
    }
    log.start = 0;
    log.end = n;
    log.resolution = 1;
    return log;
}

void copy_channel(size_t len, uint64_t seed, std::vector<uint8_t>& src, std::vector<uint8_t>& dst,
                  double p) {
    osim::Rng rng(seed);
    src.assign(len, 0);
    dst.assign(len, 0);
    for (size_t t = 0; t < len; ++t) src[t] = rng.bernoulli(p) ? 1 : 0;
    for (size_t t = 0; t + 1 < len; ++t) dst[t + 1] = src[t];
}

// ---------------------------------------------------------------------------

int star_agent_count(const StarSpec& spec) { return spec.members + 2; }
int star_hub(const StarSpec& spec) { return spec.members + 1; }

osim::SimResult run_star(const StarSpec& spec) {
    const int hub = star_hub(spec);
    std::vector<InfluenceEdge> edges;
    for (int m = 1; m <= spec.members; ++m) {
        edges.push_back(edge(0, m, ActionType::Initiate, ActionType::Contribute, spec.q_react));
        edges.push_back(edge(m, hub, ActionType::Initiate, ActionType::Share, spec.q_hub));
        edges.push_back(edge(m, hub, ActionType::Contribute, ActionType::Share, spec.q_hub));
    }
    InfluenceNetwork net = make_network(star_agent_count(spec), std::move(edges));

    osim::SeedSpec seeds;
    seeds.background_rates.assign(static_cast<size_t>(star_agent_count(spec)), 0.0);
    for (int m = 1; m <= spec.members; ++m) seeds.background_rates[static_cast<size_t>(m)] = spec.member_rate;
    seeds.background_rates[static_cast<size_t>(hub)] = spec.hub_rate;
    for (int t = 10; t < spec.horizon; t += spec.burst_period) seeds.scheduled.push_back({t, 0});

    osim::SimConfig cfg;
    cfg.horizon = spec.horizon;
    cfg.seed = spec.seed;
    cfg.params = {spec.m_max, spec.alpha};
    return osim::run_simulation(net, cfg, seeds);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> group_sizes(const CommunitySpec& spec) {
    if (!spec.group_members.empty()) return spec.group_members;
    return std::vector<int>(static_cast<size_t>(spec.groups), spec.members_per_group);
}

// Index of group g's leader; its members follow contiguously.
int leader_index(const std::vector<int>& sizes, int g) {
    int base = 0;
    for (int i = 0; i < g; ++i) base += 1 + sizes[static_cast<size_t>(i)];
    return base;
}

}  // namespace

int community_agent_count(const CommunitySpec& spec) {
    const auto sizes = group_sizes(spec);
    int n = 0;
    for (const int s : sizes) n += 1 + s;
    return n + spec.groups * spec.hubs_per_group;
}

InfluenceNetwork community_network(const CommunitySpec& spec) {
    const auto sizes = group_sizes(spec);
    const int hub_base = leader_index(sizes, spec.groups);
    std::vector<InfluenceEdge> edges;
    for (int g = 0; g < spec.groups; ++g) {
        const int leader = leader_index(sizes, g);
        const int size = sizes[static_cast<size_t>(g)];
        const int pod = std::min(spec.pod, size);
        const int wires = spec.wire_rate > 0.0 && size >= pod + 2 ? 2 : 0;
        for (int m = 1; m <= size; ++m) {
            const int member = leader + m;
            const bool wire = m > size - pod - wires && m <= size - pod;
            // Wire pairs answer only each other; a leader edge would start a
            // horizon-long chain inside every burst cascade.
            if (!wire)
                edges.push_back(edge(leader, member, ActionType::Initiate, ActionType::Contribute, spec.q_react));
            if (m > size - pod - wires) continue;  // pod and wires skip the hubs
            for (int h = 0; h < spec.hubs_per_group; ++h) {
                const int hub = hub_base + g * spec.hubs_per_group + h;
                edges.push_back(edge(member, hub, ActionType::Initiate, ActionType::Share, spec.q_hub));
                edges.push_back(edge(member, hub, ActionType::Contribute, ActionType::Share, spec.q_hub));
            }
        }
        if (wires == 2) {
            const int x = leader + size - pod - 1;
            const int y = leader + size - pod;
            for (auto [a, b] : {std::pair<int,int>{x, y}, {y, x}}) {
                edges.push_back(edge(a, b, ActionType::Initiate, ActionType::Contribute, 1.0));
                edges.push_back(edge(a, b, ActionType::Contribute, ActionType::Contribute, spec.q_wire));
                edges.push_back(edge(a, b, ActionType::Contribute, ActionType::Share, 1.0 - spec.q_wire));
            }
        }
        // Every pod delivery is eventually answered (failed trials are
        // retried while the message stays queued), so the branching ratio is
        // carried by the one-shot action choice: Contribute (probability
        // q_pod) fans to the next two pod members, Share (1 - q_pod) ends
        // the branch as a leaf of the same conversation.
        for (int i = 0; i < pod; ++i) {
            const int src = leader + size - pod + 1 + i;
            for (int d = 1; d <= 2; ++d) {
                const int dst = leader + size - pod + 1 + (i + d) % pod;
                if (dst == src) continue;
                edges.push_back(edge(src, dst, ActionType::Contribute, ActionType::Contribute, spec.q_pod));
                edges.push_back(edge(src, dst, ActionType::Contribute, ActionType::Share, 1.0 - spec.q_pod));
                edges.push_back(edge(src, dst, ActionType::Initiate, ActionType::Contribute, spec.q_pod));
                edges.push_back(edge(src, dst, ActionType::Initiate, ActionType::Share, 1.0 - spec.q_pod));
            }
        }
    }
    return make_network(community_agent_count(spec), std::move(edges));
}

osim::SimResult run_community(const CommunitySpec& spec) {
    const InfluenceNetwork net = community_network(spec);
    const int n = community_agent_count(spec);
    const auto sizes = group_sizes(spec);

    osim::SeedSpec seeds;
    seeds.background_rates.assign(static_cast<size_t>(n), 0.0);
    const int hub_base = leader_index(sizes, spec.groups);
    for (int g = 0; g < spec.groups; ++g) {
        const int leader = leader_index(sizes, g);
        const int size = sizes[static_cast<size_t>(g)];
        const int pod = std::min(spec.pod, size);
        const int wires = spec.wire_rate > 0.0 && size >= pod + 2 ? 2 : 0;
        for (int m = 1; m <= size; ++m) {
            double rate = spec.member_rate;
            if (m > size - pod) rate = spec.pod_rate;
            else if (m > size - pod - wires) rate = spec.wire_rate;
            seeds.background_rates[static_cast<size_t>(leader + m)] = rate;
        }
        for (int h = 0; h < spec.hubs_per_group; ++h)
            seeds.background_rates[static_cast<size_t>(hub_base + g * spec.hubs_per_group + h)] = spec.hub_rate;
        for (int t = spec.first_burst + 3 * g; t < spec.horizon; t += spec.burst_period)
            seeds.scheduled.push_back({t, leader});
        if (spec.pod_burst_period > 0 && pod > 0)
            for (int t = spec.first_burst + 30 + 3 * g; t < spec.horizon; t += spec.pod_burst_period)
                seeds.scheduled.push_back({t, leader + size});
    }

    osim::SimConfig cfg;
    cfg.horizon = spec.horizon;
    cfg.seed = spec.seed;
    cfg.params = spec.params;
    if (spec.pod > 0 || spec.wire_rate > 0.0) {
        // Pod members and wire pairs keep a private, effectively unlimited
        // capacity so their chatter is independent of the swept
        // (M_max, alpha).
        cfg.per_agent.assign(static_cast<size_t>(n), spec.params);
        for (int g = 0; g < spec.groups; ++g) {
            const int leader = leader_index(sizes, g);
            const int size = sizes[static_cast<size_t>(g)];
            const int pod = std::min(spec.pod, size);
            const int wires = spec.wire_rate > 0.0 && size >= pod + 2 ? 2 : 0;
            for (int m = size - pod - wires + 1; m <= size; ++m)
                cfg.per_agent[static_cast<size_t>(leader + m)] = {1 << 20, 0.0};
        }
    }

    osim::RunOptions opts;
    opts.record_traces = spec.record_traces;
    opts.record_ledger = spec.record_ledger;
    opts.jobs = spec.jobs;
    return osim::run_simulation(net, cfg, seeds, opts);
}

osim::CellSimulator community_simulator(CommunitySpec base) {
    base.record_traces = false;
    base.record_ledger = false;
    return [base](const osim::OverloadParams& params, uint64_t seed) {
        CommunitySpec spec = base;
        spec.params = params;
        spec.seed = seed;
        return run_community(spec).events;
    };
}

// ---------------------------------------------------------------------------

osim::SimResult run_burst(const BurstSpec& spec) {
    const int first_receiver = 1 + spec.pool;
    const int n = first_receiver + spec.receivers;
    std::vector<InfluenceEdge> edges;
    for (int r = 1; r <= spec.pool; ++r) {
        edges.push_back(edge(0, r, ActionType::Initiate, ActionType::Contribute, spec.q_react));
        for (int w = 0; w < spec.receivers; ++w)
            edges.push_back(edge(r, first_receiver + w, ActionType::Contribute, ActionType::Share, spec.q_receive));
    }
    InfluenceNetwork net = make_network(n, std::move(edges));

    osim::SeedSpec seeds;
    seeds.scheduled.push_back({0, 0});

    osim::SimConfig cfg;
    cfg.horizon = 3;
    cfg.seed = spec.seed;
    cfg.params = {spec.m_max, spec.alpha};
    return osim::run_simulation(net, cfg, seeds);
}

}  // namespace fixtures
