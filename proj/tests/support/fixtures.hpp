#pragma once

// Synthetic networks, logs, and simulation scenarios shared by the unit
// tests and the acceptance harness.

#include <cstdint>
#include <vector>

#include "osim/calibration.hpp"
#include "osim/engine.hpp"
#include "osim/event.hpp"
#include "osim/influence.hpp"
#include "osim/overload.hpp"
#include "osim/rng.hpp"

namespace fixtures {

using osim::ActionType;

// Users u0..u{n-1} with the given edges, canonically sorted.
osim::InfluenceNetwork make_network(int n, std::vector<osim::InfluenceEdge> edges);

// Edge with a single (src_action -> dst_action) response pair.
osim::InfluenceEdge edge(int src, int dst, ActionType sa, ActionType da, double q);

// Uniform random recursive tree on n nodes: parent of node i drawn uniformly
// from 0..i-1; parents[0] = -1.
std::vector<int32_t> random_parents(int n, osim::Rng& rng);

// Single-conversation compact log shaped by `parents` (node 0 the root,
// self-referencing), users assigned round-robin from a pool.
osim::CompactLog tree_log(const std::vector<int32_t>& parents, int user_pool);

// Copy channel: src i.i.d. Bernoulli(p), dst[t+1] = src[t], dst[0] = 0.
void copy_channel(size_t len, uint64_t seed, std::vector<uint8_t>& src, std::vector<uint8_t>& dst,
                  double p = 0.5);

// ---------------------------------------------------------------------------
// Burst-star fixture. Agent 0 is a leader whose scheduled initiations make
// `members` agents (1..members) contribute in the following step; every
// member event also lands on a hub (index members+1) that shares with
// probability q_hub per trial. Members run light background initiations, so
// the hub sees a trickle punctuated by roughly members-sized bursts -- small
// enough to fit M_max = 35, large enough to overload M_max = 15.
struct StarSpec {
    int members = 24;
    double q_react = 0.9;   // leader Initiate -> member Contribute
    double q_hub = 0.5;     // member Initiate/Contribute -> hub Share
    double member_rate = 0.15;
    double hub_rate = 0.0;
    int burst_period = 60;  // leader initiates at t = 10, 10+P, 10+2P, ...
    int32_t horizon = 1000;
    int32_t m_max = 15;
    double alpha = 0.0;
    uint64_t seed = 1;
};
int star_agent_count(const StarSpec& spec);
int star_hub(const StarSpec& spec);
osim::SimResult run_star(const StarSpec& spec);

// ---------------------------------------------------------------------------
// Community fixture: `groups` groups of one leader plus `members_per_group`
// members, plus `hubs_per_group` hubs per group (defaults: 200 agents).
// Members contribute after their leader's scheduled initiations and run
// background initiations; every member event fans out to the group's hubs,
// which share back into the conversation. Burst loads sit just above
// M_max = 30, so capacity decay -- and with it cascade volume, virality, and
// participant counts -- depends on both M_max and alpha.
struct CommunitySpec {
    int groups = 4;
    int members_per_group = 39;  // plus 1 leader each
    // Optional per-group member counts (size == groups). Heterogeneous
    // burst sizes straddling the capacity grid make (M_max, alpha) jointly
    // identifiable: each group's hubs overload by a different excess, so the
    // cascade distributions read the decay law at several operating points.
    std::vector<int> group_members;
    int hubs_per_group = 10;
    double q_react = 0.85;  // leader Initiate -> member Contribute
    double q_hub = 0.35;    // member events -> hub Share
    // Size of each group's "chatter pod": its last `pod` members answer each
    // other in a near-critical reply cauldron. A pod response continues as a
    // Contribute to the next two pod members with probability q_pod and
    // otherwise exits as a Share leaf, so reply trees are Galton-Watson with
    // reproduction ratio 2*q_pod. Pod members are cut off from the hubs and
    // keep a private, effectively unlimited capacity, so each burst grows a
    // heavy-tailed reply tree whose size no swept parameter explains.
    // Cascade volume and virality become noise-dominated -- the regime of
    // heavy-tailed empirical cascades -- while participant counts, already
    // saturated by the leader's burst, stay driven by M_max and alpha and
    // end up the most parameter-determined metric.
    int pod = 0;
    double q_pod = 0.48;
    // Pod members initiate at this background rate instead of member_rate,
    // and their initiations fan into the pod exactly like contributions do.
    // Each initiation therefore opens a standalone Galton-Watson cascade:
    // heavy-tailed volume and virality mass that no parameter explains,
    // while adding at most `pod` unique participants per cascade.
    double pod_rate = 0.0;
    // When > 0, the last pod member of each group opens a standalone pod
    // cascade on this schedule. A handful of giant Galton-Watson trees per
    // run dominates the across-run variance of mean volume and virality --
    // per-cascade averaging cannot wash out a few heavy objects -- while
    // each tree touches at most `pod` distinct users, so mean unique
    // participants keeps its parameter signal.
    int pod_burst_period = 0;
    // When > 0, the two members preceding each group's pod become a "wire"
    // pair: they initiate at this rate and ping-pong each initiation into a
    // pure reply chain that continues with probability q_wire per hop and
    // otherwise ends in a Share leaf. Chain cascades are paths with
    // geometric length (mean 1/(1-q_wire)), so a run collects hundreds of
    // light-tailed path cascades: mean virality picks up broad variance
    // that no swept parameter explains -- a path's Wiener index grows
    // linearly with its length -- while each chain involves exactly two
    // users, leaving mean unique participants parameter-driven.
    double wire_rate = 0.0;
    double q_wire = 0.97;
    double member_rate = 0.04;
    double hub_rate = 0.0;
    int burst_period = 60;
    int first_burst = 20;
    int32_t horizon = 720;
    uint64_t seed = 0;
    osim::OverloadParams params{30, 0.8};
    bool record_traces = true;
    bool record_ledger = true;
    int jobs = 1;
};
int community_agent_count(const CommunitySpec& spec);
osim::InfluenceNetwork community_network(const CommunitySpec& spec);
osim::SimResult run_community(const CommunitySpec& spec);

// The same scenario as a calibration cell simulator: identical wiring with
// (params, seed) supplied per cell, traces and ledger off.
osim::CellSimulator community_simulator(CommunitySpec base);

// ---------------------------------------------------------------------------
// Single-burst exposure fixture: one scheduled leader initiation at t = 0,
// `pool` reactors contributing at t = 1, and `receivers` agents that each
// see the whole burst at t = 2 with response probability q_receive per
// message. The horizon is 3 steps, so every burst delivery gets exactly one
// response trial.
struct BurstSpec {
    int pool = 30;
    int receivers = 20;
    double q_react = 0.9;
    double q_receive = 0.05;
    int32_t m_max = 30;
    double alpha = 0.8;
    uint64_t seed = 0;
};
osim::SimResult run_burst(const BurstSpec& spec);

}  // namespace fixtures
