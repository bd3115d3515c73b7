#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osim/event.hpp"
#include "osim/influence.hpp"
#include "osim/overload.hpp"

namespace osim {

// One row per agent per step: load seen at step start, capacity after the
// Eq. 1/2 update, and how many messages the eviction removed. a_len is the
// carried-over queue |A_{t-1}|, so a_len + r_len is the load that entered
// Eq. 2 this step.
struct TraceRow {
    int32_t t = 0;
    int32_t agent = -1;
    int32_t r_len = 0;
    int32_t a_len = 0;
    int32_t m_t = 0;
    int32_t o = 0;
    int32_t dropped = 0;
};

// One row per delivered message; responded_at/response_event stay -1 when the
// message was evicted or never triggered.
struct LedgerRow {
    int32_t delivered_at = 0;
    int32_t recipient = -1;
    int32_t sender = -1;
    int32_t conversation = -1;  // root event index in the simulated log
    ActionType action = ActionType::Initiate;
    int32_t responded_at = -1;
    int32_t response_event = -1;  // event index of the response
};

struct ScheduledInit {
    int32_t t = 0;
    int32_t agent = -1;
};

// Initial/exogenous activity: per-agent expected spontaneous initiations per
// step (empty = all zero) plus optional deterministic initiations.
struct SeedSpec {
    std::vector<double> background_rates;
    std::vector<ScheduledInit> scheduled;
};

struct SimConfig {
    int32_t horizon = 720;  // timesteps; 1 step = `resolution` seconds
    uint64_t seed = 0;
    OverloadParams params;                  // global defaults
    std::vector<OverloadParams> per_agent;  // empty = global params everywhere
    int64_t start_time = 0;                 // epoch seconds of t = 0
    int64_t resolution = 3600;
};

struct RunOptions {
    bool record_traces = true;
    bool record_ledger = true;
    int jobs = 1;
};

struct AgentTally {
    int64_t delivered = 0;
    int64_t responded = 0;
};

struct SimResult {
    CompactLog events;  // canonical schema, node ids "e<index>"
    std::vector<TraceRow> traces;
    std::vector<LedgerRow> ledger;
    std::vector<AgentTally> tallies;
};

// Synchronous-update MACM engine. Each step every agent (1) computes the
// overload O from its carried queue plus this step's deliveries, (2) updates
// capacity M_t, (3) enqueues and evicts FIFO, (4) runs one Bernoulli trial per
// queued message oldest-first -- trigger probability is the largest q among
// the (sender, agent, m.action -> X) edges, the response action is drawn
// proportional to those q -- consuming the message on response, and (5) draws
// Poisson(background_rate) spontaneous initiations. Emissions are delivered
// to all out-neighbors with any positive edge at step t+1, so agents within a
// step only read the previous step's state and may run in parallel; per
// (agent, t) RNG streams and an index-ordered merge keep results byte-equal
// for any job count.
class Simulation {
public:
    Simulation(const InfluenceNetwork& net, SimConfig cfg, SeedSpec seeds, RunOptions opts = {});

    void step();  // advance one timestep
    SimResult take_result();

    int32_t now() const { return t_; }
    size_t agent_count() const { return n_; }
    const QueueState& queue_of(size_t agent) const { return queues_[agent]; }

private:
    struct TriggerParam {
        double trigger = 0.0;  // max q over response actions
        double q_sum = 0.0;
        double q[kActionCount] = {0.0, 0.0, 0.0};
    };
    struct OutEdge {
        int32_t dst = -1;
        int32_t param[kActionCount] = {-1, -1, -1};  // per source action
    };
    struct LocalEvent {
        ActionType action;
        int32_t parent;  // global event index; -1 = self (initiation)
        int32_t root;    // global event index; -1 = self
    };
    struct Delivery {
        int32_t recipient;
        ActionType action;
        int32_t local_seq;     // emitting event's per-agent sequence this step
        int32_t conversation;  // global root index; -1 = the event itself
        int32_t param;
    };
    struct RespondedFix {
        int32_t ledger_row;
        int32_t local_seq;
    };

    void run_agent(size_t v);
    void merge_step();
    const OverloadParams& params_of(size_t v) const {
        return per_agent_.empty() ? params_ : per_agent_[v];
    }

    size_t n_ = 0;
    int32_t t_ = 0;
    SimConfig cfg_;
    OverloadParams params_;
    std::vector<OverloadParams> per_agent_;
    RunOptions opts_;

    std::vector<TriggerParam> trigger_params_;
    std::vector<std::vector<OutEdge>> out_;  // per agent

    std::vector<QueueState> queues_;
    std::vector<std::vector<Message>> inbox_;       // deliveries for step t_
    std::vector<std::vector<Message>> inbox_next_;  // filled during merge
    std::vector<double> rates_;
    std::vector<std::vector<int32_t>> sched_times_;  // per agent, sorted
    std::vector<size_t> sched_cursor_;

    // Per-agent scratch, rewritten every step and merged in index order.
    std::vector<std::vector<LocalEvent>> emissions_;
    std::vector<std::vector<Delivery>> deliveries_;
    std::vector<std::vector<RespondedFix>> fixes_;
    std::vector<TraceRow> trace_scratch_;

    SimResult result_;
};

SimResult run_simulation(const InfluenceNetwork& net, const SimConfig& cfg, const SeedSpec& seeds,
                         const RunOptions& opts = {});

// Per-agent responded/delivered; empty optional when nothing was delivered.
std::vector<std::optional<double>> responsiveness(const std::vector<LedgerRow>& ledger, size_t n_agents);

// Row writers; callers prepend their own header line if they need one.
void write_traces_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_ledger_jsonl(std::ostream& out, const std::vector<LedgerRow>& rows, const CompactLog& log);

}  // namespace osim
