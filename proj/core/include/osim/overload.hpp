#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "osim/action.hpp"

namespace osim {

// Capacity dynamics of the actionable information queue.
struct OverloadParams {
    int32_t m_max = 30;  // messages per timestep processable without overload
    double alpha = 0.0;  // rate of information loss under overload, in [0,1]
};

// A delivered notification sitting in some agent's queue.
struct Message {
    int32_t sender = -1;
    ActionType action = ActionType::Initiate;
    int32_t conversation_id = -1;  // root event index in the simulated log
    int32_t event_node_id = -1;    // event index of the message itself
    int32_t created_at = 0;        // timestep of emission
    // Index into the recipient's trigger-parameter table for (sender, action),
    // resolved once at delivery. -1 = no inbound edge, can never trigger.
    int32_t param = -1;
    // Response-ledger row for this delivery, -1 when the ledger is off.
    int32_t ledger = -1;
};

struct QueueState {
    std::deque<Message> a;  // actionable information, oldest first
    int32_t m = 0;          // current capacity, in [0, m_max]
    int32_t last_o = 0;     // last overload quantity, in [0, m_max]
};

// Excess incoming information: (|A|+|R|) - M_max when the load meets the
// threshold, else 0; clamped to [0, M_max].
int32_t compute_overload(int64_t a_len, int64_t r_len, int32_t m_max);

// Capacity update. No overload leaves M unchanged (no recovery either);
// otherwise M drops by round(O^alpha), or to 0 if the loss exceeds M.
// O^alpha is only evaluated for O > 0, so alpha = 0 gives unit loss exactly.
int32_t update_capacity(int32_t m_prev, int32_t o, double alpha);

// Append received after the existing queue, then evict oldest-first until the
// queue fits the new capacity. Sets state.m = m_t. Returns the evictions.
std::vector<Message> enqueue_and_evict(QueueState& state, std::vector<Message>&& received, int32_t m_t);

}  // namespace osim
