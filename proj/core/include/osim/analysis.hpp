#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "osim/cascade.hpp"
#include "osim/engine.hpp"
#include "osim/event.hpp"

namespace osim {

// Agent-steps grouped by incoming load |A|+|R|; per bucket, the mean global
// cascade metrics of conversations the agent heard about (per received
// message) versus conversations the agent actually posted to (per emitted
// event). Means are 0 when a bucket has no samples; check the counts.
struct LoadBucketRow {
    int32_t lo = 0;  // bucket covers loads in [lo, hi)
    int32_t hi = 0;  // INT32_MAX for the open-ended top bucket
    int64_t agent_steps = 0;
    int64_t in_messages = 0;
    int64_t out_events = 0;
    double in_volume = 0.0;
    double in_virality = 0.0;
    double in_participants = 0.0;
    double out_volume = 0.0;
    double out_virality = 0.0;
    double out_participants = 0.0;
};

// Per volume bin: how visible conversations of that size are in an agent's
// inbox (share of received messages) and in-neighborhood (share of distinct
// senders mentioning it), averaged over (agent, conversation) pairs.
struct NeighborhoodRow {
    double volume_lo = 0.0;
    double volume_hi = 0.0;
    int64_t samples = 0;
    double message_fraction = 0.0;
    double neighbor_fraction = 0.0;
};

struct OverloadExposureResult {
    std::vector<LoadBucketRow> buckets;
    std::vector<NeighborhoodRow> neighborhood;
};

inline const std::vector<int32_t>& default_load_edges() {
    static const std::vector<int32_t> edges{0, 11, 21, 31, 41, 51};
    return edges;
}

OverloadExposureResult overload_exposure_analysis(const std::vector<TraceRow>& traces,
                                                  const std::vector<LedgerRow>& ledger,
                                                  const std::vector<CascadeTree>& trees, const CompactLog& log,
                                                  const std::vector<int32_t>& load_edges = default_load_edges());

// P(response | n exposures to one conversation within one step), over
// (agent, conversation, step) groups; a group responded when any of its
// deliveries became the parent of an emitted event.
struct ExposureResponseRow {
    int32_t exposures = 0;
    int64_t groups = 0;
    int64_t responded = 0;
    double probability = 0.0;
};

std::vector<ExposureResponseRow> exposure_response_curve(const std::vector<LedgerRow>& ledger);

void write_load_buckets_csv(std::ostream& out, const std::vector<LoadBucketRow>& rows);
void write_neighborhood_csv(std::ostream& out, const std::vector<NeighborhoodRow>& rows);
void write_exposure_response_csv(std::ostream& out, const std::vector<ExposureResponseRow>& rows);

}  // namespace osim
