#pragma once

#include <cstdint>
#include <vector>

#include "osim/event.hpp"

namespace osim {

// One conversation tree. Nodes are event indices into the source log, in log
// order; parent_pos/depth are positions within `events`. When the named root
// event is absent from the log (archive truncation) the earliest event stands
// in as the structural root and root_event stays -1.
struct CascadeTree {
    int32_t root_event = -1;
    int32_t root_pos = 0;
    std::vector<int32_t> events;
    std::vector<int32_t> parent_pos;  // -1 for the structural root
    std::vector<int32_t> depth;
};

struct CascadeMetrics {
    int64_t volume = 0;
    double virality = 0.0;  // Wiener index: mean pairwise distance
    int64_t unique_users = 0;
};

// One tree per distinct root reference. Events whose root field is empty form
// their own conversations; dangling parents (absent, cross-conversation, or
// cyclic) attach to the structural root.
std::vector<CascadeTree> build_cascades(const CompactLog& log);

int64_t volume(const CascadeTree& tree);

// Mean shortest-path distance over unordered node pairs; 0 below 2 nodes.
double wiener_index(const CascadeTree& tree);

int64_t unique_participants(const CascadeTree& tree, const CompactLog& log);

CascadeMetrics cascade_metrics(const CascadeTree& tree, const CompactLog& log);
std::vector<CascadeMetrics> all_cascade_metrics(const std::vector<CascadeTree>& trees, const CompactLog& log);

}  // namespace osim
