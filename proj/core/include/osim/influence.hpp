#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "osim/action.hpp"
#include "osim/event.hpp"

namespace osim {

// Plug-in Shannon entropy (base 2) of the empirical symbol distribution
// of a binarized series. Throws std::invalid_argument for length < 2.
double entropy(std::span<const uint8_t> series);

// Schreiber transfer entropy src -> dst in bits, history length k over the
// destination and one step of the source, plug-in joint frequencies,
// clamped at 0 against negative round-off. Series must have equal length
// >= k + 2. Throws std::invalid_argument otherwise.
double transfer_entropy(std::span<const uint8_t> src, std::span<const uint8_t> dst, int k = 1);

// Directed conditional response probability for one (user, action) pair.
struct InfluenceEdge {
    int32_t src_user = -1;
    int32_t dst_user = -1;
    ActionType src_action = ActionType::Initiate;
    ActionType dst_action = ActionType::Initiate;
    double q = 0.0;
};

struct InfluenceNetwork {
    std::vector<std::string> users;
    std::vector<InfluenceEdge> edges; // sorted by (src, dst, src_action, dst_action)
    // estimation metadata
    int64_t window_start = 0;
    int64_t window_end = 0;
    int history_length = 1;
    double prune_threshold = 0.0;

    int user_index(const std::string& id) const; // -1 when unknown
    void sort_edges();
};

struct InfluenceOptions {
    int history_length = 1;      // k
    double prune_threshold = 0.0; // edges with q <= threshold are dropped
    bool allow_self_loops = false;
    // Optional shuffle-based significance gate: keep an edge only when its
    // TE exceeds the given percentile of TEs over time-shuffled sources.
    bool significance_filter = false;
    int significance_permutations = 100;
    double significance_percentile = 0.95;
    uint64_t significance_seed = 0x5eed;
    int jobs = 1;
};

// q(src user, src action -> dst user, dst action) =
//   TE(src series -> dst series) / H(dst series), 0 when H(dst) = 0,
// clamped to [0, 1], over all ordered user pairs and action pairs with
// observed activity. Series are binarized (count > 0) before estimation.
InfluenceNetwork build_influence_network(const std::vector<ActivitySeries>& series,
                                         const InfluenceOptions& options = {});

// JSON-lines: one metadata record then one record per edge.
void write_network_jsonl(const InfluenceNetwork& net, std::ostream& out);
InfluenceNetwork read_network_jsonl(std::istream& in);
InfluenceNetwork read_network_file(const std::string& path);

// Per-dyad summary: src, dst, max q over the nine action pairs.
void write_network_summary_csv(const InfluenceNetwork& net, std::ostream& out);

} // namespace osim
