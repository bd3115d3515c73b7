#pragma once

#include <cstdint>
#include <vector>

namespace osim {

// Binned histogram; bins are [edges[i], edges[i+1]), except the last which
// also includes its upper edge so a pooled range covers its own maximum.
struct Distribution {
    std::vector<double> edges;
    std::vector<int64_t> counts;

    int64_t total() const;
};

// Integer log2 bins 1, 2, 3-4, 5-8, 9-16, ... covering [1, max_value].
std::vector<double> log2_integer_edges(double max_value);

std::vector<double> equal_width_edges(double lo, double hi, int bins);

// Values outside the edge range are clamped into the end bins, so counts
// always sum to the sample size.
Distribution histogram(const std::vector<double>& values, const std::vector<double>& edges);

// Jensen-Shannon divergence, base 2, of the normalized histograms. Zero bins
// need no smoothing (0 log 0 = 0). Throws on mismatched edges or empty input.
double js_divergence(const Distribution& p, const Distribution& q);

}  // namespace osim
