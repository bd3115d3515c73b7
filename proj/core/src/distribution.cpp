#include "osim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace osim {

int64_t Distribution::total() const { return std::accumulate(counts.begin(), counts.end(), int64_t{0}); }

std::vector<double> log2_integer_edges(double max_value) {
    std::vector<double> edges{1.0, 2.0};
    double hi = 2.0;  // next edge: 2^k + 1
    double width = 1.0;
    while (hi <= max_value) {
        hi = hi + width;  // 3, 5, 9, 17, ...
        width *= 2.0;
        edges.push_back(hi);
    }
    return edges;
}

std::vector<double> equal_width_edges(double lo, double hi, int bins) {
    if (bins < 1) throw std::invalid_argument("need at least one bin");
    if (!(hi > lo)) hi = lo + 1.0;  // degenerate range: one unit-wide bin span
    std::vector<double> edges(static_cast<size_t>(bins) + 1);
    const double w = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i) edges[static_cast<size_t>(i)] = lo + w * i;
    edges.back() = hi;  // exact upper edge, no accumulation error
    return edges;
}

Distribution histogram(const std::vector<double>& values, const std::vector<double>& edges) {
    if (edges.size() < 2) throw std::invalid_argument("need at least two edges");
    Distribution d;
    d.edges = edges;
    d.counts.assign(edges.size() - 1, 0);
    for (const double v : values) {
        auto it = std::upper_bound(edges.begin(), edges.end(), v);
        auto idx = static_cast<std::ptrdiff_t>(it - edges.begin()) - 1;
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(d.counts.size()) - 1);
        d.counts[static_cast<size_t>(idx)]++;
    }
    return d;
}

double js_divergence(const Distribution& p, const Distribution& q) {
    if (p.edges != q.edges) throw std::invalid_argument("distributions have different bin edges");
    if (p.counts.empty() || q.counts.empty()) throw std::invalid_argument("empty distribution");
    const auto np = static_cast<double>(p.total());
    const auto nq = static_cast<double>(q.total());
    if (np <= 0 || nq <= 0) throw std::invalid_argument("distribution has no samples");

    double jsd = 0.0;
    for (size_t i = 0; i < p.counts.size(); ++i) {
        const double pi = static_cast<double>(p.counts[i]) / np;
        const double qi = static_cast<double>(q.counts[i]) / nq;
        const double mi = 0.5 * (pi + qi);
        // Sum the two halves before accumulating so the result is exactly
        // symmetric in (p, q) despite floating-point non-associativity.
        double term = 0.0;
        if (pi > 0) term += 0.5 * pi * std::log2(pi / mi);
        if (qi > 0) term += 0.5 * qi * std::log2(qi / mi);
        jsd += term;
    }
    return std::clamp(jsd, 0.0, 1.0);
}

}  // namespace osim
