#include "support/oracles.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace oracle {

double mean_pairwise_distance_bfs(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 2) return 0.0;
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (const auto& [a, b] : edges) {
        adj[static_cast<size_t>(a)].push_back(b);
        adj[static_cast<size_t>(b)].push_back(a);
    }
    long double total = 0.0L;  // sum over ordered pairs
    std::vector<int> dist(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<int> q;
        dist[static_cast<size_t>(s)] = 0;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int w : adj[static_cast<size_t>(u)]) {
                if (dist[static_cast<size_t>(w)] < 0) {
                    dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
                    q.push(w);
                }
            }
        }
        for (int v = 0; v < n; ++v) {
            if (dist[static_cast<size_t>(v)] < 0) throw std::invalid_argument("disconnected graph");
            total += dist[static_cast<size_t>(v)];
        }
    }
    return static_cast<double>(total / (static_cast<long double>(n) * (n - 1)));
}

namespace {
double kl_bits(const std::vector<double>& p, const std::vector<double>& m) {
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) kl += p[i] * std::log2(p[i] / m[i]);
    }
    return kl;
}
}  // namespace

double jsd_counts(const std::vector<int64_t>& p, const std::vector<int64_t>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("length mismatch");
    double tp = 0.0, tq = 0.0;
    for (int64_t c : p) tp += static_cast<double>(c);
    for (int64_t c : q) tq += static_cast<double>(c);
    std::vector<double> pp(p.size()), qq(q.size()), mm(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        pp[i] = static_cast<double>(p[i]) / tp;
        qq[i] = static_cast<double>(q[i]) / tq;
        mm[i] = 0.5 * (pp[i] + qq[i]);
    }
    return 0.5 * kl_bits(pp, mm) + 0.5 * kl_bits(qq, mm);
}

double transfer_entropy_k1(const std::vector<uint8_t>& src, const std::vector<uint8_t>& dst) {
    if (src.size() != dst.size() || src.size() < 3) throw std::invalid_argument("bad series");
    // Joint counts over (dst_{t+1}, dst_t, src_t) plus the marginals the
    // conditional probabilities need.
    std::map<std::array<int, 3>, int64_t> c3;
    std::map<std::array<int, 2>, int64_t> c_ds;   // (dst_t, src_t)
    std::map<std::array<int, 2>, int64_t> c_dn;   // (dst_t, dst_{t+1})
    std::map<int, int64_t> c_d;                   // dst_t
    const size_t n = src.size() - 1;
    for (size_t t = 0; t < n; ++t) {
        const int dn = dst[t + 1] ? 1 : 0;
        const int d = dst[t] ? 1 : 0;
        const int s = src[t] ? 1 : 0;
        ++c3[{dn, d, s}];
        ++c_ds[{d, s}];
        ++c_dn[{d, dn}];
        ++c_d[d];
    }
    double te = 0.0;
    for (const auto& [key, cnt] : c3) {
        const auto [dn, d, s] = key;
        const double p_joint = static_cast<double>(cnt) / static_cast<double>(n);
        const double p_cond_full = static_cast<double>(cnt) / static_cast<double>(c_ds[{d, s}]);
        const double p_cond_hist = static_cast<double>(c_dn[{d, dn}]) / static_cast<double>(c_d[d]);
        te += p_joint * std::log2(p_cond_full / p_cond_hist);
    }
    return te < 0.0 ? 0.0 : te;
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

IshigamiIndices ishigami_analytic(double a, double b) {
    const double pi4 = std::pow(std::numbers::pi, 4);
    const double pi8 = std::pow(std::numbers::pi, 8);
    const double v1 = 0.5 * (1.0 + b * pi4 / 5.0) * (1.0 + b * pi4 / 5.0);
    const double v2 = a * a / 8.0;
    const double v13 = b * b * pi8 * 8.0 / 225.0;
    const double v = v1 + v2 + v13;
    return {v1 / v, v2 / v, 0.0};
}

double l2_star_discrepancy(const std::vector<std::vector<double>>& pts) {
    if (pts.empty()) throw std::invalid_argument("empty point set");
    const size_t n = pts.size();
    const size_t d = pts[0].size();
    const double nn = static_cast<double>(n);
    double term1 = 1.0;
    for (size_t k = 0; k < d; ++k) term1 /= 3.0;
    double term2 = 0.0;
    for (const auto& x : pts) {
        double prod = 1.0;
        for (size_t k = 0; k < d; ++k) prod *= (1.0 - x[k] * x[k]) / 2.0;
        term2 += prod;
    }
    term2 *= 2.0 / nn;
    double term3 = 0.0;
    for (const auto& x : pts) {
        for (const auto& y : pts) {
            double prod = 1.0;
            for (size_t k = 0; k < d; ++k) prod *= 1.0 - std::max(x[k], y[k]);
            term3 += prod;
        }
    }
    term3 /= nn * nn;
    const double sq = term1 - term2 + term3;
    return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

}  // namespace oracle
