#include "osim/influence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "osim/rng.hpp"
#include "osim/time_utils.hpp"

namespace osim {

namespace {

using nlohmann::json;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Joint counts over (dst_{t+1}, dst_t^k, src_t) encoded as bit patterns.
// k + 2 bits total, so small k keeps the tables in dense arrays.
struct TeTables {
    std::vector<double> n_full;   // (d_next, d_hist, s)
    std::vector<double> n_hist_s; // (d_hist, s)
    std::vector<double> n_next_h; // (d_next, d_hist)
    std::vector<double> n_hist;   // (d_hist)
    double total = 0;
};

TeTables count_te(std::span<const uint8_t> src, std::span<const uint8_t> dst, int k) {
    const size_t n = dst.size();
    const auto hist_states = static_cast<size_t>(1) << k;
    TeTables t;
    t.n_full.assign(hist_states * 4, 0.0);
    t.n_hist_s.assign(hist_states * 2, 0.0);
    t.n_next_h.assign(hist_states * 2, 0.0);
    t.n_hist.assign(hist_states, 0.0);

    const uint32_t hist_mask = static_cast<uint32_t>(hist_states - 1);
    uint32_t hist = 0;
    for (int i = 0; i < k; ++i) hist = (hist << 1) | (dst[static_cast<size_t>(i)] ? 1u : 0u);

    for (size_t t0 = static_cast<size_t>(k) - 1; t0 + 1 < n; ++t0) {
        const uint32_t d_next = dst[t0 + 1] ? 1u : 0u;
        const uint32_t s = src[t0] ? 1u : 0u;
        t.n_full[(hist << 2) | (d_next << 1) | s] += 1.0;
        t.n_hist_s[(hist << 1) | s] += 1.0;
        t.n_next_h[(hist << 1) | d_next] += 1.0;
        t.n_hist[hist] += 1.0;
        t.total += 1.0;
        hist = ((hist << 1) | d_next) & hist_mask;
    }
    return t;
}

} // namespace

double entropy(std::span<const uint8_t> series) {
    if (series.size() < 2) throw std::invalid_argument("entropy: series length must be >= 2");
    size_t ones = 0;
    for (uint8_t v : series) ones += v ? 1 : 0;
    const double n = static_cast<double>(series.size());
    const double p1 = static_cast<double>(ones) / n;
    const double h = -xlog2x(p1) - xlog2x(1.0 - p1);
    return h < 0.0 ? 0.0 : h;
}

double transfer_entropy(std::span<const uint8_t> src, std::span<const uint8_t> dst, int k) {
    if (src.size() != dst.size()) throw std::invalid_argument("transfer_entropy: length mismatch");
    if (k < 1) throw std::invalid_argument("transfer_entropy: history length must be >= 1");
    if (dst.size() < static_cast<size_t>(k) + 2)
        throw std::invalid_argument("transfer_entropy: series too short for history length");

    const TeTables t = count_te(src, dst, k);
    if (t.total <= 0) return 0.0;

    double te = 0.0;
    const size_t hist_states = t.n_hist.size();
    for (size_t hist = 0; hist < hist_states; ++hist) {
        for (uint32_t d_next = 0; d_next < 2; ++d_next) {
            for (uint32_t s = 0; s < 2; ++s) {
                const double njoint = t.n_full[(hist << 2) | (d_next << 1) | s];
                if (njoint <= 0.0) continue;
                const double p_joint = njoint / t.total;
                const double p_cond_full = njoint / t.n_hist_s[(hist << 1) | s];
                const double p_cond_hist = t.n_next_h[(hist << 1) | d_next] / t.n_hist[hist];
                te += p_joint * std::log2(p_cond_full / p_cond_hist);
            }
        }
    }
    return te < 0.0 ? 0.0 : te;
}

int InfluenceNetwork::user_index(const std::string& id) const {
    for (size_t i = 0; i < users.size(); ++i)
        if (users[i] == id) return static_cast<int>(i);
    return -1;
}

void InfluenceNetwork::sort_edges() {
    std::sort(edges.begin(), edges.end(), [](const InfluenceEdge& a, const InfluenceEdge& b) {
        if (a.src_user != b.src_user) return a.src_user < b.src_user;
        if (a.dst_user != b.dst_user) return a.dst_user < b.dst_user;
        if (a.src_action != b.src_action) return a.src_action < b.src_action;
        return a.dst_action < b.dst_action;
    });
}

InfluenceNetwork build_influence_network(const std::vector<ActivitySeries>& series,
                                         const InfluenceOptions& options) {
    InfluenceNetwork net;
    net.history_length = options.history_length;
    net.prune_threshold = options.prune_threshold;

    // Binarize once, grouped per user. Entry [user][action] may be empty.
    std::unordered_map<std::string, int32_t> user_idx;
    std::vector<std::array<std::vector<uint8_t>, kActionCount>> binarized;
    for (const ActivitySeries& s : series) {
        auto [it, fresh] = user_idx.try_emplace(s.user_id, static_cast<int32_t>(net.users.size()));
        if (fresh) {
            net.users.push_back(s.user_id);
            binarized.emplace_back();
        }
        auto& slot = binarized[static_cast<size_t>(it->second)][static_cast<int>(s.action)];
        slot.resize(s.counts.size());
        for (size_t i = 0; i < s.counts.size(); ++i) slot[i] = s.counts[i] > 0 ? 1 : 0;
    }

    const auto n_users = static_cast<int32_t>(net.users.size());
    const int k = options.history_length;

    // Destination entropies don't depend on the source; precompute.
    std::vector<std::array<double, kActionCount>> dst_entropy(static_cast<size_t>(n_users));
    for (int32_t u = 0; u < n_users; ++u) {
        for (int a = 0; a < kActionCount; ++a) {
            const auto& s = binarized[static_cast<size_t>(u)][a];
            dst_entropy[static_cast<size_t>(u)][a] = s.size() >= 2 ? entropy(s) : 0.0;
        }
    }

    auto estimate_dyad = [&](int32_t src, int32_t dst, std::vector<InfluenceEdge>& sink) {
        for (int a_src = 0; a_src < kActionCount; ++a_src) {
            const auto& s_src = binarized[static_cast<size_t>(src)][a_src];
            if (s_src.size() < static_cast<size_t>(k) + 2) continue;
            for (int a_dst = 0; a_dst < kActionCount; ++a_dst) {
                const auto& s_dst = binarized[static_cast<size_t>(dst)][a_dst];
                if (s_dst.size() != s_src.size()) continue;
                const double h = dst_entropy[static_cast<size_t>(dst)][a_dst];
                if (h <= 0.0) continue; // q defined as 0 -> always pruned
                const double te = transfer_entropy(s_src, s_dst, k);
                double q = te / h;
                if (q > 1.0) q = 1.0;
                if (q <= options.prune_threshold) continue;
                if (options.significance_filter) {
                    Rng rng(mix_seed(options.significance_seed, static_cast<uint64_t>(src),
                                     static_cast<uint64_t>(dst),
                                     static_cast<uint64_t>(a_src * kActionCount + a_dst)));
                    std::vector<uint8_t> shuffled(s_src.begin(), s_src.end());
                    std::vector<double> null_te(static_cast<size_t>(options.significance_permutations));
                    for (auto& v : null_te) {
                        for (size_t i = shuffled.size(); i > 1; --i)
                            std::swap(shuffled[i - 1], shuffled[rng.uniform_int(i)]);
                        v = transfer_entropy(shuffled, s_dst, k);
                    }
                    std::sort(null_te.begin(), null_te.end());
                    const auto rank = static_cast<size_t>(options.significance_percentile *
                                                          static_cast<double>(null_te.size() - 1));
                    if (te <= null_te[rank]) continue;
                }
                InfluenceEdge e;
                e.src_user = src;
                e.dst_user = dst;
                e.src_action = static_cast<ActionType>(a_src);
                e.dst_action = static_cast<ActionType>(a_dst);
                e.q = q;
                sink.push_back(e);
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || n_users < 4) {
        for (int32_t src = 0; src < n_users; ++src)
            for (int32_t dst = 0; dst < n_users; ++dst) {
                if (src == dst && !options.allow_self_loops) continue;
                estimate_dyad(src, dst, net.edges);
            }
    } else {
        // Dyads are independent; shard by source user and merge in order.
        std::vector<std::vector<InfluenceEdge>> shards(static_cast<size_t>(jobs));
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w]() {
                for (int32_t src = w; src < n_users; src += jobs)
                    for (int32_t dst = 0; dst < n_users; ++dst) {
                        if (src == dst && !options.allow_self_loops) continue;
                        estimate_dyad(src, dst, shards[static_cast<size_t>(w)]);
                    }
            });
        }
        for (auto& t : workers) t.join();
        for (const auto& shard : shards)
            net.edges.insert(net.edges.end(), shard.begin(), shard.end());
    }

    net.sort_edges();
    return net;
}

void write_network_jsonl(const InfluenceNetwork& net, std::ostream& out) {
    json meta = {{"type", "network_metadata"},
                 {"window_start", format_iso8601(net.window_start)},
                 {"window_end", format_iso8601(net.window_end)},
                 {"history_length", net.history_length},
                 {"prune_threshold", net.prune_threshold},
                 {"users", net.users}};
    out << meta.dump() << '\n';
    for (const InfluenceEdge& e : net.edges) {
        json row = {{"src", net.users[static_cast<size_t>(e.src_user)]},
                    {"dst", net.users[static_cast<size_t>(e.dst_user)]},
                    {"src_action", to_string(e.src_action)},
                    {"dst_action", to_string(e.dst_action)},
                    {"q", e.q}};
        out << row.dump() << '\n';
    }
}

InfluenceNetwork read_network_jsonl(std::istream& in) {
    InfluenceNetwork net;
    std::unordered_map<std::string, int32_t> user_idx;
    auto intern = [&](const std::string& id) {
        auto [it, fresh] = user_idx.try_emplace(id, static_cast<int32_t>(net.users.size()));
        if (fresh) net.users.push_back(id);
        return it->second;
    };
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object())
            throw std::runtime_error("invalid JSON at line " + std::to_string(line_no));
        const std::string type = row.value("type", "");
        if (type == "header") continue;
        if (type == "network_metadata") {
            net.history_length = row.value("history_length", 1);
            net.prune_threshold = row.value("prune_threshold", 0.0);
            if (row.contains("window_start"))
                if (auto t = parse_iso8601(row["window_start"].get<std::string>())) net.window_start = *t;
            if (row.contains("window_end"))
                if (auto t = parse_iso8601(row["window_end"].get<std::string>())) net.window_end = *t;
            if (row.contains("users"))
                for (const auto& u : row["users"]) intern(u.get<std::string>());
            continue;
        }
        InfluenceEdge e;
        if (!row.contains("src") || !row.contains("dst") || !row.contains("q"))
            throw std::runtime_error("edge record missing src/dst/q at line " + std::to_string(line_no));
        e.src_user = intern(row["src"].get<std::string>());
        e.dst_user = intern(row["dst"].get<std::string>());
        const auto sa = map_platform_action(row.value("src_action", "initiate"));
        const auto da = map_platform_action(row.value("dst_action", "contribute"));
        if (!sa || !da)
            throw std::runtime_error("unknown action at line " + std::to_string(line_no));
        e.src_action = *sa;
        e.dst_action = *da;
        e.q = row["q"].get<double>();
        if (e.q < 0.0 || e.q > 1.0)
            throw std::runtime_error("q out of [0,1] at line " + std::to_string(line_no));
        net.edges.push_back(e);
    }
    net.sort_edges();
    return net;
}

InfluenceNetwork read_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_network_jsonl(in);
}

void write_network_summary_csv(const InfluenceNetwork& net, std::ostream& out) {
    out << "src,dst,max_q\n";
    // edges are sorted by (src, dst, ...) so dyads are contiguous
    size_t i = 0;
    while (i < net.edges.size()) {
        const int32_t src = net.edges[i].src_user;
        const int32_t dst = net.edges[i].dst_user;
        double max_q = 0.0;
        while (i < net.edges.size() && net.edges[i].src_user == src && net.edges[i].dst_user == dst) {
            max_q = std::max(max_q, net.edges[i].q);
            ++i;
        }
        out << net.users[static_cast<size_t>(src)] << ',' << net.users[static_cast<size_t>(dst)] << ','
            << max_q << '\n';
    }
}

} // namespace osim
