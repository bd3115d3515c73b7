#include "osim/cascade.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace osim {

std::vector<CascadeTree> build_cascades(const CompactLog& log) {
    const auto n = log.events.size();
    std::vector<CascadeTree> trees;
    std::unordered_map<int64_t, size_t> slot_of;  // root reference -> tree slot
    slot_of.reserve(n);

    for (size_t i = 0; i < n; ++i) {
        const auto& e = log.events[i];
        const int64_t key = e.root == -1 ? e.node : e.root;
        auto [it, fresh] = slot_of.try_emplace(key, trees.size());
        if (fresh) trees.emplace_back();
        trees[it->second].events.push_back(static_cast<int32_t>(i));
    }

    // Positions of each node within its tree; reset only the entries we set.
    std::vector<int32_t> pos_of(n, -1);
    for (auto& tree : trees) {
        const auto sz = static_cast<int32_t>(tree.events.size());
        for (int32_t p = 0; p < sz; ++p) pos_of[static_cast<size_t>(log.events[static_cast<size_t>(tree.events[p])].node)] = p;

        const auto& first = log.events[static_cast<size_t>(tree.events[0])];
        const int64_t key = first.root == -1 ? first.node : first.root;
        tree.root_pos = 0;
        tree.root_event = -1;
        if (key >= 0 && pos_of[static_cast<size_t>(key)] >= 0) {
            tree.root_pos = pos_of[static_cast<size_t>(key)];
            tree.root_event = tree.events[static_cast<size_t>(tree.root_pos)];
        }

        tree.parent_pos.assign(static_cast<size_t>(sz), -1);
        for (int32_t p = 0; p < sz; ++p) {
            if (p == tree.root_pos) continue;
            const auto& e = log.events[static_cast<size_t>(tree.events[static_cast<size_t>(p)])];
            int32_t pp = tree.root_pos;
            if (e.parent >= 0) {
                const int32_t cand = pos_of[static_cast<size_t>(e.parent)];
                if (cand >= 0 && cand != p) pp = cand;  // absent/self parents fall back to the root
            }
            tree.parent_pos[static_cast<size_t>(p)] = pp;
        }

        // Depths with cycle breaking: corrupt archives can contain mutual
        // parent references; reattach the offender to the root.
        tree.depth.assign(static_cast<size_t>(sz), -1);
        tree.depth[static_cast<size_t>(tree.root_pos)] = 0;
        std::vector<int32_t> chain;
        for (int32_t p = 0; p < sz; ++p) {
            if (tree.depth[static_cast<size_t>(p)] >= 0) continue;
            chain.clear();
            int32_t cur = p;
            while (tree.depth[static_cast<size_t>(cur)] == -1) {
                tree.depth[static_cast<size_t>(cur)] = -2;  // on the current chain
                chain.push_back(cur);
                cur = tree.parent_pos[static_cast<size_t>(cur)];
            }
            if (tree.depth[static_cast<size_t>(cur)] == -2) {
                tree.parent_pos[static_cast<size_t>(chain.back())] = tree.root_pos;
                cur = tree.root_pos;
            }
            int32_t d = tree.depth[static_cast<size_t>(cur)];
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) tree.depth[static_cast<size_t>(*it)] = ++d;
        }

        for (int32_t p = 0; p < sz; ++p) pos_of[static_cast<size_t>(log.events[static_cast<size_t>(tree.events[static_cast<size_t>(p)])].node)] = -1;
    }
    return trees;
}

int64_t volume(const CascadeTree& tree) { return static_cast<int64_t>(tree.events.size()); }

double wiener_index(const CascadeTree& tree) {
    const auto n = static_cast<int64_t>(tree.events.size());
    if (n < 2) return 0.0;
    // Every edge (v, parent) splits the tree into subtree(v) and the rest, and
    // contributes size * (n - size) pairwise paths; summing over edges gives
    // the total pairwise distance exactly.
    std::vector<int32_t> order(tree.events.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int32_t a, int32_t b) { return tree.depth[static_cast<size_t>(a)] > tree.depth[static_cast<size_t>(b)]; });
    std::vector<int64_t> size(tree.events.size(), 1);
    unsigned __int128 total = 0;
    for (const int32_t v : order) {
        const int32_t p = tree.parent_pos[static_cast<size_t>(v)];
        if (p < 0) continue;
        total += static_cast<unsigned __int128>(size[static_cast<size_t>(v)]) *
                 static_cast<unsigned __int128>(n - size[static_cast<size_t>(v)]);
        size[static_cast<size_t>(p)] += size[static_cast<size_t>(v)];
    }
    const long double pairs = 0.5L * static_cast<long double>(n) * static_cast<long double>(n - 1);
    return static_cast<double>(static_cast<long double>(total) / pairs);
}

int64_t unique_participants(const CascadeTree& tree, const CompactLog& log) {
    std::vector<int32_t> users;
    users.reserve(tree.events.size());
    for (const int32_t e : tree.events) users.push_back(log.events[static_cast<size_t>(e)].user);
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    return static_cast<int64_t>(users.size());
}

CascadeMetrics cascade_metrics(const CascadeTree& tree, const CompactLog& log) {
    return {volume(tree), wiener_index(tree), unique_participants(tree, log)};
}

std::vector<CascadeMetrics> all_cascade_metrics(const std::vector<CascadeTree>& trees, const CompactLog& log) {
    std::vector<CascadeMetrics> out;
    out.reserve(trees.size());
    for (const auto& t : trees) out.push_back(cascade_metrics(t, log));
    return out;
}

}  // namespace osim
