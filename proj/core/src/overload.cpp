#include "osim/overload.hpp"

#include <algorithm>
#include <cmath>

namespace osim {

int32_t compute_overload(int64_t a_len, int64_t r_len, int32_t m_max) {
    const int64_t load = a_len + r_len;
    int64_t o = load >= m_max ? load - m_max : 0;
    o = std::clamp<int64_t>(o, 0, m_max);
    return static_cast<int32_t>(o);
}

int32_t update_capacity(int32_t m_prev, int32_t o, double alpha) {
    if (o <= 0) return m_prev;
    // Countable units: round half away from zero (llround).
    const auto loss = static_cast<int64_t>(std::llround(std::pow(static_cast<double>(o), alpha)));
    return loss <= m_prev ? m_prev - static_cast<int32_t>(loss) : 0;
}

std::vector<Message> enqueue_and_evict(QueueState& state, std::vector<Message>&& received, int32_t m_t) {
    state.m = m_t;
    for (auto& m : received) state.a.push_back(m);
    received.clear();
    std::vector<Message> dropped;
    const auto cap = static_cast<size_t>(std::max<int32_t>(m_t, 0));
    if (state.a.size() > cap) {
        const size_t excess = state.a.size() - cap;
        dropped.reserve(excess);
        for (size_t i = 0; i < excess; ++i) {
            dropped.push_back(state.a.front());
            state.a.pop_front();
        }
    }
    return dropped;
}

}  // namespace osim
