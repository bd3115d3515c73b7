#include <doctest.h>

#include <cstdint>
#include <vector>

#include "osim/overload.hpp"
#include "osim/rng.hpp"

using osim::compute_overload;
using osim::enqueue_and_evict;
using osim::Message;
using osim::QueueState;
using osim::update_capacity;

namespace {
Message msg(int id) {
    Message m;
    m.event_node_id = id;
    return m;
}
}  // namespace

TEST_SUITE("overload") {
    TEST_CASE("overload quantity: threshold, excess, clamp") {
        CHECK(compute_overload(5, 5, 30) == 0);      // under threshold
        CHECK(compute_overload(10, 25, 30) == 5);    // direct excess
        CHECK(compute_overload(100, 0, 30) == 30);   // clamped at M_max
        CHECK(compute_overload(15, 15, 30) == 0);    // load exactly at threshold
        CHECK(compute_overload(16, 15, 30) == 1);
        CHECK(compute_overload(0, 0, 1) == 0);
        CHECK(compute_overload(1'000'000, 1'000'000, 30) == 30);
    }

    TEST_CASE("capacity update: no-overload hold, power-law loss, floor at zero") {
        CHECK(update_capacity(30, 0, 0.0) == 30);
        CHECK(update_capacity(30, 0, 0.5) == 30);
        CHECK(update_capacity(30, 0, 1.0) == 30);
        CHECK(update_capacity(30, 16, 0.5) == 26);  // 16^0.5 = 4
        CHECK(update_capacity(2, 25, 1.0) == 0);    // loss exceeds remaining capacity
        CHECK(update_capacity(30, 7, 0.0) == 29);   // alpha = 0 regime: unit loss per overloaded step
        CHECK(update_capacity(30, 1, 0.0) == 29);
        CHECK(update_capacity(30, 30, 1.0) == 0);
        CHECK(update_capacity(30, 6, 0.5) == 28);   // sqrt(6) = 2.449 rounds to 2
        CHECK(update_capacity(30, 2, 0.5) == 29);   // sqrt(2) = 1.414 rounds to 1
        CHECK(update_capacity(0, 10, 0.5) == 0);    // already collapsed
    }

    TEST_CASE("capacity loss is monotone in alpha at fixed overload") {
        for (int32_t o = 1; o <= 30; ++o) {
            int32_t prev = update_capacity(30, o, 0.0);
            for (double alpha = 0.1; alpha <= 1.0001; alpha += 0.1) {
                const int32_t cur = update_capacity(30, o, alpha);
                CHECK(cur <= prev);
                prev = cur;
            }
        }
    }

    TEST_CASE("capacity never recovers over any overload sequence") {
        osim::Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            int32_t m = 30;
            const double alpha = rng.uniform();
            for (int t = 0; t < 200; ++t) {
                const auto o = static_cast<int32_t>(rng.uniform_int(31));
                const int32_t next = update_capacity(m, o, alpha);
                CHECK(next <= m);
                CHECK(next >= 0);
                m = next;
            }
        }
    }

    TEST_CASE("enqueue keeps arrival order when everything fits") {
        QueueState q;
        q.a.push_back(msg(1));
        q.a.push_back(msg(2));
        std::vector<Message> recv{msg(3)};
        const auto dropped = enqueue_and_evict(q, std::move(recv), 3);
        CHECK(dropped.empty());
        REQUIRE(q.a.size() == 3);
        CHECK(q.a[0].event_node_id == 1);
        CHECK(q.a[1].event_node_id == 2);
        CHECK(q.a[2].event_node_id == 3);
        CHECK(q.m == 3);
    }

    TEST_CASE("eviction drops the oldest message first") {
        QueueState q;
        q.a.push_back(msg(1));
        q.a.push_back(msg(2));
        std::vector<Message> recv{msg(3), msg(4)};
        const auto dropped = enqueue_and_evict(q, std::move(recv), 3);
        REQUIRE(dropped.size() == 1);
        CHECK(dropped[0].event_node_id == 1);
        REQUIRE(q.a.size() == 3);
        CHECK(q.a[0].event_node_id == 2);
        CHECK(q.a[1].event_node_id == 3);
        CHECK(q.a[2].event_node_id == 4);
    }

    TEST_CASE("zero capacity drops the entire queue in order") {
        QueueState q;
        for (int i = 0; i < 10; ++i) q.a.push_back(msg(i));
        std::vector<Message> recv;
        for (int i = 10; i < 35; ++i) recv.push_back(msg(i));
        const auto dropped = enqueue_and_evict(q, std::move(recv), 0);
        CHECK(q.a.empty());
        REQUIRE(dropped.size() == 35);
        for (int i = 0; i < 35; ++i) CHECK(dropped[static_cast<size_t>(i)].event_node_id == i);
    }

    TEST_CASE("queue transition conserves messages and respects capacity") {
        osim::Rng rng(11);
        QueueState q;
        int next_id = 0;
        for (int step = 0; step < 300; ++step) {
            const auto r = rng.uniform_int(12);
            std::vector<Message> recv;
            for (uint64_t i = 0; i < r; ++i) recv.push_back(msg(next_id++));
            const auto before = q.a.size() + recv.size();
            const auto m_t = static_cast<int32_t>(rng.uniform_int(9));
            const auto dropped = enqueue_and_evict(q, std::move(recv), m_t);
            CHECK(q.a.size() + dropped.size() == before);
            CHECK(static_cast<int32_t>(q.a.size()) <= m_t);
            // strict arrival order within the queue
            for (size_t i = 1; i < q.a.size(); ++i)
                CHECK(q.a[i - 1].event_node_id < q.a[i].event_node_id);
        }
    }
}
