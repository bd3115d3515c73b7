#include "osim/engine.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "osim/parallel.hpp"
#include "osim/rng.hpp"

namespace osim {

namespace {
constexpr uint64_t kAgentStreamSalt = 0x616765ull;
}

Simulation::Simulation(const InfluenceNetwork& net, SimConfig cfg, SeedSpec seeds, RunOptions opts)
    : n_(net.users.size()), cfg_(std::move(cfg)), params_(cfg_.params), per_agent_(std::move(cfg_.per_agent)), opts_(opts) {
    if (n_ == 0) throw std::invalid_argument("network has no users");
    if (cfg_.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (cfg_.resolution < 1) throw std::invalid_argument("resolution must be >= 1");
    if (!per_agent_.empty() && per_agent_.size() != n_)
        throw std::invalid_argument("per-agent params must cover every agent");
    auto check_params = [](const OverloadParams& p) {
        if (p.m_max < 1) throw std::invalid_argument("m_max must be >= 1");
        if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    };
    check_params(params_);
    for (const auto& p : per_agent_) check_params(p);

    rates_.assign(n_, 0.0);
    if (!seeds.background_rates.empty()) {
        if (seeds.background_rates.size() != n_)
            throw std::invalid_argument("background rates must cover every agent");
        for (size_t v = 0; v < n_; ++v) {
            if (seeds.background_rates[v] < 0.0) throw std::invalid_argument("negative background rate");
            rates_[v] = seeds.background_rates[v];
        }
    }
    sched_times_.resize(n_);
    for (const auto& s : seeds.scheduled) {
        if (s.agent < 0 || static_cast<size_t>(s.agent) >= n_)
            throw std::invalid_argument("scheduled initiation for unknown agent");
        if (s.t >= 0) sched_times_[static_cast<size_t>(s.agent)].push_back(s.t);
    }
    for (auto& ts : sched_times_) std::sort(ts.begin(), ts.end());
    sched_cursor_.assign(n_, 0);

    // Compile the network into per-dyad trigger parameters: one row per
    // (dyad, source action) with any positive edge.
    auto edges = net.edges;
    std::sort(edges.begin(), edges.end(), [](const InfluenceEdge& a, const InfluenceEdge& b) {
        if (a.src_user != b.src_user) return a.src_user < b.src_user;
        if (a.dst_user != b.dst_user) return a.dst_user < b.dst_user;
        if (a.src_action != b.src_action) return a.src_action < b.src_action;
        return a.dst_action < b.dst_action;
    });
    out_.resize(n_);
    size_t i = 0;
    while (i < edges.size()) {
        const int32_t src = edges[i].src_user;
        const int32_t dst = edges[i].dst_user;
        if (src < 0 || static_cast<size_t>(src) >= n_ || dst < 0 || static_cast<size_t>(dst) >= n_)
            throw std::invalid_argument("edge references unknown user index");
        double q[kActionCount][kActionCount] = {};
        bool any = false;
        size_t j = i;
        for (; j < edges.size() && edges[j].src_user == src && edges[j].dst_user == dst; ++j) {
            const auto& e = edges[j];
            if (e.q > 0.0) {
                q[static_cast<int>(e.src_action)][static_cast<int>(e.dst_action)] = e.q;
                any = true;
            }
        }
        if (any) {
            OutEdge oe;
            oe.dst = dst;
            for (int a = 0; a < kActionCount; ++a) {
                TriggerParam tp;
                for (int x = 0; x < kActionCount; ++x) {
                    tp.q[x] = q[a][x];
                    tp.trigger = std::max(tp.trigger, q[a][x]);
                    tp.q_sum += q[a][x];
                }
                if (tp.trigger > 0.0) {
                    oe.param[a] = static_cast<int32_t>(trigger_params_.size());
                    trigger_params_.push_back(tp);
                }
            }
            out_[static_cast<size_t>(src)].push_back(oe);
        }
        i = j;
    }

    queues_.resize(n_);
    for (size_t v = 0; v < n_; ++v) queues_[v].m = params_of(v).m_max;
    inbox_.resize(n_);
    inbox_next_.resize(n_);
    emissions_.resize(n_);
    deliveries_.resize(n_);
    fixes_.resize(n_);
    trace_scratch_.resize(n_);
    result_.tallies.assign(n_, AgentTally{});
    result_.events.users = net.users;
    result_.events.start = cfg_.start_time;
    result_.events.end = cfg_.start_time;
    result_.events.resolution = cfg_.resolution;
}

void Simulation::run_agent(size_t v) {
    auto& q = queues_[v];
    auto& inbox = inbox_[v];
    const auto& pp = params_of(v);

    const auto r_len = static_cast<int32_t>(inbox.size());
    const auto a_len = static_cast<int32_t>(q.a.size());
    const int32_t o = compute_overload(a_len, r_len, pp.m_max);
    const int32_t m_t = update_capacity(q.m, o, pp.alpha);
    const auto dropped = enqueue_and_evict(q, std::move(inbox), m_t);
    inbox.clear();
    q.last_o = o;

    Rng rng(mix_seed(cfg_.seed, static_cast<uint64_t>(v), static_cast<uint64_t>(t_), kAgentStreamSalt));
    auto& ems = emissions_[v];
    auto& dels = deliveries_[v];
    auto& fx = fixes_[v];
    ems.clear();
    dels.clear();
    fx.clear();

    auto fan_out = [&](ActionType action, int32_t local_seq, int32_t conversation) {
        for (const auto& oe : out_[v])
            dels.push_back({oe.dst, action, local_seq, conversation, oe.param[static_cast<int>(action)]});
    };

    // One Bernoulli trial per queued message, oldest first; a response
    // consumes the message, a failed trial leaves it queued.
    size_t kept = 0;
    for (size_t idx = 0; idx < q.a.size(); ++idx) {
        const Message m = q.a[idx];
        bool responded = false;
        if (m.param >= 0) {
            const TriggerParam& tp = trigger_params_[static_cast<size_t>(m.param)];
            if (rng.bernoulli(tp.trigger)) {
                const double x = rng.uniform() * tp.q_sum;
                double acc = 0.0;
                int pick = kActionCount - 1;
                for (int a = 0; a < kActionCount; ++a) {
                    acc += tp.q[a];
                    if (x < acc) {
                        pick = a;
                        break;
                    }
                }
                const auto ra = static_cast<ActionType>(pick);
                const auto seq = static_cast<int32_t>(ems.size());
                // An initiate response opens a new self-rooted conversation;
                // contribute/share continue the triggering one. Either way
                // the trial consumes the message and the ledger credits it.
                if (ra == ActionType::Initiate) {
                    ems.push_back({ra, -1, -1});
                    fan_out(ra, seq, -1);
                } else {
                    ems.push_back({ra, m.event_node_id, m.conversation_id});
                    fan_out(ra, seq, m.conversation_id);
                }
                if (m.ledger >= 0) fx.push_back({m.ledger, seq});
                result_.tallies[v].responded++;
                responded = true;
            }
        }
        if (!responded) q.a[kept++] = m;
    }
    q.a.erase(q.a.begin() + static_cast<std::ptrdiff_t>(kept), q.a.end());

    // Spontaneous initiations: scheduled first, then the Poisson draw.
    int32_t n_init = 0;
    {
        const auto& times = sched_times_[v];
        auto& cur = sched_cursor_[v];
        while (cur < times.size() && times[cur] == t_) {
            ++cur;
            ++n_init;
        }
    }
    if (rates_[v] > 0.0) n_init += rng.poisson(rates_[v]);
    for (int32_t kk = 0; kk < n_init; ++kk) {
        const auto seq = static_cast<int32_t>(ems.size());
        ems.push_back({ActionType::Initiate, -1, -1});
        fan_out(ActionType::Initiate, seq, -1);
    }

    trace_scratch_[v] = {t_, static_cast<int32_t>(v), r_len, a_len, m_t, o, static_cast<int32_t>(dropped.size())};
}

void Simulation::merge_step() {
    auto& log = result_.events;
    const int64_t ts = cfg_.start_time + static_cast<int64_t>(t_) * cfg_.resolution;

    std::vector<int32_t> base(n_);
    for (size_t v = 0; v < n_; ++v) {
        base[v] = static_cast<int32_t>(log.events.size());
        for (const auto& le : emissions_[v]) {
            CompactEvent ev;
            ev.user = static_cast<int32_t>(v);
            ev.node = static_cast<int32_t>(log.events.size());
            ev.action = le.action;
            ev.timestamp = ts;
            if (le.parent < 0) {  // initiation: its own parent and root
                ev.parent = ev.node;
                ev.root = ev.node;
            } else {
                ev.parent = le.parent;
                ev.root = le.root;
            }
            log.events.push_back(ev);
        }
    }

    if (opts_.record_ledger) {
        for (size_t v = 0; v < n_; ++v) {
            for (const auto& f : fixes_[v]) {
                auto& row = result_.ledger[static_cast<size_t>(f.ledger_row)];
                row.responded_at = t_;
                row.response_event = base[v] + f.local_seq;
            }
        }
    }

    for (size_t v = 0; v < n_; ++v) {
        for (const auto& d : deliveries_[v]) {
            const int32_t ev_idx = base[v] + d.local_seq;
            const int32_t conv = d.conversation < 0 ? ev_idx : d.conversation;
            Message m;
            m.sender = static_cast<int32_t>(v);
            m.action = d.action;
            m.conversation_id = conv;
            m.event_node_id = ev_idx;
            m.created_at = t_;
            m.param = d.param;
            result_.tallies[static_cast<size_t>(d.recipient)].delivered++;
            if (opts_.record_ledger) {
                m.ledger = static_cast<int32_t>(result_.ledger.size());
                result_.ledger.push_back({t_ + 1, d.recipient, static_cast<int32_t>(v), conv, d.action, -1, -1});
            }
            inbox_next_[static_cast<size_t>(d.recipient)].push_back(m);
        }
    }
    std::swap(inbox_, inbox_next_);
    for (auto& b : inbox_next_) b.clear();

    if (opts_.record_traces)
        result_.traces.insert(result_.traces.end(), trace_scratch_.begin(), trace_scratch_.end());
}

void Simulation::step() {
    parallel_shards(opts_.jobs, n_, [this](size_t b, size_t e) {
        for (size_t v = b; v < e; ++v) run_agent(v);
    });
    merge_step();
    ++t_;
}

SimResult Simulation::take_result() {
    auto& log = result_.events;
    log.end = cfg_.start_time + static_cast<int64_t>(t_) * cfg_.resolution;
    log.node_ids.resize(log.events.size());
    for (size_t idx = 0; idx < log.events.size(); ++idx) log.node_ids[idx] = "e" + std::to_string(idx);
    return std::move(result_);
}

SimResult run_simulation(const InfluenceNetwork& net, const SimConfig& cfg, const SeedSpec& seeds,
                         const RunOptions& opts) {
    Simulation sim(net, cfg, seeds, opts);
    for (int32_t t = 0; t < cfg.horizon; ++t) sim.step();
    return sim.take_result();
}

std::vector<std::optional<double>> responsiveness(const std::vector<LedgerRow>& ledger, size_t n_agents) {
    std::vector<int64_t> delivered(n_agents, 0);
    std::vector<int64_t> responded(n_agents, 0);
    for (const auto& row : ledger) {
        if (row.recipient < 0 || static_cast<size_t>(row.recipient) >= n_agents) continue;
        delivered[static_cast<size_t>(row.recipient)]++;
        if (row.responded_at >= 0) responded[static_cast<size_t>(row.recipient)]++;
    }
    std::vector<std::optional<double>> out(n_agents);
    for (size_t v = 0; v < n_agents; ++v) {
        if (delivered[v] > 0)
            out[v] = static_cast<double>(responded[v]) / static_cast<double>(delivered[v]);
    }
    return out;
}

void write_traces_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << "t,agent,r_len,a_len,m_t,o,dropped_count\n";
    for (const auto& r : rows) {
        out << r.t << ',' << r.agent << ',' << r.r_len << ',' << r.a_len << ',' << r.m_t << ',' << r.o << ','
            << r.dropped << '\n';
    }
}

void write_ledger_jsonl(std::ostream& out, const std::vector<LedgerRow>& rows, const CompactLog& log) {
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["delivered_at"] = r.delivered_at;
        j["recipient"] = log.users.at(static_cast<size_t>(r.recipient));
        j["sender"] = log.users.at(static_cast<size_t>(r.sender));
        j["conversation"] = r.conversation >= 0 ? log.node_ids.at(static_cast<size_t>(r.conversation)) : "";
        j["action"] = to_string(r.action);
        if (r.responded_at >= 0) {
            j["responded_at"] = r.responded_at;
            j["response_event"] = log.node_ids.at(static_cast<size_t>(r.response_event));
        } else {
            j["responded_at"] = nullptr;
            j["response_event"] = nullptr;
        }
        out << j.dump() << '\n';
    }
}

}  // namespace osim
