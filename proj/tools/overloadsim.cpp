// overloadsim: command-line pipeline around the conversation simulator.
//
//   ingest      platform export -> canonical event log + validation report
//   influence   event log -> directed influence network (transfer entropy)
//   simulate    network -> simulated log, queue traces, response ledger
//   sweep       factorial (M_max, alpha) sweep scored against a truth log
//   calibrate   sweep + best-cell selection + Pareto front summary
//   measure     cascade metrics, distributions, divergences, load analyses
//   sensitivity Sobol indices of simulation outputs (Saltelli or grid mode)
//
// Every artifact starts with a JSON header line carrying the tool version,
// the resolved seed, and a hash of the effective configuration, so outputs
// are self-describing and reruns are verifiable. All randomness derives
// from one 64-bit seed (flag --seed, else env OVERLOADSIM_SEED, else 0).

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "osim/analysis.hpp"
#include "osim/calibration.hpp"
#include "osim/cascade.hpp"
#include "osim/distribution.hpp"
#include "osim/engine.hpp"
#include "osim/event.hpp"
#include "osim/event_io.hpp"
#include "osim/influence.hpp"
#include "osim/parallel.hpp"
#include "osim/rng.hpp"
#include "osim/sensitivity.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace osim;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr uint64_t kSensitivitySalt = 0x5a17;  // per-design-row streams
constexpr uint64_t kGridModeSalt = 0x512d;     // per-(cell, rep) streams

// ---------------------------------------------------------------------------
// Configuration hashing and artifact headers

// Effective settings of one invocation, as stable key=value text. Only
// semantic inputs belong here: job counts and output paths must not change
// the hash because they must not change the artifact bytes.
class Settings {
public:
    void put(const std::string& key, const std::string& value) { kv_[key] = value; }
    void put(const std::string& key, const char* value) { kv_[key] = value; }
    void put(const std::string& key, bool value) { kv_[key] = value ? "true" : "false"; }
    template <typename T>
    void put(const std::string& key, T value) {
        std::ostringstream s;
        s << std::setprecision(17) << value;
        kv_[key] = s.str();
    }
    template <typename T>
    void put_list(const std::string& key, const std::vector<T>& values) {
        std::ostringstream s;
        s << std::setprecision(17);
        for (size_t i = 0; i < values.size(); ++i) s << (i ? ";" : "") << values[i];
        kv_[key] = s.str();
    }

    std::string canonical(const std::string& command) const {
        std::string buf = command;
        buf += '\n';
        for (const auto& [k, v] : kv_) {
            buf += k;
            buf += '=';
            buf += v;
            buf += '\n';
        }
        return buf;
    }

private:
    std::map<std::string, std::string> kv_;
};

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_hash(const std::string& command, const Settings& settings) {
    std::ostringstream s;
    s << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(settings.canonical(command));
    return s.str();
}

ordered_json artifact_header(const std::string& command, const std::string& artifact, uint64_t seed,
                             const std::string& hash) {
    ordered_json h;
    h["type"] = "header";
    h["version"] = kToolVersion;
    h["command"] = command;
    h["artifact"] = artifact;
    h["seed"] = seed;
    h["config"] = hash;
    return h;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

void jsonl_header(std::ostream& out, const ordered_json& header) { out << header.dump() << '\n'; }
void csv_header(std::ostream& out, const ordered_json& header) { out << "# " << header.dump() << '\n'; }

// First contentful line of an artifact, when it is one of our headers.
std::optional<json> read_artifact_header(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        std::string text = line.substr(i);
        if (text[0] == '#') {
            const size_t brace = text.find('{');
            if (brace == std::string::npos) return std::nullopt;
            text = text.substr(brace);
        }
        json j = json::parse(text, nullptr, false);
        if (j.is_object() && j.value("type", "") == "header") return j;
        return std::nullopt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct SeedOpt {
    uint64_t seed = 0;
    CLI::Option* opt = nullptr;

    void add(CLI::App* cmd) {
        opt = cmd->add_option("--seed", seed, "Master 64-bit seed (falls back to $OVERLOADSIM_SEED)");
    }
    // Resolution order: explicit flag, then environment, then 0.
    void resolve() {
        if (opt != nullptr && opt->count() > 0) return;
        if (const char* env = std::getenv("OVERLOADSIM_SEED")) {
            try {
                size_t used = 0;
                seed = std::stoull(env, &used, 0);
                if (used != std::string(env).size()) throw std::invalid_argument("trailing garbage");
            } catch (const std::exception&) {
                throw std::runtime_error("OVERLOADSIM_SEED is not an integer: " + std::string(env));
            }
        }
    }
};

struct RateOpts {
    double rate = 0.0;
    std::string rates_file;
    std::string rates_from_log;
    std::string scheduled_file;
    CLI::Option* rate_opt = nullptr;

    void add(CLI::App* cmd) {
        rate_opt = cmd->add_option("--rate", rate, "Uniform background initiation rate per agent-step");
        auto* file = cmd->add_option("--rates-file", rates_file,
                                     "JSON rates: array (one per agent) or {user_id: rate} object")
                         ->check(CLI::ExistingFile);
        auto* from = cmd->add_option("--rates-from-log", rates_from_log,
                                     "Estimate per-user initiation rates from an event log")
                         ->check(CLI::ExistingFile);
        rate_opt->excludes(file)->excludes(from);
        file->excludes(from);
        cmd->add_option("--scheduled-file", scheduled_file,
                        "CSV of deterministic initiations, columns t,agent")
            ->check(CLI::ExistingFile);
    }

    void describe(Settings& s) const {
        if (rate_opt != nullptr && rate_opt->count() > 0) s.put("rate", rate);
        if (!rates_file.empty()) s.put("rates_file", rates_file);
        if (!rates_from_log.empty()) s.put("rates_from_log", rates_from_log);
        if (!scheduled_file.empty()) s.put("scheduled_file", scheduled_file);
    }
};

std::vector<double> resolve_rates(const RateOpts& opts, const InfluenceNetwork& net) {
    const size_t n = net.users.size();
    if (!opts.rates_file.empty()) {
        std::ifstream in(opts.rates_file);
        json j;
        in >> j;
        std::vector<double> rates(n, 0.0);
        if (j.is_array()) {
            if (j.size() != n)
                throw std::runtime_error("rates file has " + std::to_string(j.size()) + " entries, network has " +
                                         std::to_string(n) + " agents");
            for (size_t i = 0; i < n; ++i) rates[i] = j[i].get<double>();
        } else if (j.is_object()) {
            for (const auto& [user, value] : j.items()) {
                const int idx = net.user_index(user);
                if (idx < 0) throw std::runtime_error("rates file names unknown user: " + user);
                rates[static_cast<size_t>(idx)] = value.get<double>();
            }
        } else {
            throw std::runtime_error("rates file must hold a JSON array or object");
        }
        return rates;
    }
    if (!opts.rates_from_log.empty()) {
        const auto parsed = parse_event_log_file(opts.rates_from_log);
        const auto steps = static_cast<double>(parsed.log.bucket_count());
        if (steps <= 0) throw std::runtime_error("rates log covers no time interval");
        std::vector<double> rates(n, 0.0);
        for (const auto& e : parsed.log.events) {
            if (e.action != ActionType::Initiate) continue;
            const int idx = net.user_index(e.user_id);
            if (idx >= 0) rates[static_cast<size_t>(idx)] += 1.0;
        }
        for (auto& r : rates) r /= steps;
        return rates;
    }
    return std::vector<double>(n, opts.rate);
}

std::vector<ScheduledInit> resolve_scheduled(const RateOpts& opts, size_t n_agents) {
    std::vector<ScheduledInit> out;
    if (opts.scheduled_file.empty()) return out;
    std::ifstream in(opts.scheduled_file);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        if (!std::isdigit(static_cast<unsigned char>(line[i])) && line[i] != '-') continue;  // header row
        std::istringstream row(line);
        ScheduledInit init;
        char comma = 0;
        if (!(row >> init.t >> comma >> init.agent) || comma != ',')
            throw std::runtime_error("bad scheduled row at line " + std::to_string(line_no) + ": " + line);
        if (init.agent < 0 || static_cast<size_t>(init.agent) >= n_agents)
            throw std::runtime_error("scheduled agent out of range at line " + std::to_string(line_no));
        out.push_back(init);
    }
    return out;
}

SeedSpec build_seed_spec(const RateOpts& opts, const InfluenceNetwork& net) {
    SeedSpec seeds;
    seeds.background_rates = resolve_rates(opts, net);
    seeds.scheduled = resolve_scheduled(opts, net.users.size());
    return seeds;
}

struct SimOpts {
    int32_t horizon = 720;
    int32_t m_max = 30;
    double alpha = 0.0;
    int64_t start_time = 0;
    int64_t resolution = 3600;
    RateOpts rates;

    void add(CLI::App* cmd, bool with_params) {
        cmd->add_option("--horizon", horizon, "Simulated timesteps")->check(CLI::PositiveNumber);
        if (with_params) {
            cmd->add_option("--m-max", m_max, "Capacity ceiling M_max")->check(CLI::PositiveNumber);
            cmd->add_option("--alpha", alpha, "Information loss exponent in [0,1]")
                ->check(CLI::Range(0.0, 1.0));
        }
        cmd->add_option("--start-time", start_time, "Epoch seconds of timestep 0");
        cmd->add_option("--resolution", resolution, "Seconds per timestep")->check(CLI::PositiveNumber);
        rates.add(cmd);
    }

    void describe(Settings& s, bool with_params) const {
        s.put("horizon", horizon);
        if (with_params) {
            s.put("m_max", m_max);
            s.put("alpha", alpha);
        }
        s.put("start_time", start_time);
        s.put("resolution", resolution);
        rates.describe(s);
    }
};

// ---------------------------------------------------------------------------
// Artifact readers for `measure` (inverse of the simulate writers)

std::vector<TraceRow> read_traces_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open traces file: " + path.string());
    std::vector<TraceRow> rows;
    std::string line;
    bool saw_header = false;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        if (!saw_header) {
            if (line.rfind("t,agent,", i) != i)
                throw std::runtime_error("traces file lacks the t,agent,... header: " + path.string());
            saw_header = true;
            continue;
        }
        std::array<long, 7> v{};
        std::istringstream row(line);
        std::string cell;
        size_t k = 0;
        while (std::getline(row, cell, ',') && k < v.size()) v[k++] = std::stol(cell);
        if (k != v.size())
            throw std::runtime_error("bad traces row at line " + std::to_string(line_no) + ": " + line);
        TraceRow t;
        t.t = static_cast<int32_t>(v[0]);
        t.agent = static_cast<int32_t>(v[1]);
        t.r_len = static_cast<int32_t>(v[2]);
        t.a_len = static_cast<int32_t>(v[3]);
        t.m_t = static_cast<int32_t>(v[4]);
        t.o = static_cast<int32_t>(v[5]);
        t.dropped = static_cast<int32_t>(v[6]);
        rows.push_back(t);
    }
    if (!saw_header) throw std::runtime_error("traces file is empty: " + path.string());
    return rows;
}

std::vector<LedgerRow> read_ledger_jsonl(const fs::path& path, const CompactLog& log) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ledger file: " + path.string());
    std::unordered_map<std::string, int32_t> user_of, node_of;
    for (size_t i = 0; i < log.users.size(); ++i) user_of[log.users[i]] = static_cast<int32_t>(i);
    for (size_t i = 0; i < log.node_ids.size(); ++i) node_of[log.node_ids[i]] = static_cast<int32_t>(i);
    auto user_index = [&](const std::string& id) {
        const auto it = user_of.find(id);
        if (it == user_of.end()) throw std::runtime_error("ledger names a user absent from the log: " + id);
        return it->second;
    };
    auto node_index = [&](const std::string& id) {
        if (id.empty()) return int32_t{-1};
        const auto it = node_of.find(id);
        if (it == node_of.end()) throw std::runtime_error("ledger names an event absent from the log: " + id);
        return it->second;
    };

    std::vector<LedgerRow> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        json j = json::parse(line, nullptr, false);
        if (!j.is_object()) throw std::runtime_error("bad ledger row at line " + std::to_string(line_no));
        if (j.contains("type")) continue;  // header record
        LedgerRow r;
        r.delivered_at = j.at("delivered_at").get<int32_t>();
        r.recipient = user_index(j.at("recipient").get<std::string>());
        r.sender = user_index(j.at("sender").get<std::string>());
        r.conversation = node_index(j.at("conversation").get<std::string>());
        const auto action = map_platform_action(j.at("action").get<std::string>());
        if (!action) throw std::runtime_error("bad ledger action at line " + std::to_string(line_no));
        r.action = *action;
        if (j.contains("responded_at") && !j.at("responded_at").is_null()) {
            r.responded_at = j.at("responded_at").get<int32_t>();
            r.response_event = node_index(j.at("response_event").get<std::string>());
        }
        rows.push_back(r);
    }
    return rows;
}

// Permute the log's user indices to match the network's agent order, so
// trace/ledger agent columns and log user indices agree.
void align_users(CompactLog& log, const InfluenceNetwork& net) {
    std::unordered_map<std::string, int32_t> idx;
    for (size_t i = 0; i < net.users.size(); ++i) idx[net.users[i]] = static_cast<int32_t>(i);
    std::vector<int32_t> remap(log.users.size(), -1);
    for (size_t u = 0; u < log.users.size(); ++u) {
        const auto it = idx.find(log.users[u]);
        if (it == idx.end())
            throw std::runtime_error("log user absent from the network: " + log.users[u]);
        remap[u] = it->second;
    }
    for (auto& e : log.events) e.user = remap[static_cast<size_t>(e.user)];
    log.users = net.users;
}

// ---------------------------------------------------------------------------
// Small shared helpers

InfluenceNetwork load_network(const std::string& path) { return read_network_file(path); }

ParsedLog load_log(const std::string& path, LogFormat format = LogFormat::Auto) {
    return parse_event_log_file(path, format);
}

json distribution_json(const Distribution& d) {
    json j;
    j["edges"] = d.edges;
    j["counts"] = d.counts;
    return j;
}

Distribution binned(const std::vector<double>& samples, bool log2_bins, int wiener_bins) {
    if (log2_bins) {
        double max_v = 1.0;
        for (const double v : samples) max_v = std::max(max_v, v);
        return histogram(samples, log2_integer_edges(max_v));
    }
    double lo = samples.empty() ? 0.0 : samples.front();
    double hi = lo;
    for (const double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return histogram(samples, equal_width_edges(lo, hi, wiener_bins));
}

std::array<double, 3> metric_means(const CompactLog& log) {
    const auto s = metric_samples(log);
    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double sum = 0.0;
        for (const double x : v) sum += x;
        return sum / static_cast<double>(v.size());
    };
    return {mean(s.volume), mean(s.virality), mean(s.unique_users)};
}

constexpr std::array<const char*, 3> kMetricNames = {"volume", "virality", "unique_users"};

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
    std::string input;
    std::string format = "auto";
    std::string output;
    std::string report;
    SeedOpt seed;
};

int run_ingest(const IngestArgs& a) {
    const LogFormat fmt = a.format == "csv" ? LogFormat::Csv
                          : a.format == "jsonl" ? LogFormat::Jsonl
                                                : LogFormat::Auto;
    const auto parsed = load_log(a.input, fmt);
    const auto report = validate_log(parsed.log);

    Settings s;
    s.put("input", a.input);
    s.put("format", a.format);
    const auto hash = config_hash("ingest", s);

    {
        auto out = open_output(a.output);
        jsonl_header(out, artifact_header("ingest", "log", a.seed.seed, hash));
        write_jsonl(parsed.log, out);
    }
    if (!a.report.empty()) {
        ordered_json r = artifact_header("ingest", "report", a.seed.seed, hash);
        r["type"] = "report";
        r["events"] = report.event_count;
        r["conversations"] = report.conversation_count;
        r["rejected"] = parsed.rejects.size();
        r["rejects"] = json::array();
        for (const auto& rej : parsed.rejects)
            r["rejects"].push_back({{"line", rej.line}, {"reason", rej.reason}, {"raw", rej.raw}});
        r["dangling_parents"] = report.dangling_parents;
        r["dangling_roots"] = report.dangling_roots;
        r["initiation_violations"] = report.initiation_violations;
        auto out = open_output(a.report);
        out << r.dump(2) << '\n';
    }
    std::cout << "ingest: " << report.event_count << " events, " << parsed.rejects.size() << " rejected -> "
              << a.output << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// influence

struct InfluenceArgs {
    std::string log;
    std::string output;
    std::string summary;
    InfluenceOptions options;
    SeedOpt seed;
    int jobs = 1;
};

int run_influence(const InfluenceArgs& a) {
    const auto parsed = load_log(a.log);
    const auto series = bucket_series(parsed.log);

    InfluenceOptions opts = a.options;
    opts.jobs = a.jobs;
    auto net = build_influence_network(series, opts);
    net.window_start = parsed.log.start;
    net.window_end = parsed.log.end;

    Settings s;
    s.put("log", a.log);
    s.put("k", opts.history_length);
    s.put("threshold", opts.prune_threshold);
    s.put("significance", opts.significance_filter);
    if (opts.significance_filter) {
        s.put("permutations", opts.significance_permutations);
        s.put("percentile", opts.significance_percentile);
    }
    const auto hash = config_hash("influence", s);

    {
        auto out = open_output(a.output);
        jsonl_header(out, artifact_header("influence", "network", a.seed.seed, hash));
        write_network_jsonl(net, out);
    }
    if (!a.summary.empty()) {
        auto out = open_output(a.summary);
        csv_header(out, artifact_header("influence", "network_summary", a.seed.seed, hash));
        write_network_summary_csv(net, out);
    }
    std::cout << "influence: " << net.users.size() << " users, " << net.edges.size() << " edges -> "
              << a.output << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string network;
    std::string output_dir;
    SimOpts sim;
    SeedOpt seed;
    int jobs = 1;
    bool no_traces = false;
    bool no_ledger = false;
};

int run_simulate(const SimulateArgs& a) {
    const auto net = load_network(a.network);
    const auto seeds = build_seed_spec(a.sim.rates, net);

    SimConfig cfg;
    cfg.horizon = a.sim.horizon;
    cfg.seed = a.seed.seed;
    cfg.params = {a.sim.m_max, a.sim.alpha};
    cfg.start_time = a.sim.start_time;
    cfg.resolution = a.sim.resolution;

    RunOptions opts;
    opts.record_traces = !a.no_traces;
    opts.record_ledger = !a.no_ledger;
    opts.jobs = a.jobs;

    const auto res = run_simulation(net, cfg, seeds, opts);

    Settings s;
    s.put("network", a.network);
    s.put("seed", a.seed.seed);
    a.sim.describe(s, true);
    const auto hash = config_hash("simulate", s);

    const fs::path dir(a.output_dir);
    {
        auto header = artifact_header("simulate", "log", a.seed.seed, hash);
        header["start"] = res.events.start;
        header["end"] = res.events.end;
        header["resolution"] = res.events.resolution;
        auto out = open_output(dir / "log.jsonl");
        jsonl_header(out, header);
        write_jsonl(expand(res.events), out);
    }
    if (opts.record_traces) {
        auto out = open_output(dir / "traces.csv");
        csv_header(out, artifact_header("simulate", "traces", a.seed.seed, hash));
        write_traces_csv(out, res.traces);
    }
    if (opts.record_ledger) {
        auto out = open_output(dir / "ledger.jsonl");
        jsonl_header(out, artifact_header("simulate", "ledger", a.seed.seed, hash));
        write_ledger_jsonl(out, res.ledger, res.events);
    }
    std::cout << "simulate: " << res.events.events.size() << " events over " << a.sim.horizon
              << " steps -> " << a.output_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// sweep / calibrate

struct GridArgs {
    std::string truth;
    std::string network;
    std::string output;       // sweep: long CSV; calibrate: summary JSON
    std::string summary;      // sweep: optional summary JSON
    std::string sweep_out;    // calibrate: optional long CSV
    std::vector<int> m_max_values{5, 10, 15, 20, 25, 30, 35};
    std::vector<double> alpha_values{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int reps = 10;
    int wiener_bins = 20;
    SimOpts sim;
    SeedOpt seed;
    int jobs = 1;
};

Settings grid_settings(const char* command, const GridArgs& a) {
    Settings s;
    s.put("command", command);
    s.put("truth", a.truth);
    s.put("network", a.network);
    s.put("seed", a.seed.seed);
    s.put_list("m_max_values", a.m_max_values);
    s.put_list("alpha_values", a.alpha_values);
    s.put("reps", a.reps);
    s.put("wiener_bins", a.wiener_bins);
    a.sim.describe(s, false);
    return s;
}

std::vector<CalibrationCell> run_grid(const GridArgs& a, const InfluenceNetwork& net) {
    const auto truth_parsed = load_log(a.truth);
    const auto truth = metric_samples(compact(truth_parsed.log));
    const auto seeds = build_seed_spec(a.sim.rates, net);

    GridSpec spec;
    spec.m_max_values.assign(a.m_max_values.begin(), a.m_max_values.end());
    spec.alpha_values = a.alpha_values;
    spec.reps = a.reps;
    spec.base_seed = a.seed.seed;
    spec.wiener_bins = a.wiener_bins;

    const CellSimulator simulate = [&](const OverloadParams& params, uint64_t cell_seed) {
        SimConfig cfg;
        cfg.horizon = a.sim.horizon;
        cfg.seed = cell_seed;
        cfg.params = params;
        cfg.start_time = a.sim.start_time;
        cfg.resolution = a.sim.resolution;
        RunOptions opts;
        opts.record_traces = false;
        opts.record_ledger = false;
        return run_simulation(net, cfg, seeds, opts).events;
    };
    return grid_sweep(spec, truth, simulate, a.jobs);
}

ordered_json cell_json(const CalibrationCell& c) {
    ordered_json j;
    j["m_max"] = c.m_max;
    j["alpha"] = c.alpha;
    j["mean_jsd"] = c.mean_jsd;
    j["mean_jsd_volume"] = c.mean_jsd_volume;
    j["mean_jsd_virality"] = c.mean_jsd_virality;
    j["mean_jsd_unique"] = c.mean_jsd_unique;
    return j;
}

ordered_json grid_summary(const char* command, const GridArgs& a, const std::string& hash,
                          const std::vector<CalibrationCell>& cells) {
    ordered_json summary = artifact_header(command, "summary", a.seed.seed, hash);
    summary["type"] = "summary";
    summary["grid"] = {{"m_max", a.m_max_values}, {"alpha", a.alpha_values}, {"reps", a.reps}};
    size_t failed = 0;
    summary["failed"] = json::array();
    for (const auto& c : cells) {
        if (!c.failed) continue;
        ++failed;
        summary["failed"].push_back({{"m_max", c.m_max}, {"alpha", c.alpha}, {"error", c.error}});
    }
    if (failed < cells.size()) {
        summary["best"] = cell_json(select_best(cells));
        summary["pareto"] = json::array();
        for (const auto& c : pareto_front(cells)) summary["pareto"].push_back(cell_json(c));
    } else {
        summary["best"] = nullptr;
        summary["pareto"] = json::array();
    }
    return summary;
}

int run_sweep(const GridArgs& a) {
    const auto net = load_network(a.network);
    const auto cells = run_grid(a, net);
    const auto hash = config_hash("sweep", grid_settings("sweep", a));
    {
        auto out = open_output(a.output);
        csv_header(out, artifact_header("sweep", "sweep", a.seed.seed, hash));
        write_sweep_csv(out, cells);
    }
    const auto summary = grid_summary("sweep", a, hash, cells);
    if (!a.summary.empty()) {
        auto out = open_output(a.summary);
        out << summary.dump(2) << '\n';
    }
    std::cout << "sweep: " << cells.size() << " cells x " << a.reps << " reps -> " << a.output << '\n';
    if (summary["best"].is_null()) {
        std::cerr << "sweep: every cell failed\n";
        return 1;
    }
    return 0;
}

int run_calibrate(const GridArgs& a) {
    const auto net = load_network(a.network);
    const auto cells = run_grid(a, net);
    const auto hash = config_hash("calibrate", grid_settings("calibrate", a));
    const auto summary = grid_summary("calibrate", a, hash, cells);
    {
        auto out = open_output(a.output);
        out << summary.dump(2) << '\n';
    }
    if (!a.sweep_out.empty()) {
        auto out = open_output(a.sweep_out);
        csv_header(out, artifact_header("calibrate", "sweep", a.seed.seed, hash));
        write_sweep_csv(out, cells);
    }
    if (summary["best"].is_null()) {
        std::cerr << "calibrate: every cell failed\n";
        return 1;
    }
    std::cout << "calibrate: best cell m_max=" << summary["best"]["m_max"]
              << " alpha=" << summary["best"]["alpha"] << " mean_jsd=" << summary["best"]["mean_jsd"]
              << " -> " << a.output << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// measure

struct MeasureArgs {
    std::string log;
    std::string truth;
    std::string network;
    std::string traces;
    std::string ledger;
    std::string output_dir;
    int wiener_bins = 20;
    std::vector<int> load_edges{0, 11, 21, 31, 41, 51};
    int64_t start_time = 0;
    int64_t resolution = 0;  // 0 = take from the log header
    CLI::Option* start_opt = nullptr;
    SeedOpt seed;
};

int run_measure(const MeasureArgs& a) {
    auto parsed = load_log(a.log);
    // Step indexing needs the simulation window, which the parse cannot
    // recover from timestamps alone; prefer explicit flags, then the header
    // the simulate command wrote, then the parsed interval.
    const auto header = read_artifact_header(a.log);
    if (a.start_opt != nullptr && a.start_opt->count() > 0) {
        parsed.log.start = a.start_time;
    } else if (header && header->contains("start")) {
        parsed.log.start = (*header)["start"].get<int64_t>();
    }
    if (a.resolution > 0) {
        parsed.log.resolution = a.resolution;
    } else if (header && header->contains("resolution")) {
        parsed.log.resolution = (*header)["resolution"].get<int64_t>();
    }
    if (header && header->contains("end")) parsed.log.end = (*header)["end"].get<int64_t>();

    auto clog = compact(parsed.log);
    std::optional<InfluenceNetwork> net;
    if (!a.network.empty()) {
        net = load_network(a.network);
        align_users(clog, *net);
    }
    const auto trees = build_cascades(clog);
    const auto metrics = all_cascade_metrics(trees, clog);
    const auto samples = metric_samples(clog);

    Settings s;
    s.put("log", a.log);
    if (!a.truth.empty()) s.put("truth", a.truth);
    s.put("wiener_bins", a.wiener_bins);
    s.put_list("load_edges", a.load_edges);
    const auto hash = config_hash("measure", s);
    const fs::path dir(a.output_dir);

    {
        auto out = open_output(dir / "cascades.csv");
        csv_header(out, artifact_header("measure", "cascades", a.seed.seed, hash));
        out << std::setprecision(12) << "conversation,volume,virality,unique_users\n";
        for (size_t k = 0; k < trees.size(); ++k) {
            const int32_t root_node =
                trees[k].root_event >= 0 ? trees[k].root_event : trees[k].events[static_cast<size_t>(trees[k].root_pos)];
            out << clog.node_ids[static_cast<size_t>(root_node)] << ',' << metrics[k].volume << ','
                << metrics[k].virality << ',' << metrics[k].unique_users << '\n';
        }
    }
    {
        ordered_json d = artifact_header("measure", "distributions", a.seed.seed, hash);
        d["type"] = "distributions";
        d["cascades"] = trees.size();
        d["volume"] = distribution_json(binned(samples.volume, true, a.wiener_bins));
        d["virality"] = distribution_json(binned(samples.virality, false, a.wiener_bins));
        d["unique_users"] = distribution_json(binned(samples.unique_users, true, a.wiener_bins));
        auto out = open_output(dir / "distributions.json");
        out << d.dump(2) << '\n';
    }
    if (!a.truth.empty()) {
        const auto truth_parsed = load_log(a.truth);
        const auto truth = metric_samples(compact(truth_parsed.log));
        double jv = 0, jw = 0, ju = 0;
        score_against(truth, samples, a.wiener_bins, jv, jw, ju);
        auto out = open_output(dir / "jsd.csv");
        csv_header(out, artifact_header("measure", "jsd", a.seed.seed, hash));
        out << std::setprecision(12) << "metric,jsd\n"
            << "volume," << jv << '\n'
            << "virality," << jw << '\n'
            << "unique_users," << ju << '\n';
    }
    if (!a.traces.empty() || !a.ledger.empty()) {
        if (a.traces.empty() || a.ledger.empty())
            throw std::runtime_error("--traces and --ledger must be given together");
        if (!net) throw std::runtime_error("--traces/--ledger analysis needs --network for agent indexing");
        const auto traces = read_traces_csv(a.traces);
        const auto ledger = read_ledger_jsonl(a.ledger, clog);
        std::vector<int32_t> edges(a.load_edges.begin(), a.load_edges.end());
        const auto analysis = overload_exposure_analysis(traces, ledger, trees, clog, edges);
        {
            auto out = open_output(dir / "load_buckets.csv");
            csv_header(out, artifact_header("measure", "load_buckets", a.seed.seed, hash));
            write_load_buckets_csv(out, analysis.buckets);
        }
        {
            auto out = open_output(dir / "neighborhood.csv");
            csv_header(out, artifact_header("measure", "neighborhood", a.seed.seed, hash));
            write_neighborhood_csv(out, analysis.neighborhood);
        }
        {
            auto out = open_output(dir / "exposure_response.csv");
            csv_header(out, artifact_header("measure", "exposure_response", a.seed.seed, hash));
            write_exposure_response_csv(out, exposure_response_curve(ledger));
        }
        {
            const auto cap = capacity_distribution(traces);
            ordered_json c = artifact_header("measure", "capacity", a.seed.seed, hash);
            c["type"] = "capacity";
            c["samples"] = cap.samples;
            c["max_m"] = cap.max_m;
            c["mode_m"] = cap.mode_m;
            c["distribution"] = distribution_json(cap.dist);
            auto out = open_output(dir / "capacity.json");
            out << c.dump(2) << '\n';
        }
    }
    std::cout << "measure: " << trees.size() << " cascades -> " << a.output_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityArgs {
    std::string network;
    std::string output;
    std::string design_out;
    std::string sliced_out;
    std::string mode = "saltelli";
    std::string params = "m_max:5:35:int,alpha:0:0.9";
    size_t n_base = 256;
    int bootstrap = 1000;
    bool dry_run = false;
    std::vector<int> m_max_values{5, 10, 15, 20, 25, 30, 35};
    std::vector<double> alpha_values{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    int reps = 10;
    SimOpts sim;
    SeedOpt seed;
    int jobs = 1;
};

std::vector<ParamSpec> parse_param_specs(const std::string& text) {
    std::vector<ParamSpec> out;
    std::istringstream list(text);
    std::string item;
    while (std::getline(list, item, ',')) {
        if (item.empty()) continue;
        std::istringstream fields(item);
        std::string name, lo, hi, kind;
        std::getline(fields, name, ':');
        std::getline(fields, lo, ':');
        std::getline(fields, hi, ':');
        std::getline(fields, kind, ':');
        if (name.empty() || lo.empty() || hi.empty())
            throw std::runtime_error("bad parameter spec (want name:lo:hi[:int]): " + item);
        if (name != "m_max" && name != "alpha")
            throw std::runtime_error("unknown simulation parameter: " + name);
        for (const auto& p : out)
            if (p.name == name) throw std::runtime_error("duplicate parameter: " + name);
        ParamSpec spec;
        spec.name = name;
        spec.lo = std::stod(lo);
        spec.hi = std::stod(hi);
        spec.integer = kind == "int" || kind == "integer";
        out.push_back(spec);
    }
    if (out.empty()) throw std::runtime_error("no parameters given");
    return out;
}

OverloadParams params_from_row(const std::vector<ParamSpec>& specs, const std::vector<double>& row,
                               const SimOpts& defaults) {
    OverloadParams p{defaults.m_max, defaults.alpha};
    for (size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].name == "m_max") p.m_max = static_cast<int32_t>(std::llround(row[i]));
        else p.alpha = row[i];
    }
    return p;
}

int run_sensitivity(const SensitivityArgs& a) {
    Settings s;
    s.put("network", a.network);
    s.put("mode", a.mode);
    s.put("seed", a.seed.seed);
    s.put("bootstrap", a.bootstrap);
    a.sim.describe(s, true);

    if (a.mode == "saltelli") {
        const auto specs = parse_param_specs(a.params);
        s.put("params", a.params);
        s.put("n_base", a.n_base);
        const auto hash = config_hash("sensitivity", s);
        const auto design = saltelli_sample(specs, a.n_base);
        const auto rows = design.flat_rows();

        if (a.dry_run) {
            const auto& path = a.design_out.empty() ? a.output : a.design_out;
            auto out = open_output(path);
            csv_header(out, artifact_header("sensitivity", "design", a.seed.seed, hash));
            out << std::setprecision(12) << "row";
            for (const auto& spec : specs) out << ',' << spec.name;
            out << '\n';
            for (size_t r = 0; r < rows.size(); ++r) {
                out << r;
                for (const double v : rows[r]) out << ',' << v;
                out << '\n';
            }
            std::cout << "sensitivity: wrote " << rows.size() << "-row design -> " << path << '\n';
            return 0;
        }

        const auto net = load_network(a.network);
        const auto seeds = build_seed_spec(a.sim.rates, net);
        std::vector<std::array<double, 3>> results(rows.size());
        parallel_shards(a.jobs, rows.size(), [&](size_t begin, size_t end) {
            for (size_t r = begin; r < end; ++r) {
                SimConfig cfg;
                cfg.horizon = a.sim.horizon;
                cfg.seed = mix_seed(a.seed.seed, r, 0, kSensitivitySalt);
                cfg.params = params_from_row(specs, rows[r], a.sim);
                cfg.start_time = a.sim.start_time;
                cfg.resolution = a.sim.resolution;
                RunOptions opts;
                opts.record_traces = false;
                opts.record_ledger = false;
                results[r] = metric_means(run_simulation(net, cfg, seeds, opts).events);
            }
        });

        const size_t n = a.n_base;
        const size_t d = specs.size();
        std::vector<SensitivityRow> out_rows;
        for (size_t m = 0; m < kMetricNames.size(); ++m) {
            std::vector<double> ya(n), yb(n);
            std::vector<std::vector<double>> yab(d, std::vector<double>(n));
            for (size_t i = 0; i < n; ++i) {
                ya[i] = results[i][m];
                yb[i] = results[n + i][m];
                for (size_t p = 0; p < d; ++p) yab[p][i] = results[(2 + p) * n + i][m];
            }
            const auto res = sobol_indices(ya, yb, yab, a.bootstrap);
            for (size_t p = 0; p < d; ++p)
                out_rows.push_back({kMetricNames[m], specs[p].name, res.params[p], n});
        }
        auto out = open_output(a.output);
        csv_header(out, artifact_header("sensitivity", "indices", a.seed.seed, hash));
        write_sensitivity_csv(out, out_rows);
        std::cout << "sensitivity: " << rows.size() << " simulations -> " << a.output << '\n';
        return 0;
    }

    if (a.mode != "grid") throw std::runtime_error("unknown sensitivity mode: " + a.mode);
    if (a.dry_run) throw std::runtime_error("--dry-run only applies to saltelli mode");
    s.put_list("m_max_values", a.m_max_values);
    s.put_list("alpha_values", a.alpha_values);
    s.put("reps", a.reps);
    const auto hash = config_hash("sensitivity", s);

    const auto net = load_network(a.network);
    const auto seeds = build_seed_spec(a.sim.rates, net);
    const size_t ni = a.m_max_values.size();
    const size_t nj = a.alpha_values.size();
    const auto reps = static_cast<size_t>(a.reps);
    if (ni < 2 || nj < 2) throw std::runtime_error("grid mode needs at least 2 values per parameter");
    if (reps < 2) throw std::runtime_error("grid mode needs at least 2 reps per cell");

    // y[metric][i][j][rep]
    std::array<std::vector<std::vector<std::vector<double>>>, 3> y;
    for (auto& ym : y) ym.assign(ni, std::vector<std::vector<double>>(nj, std::vector<double>(reps, 0.0)));
    const size_t n_jobs = ni * nj * reps;
    parallel_shards(a.jobs, n_jobs, [&](size_t begin, size_t end) {
        for (size_t job = begin; job < end; ++job) {
            const size_t cell = job / reps;
            const size_t rep = job % reps;
            const size_t i = cell / nj;
            const size_t j = cell % nj;
            SimConfig cfg;
            cfg.horizon = a.sim.horizon;
            cfg.seed = mix_seed(a.seed.seed, cell, rep, kGridModeSalt);
            cfg.params = {a.m_max_values[i], a.alpha_values[j]};
            cfg.start_time = a.sim.start_time;
            cfg.resolution = a.sim.resolution;
            RunOptions opts;
            opts.record_traces = false;
            opts.record_ledger = false;
            const auto means = metric_means(run_simulation(net, cfg, seeds, opts).events);
            for (size_t m = 0; m < 3; ++m) y[m][i][j][rep] = means[m];
        }
    });

    std::vector<SensitivityRow> out_rows;
    for (size_t m = 0; m < kMetricNames.size(); ++m) {
        const auto res = grid_sobol_indices(y[m], a.bootstrap);
        out_rows.push_back({kMetricNames[m], "m_max", res.params[0], n_jobs});
        out_rows.push_back({kMetricNames[m], "alpha", res.params[1], n_jobs});
    }
    {
        auto out = open_output(a.output);
        csv_header(out, artifact_header("sensitivity", "indices", a.seed.seed, hash));
        write_sensitivity_csv(out, out_rows);
    }
    if (!a.sliced_out.empty()) {
        auto out = open_output(a.sliced_out);
        csv_header(out, artifact_header("sensitivity", "sliced", a.seed.seed, hash));
        out << std::setprecision(12) << "metric,parameter,slice_parameter,slice_value,s_i\n";
        for (size_t m = 0; m < kMetricNames.size(); ++m) {
            // S(m_max) at each fixed alpha: slice-major = alpha
            std::vector<std::vector<std::vector<double>>> by_alpha(nj);
            for (size_t j = 0; j < nj; ++j) {
                by_alpha[j].resize(ni);
                for (size_t i = 0; i < ni; ++i) by_alpha[j][i] = y[m][i][j];
            }
            const auto s_mmax = sliced_first_order(by_alpha);
            for (size_t j = 0; j < nj; ++j)
                out << kMetricNames[m] << ",m_max,alpha," << a.alpha_values[j] << ',' << s_mmax[j] << '\n';
            const auto s_alpha = sliced_first_order(y[m]);
            for (size_t i = 0; i < ni; ++i)
                out << kMetricNames[m] << ",alpha,m_max," << a.m_max_values[i] << ',' << s_alpha[i] << '\n';
        }
    }
    std::cout << "sensitivity: " << n_jobs << " simulations -> " << a.output << '\n';
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"Conversation-dynamics simulator and analysis pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (INI/TOML; sections per subcommand, flags override)");

    IngestArgs ingest;
    auto* cmd_ingest = app.add_subcommand("ingest", "Normalize a platform export into the canonical log");
    cmd_ingest->add_option("--input,-i", ingest.input, "Source CSV or JSON-lines file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_ingest->add_option("--format", ingest.format, "Input format")
        ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
    cmd_ingest->add_option("--output,-o", ingest.output, "Canonical JSON-lines log")->required();
    cmd_ingest->add_option("--report", ingest.report, "Validation report JSON");
    ingest.seed.add(cmd_ingest);

    InfluenceArgs influence;
    auto* cmd_influence = app.add_subcommand("influence", "Estimate the directed influence network");
    cmd_influence->add_option("--log", influence.log, "Canonical event log")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_influence->add_option("--output,-o", influence.output, "Network JSON-lines file")->required();
    cmd_influence->add_option("--summary", influence.summary, "Per-dyad max-q CSV");
    cmd_influence->add_option("--k", influence.options.history_length, "Destination history length")
        ->check(CLI::PositiveNumber);
    cmd_influence->add_option("--threshold", influence.options.prune_threshold,
                              "Drop edges with q <= threshold");
    cmd_influence->add_flag("--significance", influence.options.significance_filter,
                            "Shuffle-based significance gate");
    cmd_influence->add_option("--permutations", influence.options.significance_permutations,
                              "Shuffles per edge for the significance gate");
    cmd_influence->add_option("--percentile", influence.options.significance_percentile,
                              "Shuffle TE percentile an edge must beat");
    cmd_influence->add_option("--jobs", influence.jobs, "Worker threads")->check(CLI::PositiveNumber);
    influence.seed.add(cmd_influence);

    SimulateArgs simulate;
    auto* cmd_simulate = app.add_subcommand("simulate", "Run the agent-based simulation");
    cmd_simulate->add_option("--network", simulate.network, "Influence network file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_simulate->add_option("--output-dir,-o", simulate.output_dir,
                             "Directory for log.jsonl, traces.csv, ledger.jsonl")
        ->required();
    simulate.sim.add(cmd_simulate, true);
    cmd_simulate->add_flag("--no-traces", simulate.no_traces, "Skip the queue trace artifact");
    cmd_simulate->add_flag("--no-ledger", simulate.no_ledger, "Skip the response ledger artifact");
    cmd_simulate->add_option("--jobs", simulate.jobs, "Worker threads")->check(CLI::PositiveNumber);
    simulate.seed.add(cmd_simulate);

    GridArgs sweep;
    auto* cmd_sweep = app.add_subcommand("sweep", "Factorial parameter sweep against a truth log");
    cmd_sweep->add_option("--truth", sweep.truth, "Ground-truth event log")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sweep->add_option("--network", sweep.network, "Influence network file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sweep->add_option("--output,-o", sweep.output, "Long-format sweep CSV")->required();
    cmd_sweep->add_option("--summary", sweep.summary, "Optional summary JSON");
    cmd_sweep->add_option("--m-max-values", sweep.m_max_values, "Capacity grid values")->delimiter(',');
    cmd_sweep->add_option("--alpha-values", sweep.alpha_values, "Loss-exponent grid values")->delimiter(',');
    cmd_sweep->add_option("--reps", sweep.reps, "Repetitions per cell")->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--wiener-bins", sweep.wiener_bins, "Equal-width bins for virality divergence")
        ->check(CLI::PositiveNumber);
    sweep.sim.add(cmd_sweep, false);
    cmd_sweep->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep.seed.add(cmd_sweep);

    GridArgs calibrate;
    auto* cmd_calibrate = app.add_subcommand("calibrate", "Sweep and select the best-fitting cell");
    cmd_calibrate->add_option("--truth", calibrate.truth, "Ground-truth event log")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_calibrate->add_option("--network", calibrate.network, "Influence network file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_calibrate->add_option("--output,-o", calibrate.output, "Calibration summary JSON")->required();
    cmd_calibrate->add_option("--sweep-out", calibrate.sweep_out, "Optional long-format sweep CSV");
    cmd_calibrate->add_option("--m-max-values", calibrate.m_max_values, "Capacity grid values")
        ->delimiter(',');
    cmd_calibrate->add_option("--alpha-values", calibrate.alpha_values, "Loss-exponent grid values")
        ->delimiter(',');
    cmd_calibrate->add_option("--reps", calibrate.reps, "Repetitions per cell")->check(CLI::PositiveNumber);
    cmd_calibrate
        ->add_option("--wiener-bins", calibrate.wiener_bins, "Equal-width bins for virality divergence")
        ->check(CLI::PositiveNumber);
    calibrate.sim.add(cmd_calibrate, false);
    cmd_calibrate->add_option("--jobs", calibrate.jobs, "Worker threads")->check(CLI::PositiveNumber);
    calibrate.seed.add(cmd_calibrate);

    MeasureArgs measure;
    auto* cmd_measure = app.add_subcommand("measure", "Cascade metrics, distributions, and load analyses");
    cmd_measure->add_option("--log", measure.log, "Event log to measure")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_measure->add_option("--truth", measure.truth, "Reference log for divergence scoring")
        ->check(CLI::ExistingFile);
    cmd_measure->add_option("--network", measure.network, "Network file (agent indexing for traces/ledger)")
        ->check(CLI::ExistingFile);
    cmd_measure->add_option("--traces", measure.traces, "Queue traces CSV from simulate")
        ->check(CLI::ExistingFile);
    cmd_measure->add_option("--ledger", measure.ledger, "Response ledger JSONL from simulate")
        ->check(CLI::ExistingFile);
    cmd_measure->add_option("--output-dir,-o", measure.output_dir, "Directory for the report artifacts")
        ->required();
    cmd_measure->add_option("--wiener-bins", measure.wiener_bins, "Equal-width bins for virality")
        ->check(CLI::PositiveNumber);
    cmd_measure->add_option("--load-edges", measure.load_edges, "Load bucket lower edges")->delimiter(',');
    measure.start_opt =
        cmd_measure->add_option("--start-time", measure.start_time, "Epoch seconds of timestep 0");
    cmd_measure->add_option("--resolution", measure.resolution, "Seconds per timestep");
    measure.seed.add(cmd_measure);

    SensitivityArgs sensitivity;
    auto* cmd_sensitivity = app.add_subcommand("sensitivity", "Sobol sensitivity of simulation outputs");
    cmd_sensitivity->add_option("--network", sensitivity.network, "Influence network file")
        ->check(CLI::ExistingFile);
    cmd_sensitivity->add_option("--output,-o", sensitivity.output, "Sensitivity indices CSV")->required();
    cmd_sensitivity->add_option("--mode", sensitivity.mode, "Estimator")
        ->check(CLI::IsMember({"saltelli", "grid"}));
    cmd_sensitivity->add_option("--params", sensitivity.params,
                                "Saltelli parameter ranges, name:lo:hi[:int],...");
    cmd_sensitivity->add_option("--n-base", sensitivity.n_base, "Saltelli base sample count (power of 2)");
    cmd_sensitivity->add_option("--bootstrap", sensitivity.bootstrap, "Bootstrap resamples for the CIs")
        ->check(CLI::PositiveNumber);
    cmd_sensitivity->add_flag("--dry-run", sensitivity.dry_run, "Write the design matrix and exit");
    cmd_sensitivity->add_option("--design", sensitivity.design_out, "Design CSV path for --dry-run");
    cmd_sensitivity->add_option("--sliced-output", sensitivity.sliced_out,
                                "Per-slice first-order indices CSV (grid mode)");
    cmd_sensitivity->add_option("--m-max-values", sensitivity.m_max_values, "Grid-mode capacity values")
        ->delimiter(',');
    cmd_sensitivity->add_option("--alpha-values", sensitivity.alpha_values, "Grid-mode loss-exponent values")
        ->delimiter(',');
    cmd_sensitivity->add_option("--reps", sensitivity.reps, "Grid-mode repetitions per cell")
        ->check(CLI::PositiveNumber);
    sensitivity.sim.add(cmd_sensitivity, true);
    cmd_sensitivity->add_option("--jobs", sensitivity.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sensitivity.seed.add(cmd_sensitivity);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_ingest->parsed()) {
            ingest.seed.resolve();
            return run_ingest(ingest);
        }
        if (cmd_influence->parsed()) {
            influence.seed.resolve();
            return run_influence(influence);
        }
        if (cmd_simulate->parsed()) {
            simulate.seed.resolve();
            return run_simulate(simulate);
        }
        if (cmd_sweep->parsed()) {
            sweep.seed.resolve();
            return run_sweep(sweep);
        }
        if (cmd_calibrate->parsed()) {
            calibrate.seed.resolve();
            return run_calibrate(calibrate);
        }
        if (cmd_measure->parsed()) {
            measure.seed.resolve();
            return run_measure(measure);
        }
        if (cmd_sensitivity->parsed()) {
            sensitivity.seed.resolve();
            return run_sensitivity(sensitivity);
        }
    } catch (const std::exception& ex) {
        std::cerr << "overloadsim: error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
