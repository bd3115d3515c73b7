// End-to-end tests of the overloadsim binary. The test runner passes the
// tool's path in OVERLOADSIM_BIN; every case works in its own scratch
// directory under the system temp root.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "osim/event_io.hpp"
#include "osim/influence.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace osim;

namespace {

std::string tool_path() {
    const char* b = std::getenv("OVERLOADSIM_BIN");
    return b == nullptr ? std::string{} : std::string{b};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("osim_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const fs::path& dir, const std::string& args, const std::string& env = {}) {
    const fs::path out = dir / "_stdout.txt";
    const fs::path err = dir / "_stderr.txt";
    std::string cmd;
    if (!env.empty()) cmd += env + " ";
    cmd += tool_path() + " " + args + " >" + out.string() + " 2>" + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

// A small three-conversation export with four users.
void write_export(const fs::path& path) {
    std::ofstream out(path);
    out << "user_id,node_id,parent_id,root_id,action,timestamp\n"
           "alice,n1,,,initiate,2024-01-01T00:00:00Z\n"
           "bob,n2,n1,n1,contribute,2024-01-01T01:00:00Z\n"
           "carol,n3,n1,n1,share,2024-01-01T02:00:00Z\n"
           "alice,n4,,,initiate,2024-01-01T03:00:00Z\n"
           "bob,n5,n4,n4,contribute,2024-01-01T04:30:00Z\n"
           "carol,n6,n5,n4,contribute,2024-01-01T05:00:00Z\n"
           "alice,n7,n6,n4,share,2024-01-01T06:00:00Z\n"
           "bob,n8,,,initiate,2024-01-01T07:00:00Z\n"
           "alice,n9,n8,n8,contribute,2024-01-01T08:00:00Z\n"
           "carol,n10,n8,n8,contribute,2024-01-01T09:00:00Z\n"
           "bob,n11,n9,n8,share,2024-01-01T10:00:00Z\n"
           "dave,n12,n10,n8,contribute,2024-01-01T11:00:00Z\n";
}

// ingest + influence, returning the network path.
fs::path make_network(const fs::path& dir) {
    write_export(dir / "export.csv");
    auto r = run_cli(dir, "ingest -i " + (dir / "export.csv").string() + " -o " + (dir / "log.jsonl").string());
    REQUIRE(r.exit_code == 0);
    r = run_cli(dir, "influence --log " + (dir / "log.jsonl").string() + " -o " + (dir / "network.jsonl").string());
    REQUIRE(r.exit_code == 0);
    return dir / "network.jsonl";
}

std::string sim_args(const fs::path& net, const fs::path& out_dir, uint64_t seed, int jobs = 1) {
    std::ostringstream s;
    s << "simulate --network " << net.string() << " -o " << out_dir.string()
      << " --horizon 150 --m-max 20 --alpha 0.4 --rate 0.05 --seed " << seed << " --jobs " << jobs;
    return s.str();
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("binary path is provided") { REQUIRE(!tool_path().empty()); }

    TEST_CASE("ingest normalizes an export and reports validation") {
        const auto dir = scratch_dir("ingest");
        write_export(dir / "export.csv");
        const auto r = run_cli(dir, "ingest -i " + (dir / "export.csv").string() + " -o " +
                                        (dir / "log.jsonl").string() + " --report " + (dir / "report.json").string());
        CHECK(r.exit_code == 0);

        // first line is a self-describing header, rest parses as a canonical log
        std::ifstream log(dir / "log.jsonl");
        std::string first;
        std::getline(log, first);
        const json header = json::parse(first);
        CHECK(header.at("type") == "header");
        CHECK(header.at("command") == "ingest");
        CHECK(header.contains("version"));
        CHECK(header.contains("seed"));
        CHECK(header.contains("config"));

        const auto parsed = parse_event_log_file((dir / "log.jsonl").string());
        CHECK(parsed.log.events.size() == 12);
        CHECK(parsed.rejects.empty());

        const json report = json::parse(slurp(dir / "report.json"));
        CHECK(report.at("events") == 12);
        CHECK(report.at("conversations") == 3);
        CHECK(report.at("rejected") == 0);
    }

    TEST_CASE("ingest keeps valid rows and reports rejected ones") {
        const auto dir = scratch_dir("ingest_mixed");
        {
            std::ofstream out(dir / "export.csv");
            out << "user_id,node_id,parent_id,root_id,action,timestamp\n"
                   "alice,n1,,,initiate,2024-01-01T00:00:00Z\n"
                   "bob,n2,n1,n1,frobnicate,2024-01-01T01:00:00Z\n"
                   "carol,n3,n1,n1,share,not-a-time\n"
                   "dave,n4,n1,n1,contribute,2024-01-01T02:00:00Z\n";
        }
        const auto r = run_cli(dir, "ingest -i " + (dir / "export.csv").string() + " -o " +
                                        (dir / "log.jsonl").string() + " --report " + (dir / "report.json").string());
        CHECK(r.exit_code == 0);
        const json report = json::parse(slurp(dir / "report.json"));
        CHECK(report.at("events") == 2);
        CHECK(report.at("rejected") == 2);
        CHECK(report.at("rejects").size() == 2);
    }

    TEST_CASE("ingest fails loudly on a missing input") {
        const auto dir = scratch_dir("ingest_missing");
        const auto r = run_cli(dir, "ingest -i " + (dir / "nope.csv").string() + " -o " + (dir / "log.jsonl").string());
        CHECK(r.exit_code != 0);
        CHECK(!r.err.empty());
        CHECK(!fs::exists(dir / "log.jsonl"));
    }

    TEST_CASE("influence writes a network the library reads back") {
        const auto dir = scratch_dir("influence");
        const auto net_path = make_network(dir);
        const auto net = read_network_file(net_path.string());
        CHECK(net.users.size() == 4);
        CHECK(!net.edges.empty());
        for (const auto& e : net.edges) {
            CHECK(e.q >= 0.0);
            CHECK(e.q <= 1.0);
            CHECK(e.src_user != e.dst_user);
        }
    }

    TEST_CASE("simulate is byte-identical across reruns and job counts") {
        const auto dir = scratch_dir("determinism");
        const auto net = make_network(dir);
        REQUIRE(run_cli(dir, sim_args(net, dir / "a", 7)).exit_code == 0);
        REQUIRE(run_cli(dir, sim_args(net, dir / "b", 7)).exit_code == 0);
        REQUIRE(run_cli(dir, sim_args(net, dir / "j4", 7, 4)).exit_code == 0);
        for (const char* name : {"log.jsonl", "traces.csv", "ledger.jsonl"}) {
            CAPTURE(name);
            const auto a = slurp(dir / "a" / name);
            CHECK(!a.empty());
            CHECK(a == slurp(dir / "b" / name));
            CHECK(a == slurp(dir / "j4" / name));
        }
        // different seed, different stream
        REQUIRE(run_cli(dir, sim_args(net, dir / "s8", 8)).exit_code == 0);
        CHECK(slurp(dir / "a" / "log.jsonl") != slurp(dir / "s8" / "log.jsonl"));
    }

    TEST_CASE("seed falls back to the environment variable") {
        const auto dir = scratch_dir("env_seed");
        const auto net = make_network(dir);
        std::ostringstream args;
        args << "simulate --network " << net.string() << " -o " << (dir / "env").string()
             << " --horizon 150 --m-max 20 --alpha 0.4 --rate 0.05";
        REQUIRE(run_cli(dir, args.str(), "OVERLOADSIM_SEED=7").exit_code == 0);
        REQUIRE(run_cli(dir, sim_args(net, dir / "flag", 7)).exit_code == 0);
        CHECK(slurp(dir / "env" / "log.jsonl") == slurp(dir / "flag" / "log.jsonl"));
    }

    TEST_CASE("config file supplies defaults that flags override") {
        const auto dir = scratch_dir("config");
        const auto net = make_network(dir);
        {
            std::ofstream out(dir / "cfg.ini");
            out << "[simulate]\nhorizon=150\nm-max=20\nalpha=0.4\nrate=0.05\nseed=7\n";
        }
        std::ostringstream from_cfg;
        from_cfg << "--config " << (dir / "cfg.ini").string() << " simulate --network " << net.string()
                 << " -o " << (dir / "cfg_run").string();
        REQUIRE(run_cli(dir, from_cfg.str()).exit_code == 0);
        REQUIRE(run_cli(dir, sim_args(net, dir / "flag_run", 7)).exit_code == 0);
        CHECK(slurp(dir / "cfg_run" / "log.jsonl") == slurp(dir / "flag_run" / "log.jsonl"));

        // a flag beats the file
        std::ostringstream with_flag;
        with_flag << "--config " << (dir / "cfg.ini").string() << " simulate --network " << net.string()
                  << " -o " << (dir / "override").string() << " --seed 8";
        REQUIRE(run_cli(dir, with_flag.str()).exit_code == 0);
        CHECK(slurp(dir / "override" / "log.jsonl") != slurp(dir / "cfg_run" / "log.jsonl"));
    }

    TEST_CASE("measure scores a log against itself as zero divergence") {
        const auto dir = scratch_dir("measure");
        const auto net = make_network(dir);
        REQUIRE(run_cli(dir, sim_args(net, dir / "sim", 7)).exit_code == 0);
        std::ostringstream args;
        args << "measure --log " << (dir / "sim" / "log.jsonl").string() << " --truth "
             << (dir / "sim" / "log.jsonl").string() << " --network " << net.string() << " --traces "
             << (dir / "sim" / "traces.csv").string() << " --ledger " << (dir / "sim" / "ledger.jsonl").string()
             << " -o " << (dir / "report").string();
        REQUIRE(run_cli(dir, args.str()).exit_code == 0);

        for (const char* name : {"cascades.csv", "distributions.json", "jsd.csv", "load_buckets.csv",
                                 "neighborhood.csv", "exposure_response.csv", "capacity.json"}) {
            CAPTURE(name);
            CHECK(fs::exists(dir / "report" / name));
        }
        std::istringstream jsd(slurp(dir / "report" / "jsd.csv"));
        std::string line;
        std::getline(jsd, line);  // header comment
        std::getline(jsd, line);  // column names
        int rows = 0;
        while (std::getline(jsd, line)) {
            ++rows;
            CHECK(line.substr(line.rfind(',') + 1) == "0");
        }
        CHECK(rows == 3);

        const json cap = json::parse(slurp(dir / "report" / "capacity.json"));
        CHECK(cap.at("max_m") == 20);
        CHECK(cap.at("samples").get<int>() > 0);
    }

    TEST_CASE("measure requires the network when traces are analyzed") {
        const auto dir = scratch_dir("measure_guard");
        const auto net = make_network(dir);
        REQUIRE(run_cli(dir, sim_args(net, dir / "sim", 7)).exit_code == 0);
        std::ostringstream args;
        args << "measure --log " << (dir / "sim" / "log.jsonl").string() << " --traces "
             << (dir / "sim" / "traces.csv").string() << " --ledger " << (dir / "sim" / "ledger.jsonl").string()
             << " -o " << (dir / "report").string();
        const auto r = run_cli(dir, args.str());
        CHECK(r.exit_code != 0);
        CHECK(r.err.find("network") != std::string::npos);
    }

    TEST_CASE("sweep emits one scored row per cell, rep, and metric") {
        const auto dir = scratch_dir("sweep");
        const auto net = make_network(dir);
        REQUIRE(run_cli(dir, sim_args(net, dir / "truth", 7)).exit_code == 0);
        std::ostringstream args;
        args << "sweep --truth " << (dir / "truth" / "log.jsonl").string() << " --network " << net.string()
             << " -o " << (dir / "sweep.csv").string() << " --m-max-values 10,30 --alpha-values 0.0,0.8"
             << " --reps 2 --horizon 100 --rate 0.05 --seed 7 --jobs 2";
        REQUIRE(run_cli(dir, args.str()).exit_code == 0);

        std::istringstream csv(slurp(dir / "sweep.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line.rfind("# {", 0) == 0);
        std::getline(csv, line);
        CHECK(line == "m_max,alpha,rep,metric,jsd");
        int rows = 0;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 2 * 2 * 2 * 3);
    }

    TEST_CASE("calibrate names a best cell and the Pareto front") {
        const auto dir = scratch_dir("calibrate");
        const auto net = make_network(dir);
        REQUIRE(run_cli(dir, sim_args(net, dir / "truth", 7)).exit_code == 0);
        std::ostringstream args;
        args << "calibrate --truth " << (dir / "truth" / "log.jsonl").string() << " --network " << net.string()
             << " -o " << (dir / "calib.json").string() << " --sweep-out " << (dir / "sweep.csv").string()
             << " --m-max-values 10,20 --alpha-values 0.0,0.4 --reps 2 --horizon 100 --rate 0.05"
             << " --seed 7 --jobs 2";
        REQUIRE(run_cli(dir, args.str()).exit_code == 0);

        const json calib = json::parse(slurp(dir / "calib.json"));
        CHECK(calib.at("type") == "summary");
        CHECK(!calib.at("best").is_null());
        CHECK(calib.at("best").contains("m_max"));
        CHECK(calib.at("best").contains("alpha"));
        CHECK(calib.at("best").at("mean_jsd").get<double>() >= 0.0);
        CHECK(!calib.at("pareto").empty());
        CHECK(calib.at("failed").empty());
        CHECK(fs::exists(dir / "sweep.csv"));
    }

    TEST_CASE("sensitivity dry run writes the full Saltelli design") {
        const auto dir = scratch_dir("sens_dry");
        const auto r = run_cli(dir, "sensitivity --mode saltelli --dry-run --n-base 8 -o " +
                                        (dir / "design.csv").string() + " --seed 3");
        CHECK(r.exit_code == 0);
        std::istringstream csv(slurp(dir / "design.csv"));
        std::string line;
        std::getline(csv, line);
        CHECK(line.rfind("# {", 0) == 0);
        std::getline(csv, line);
        CHECK(line == "row,m_max,alpha");
        int rows = 0;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 8 * (2 + 2));  // A, B, and one AB block per parameter
    }

    TEST_CASE("grid-mode sensitivity writes indices for both parameters") {
        const auto dir = scratch_dir("sens_grid");
        const auto net = make_network(dir);
        std::ostringstream args;
        args << "sensitivity --network " << net.string() << " -o " << (dir / "sens.csv").string()
             << " --mode grid --m-max-values 5,20,35 --alpha-values 0.0,0.45,0.9 --reps 2"
             << " --bootstrap 100 --horizon 80 --rate 0.05 --seed 3 --jobs 2";
        REQUIRE(run_cli(dir, args.str()).exit_code == 0);
        std::istringstream csv(slurp(dir / "sens.csv"));
        std::string line;
        std::getline(csv, line);
        std::getline(csv, line);
        CHECK(line == "metric,parameter,s_i,s_ti,ci_lo,ci_hi,n");
        int rows = 0;
        while (std::getline(csv, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 3 * 2);
    }

    TEST_CASE("bad invocations exit nonzero") {
        const auto dir = scratch_dir("bad_args");
        CHECK(run_cli(dir, "frobnicate").exit_code != 0);
        CHECK(run_cli(dir, "simulate").exit_code != 0);  // missing required flags
        CHECK(run_cli(dir, "sensitivity --mode nonsense -o x.csv").exit_code != 0);
    }
}
