// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "test_support.hpp"

#include "eovsim/experiment.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eovsim;
using namespace eovsim::testsupport;

namespace
{

namespace fs = std::filesystem;

ExperimentConfig
tiny_experiment(std::string outDir)
{
    ExperimentConfig x;
    x.modes = {Mode::OG, Mode::OEMVCC, Mode::EA};
    x.conflict_rates = {0.5};
    x.seeds = {1};
    x.base.workload.clients = 4;
    x.base.workload.tx_per_client = 25;
    x.base.workload.interarrival_ms = 20.0;
    x.out_dir = std::move(outDir);
    return x;
}

std::string
slurp(fs::path const& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string>
lines_of(std::string const& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
    {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("the sweep writes every report file")
{
    auto dir = fs::temp_directory_path() / "eovsim_report_files";
    fs::remove_all(dir);
    auto x = tiny_experiment(dir.string());
    x.run_oracle = true;
    x.write_trace = true;
    x.dump_order = true;
    x.dump_ledger = true;

    std::ostringstream log;
    auto out = run_experiment(x, log);
    REQUIRE(out.exit_code == 0);
    REQUIRE(out.results.size() == 3);
    REQUIRE(out.referee_reports.size() == 3);

    for (char const* name :
         {"results.csv", "results.json", "fig4.dat", "fig5.dat", "fig6.dat",
          "trace-og-0.5-1.jsonl", "order-og-0.5-1.jsonl",
          "ledger-og-0.5-1.jsonl", "trace-ea-0.5-1.jsonl",
          "order-oemvcc-0.5-1.jsonl", "ledger-ea-0.5-1.jsonl"})
    {
        INFO(name);
        REQUIRE(fs::exists(dir / name));
    }
    REQUIRE(log.str().find("og rate=0.5 seed=1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("results.csv is header plus uniform 8-field rows")
{
    auto dir = fs::temp_directory_path() / "eovsim_report_csv";
    fs::remove_all(dir);
    std::ostringstream log;
    auto x = tiny_experiment(dir.string());
    REQUIRE(run_experiment(x, log).exit_code == 0);

    auto ls = lines_of(slurp(dir / "results.csv"));
    REQUIRE(ls.size() > 1);
    REQUIRE(ls[0] == "mode,conflict_rate,seed,metric,class,mean,stddev,n");
    for (size_t i = 1; i < ls.size(); ++i)
    {
        INFO(ls[i]);
        REQUIRE(std::count(ls[i].begin(), ls[i].end(), ',') == 7);
    }
    // Every run contributes its throughput and count rows.
    auto text = slurp(dir / "results.csv");
    REQUIRE(text.find("og,0.5,1,throughput_tps,overall,") !=
            std::string::npos);
    REQUIRE(text.find("ea,0.5,1,count,early_invalid,") != std::string::npos);
    REQUIRE(text.find("oemvcc,0.5,1,latency_ms,invalid,") !=
            std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("results.json carries settings and one entry per run")
{
    auto dir = fs::temp_directory_path() / "eovsim_report_json";
    fs::remove_all(dir);
    std::ostringstream log;
    auto x = tiny_experiment(dir.string());
    x.run_oracle = true;
    REQUIRE(run_experiment(x, log).exit_code == 0);

    auto j = nlohmann::json::parse(slurp(dir / "results.json"));
    REQUIRE(j.contains("settings"));
    REQUIRE(j.contains("runs"));
    REQUIRE(j["runs"].size() == 3);
    for (auto const& run : j["runs"])
    {
        REQUIRE(run.contains("mode"));
        REQUIRE(run.contains("throughput_tps"));
        REQUIRE(run.contains("latency_ms"));
        REQUIRE(run.contains("submitted"));
        REQUIRE(run.contains("committed"));
        REQUIRE(run.contains("oracle"));
        REQUIRE(run["oracle"]["mismatches"].size() == 0);
        REQUIRE(run["violations"].size() == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("figure files have the documented column layout")
{
    auto dir = fs::temp_directory_path() / "eovsim_report_figs";
    fs::remove_all(dir);
    std::ostringstream log;
    auto x = tiny_experiment(dir.string());
    REQUIRE(run_experiment(x, log).exit_code == 0);

    auto count_fields = [](std::string const& line) {
        std::stringstream ss(line);
        std::string tok;
        int n = 0;
        while (ss >> tok)
        {
            ++n;
        }
        return n;
    };

    auto fig4 = lines_of(slurp(dir / "fig4.dat"));
    REQUIRE(fig4.size() == 2 + 3); // two comment lines + one row per mode
    for (size_t i = 2; i < fig4.size(); ++i)
    {
        REQUIRE(count_fields(fig4[i]) == 5);
    }
    auto fig5 = lines_of(slurp(dir / "fig5.dat"));
    for (size_t i = 2; i < fig5.size(); ++i)
    {
        REQUIRE(count_fields(fig5[i]) == 9);
    }
    auto fig6 = lines_of(slurp(dir / "fig6.dat"));
    REQUIRE(fig6.size() == 2 + 3);
    for (size_t i = 2; i < fig6.size(); ++i)
    {
        REQUIRE(count_fields(fig6[i]) == 9);
    }
    fs::remove_all(dir);
}

TEST_CASE("two sweeps of the same configuration are byte-identical")
{
    auto dirA = fs::temp_directory_path() / "eovsim_repeat_a";
    auto dirB = fs::temp_directory_path() / "eovsim_repeat_b";
    fs::remove_all(dirA);
    fs::remove_all(dirB);
    std::ostringstream log;

    auto xa = tiny_experiment(dirA.string());
    xa.write_trace = true;
    REQUIRE(run_experiment(xa, log).exit_code == 0);

    auto xb = tiny_experiment(dirB.string());
    xb.write_trace = true;
    REQUIRE(run_experiment(xb, log).exit_code == 0);

    for (char const* name : {"results.csv", "results.json", "fig4.dat",
                             "fig5.dat", "fig6.dat", "trace-og-0.5-1.jsonl",
                             "trace-oemvcc-0.5-1.jsonl",
                             "trace-ea-0.5-1.jsonl"})
    {
        INFO(name);
        REQUIRE(slurp(dirA / name) == slurp(dirB / name));
    }
    fs::remove_all(dirA);
    fs::remove_all(dirB);
}

TEST_CASE("an injected verdict corruption drives the oracle exit code")
{
    auto dir = fs::temp_directory_path() / "eovsim_report_bug";
    fs::remove_all(dir);
    auto x = tiny_experiment(dir.string());
    x.modes = {Mode::OEMVCC};
    x.base.inject_mvcc_bug = true;
    x.base.check_invariants = false;
    x.run_oracle = true;
    std::ostringstream log;
    auto out = run_experiment(x, log);
    REQUIRE(out.exit_code == EXIT_ORACLE);
    REQUIRE(log.str().find("referee mismatch") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("order dumps replay through the oracle to the same verdicts")
{
    auto dir = fs::temp_directory_path() / "eovsim_order_roundtrip";
    fs::remove_all(dir);
    auto x = tiny_experiment(dir.string());
    x.modes = {Mode::OEMVCC};
    x.dump_order = true;
    std::ostringstream log;
    REQUIRE(run_experiment(x, log).exit_code == 0);

    std::ifstream in(dir / "order-oemvcc-0.5-1.jsonl");
    REQUIRE(in.good());
    std::string line;
    REQUIRE(std::getline(in, line));
    auto header = nlohmann::json::parse(line);
    REQUIRE(header["kind"] == "order_dump");
    auto poolKeys = header["genesis_keys"].get<std::vector<Key>>();

    std::vector<OracleTx> txs;
    std::vector<bool> reported;
    while (std::getline(in, line))
    {
        auto j = nlohmann::json::parse(line);
        OracleTx tx;
        tx.tx_id = j["tx_id"].get<std::string>();
        for (auto const& [k, v] : j["rset"].items())
        {
            tx.rset.entries[k] = v.get<Version>();
        }
        for (auto const& [k, v] : j["wset"].items())
        {
            tx.wset.entries[k] = v.get<std::string>();
        }
        REQUIRE(!j["verdict"].is_null());
        reported.push_back(j["verdict"].get<bool>());
        txs.push_back(std::move(tx));
    }
    REQUIRE(!txs.empty());

    auto res = serial_oracle(oracle_genesis(poolKeys), txs);
    REQUIRE(res.verdicts == reported);
    fs::remove_all(dir);
}

TEST_CASE("ledger dumps carry a verifiable hash chain")
{
    auto dir = fs::temp_directory_path() / "eovsim_ledger_roundtrip";
    fs::remove_all(dir);
    auto x = tiny_experiment(dir.string());
    x.modes = {Mode::OG};
    x.dump_ledger = true;
    std::ostringstream log;
    REQUIRE(run_experiment(x, log).exit_code == 0);

    auto parse_chain = [](fs::path const& p) {
        std::vector<Block> chain;
        std::ifstream in(p);
        REQUIRE(in.good());
        std::string line;
        while (std::getline(in, line))
        {
            auto j = nlohmann::json::parse(line);
            Block b;
            b.block_num = j["block_num"].get<uint64_t>();
            b.prev_hash =
                std::stoull(j["prev_hash"].get<std::string>(), nullptr, 16);
            b.this_hash =
                std::stoull(j["this_hash"].get<std::string>(), nullptr, 16);
            for (auto const& t : j["txs"])
            {
                Transaction tx;
                tx.tx_id = t["tx_id"].get<std::string>();
                auto flag = [](std::string const& s) {
                    return s == "pass"
                               ? Flag::Pass
                               : s == "fail" ? Flag::Fail : Flag::Unchecked;
                };
                tx.vscc = flag(t["vscc"].get<std::string>());
                tx.mvcc = flag(t["mvcc"].get<std::string>());
                b.txs.push_back(std::move(tx));
            }
            chain.push_back(std::move(b));
        }
        return chain;
    };

    auto chain = parse_chain(dir / "ledger-og-0.5-1.jsonl");
    REQUIRE(chain.size() > 1);
    REQUIRE(chain_problems(chain).empty());

    // Any tampering is visible.
    auto tampered = chain;
    tampered[1].txs[0].mvcc = tampered[1].txs[0].mvcc == Flag::Pass
                                  ? Flag::Fail
                                  : Flag::Pass;
    REQUIRE(!chain_problems(tampered).empty());
    fs::remove_all(dir);
}

TEST_CASE("empty mode lists are rejected before any run starts")
{
    ExperimentConfig x;
    x.modes.clear();
    std::ostringstream log;
    REQUIRE_THROWS_AS(run_experiment(x, log), ConfigError);
}
