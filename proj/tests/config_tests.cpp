// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "eovsim/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace eovsim;

TEST_CASE("mode names round-trip")
{
    REQUIRE(mode_name(Mode::OG) == "og");
    REQUIRE(mode_name(Mode::OEMVCC) == "oemvcc");
    REQUIRE(mode_name(Mode::EA) == "ea");
    REQUIRE(*parse_mode("og") == Mode::OG);
    REQUIRE(*parse_mode("oemvcc") == Mode::OEMVCC);
    REQUIRE(*parse_mode("ea") == Mode::EA);
    REQUIRE(!parse_mode("bogus").has_value());
}

TEST_CASE("config entries land on the right fields")
{
    ExperimentConfig x;
    apply_config_entry(x, "mode", "ea,og");
    REQUIRE(x.modes == std::vector<Mode>{Mode::EA, Mode::OG});
    apply_config_entry(x, "conflict_rates", "0.1, 0.9");
    REQUIRE(x.conflict_rates == std::vector<double>{0.1, 0.9});
    apply_config_entry(x, "seeds", "7,8");
    REQUIRE(x.seeds == std::vector<uint64_t>{7, 8});
    apply_config_entry(x, "clients", "12");
    REQUIRE(x.base.workload.clients == 12);
    apply_config_entry(x, "tx_per_client", "250");
    REQUIRE(x.base.workload.tx_per_client == 250);
    apply_config_entry(x, "interarrival_ms", "25.5");
    REQUIRE(x.base.workload.interarrival_ms == 25.5);
    apply_config_entry(x, "interarrival_dist", "exp");
    REQUIRE(x.base.workload.exponential_interarrival);
    apply_config_entry(x, "block_size", "16");
    REQUIRE(x.base.block_size == 16);
    apply_config_entry(x, "block_interval_ms", "500");
    REQUIRE(x.base.block_interval_ms == 500.0);
    apply_config_entry(x, "cache_capacity", "64");
    REQUIRE(x.base.cache_capacity == 64);
    apply_config_entry(x, "crash_at_ms", "2500");
    REQUIRE(x.base.crash_at_ms == 2500.0);
    apply_config_entry(x, "retry", "true");
    REQUIRE(x.base.retry);
    apply_config_entry(x, "bump_write_set", "yes");
    REQUIRE(x.base.bump_write_set);
    apply_config_entry(x, "mvcc_check_ms", "0.75");
    REQUIRE(x.base.costs.mvcc_check_ms == 0.75);
    apply_config_entry(x, "endorse_exec_ms", "8");
    REQUIRE(x.base.costs.endorse_exec_ms == 8.0);
    apply_config_entry(x, "warmup_frac", "0.2");
    REQUIRE(x.base.warmup_frac == 0.2);
}

TEST_CASE("unknown keys and malformed values are config errors")
{
    ExperimentConfig x;
    REQUIRE_THROWS_AS(apply_config_entry(x, "no_such_key", "1"), ConfigError);
    REQUIRE_THROWS_AS(apply_config_entry(x, "clients", "many"), ConfigError);
    REQUIRE_THROWS_AS(apply_config_entry(x, "retry", "maybe"), ConfigError);
    REQUIRE_THROWS_AS(apply_config_entry(x, "mode", "raft"), ConfigError);
    REQUIRE_THROWS_AS(apply_config_entry(x, "conflict_rates", "0.2,high"),
                      ConfigError);
}

TEST_CASE("run validation rejects inconsistent setups")
{
    RunConfig rc;
    rc.peers = 1;
    rc.endorsers_per_tx = 2;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    rc = RunConfig{};
    rc.endorsement_required = 3;
    rc.endorsers_per_tx = 2;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    rc = RunConfig{};
    rc.crash_at_ms = 100.0;
    rc.orderers = 1;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    rc = RunConfig{};
    rc.mode = Mode::EA;
    rc.malicious_rate = 0.1;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    rc = RunConfig{};
    rc.warmup_frac = 1.0;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    rc = RunConfig{};
    rc.block_interval_ms = 0.0;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);

    REQUIRE_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("cost validation rejects a cache round trip faster than the "
          "orderer link")
{
    RunConfig rc;
    rc.costs.cache_rtt_ms = 0.5;
    rc.costs.latency_orderer_orderer = 1.0;
    REQUIRE_THROWS_AS(rc.validate(), ConfigError);
}

TEST_CASE("experiment validation covers every configured mode")
{
    ExperimentConfig x;
    x.base.malicious_rate = 0.2; // EA is in the default mode list
    REQUIRE_THROWS_AS(x.validate(), ConfigError);
    x.modes = {Mode::OG, Mode::OEMVCC};
    REQUIRE_NOTHROW(x.validate());

    ExperimentConfig y;
    y.conflict_rates = {1.5};
    REQUIRE_THROWS_AS(y.validate(), ConfigError);
}

TEST_CASE("config files parse comments and blank lines")
{
    std::string path = "eovsim_config_test.tmp";
    {
        std::ofstream f(path);
        f << "# comment line\n";
        f << "\n";
        f << "clients = 3   # trailing comment\n";
        f << "mode=oemvcc\n";
        f << "seeds = 9\n";
    }
    ExperimentConfig x;
    load_config_file(x, path);
    std::remove(path.c_str());
    REQUIRE(x.base.workload.clients == 3);
    REQUIRE(x.modes == std::vector<Mode>{Mode::OEMVCC});
    REQUIRE(x.seeds == std::vector<uint64_t>{9});
}

TEST_CASE("malformed config lines carry the line number")
{
    std::string path = "eovsim_config_bad.tmp";
    {
        std::ofstream f(path);
        f << "clients = 3\n";
        f << "not a key value line\n";
    }
    ExperimentConfig x;
    bool threw = false;
    try
    {
        load_config_file(x, path);
    }
    catch (ConfigError const& e)
    {
        threw = true;
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::remove(path.c_str());
    REQUIRE(threw);

    ExperimentConfig y;
    REQUIRE_THROWS_AS(load_config_file(y, "definitely_missing.conf"),
                      ConfigError);
}

TEST_CASE("seed environment override wins")
{
    ExperimentConfig x;
    x.seeds = {1, 2, 3};
    setenv("SIM_SEED", "42", 1);
    apply_seed_env(x);
    unsetenv("SIM_SEED");
    REQUIRE(x.seeds == std::vector<uint64_t>{42});

    ExperimentConfig y;
    y.seeds = {1, 2, 3};
    apply_seed_env(y); // unset: no change
    REQUIRE(y.seeds.size() == 3);
}
