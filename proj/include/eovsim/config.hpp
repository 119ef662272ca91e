// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/common.hpp"
#include "eovsim/workload.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace eovsim
{

enum class Mode
{
    OG,     // execute-order-validate baseline: peers run VSCC + MVCC
    OEMVCC, // MVCC relocated into the ordering service; peers run VSCC only
    EA,     // OEMVCC + early invalidation and execution avoidance at peers
};

inline char const*
mode_name(Mode m)
{
    switch (m)
    {
    case Mode::OG:
        return "og";
    case Mode::OEMVCC:
        return "oemvcc";
    case Mode::EA:
        return "ea";
    }
    return "?";
}

inline std::optional<Mode>
parse_mode(std::string const& s)
{
    if (s == "og")
    {
        return Mode::OG;
    }
    if (s == "oemvcc")
    {
        return Mode::OEMVCC;
    }
    if (s == "ea")
    {
        return Mode::EA;
    }
    return std::nullopt;
}

// Message latencies per link class plus fixed service times, all in
// milliseconds of virtual time.
struct CostModel
{
    double latency_client_gw = 1.0;
    double latency_gw_peer = 1.0;
    double latency_gw_orderer = 1.0;
    double latency_orderer_peer = 1.0;
    double latency_orderer_orderer = 1.0;
    double latency_peer_peer = 1.0;

    double endorse_exec_ms = 5.0;
    double vscc_ms = 1.0;
    double mvcc_check_ms = 0.5;
    double commit_per_tx_ms = 1.0;
    double cache_rtt_ms = 1.0; // write-through wait before the next check

    void
    validate() const
    {
        for (double v :
             {latency_client_gw, latency_gw_peer, latency_gw_orderer,
              latency_orderer_peer, latency_orderer_orderer, latency_peer_peer,
              endorse_exec_ms, vscc_ms, mvcc_check_ms, commit_per_tx_ms,
              cache_rtt_ms})
        {
            if (v < 0.0)
            {
                throw ConfigError("cost model values must be >= 0");
            }
        }
        if (cache_rtt_ms < latency_orderer_orderer)
        {
            throw ConfigError("cache_rtt_ms must be >= latency_orderer_orderer"
                              " (write-through must cover replica delivery)");
        }
    }
};

// Everything one simulation run needs. The sweep driver stamps mode,
// conflict_rate and seed per run.
struct RunConfig
{
    Mode mode = Mode::OG;
    uint64_t seed = 1;

    WorkloadConfig workload;

    int peers = 4; // endorsing peers; each gateway adds one committing host
    int gateways = 1;
    int orderers = 3;
    int endorsers_per_tx = 2;
    int endorsement_required = 1;
    double endorse_timeout_ms = 10000.0;

    int block_size = 10;
    double block_interval_ms = 2000.0;
    int64_t cache_capacity = -1; // < 0: unbounded hot tier
    double crash_at_ms = 0.0;    // > 0: crash the leader at this time
    double election_delay_ms = 5.0;

    double malicious_rate = 0.0; // fraction of envelopes forged + injected
    bool retry = false;
    bool bump_write_set = false;
    double warmup_frac = 0.1;

    bool collect_trace = false;
    bool check_invariants = true;
    // Test hook: flip the first MVCC verdict so oracle diffing has something
    // to catch.
    bool inject_mvcc_bug = false;

    CostModel costs;

    void
    validate() const
    {
        workload.validate();
        costs.validate();
        if (peers < endorsers_per_tx)
        {
            throw ConfigError("peers must be >= endorsers_per_tx");
        }
        if (endorsers_per_tx < 1)
        {
            throw ConfigError("endorsers_per_tx must be >= 1");
        }
        if (endorsement_required < 1 ||
            endorsement_required > endorsers_per_tx)
        {
            throw ConfigError(
                "endorsement_required must be within [1, endorsers_per_tx]");
        }
        if (gateways < 1)
        {
            throw ConfigError("gateways must be >= 1");
        }
        if (orderers < 1)
        {
            throw ConfigError("orderers must be >= 1");
        }
        if (block_size < 1)
        {
            throw ConfigError("block_size must be >= 1");
        }
        if (block_interval_ms <= 0.0)
        {
            throw ConfigError("block_interval_ms must be > 0");
        }
        if (crash_at_ms > 0.0 && orderers < 2)
        {
            throw ConfigError("crash_at_ms requires orderers >= 2");
        }
        if (malicious_rate < 0.0 || malicious_rate > 1.0)
        {
            throw ConfigError("malicious_rate must be within [0, 1]");
        }
        if (mode == Mode::EA && malicious_rate > 0.0)
        {
            throw ConfigError("ea mode assumes no malicious clients; "
                              "malicious_rate must be 0");
        }
        if (warmup_frac < 0.0 || warmup_frac >= 1.0)
        {
            throw ConfigError("warmup_frac must be within [0, 1)");
        }
        if (election_delay_ms < 0.0)
        {
            throw ConfigError("election_delay_ms must be >= 0");
        }
        if (endorse_timeout_ms < 0.0)
        {
            throw ConfigError("endorse_timeout_ms must be >= 0");
        }
    }
};

// Sweep-level configuration: the report is a pure function of this plus the
// seed list.
struct ExperimentConfig
{
    std::vector<Mode> modes = {Mode::OG, Mode::OEMVCC, Mode::EA};
    std::vector<double> conflict_rates = {0.2, 0.5, 0.8};
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

    RunConfig base;

    std::string out_dir = "results";
    bool run_oracle = false;
    bool write_trace = false;
    bool dump_order = false;
    bool dump_ledger = false;

    RunConfig
    make_run(Mode mode, double rate, uint64_t seed) const
    {
        RunConfig rc = base;
        rc.mode = mode;
        rc.workload.conflict_rate = rate;
        rc.seed = seed;
        rc.collect_trace = write_trace;
        rc.validate();
        return rc;
    }

    void
    validate() const
    {
        if (modes.empty() || conflict_rates.empty() || seeds.empty())
        {
            throw ConfigError("modes, conflict_rates and seeds must be "
                              "non-empty");
        }
        for (double r : conflict_rates)
        {
            if (r < 0.0 || r > 1.0)
            {
                throw ConfigError("conflict_rates must be within [0, 1]");
            }
            if (r > 0.0 && base.workload.hot_assets == 0)
            {
                throw ConfigError(
                    "hot_assets=0 is incompatible with conflict_rate > 0");
            }
        }
        for (Mode m : modes)
        {
            RunConfig rc = base;
            rc.mode = m;
            rc.workload.conflict_rate = conflict_rates.front();
            rc.validate();
        }
    }
};

namespace config_detail
{

inline std::string
trim(std::string const& s)
{
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
    {
        return "";
    }
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double
to_double(std::string const& key, std::string const& v)
{
    try
    {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size())
        {
            throw std::invalid_argument(v);
        }
        return d;
    }
    catch (std::exception const&)
    {
        throw ConfigError("key '" + key + "' expects a number, got '" + v +
                          "'");
    }
}

inline int64_t
to_int(std::string const& key, std::string const& v)
{
    try
    {
        size_t pos = 0;
        int64_t i = std::stoll(v, &pos);
        if (pos != v.size())
        {
            throw std::invalid_argument(v);
        }
        return i;
    }
    catch (std::exception const&)
    {
        throw ConfigError("key '" + key + "' expects an integer, got '" + v +
                          "'");
    }
}

inline bool
to_bool(std::string const& key, std::string const& v)
{
    if (v == "1" || v == "true" || v == "on" || v == "yes")
    {
        return true;
    }
    if (v == "0" || v == "false" || v == "off" || v == "no")
    {
        return false;
    }
    throw ConfigError("key '" + key + "' expects a boolean, got '" + v + "'");
}

inline std::vector<std::string>
split_list(std::string const& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
        {
            out.push_back(item);
        }
    }
    return out;
}

} // namespace config_detail

// Applies one key=value assignment (verbatim key names). Unknown keys are
// config errors so typos never pass silently.
inline void
apply_config_entry(ExperimentConfig& cfg, std::string const& key,
                   std::string const& value)
{
    using namespace config_detail;
    auto& b = cfg.base;
    auto& w = b.workload;
    auto& c = b.costs;

    if (key == "mode")
    {
        if (value == "all")
        {
            cfg.modes = {Mode::OG, Mode::OEMVCC, Mode::EA};
            return;
        }
        cfg.modes.clear();
        for (auto const& tok : split_list(value))
        {
            auto m = parse_mode(tok);
            if (!m)
            {
                throw ConfigError("unknown mode '" + tok + "'");
            }
            cfg.modes.push_back(*m);
        }
        if (cfg.modes.empty())
        {
            throw ConfigError("mode list is empty");
        }
    }
    else if (key == "conflict_rates")
    {
        cfg.conflict_rates.clear();
        for (auto const& tok : split_list(value))
        {
            cfg.conflict_rates.push_back(to_double(key, tok));
        }
        if (cfg.conflict_rates.empty())
        {
            throw ConfigError("conflict_rates list is empty");
        }
    }
    else if (key == "conflict_rate")
    {
        cfg.conflict_rates = {to_double(key, value)};
    }
    else if (key == "seeds")
    {
        cfg.seeds.clear();
        for (auto const& tok : split_list(value))
        {
            cfg.seeds.push_back(static_cast<uint64_t>(to_int(key, tok)));
        }
        if (cfg.seeds.empty())
        {
            throw ConfigError("seeds list is empty");
        }
    }
    else if (key == "seed")
    {
        cfg.seeds = {static_cast<uint64_t>(to_int(key, value))};
    }
    else if (key == "clients")
    {
        w.clients = static_cast<int>(to_int(key, value));
    }
    else if (key == "hot_assets")
    {
        w.hot_assets = static_cast<int>(to_int(key, value));
    }
    else if (key == "cold_assets_per_client")
    {
        w.cold_assets_per_client = static_cast<int>(to_int(key, value));
    }
    else if (key == "interarrival_ms")
    {
        w.interarrival_ms = to_double(key, value);
    }
    else if (key == "interarrival_dist")
    {
        if (value == "fixed")
        {
            w.exponential_interarrival = false;
        }
        else if (value == "exp")
        {
            w.exponential_interarrival = true;
        }
        else
        {
            throw ConfigError("interarrival_dist must be 'fixed' or 'exp'");
        }
    }
    else if (key == "tx_per_client")
    {
        w.tx_per_client = static_cast<int>(to_int(key, value));
    }
    else if (key == "peers")
    {
        b.peers = static_cast<int>(to_int(key, value));
    }
    else if (key == "gateways")
    {
        b.gateways = static_cast<int>(to_int(key, value));
    }
    else if (key == "orderers")
    {
        b.orderers = static_cast<int>(to_int(key, value));
    }
    else if (key == "endorsers_per_tx")
    {
        b.endorsers_per_tx = static_cast<int>(to_int(key, value));
    }
    else if (key == "endorsement_required")
    {
        b.endorsement_required = static_cast<int>(to_int(key, value));
    }
    else if (key == "endorse_timeout_ms")
    {
        b.endorse_timeout_ms = to_double(key, value);
    }
    else if (key == "block_size")
    {
        b.block_size = static_cast<int>(to_int(key, value));
    }
    else if (key == "block_interval_ms")
    {
        b.block_interval_ms = to_double(key, value);
    }
    else if (key == "cache_capacity")
    {
        b.cache_capacity = to_int(key, value);
    }
    else if (key == "crash_at_ms")
    {
        b.crash_at_ms = to_double(key, value);
    }
    else if (key == "election_delay_ms")
    {
        b.election_delay_ms = to_double(key, value);
    }
    else if (key == "malicious_rate")
    {
        b.malicious_rate = to_double(key, value);
    }
    else if (key == "warmup_frac")
    {
        b.warmup_frac = to_double(key, value);
    }
    else if (key == "latency_client_gw")
    {
        c.latency_client_gw = to_double(key, value);
    }
    else if (key == "latency_gw_peer")
    {
        c.latency_gw_peer = to_double(key, value);
    }
    else if (key == "latency_gw_orderer")
    {
        c.latency_gw_orderer = to_double(key, value);
    }
    else if (key == "latency_orderer_peer")
    {
        c.latency_orderer_peer = to_double(key, value);
    }
    else if (key == "latency_orderer_orderer")
    {
        c.latency_orderer_orderer = to_double(key, value);
    }
    else if (key == "latency_peer_peer")
    {
        c.latency_peer_peer = to_double(key, value);
    }
    else if (key == "endorse_exec_ms")
    {
        c.endorse_exec_ms = to_double(key, value);
    }
    else if (key == "vscc_ms")
    {
        c.vscc_ms = to_double(key, value);
    }
    else if (key == "mvcc_check_ms")
    {
        c.mvcc_check_ms = to_double(key, value);
    }
    else if (key == "commit_per_tx_ms")
    {
        c.commit_per_tx_ms = to_double(key, value);
    }
    else if (key == "cache_rtt_ms")
    {
        c.cache_rtt_ms = to_double(key, value);
    }
    else if (key == "retry")
    {
        b.retry = to_bool(key, value);
    }
    else if (key == "bump_write_set")
    {
        b.bump_write_set = to_bool(key, value);
    }
    else if (key == "check_invariants")
    {
        b.check_invariants = to_bool(key, value);
    }
    else
    {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

// Flat key=value file; '#' starts a comment.
inline void
load_config_file(ExperimentConfig& cfg, std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
        {
            line = line.substr(0, hash);
        }
        line = config_detail::trim(line);
        if (line.empty())
        {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("line " + std::to_string(lineno) + " of '" +
                              path + "' is not key=value");
        }
        std::string key = config_detail::trim(line.substr(0, eq));
        std::string value = config_detail::trim(line.substr(eq + 1));
        apply_config_entry(cfg, key, value);
    }
}

// SIM_SEED in the environment overrides the configured seed list.
inline void
apply_seed_env(ExperimentConfig& cfg)
{
    char const* env = std::getenv("SIM_SEED");
    if (env && *env)
    {
        cfg.seeds = {
            static_cast<uint64_t>(config_detail::to_int("SIM_SEED", env))};
    }
}

} // namespace eovsim
