// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace eovsim;
using namespace eovsim::testsupport;

TEST_CASE("relocated verdicts match the baseline over the baseline's order")
{
    // Replay the baseline's exact envelope sequence through the ordering
    // cache check; verdicts and resulting state must be identical for the
    // transfer workload.
    for (uint64_t seed : {1, 2, 3})
    {
        auto const& og = cached_run(quick_config(Mode::OG, 0.5, seed));
        std::map<std::string, Flag> ogVerdicts;
        for (auto const& rec : og.history)
        {
            if (rec.tx_id != "genesis")
            {
                ogVerdicts[rec.tx_id] = rec.mvcc;
            }
        }

        auto replayed = replay_relocated_verdicts(og.ordered, -1, false);
        auto genesis = oracle_genesis(og.pool_keys);
        auto state = genesis;
        for (size_t i = 0; i < og.ordered.size(); ++i)
        {
            auto const& t = og.ordered[i];
            REQUIRE(ogVerdicts.count(t.tx_id));
            bool ogPass = ogVerdicts[t.tx_id] == Flag::Pass;
            REQUIRE(replayed[i] == ogPass);
            if (replayed[i])
            {
                for (auto const& [k, v] : t.wset.entries)
                {
                    auto& slot = state[k];
                    slot.value = v;
                    slot.version += 1;
                }
            }
        }
        REQUIRE(state_digest(state) == state_digest(og.final_state));
    }
}

TEST_CASE("relocated-mode runs agree with the serial referee")
{
    for (Mode m : {Mode::OEMVCC, Mode::EA})
    {
        for (double rate : {0.2, 0.8})
        {
            auto const& res = cached_run(quick_config(m, rate, 2));
            REQUIRE(res.ok());
            auto rep = referee_run(res);
            for (auto const& msg : rep.mismatches)
            {
                UNSCOPED_INFO(msg);
            }
            REQUIRE(rep.ok());
            REQUIRE(rep.state_checked);
        }
    }
}

TEST_CASE("peer validation never runs the version check in relocated modes")
{
    for (Mode m : {Mode::OEMVCC, Mode::EA})
    {
        auto const& res = cached_run(quick_config(m, 0.5, 1));
        REQUIRE(res.summary.service_ms.count("peer_mvcc") == 0);
        REQUIRE(res.orderer_checks > 0);
    }
    auto const& og = cached_run(quick_config(Mode::OG, 0.5, 1));
    REQUIRE(og.summary.service_ms.at("peer_mvcc") > 0);
    REQUIRE(og.orderer_checks == 0);
}

TEST_CASE("avoidance mode skips peer-side policy checks entirely")
{
    auto const& ea = cached_run(quick_config(Mode::EA, 0.5, 1));
    REQUIRE(ea.summary.service_ms.count("peer_vscc") == 0);
    // The relocated mode without avoidance still re-validates policy.
    auto const& oe = cached_run(quick_config(Mode::OEMVCC, 0.5, 1));
    REQUIRE(oe.summary.service_ms.at("peer_vscc") > 0);
}

TEST_CASE("avoidance prunes every invalid transaction from blocks")
{
    for (double rate : {0.5, 0.8})
    {
        auto const& res = cached_run(quick_config(Mode::EA, rate, 3));
        REQUIRE(res.ok());
        REQUIRE(res.summary.invalid_mvcc > 0);
        for (auto const& b : res.chain)
        {
            for (auto const& tx : b.txs)
            {
                REQUIRE(tx.vscc == Flag::Pass);
                REQUIRE(tx.mvcc == Flag::Pass);
            }
        }
    }
}

TEST_CASE("avoidance refuses doomed endorsements at marked keys")
{
    auto rc = quick_config(Mode::EA, 0.9, 4);
    rc.workload.hot_assets = 2; // heavy contention to keep keys marked
    auto const& res = cached_run(rc);
    REQUIRE(res.early_invalid_replies > 0);
    uint64_t earlyFlagged = 0;
    for (auto const& r : res.records)
    {
        if (r.early_invalid)
        {
            ++earlyFlagged;
            REQUIRE(r.status == TxStatus::InvalidMvcc);
        }
    }
    REQUIRE(earlyFlagged > 0);

    // Refused endorsements never reach the ordering service.
    std::set<std::string> orderedIds;
    for (auto const& t : res.ordered)
    {
        orderedIds.insert(t.tx_id);
    }
    for (auto const& r : res.records)
    {
        if (r.early_invalid)
        {
            REQUIRE(orderedIds.count(r.tx_id) == 0);
        }
    }
}

TEST_CASE("invalid transactions surface fastest under avoidance")
{
    double ogMean = cached_run(default_config(Mode::OG, 0.8, 1))
                        .summary.latency_invalid.mean;
    double oeMean = cached_run(default_config(Mode::OEMVCC, 0.8, 1))
                        .summary.latency_invalid.mean;
    double eaMean = cached_run(default_config(Mode::EA, 0.8, 1))
                        .summary.latency_invalid.mean;
    REQUIRE(eaMean < oeMean);
    REQUIRE(oeMean < ogMean);
}

TEST_CASE("ordering verdicts are independent of cache capacity")
{
    auto base = quick_config(Mode::OEMVCC, 0.8, 5);
    auto const& unbounded = cached_run(base);

    for (int64_t cap : {int64_t{0}, int64_t{1}, int64_t{64}})
    {
        auto rc = base;
        rc.cache_capacity = cap;
        auto const& res = cached_run(rc);
        REQUIRE(res.ordered.size() == unbounded.ordered.size());
        for (size_t i = 0; i < res.ordered.size(); ++i)
        {
            REQUIRE(res.ordered[i].tx_id == unbounded.ordered[i].tx_id);
            REQUIRE(res.ordered[i].verdict == unbounded.ordered[i].verdict);
        }
        REQUIRE(state_digest(res.final_state) ==
                state_digest(unbounded.final_state));
    }
}

TEST_CASE("write-set bumping is a no-op for the transfer workload")
{
    auto rc = quick_config(Mode::OEMVCC, 0.5, 6);
    auto const& plain = cached_run(rc);
    rc.bump_write_set = true;
    auto const& bumped = cached_run(rc);
    REQUIRE(plain.ordered.size() == bumped.ordered.size());
    for (size_t i = 0; i < plain.ordered.size(); ++i)
    {
        REQUIRE(plain.ordered[i].verdict == bumped.ordered[i].verdict);
    }
    REQUIRE(referee_run(bumped).ok());
}

TEST_CASE("orderer notifications precede block commit for invalid txs")
{
    auto const& res = cached_run(quick_config(Mode::OEMVCC, 0.8, 2));
    for (auto const& r : res.records)
    {
        if (r.status == TxStatus::InvalidMvcc)
        {
            // Invalid verdicts travel straight from the ordering service;
            // the tx never commits.
            REQUIRE(r.commit < 0);
            REQUIRE(r.notify >= 0);
        }
    }
}
