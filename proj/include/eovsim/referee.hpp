// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/oracle.hpp"
#include "eovsim/simulation.hpp"
#include "eovsim/version_cache.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace eovsim
{

// Result of diffing a finished run against the serial referee.
struct RefereeReport
{
    uint64_t compared = 0;
    uint64_t skipped_policy_failures = 0;
    std::vector<std::string> mismatches;
    bool state_checked = false;
    bool state_match = true;

    bool
    ok() const
    {
        return mismatches.empty() && (!state_checked || state_match);
    }
};

inline std::vector<OracleTx>
to_oracle_txs(std::vector<RunResult::OrderedTx> const& ordered)
{
    std::vector<OracleTx> out;
    out.reserve(ordered.size());
    for (auto const& t : ordered)
    {
        out.push_back(OracleTx{t.tx_id, t.rset, t.wset});
    }
    return out;
}

// Replays the relocated version check over an ordered envelope sequence with
// a fresh cache. Used for order-equivalence and capacity-independence checks.
inline std::vector<bool>
replay_relocated_verdicts(std::vector<RunResult::OrderedTx> const& ordered,
                          int64_t capacity, bool bumpWriteSet)
{
    VersionCache cache(capacity);
    std::vector<bool> out;
    out.reserve(ordered.size());
    for (auto const& t : ordered)
    {
        out.push_back(
            mvcc_check_and_update(cache, t.rset, t.wset, bumpWriteSet));
    }
    return out;
}

inline uint64_t
state_digest(std::map<Key, ValueVersion> const& state)
{
    Digest d;
    for (auto const& [k, vv] : state)
    {
        d.feed(k).feed(vv.value).feed_u64(vv.version);
    }
    return d.value();
}

// Diffs one run against the serial referee over the run's own total order.
//
// Per-tx verdict source depends on the mode: the baseline reads peer-side
// commit flags from the block history; the relocated modes read the ordering
// service's verdicts. Transactions that failed the endorsement-policy check
// are policy rejections, not version verdicts, so they are excluded from both
// the comparison and the referee's replay, and the final-state comparison is
// skipped if any were present (their ordering-side verdicts touched the cache
// but never the ledger).
inline RefereeReport
referee_run(RunResult const& res)
{
    RefereeReport rep;

    std::map<std::string, Flag> vsccByTx;
    std::map<std::string, Flag> mvccByTx;
    for (auto const& rec : res.history)
    {
        if (rec.tx_id == "genesis")
        {
            continue;
        }
        vsccByTx[rec.tx_id] = rec.vscc;
        mvccByTx[rec.tx_id] = rec.mvcc;
    }

    std::vector<OracleTx> refereed;
    std::vector<bool> simVerdicts;
    for (auto const& t : res.ordered)
    {
        bool policyFailed = false;
        if (res.cfg.mode != Mode::EA)
        {
            auto it = vsccByTx.find(t.tx_id);
            policyFailed = it != vsccByTx.end() && it->second == Flag::Fail;
        }
        if (policyFailed)
        {
            ++rep.skipped_policy_failures;
            continue;
        }
        bool verdict = false;
        if (res.cfg.mode == Mode::OG)
        {
            auto it = mvccByTx.find(t.tx_id);
            if (it == mvccByTx.end())
            {
                rep.mismatches.push_back(t.tx_id +
                                         ": ordered but never in a block");
                continue;
            }
            verdict = it->second == Flag::Pass;
        }
        else
        {
            if (!t.verdict.has_value())
            {
                rep.mismatches.push_back(t.tx_id + ": no ordering verdict");
                continue;
            }
            verdict = *t.verdict;
        }
        refereed.push_back(OracleTx{t.tx_id, t.rset, t.wset});
        simVerdicts.push_back(verdict);
    }

    auto oracle =
        serial_oracle(oracle_genesis(res.pool_keys), refereed);
    rep.compared = refereed.size();
    for (size_t i = 0; i < refereed.size(); ++i)
    {
        if (oracle.verdicts[i] != simVerdicts[i])
        {
            rep.mismatches.push_back(
                refereed[i].tx_id + ": referee says " +
                (oracle.verdicts[i] ? "valid" : "invalid") +
                ", run decided " + (simVerdicts[i] ? "valid" : "invalid"));
        }
    }

    if (rep.skipped_policy_failures == 0)
    {
        rep.state_checked = true;
        rep.state_match =
            oracle.final_digest == state_digest(res.final_state);
        if (!rep.state_match)
        {
            rep.mismatches.push_back("final world state digest differs from "
                                     "the referee's");
        }
    }

    // Early-avoidance extras: blocks must carry only valid transactions, and
    // the committed set must be exactly the referee's valid set.
    if (res.cfg.mode == Mode::EA)
    {
        std::set<std::string> oracleValid;
        for (size_t i = 0; i < refereed.size(); ++i)
        {
            if (oracle.verdicts[i])
            {
                oracleValid.insert(refereed[i].tx_id);
            }
        }
        std::set<std::string> committed;
        for (auto const& b : res.chain)
        {
            if (b.block_num == 0)
            {
                continue;
            }
            for (auto const& tx : b.txs)
            {
                if (tx.mvcc != Flag::Pass || tx.vscc != Flag::Pass)
                {
                    rep.mismatches.push_back(
                        tx.tx_id + ": invalid transaction inside a block");
                }
                committed.insert(tx.tx_id);
            }
        }
        if (committed != oracleValid)
        {
            rep.mismatches.push_back(
                "committed set differs from the referee's valid set (" +
                std::to_string(committed.size()) + " committed vs " +
                std::to_string(oracleValid.size()) + " valid)");
        }
    }
    return rep;
}

} // namespace eovsim
