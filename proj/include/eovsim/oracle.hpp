// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/common.hpp"
#include "eovsim/ledger.hpp"

#include <map>
#include <string>
#include <vector>

namespace eovsim
{

// The serial referee deliberately re-implements state application with its
// own walk instead of reusing the ledger or cache code paths it is used to
// judge.

struct OracleTx
{
    std::string tx_id;
    ReadSet rset;
    WriteSet wset;
};

struct OracleResult
{
    std::vector<bool> verdicts; // one per ordered tx
    std::map<Key, ValueVersion> final_state;
    uint64_t final_digest = 0;
    uint64_t valid_count = 0;
};

// Ground-truth multi-version concurrency control over a total order: a tx is
// valid iff every read-set entry matches the current state version exactly
// (absent keys mismatch by convention); a valid tx's writes each advance
// their key's version by one. Pure function of (genesis, order).
inline OracleResult
serial_oracle(std::map<Key, ValueVersion> const& genesis,
              std::vector<OracleTx> const& ordered)
{
    OracleResult out;
    out.verdicts.reserve(ordered.size());
    std::map<Key, ValueVersion> state = genesis;

    for (auto const& tx : ordered)
    {
        bool valid = true;
        for (auto const& [k, readVersion] : tx.rset.entries)
        {
            auto it = state.find(k);
            if (it == state.end() || it->second.version != readVersion)
            {
                valid = false;
                break;
            }
        }
        if (valid)
        {
            for (auto const& [k, v] : tx.wset.entries)
            {
                auto& slot = state[k];
                slot.value = v;
                slot.version += 1;
            }
            ++out.valid_count;
        }
        out.verdicts.push_back(valid);
    }

    Digest d;
    for (auto const& [k, vv] : state)
    {
        d.feed(k).feed(vv.value).feed_u64(vv.version);
    }
    out.final_state = std::move(state);
    out.final_digest = d.value();
    return out;
}

inline std::map<Key, ValueVersion>
oracle_genesis(std::vector<Key> const& poolKeys)
{
    std::map<Key, ValueVersion> g;
    for (auto const& k : poolKeys)
    {
        g[k] = ValueVersion{"genesis", 1};
    }
    return g;
}

} // namespace eovsim
