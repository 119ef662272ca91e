// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/common.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eovsim
{

using Key = std::string;
// Versions are per-key write counters: 0 before any commit, +1 per committed
// write. The genesis commit leaves every pool key at version 1.
using Version = uint64_t;

struct ValueVersion
{
    std::string value;
    Version version = 0;

    bool
    operator==(ValueVersion const& o) const = default;
};

// Ordered maps everywhere state is iterated: unordered iteration order must
// never leak into event order or exported bytes.
struct ReadSet
{
    std::map<Key, Version> entries;

    bool
    operator==(ReadSet const& o) const = default;
};

struct WriteSet
{
    std::map<Key, std::string> entries;

    bool
    operator==(WriteSet const& o) const = default;
};

enum class Flag : uint8_t
{
    Unchecked = 0,
    Pass = 1,
    Fail = 2,
};

inline char const*
flag_name(Flag f)
{
    switch (f)
    {
    case Flag::Unchecked:
        return "unchecked";
    case Flag::Pass:
        return "pass";
    case Flag::Fail:
        return "fail";
    }
    return "?";
}

// Endorsing peer's stamp on an envelope: identity plus a simulated signature
// tag over the tx id.
struct EndorsementStamp
{
    std::string peer;
    std::string tag;
};

struct TxTimestamps
{
    SimTime submit = -1;  // client sent the proposal
    SimTime endorse = -1; // endorsement collection resolved
    SimTime order = -1;   // ordering service acknowledged
    SimTime commit = -1;  // committed at the client's gateway host
    SimTime notify = -1;  // client received terminal status
};

// A transaction envelope as it flows through endorsement, ordering and
// validation. vscc/mvcc flags start Unchecked and are stamped by whichever
// role performs the check in the active mode.
struct Transaction
{
    std::string tx_id;
    std::string client;
    ReadSet rset;
    WriteSet wset;
    std::vector<EndorsementStamp> endorsements;
    std::string client_sig;
    Flag vscc = Flag::Unchecked;
    Flag mvcc = Flag::Unchecked;
    // Test/attack hook: envelope skips the gateway-side policy check and goes
    // straight to ordering (peer-side validation still sees it).
    bool bypass_gateway_vscc = false;
    TxTimestamps times;
};

struct Block
{
    uint64_t block_num = 0;
    uint64_t prev_hash = 0;
    uint64_t this_hash = 0;
    std::vector<Transaction> txs;
};

// Content hash over (block_num, prev_hash, tx ids + validity flags).
inline uint64_t
block_digest(Block const& b)
{
    Digest d;
    d.feed_u64(b.block_num).feed_u64(b.prev_hash);
    for (auto const& tx : b.txs)
    {
        d.feed(tx.tx_id);
        d.feed_byte(static_cast<uint8_t>(tx.vscc));
        d.feed_byte(static_cast<uint8_t>(tx.mvcc));
    }
    return d.value();
}

class WorldState
{
  public:
    std::optional<ValueVersion>
    read_key(Key const& k) const
    {
        auto it = mStore.find(k);
        if (it == mStore.end())
        {
            return std::nullopt;
        }
        return it->second;
    }

    bool
    has_key(Key const& k) const
    {
        return mStore.count(k) != 0;
    }

    // Applies one write set atomically; every written key's version moves up
    // by exactly one (absent keys are created at version 1).
    void
    apply_write_set(WriteSet const& ws)
    {
        for (auto const& [k, v] : ws.entries)
        {
            auto& slot = mStore[k];
            slot.value = v;
            slot.version += 1;
        }
    }

    uint64_t
    digest() const
    {
        Digest d;
        for (auto const& [k, vv] : mStore)
        {
            d.feed(k).feed(vv.value).feed_u64(vv.version);
        }
        return d.value();
    }

    std::map<Key, ValueVersion> const&
    entries() const
    {
        return mStore;
    }

    size_t
    size() const
    {
        return mStore.size();
    }

  private:
    std::map<Key, ValueVersion> mStore;
};

// One record per transaction per committed block, in commit order.
struct LogRecord
{
    uint64_t block_num = 0;
    std::string tx_id;
    Flag vscc = Flag::Unchecked;
    Flag mvcc = Flag::Unchecked;
};

// Per-peer ledger: world state + hash-chained block store + history log.
// Callers hand append_block a block whose prev_hash matches the current tip
// and whose flags are final; the ledger computes this_hash, records every tx
// in the history, and applies the write sets of fully valid txs in order.
class Ledger
{
  public:
    uint64_t
    tip_hash() const
    {
        return mChain.empty() ? 0 : mChain.back().this_hash;
    }

    uint64_t
    next_block_num() const
    {
        return mChain.size();
    }

    Block const&
    append_block(Block block)
    {
        if (block.block_num != mChain.size())
        {
            throw SimError(ErrorKind::SequenceGap,
                           "expected block " + std::to_string(mChain.size()) +
                               " got " + std::to_string(block.block_num));
        }
        if (block.prev_hash != tip_hash())
        {
            throw SimError(ErrorKind::HashChainMismatch,
                           "prev_hash does not match chain tip at block " +
                               std::to_string(block.block_num));
        }
        block.this_hash = block_digest(block);
        for (auto const& tx : block.txs)
        {
            mHistory.push_back(
                LogRecord{block.block_num, tx.tx_id, tx.vscc, tx.mvcc});
            if (tx.vscc == Flag::Pass && tx.mvcc == Flag::Pass)
            {
                mWorld.apply_write_set(tx.wset);
            }
        }
        mChain.push_back(std::move(block));
        return mChain.back();
    }

    WorldState const&
    world() const
    {
        return mWorld;
    }

    std::vector<Block> const&
    chain() const
    {
        return mChain;
    }

    std::vector<LogRecord> const&
    history() const
    {
        return mHistory;
    }

  private:
    WorldState mWorld;
    std::vector<Block> mChain;
    std::vector<LogRecord> mHistory;
};

} // namespace eovsim
