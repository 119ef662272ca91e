// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/ledger.hpp"
#include "eovsim/workload.hpp"

#include <set>

namespace eovsim
{

// Per-peer key cache used only in early-avoidance mode. A marked key has an
// in-flight transaction that already passed ordering-service MVCC, so any new
// read of it is doomed; the mark is cleared when the writing transaction
// commits on this peer. Marks are idempotent.
class PeerKeyCache
{
  public:
    void
    mark(Key const& k)
    {
        mMarked.insert(k);
    }

    void
    clear(Key const& k)
    {
        mMarked.erase(k);
    }

    bool
    marked(Key const& k) const
    {
        return mMarked.count(k) != 0;
    }

    size_t
    size() const
    {
        return mMarked.size();
    }

  private:
    std::set<Key> mMarked;
};

struct ChaincodeResult
{
    bool ok = false;
    std::string error;
    ReadSet rset;
    WriteSet wset;
};

// Asset-transfer chaincode against the peer's committed world state: reads
// the target asset at its current version and writes a new owner record for
// the same key. Two simulations against the same state produce identical
// read-set versions.
inline ChaincodeResult
simulate_chaincode(WorldState const& world, Proposal const& proposal)
{
    ChaincodeResult res;
    auto vv = world.read_key(proposal.target);
    if (!vv)
    {
        res.error = "AssetNotFound";
        return res;
    }
    res.ok = true;
    res.rset.entries[proposal.target] = vv->version;
    res.wset.entries[proposal.target] =
        "o:" + proposal.client + ":" + proposal.tx_id;
    return res;
}

} // namespace eovsim
