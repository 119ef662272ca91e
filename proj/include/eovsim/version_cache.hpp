// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/ledger.hpp"

#include <deque>
#include <map>
#include <optional>

namespace eovsim
{

// Key-version cache held by each ordering-service replica. Two tiers: a
// bounded in-memory tier with FIFO eviction and an unbounded persistent tier
// that absorbs evicted entries, so eviction never loses information and MVCC
// verdicts are independent of the configured capacity. A key lives in at most
// one tier at a time.
class VersionCache
{
  public:
    // capacity < 0 means the hot tier is unbounded.
    explicit VersionCache(int64_t capacity = -1) : mCapacity(capacity)
    {
    }

    std::optional<Version>
    lookup(Key const& k) const
    {
        auto it = mHot.find(k);
        if (it != mHot.end())
        {
            return it->second;
        }
        auto ct = mCold.find(k);
        if (ct != mCold.end())
        {
            return ct->second;
        }
        return std::nullopt;
    }

    void
    set(Key const& k, Version v)
    {
        auto it = mHot.find(k);
        if (it != mHot.end())
        {
            it->second = v; // in-place update keeps FIFO age
            return;
        }
        auto ct = mCold.find(k);
        if (ct != mCold.end())
        {
            ct->second = v; // spilled entries stay persistent
            return;
        }
        mHot.emplace(k, v);
        mHotFifo.push_back(k);
        evict_overflow();
    }

    bool
    hot_contains(Key const& k) const
    {
        return mHot.count(k) != 0;
    }

    bool
    cold_contains(Key const& k) const
    {
        return mCold.count(k) != 0;
    }

    size_t
    hot_size() const
    {
        return mHot.size();
    }

    size_t
    cold_size() const
    {
        return mCold.size();
    }

    // Merged key -> version view; the tier split is a placement detail.
    std::map<Key, Version>
    merged() const
    {
        std::map<Key, Version> out = mCold;
        for (auto const& [k, v] : mHot)
        {
            out[k] = v;
        }
        return out;
    }

    struct Snapshot
    {
        std::deque<Key> hot_fifo;
        std::map<Key, Version> hot;
        std::map<Key, Version> cold;
    };

    Snapshot
    snapshot() const
    {
        return Snapshot{mHotFifo, mHot, mCold};
    }

    // Replica resync after leader failover: adopt the leader's exact tier
    // placement so subsequent identical update sequences keep replicas
    // identical.
    void
    restore(Snapshot const& s)
    {
        mHotFifo = s.hot_fifo;
        mHot = s.hot;
        mCold = s.cold;
    }

  private:
    void
    evict_overflow()
    {
        if (mCapacity < 0)
        {
            return;
        }
        while (mHot.size() > static_cast<size_t>(mCapacity))
        {
            Key oldest = mHotFifo.front();
            mHotFifo.pop_front();
            auto it = mHot.find(oldest);
            mCold[oldest] = it->second;
            mHot.erase(it);
        }
    }

    int64_t mCapacity;
    std::deque<Key> mHotFifo;
    std::map<Key, Version> mHot;
    std::map<Key, Version> mCold;
};

// One MVCC check against the cache, updating it on pass. Fails iff some rset
// entry names a cached key whose cached version is strictly newer than the
// version read at endorsement time; a cache miss accepts the read as the
// baseline. On pass every rset key's expected next version (read version + 1)
// is written back.
//
// bump_write_set additionally advances cached entries for wset-only keys on
// pass; keys with no cached baseline stay absent. Off by default: for the
// stock transfer workload rset keys cover wset keys.
inline bool
mvcc_check_and_update(VersionCache& cache, ReadSet const& rset,
                      WriteSet const& wset, bool bump_write_set = false)
{
    for (auto const& [k, readVersion] : rset.entries)
    {
        auto cached = cache.lookup(k);
        if (cached && readVersion < *cached)
        {
            return false;
        }
    }
    for (auto const& [k, readVersion] : rset.entries)
    {
        cache.set(k, readVersion + 1);
    }
    if (bump_write_set)
    {
        for (auto const& [k, _] : wset.entries)
        {
            if (rset.entries.count(k))
            {
                continue;
            }
            auto cached = cache.lookup(k);
            if (cached)
            {
                cache.set(k, *cached + 1);
            }
        }
    }
    return true;
}

} // namespace eovsim
