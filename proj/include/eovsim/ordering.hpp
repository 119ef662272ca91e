// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/context.hpp"
#include "eovsim/engine.hpp"
#include "eovsim/version_cache.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace eovsim
{

// Ordering-service node. One leader at a time appends envelopes to the shared
// log, cuts blocks on size or interval, and (outside the baseline mode) runs
// the relocated MVCC check serially over the log, one transaction at a time.
//
// State split mirrors a consensus deployment: the envelope log, cut points
// and issued verdicts are synchronously replicated (in OrdererShared, so they
// survive a leader crash); each replica's version cache is local and follows
// the leader asynchronously through CacheUpdate messages.
class OrdererNode : public Node
{
  public:
    OrdererNode(SimContext& ctx, int index)
        : Node(ctx.engine, Role::Orderer, "orderer-" + std::to_string(index),
               ctx.engine.root_seed())
        , mCtx(ctx)
        , mCache(ctx.cfg.cache_capacity)
    {
    }

    void
    on_event(Event const& ev) override
    {
        if (auto const* s = std::get_if<SubmitEnvelope>(&ev.payload))
        {
            handle_submit(*s);
            return;
        }
        if (auto const* u = std::get_if<CacheUpdate>(&ev.payload))
        {
            handle_cache_update(*u);
            return;
        }
        if (auto const* t = std::get_if<Timer>(&ev.payload))
        {
            switch (t->kind)
            {
            case TimerKind::BlockCut:
                handle_block_cut(*t);
                return;
            case TimerKind::MvccDone:
                handle_mvcc_done(*t);
                return;
            case TimerKind::Crash:
                handle_crash();
                return;
            case TimerKind::Elect:
                handle_elect();
                return;
            default:
                break;
            }
        }
        throw SimError(ErrorKind::Invariant,
                       name() + ": unexpected " + payload_kind(ev.payload));
    }

    bool
    is_leader() const
    {
        return mCtx.group.leader == id();
    }

    VersionCache const&
    cache() const
    {
        return mCache;
    }

    uint64_t
    checks_done() const
    {
        return mChecksDone;
    }

  private:
    void
    handle_submit(SubmitEnvelope const& s)
    {
        auto& g = mCtx.group;
        if (g.leader == id())
        {
            order_envelope(s);
        }
        else if (g.leader >= 0)
        {
            mEngine.send(id(), g.leader, s);
        }
        else
        {
            // Interregnum after a leader crash: hold until a leader exists.
            mAwaitingLeader.push_back(s);
        }
    }

    void
    order_envelope(SubmitEnvelope const& s)
    {
        auto& g = mCtx.group;
        OrderLogEntry e;
        e.envelope = s.envelope;
        e.submitting_gw = s.submitting_gw;
        e.arrival = mEngine.now();
        g.log.push_back(std::move(e));
        if (g.pending_size() == 1)
        {
            // The interval clock starts with the first envelope of a batch.
            g.pending_first_arrival = mEngine.now();
            arm_interval_timer();
        }
        mEngine.send(id(), s.submitting_gw, OrderAck{s.envelope.tx_id});
        maybe_start_check();
        if (g.pending_size() >= static_cast<size_t>(mCtx.cfg.block_size))
        {
            cut_block();
        }
    }

    void
    arm_interval_timer()
    {
        Timer t;
        t.kind = TimerKind::BlockCut;
        t.gen = ++mTimerGen;
        mEngine.schedule(id(), t, mCtx.cfg.block_interval_ms);
    }

    void
    handle_block_cut(Timer const& t)
    {
        if (!is_leader() || t.gen != mTimerGen)
        {
            return; // superseded by a size cut or a leadership change
        }
        if (mCtx.group.pending_size() > 0)
        {
            cut_block();
        }
    }

    void
    cut_block()
    {
        auto& g = mCtx.group;
        BlockCut c;
        c.start = g.pending_start;
        c.end = g.log.size();
        c.block_num = g.next_block_num++;
        c.first_arrival = g.pending_first_arrival;
        c.cut_time = mEngine.now();
        g.cuts.push_back(c);
        g.pending_start = c.end;
        g.pending_first_arrival = -1;
        ++mTimerGen; // cancels the armed interval timer
        try_broadcast();
    }

    // Serialized MVCC pipeline. One check at a time; after a pass the next
    // check waits out the cache write-through round trip so every replica has
    // applied the update before it could matter.
    void
    maybe_start_check()
    {
        if (mCtx.cfg.mode == Mode::OG || mBusy || !is_leader())
        {
            return;
        }
        auto const& log = mCtx.group.log;
        while (mCheckCursor < log.size() &&
               log[mCheckCursor].mvcc_pass.has_value())
        {
            ++mCheckCursor; // verdicts issued before a crash stand
        }
        if (mCheckCursor >= log.size())
        {
            return;
        }
        mBusy = true;
        Timer t;
        t.kind = TimerKind::MvccDone;
        t.index = mCheckCursor;
        double wait = std::max(0.0, mNextFreeAt - mEngine.now());
        mEngine.schedule(id(), t, wait + mEngine.costs().mvcc_check_ms);
    }

    void
    handle_mvcc_done(Timer const& t)
    {
        if (!is_leader())
        {
            return; // stale: issued before this node lost leadership
        }
        size_t idx = static_cast<size_t>(t.index);
        auto const& entry = mCtx.group.log[idx];
        check_replica_coherence();
        ++mChecksDone;
        mCtx.metrics.accrue("orderer_mvcc", mEngine.costs().mvcc_check_ms);
        bool pass =
            mvcc_check_and_update(mCache, entry.envelope.rset,
                                  entry.envelope.wset,
                                  mCtx.cfg.bump_write_set);
        if (mCtx.cfg.inject_mvcc_bug && !mCtx.group.bug_injected)
        {
            pass = !pass;
            mCtx.group.bug_injected = true;
        }
        mCtx.group.set_verdict(idx, pass, mEngine.now(), mCtx.checks);
        mCtx.metrics.set_verdict(entry.envelope.tx_id, mEngine.now());
        if (pass)
        {
            broadcast_cache_update(entry);
            if (mCtx.cfg.mode == Mode::EA)
            {
                send_peer_marks(entry);
            }
            mNextFreeAt = mEngine.now() + mEngine.costs().cache_rtt_ms;
        }
        else
        {
            // The submitting gateway hears about the failure now, without
            // waiting for the block.
            InvalidNotify inv;
            inv.tx_id = entry.envelope.tx_id;
            inv.status = TxStatus::InvalidMvcc;
            mEngine.send(id(), entry.submitting_gw, inv);
        }
        mCheckCursor = idx + 1;
        mBusy = false;
        try_broadcast();
        maybe_start_check();
    }

    // Replica caches must agree whenever a check is about to change them.
    void
    check_replica_coherence()
    {
        if (!mCtx.checks.enabled)
        {
            return;
        }
        auto mine = mCache.merged();
        for (NodeId o : mCtx.orderers)
        {
            if (o == id() || !mCtx.engine.node(o).alive())
            {
                continue;
            }
            auto& other = static_cast<OrdererNode&>(mCtx.engine.node(o));
            mCtx.checks.require(other.mCache.merged() == mine,
                                name() + ": version cache diverged from " +
                                    other.name());
        }
    }

    void
    broadcast_cache_update(OrderLogEntry const& entry)
    {
        std::set<Key> keys;
        for (auto const& [k, v] : entry.envelope.rset.entries)
        {
            keys.insert(k);
        }
        for (auto const& [k, v] : entry.envelope.wset.entries)
        {
            keys.insert(k);
        }
        CacheUpdate u;
        for (auto const& k : keys)
        {
            if (auto v = mCache.lookup(k))
            {
                u.updates.emplace_back(k, *v);
            }
        }
        for (NodeId o : mCtx.orderers)
        {
            if (o != id() && mCtx.engine.node(o).alive())
            {
                mEngine.send(id(), o, u);
            }
        }
    }

    void
    send_peer_marks(OrderLogEntry const& entry)
    {
        PeerCacheMark m;
        m.tx_id = entry.envelope.tx_id;
        for (auto const& [k, v] : entry.envelope.wset.entries)
        {
            m.keys.push_back(k);
        }
        for (NodeId p : mCtx.peers)
        {
            mEngine.send(id(), p, m);
        }
    }

    void
    handle_cache_update(CacheUpdate const& u)
    {
        if (is_leader())
        {
            return; // stale write-through from the crashed predecessor
        }
        if (u.full_resync)
        {
            mCache.restore(u.snapshot);
            return;
        }
        for (auto const& [k, v] : u.updates)
        {
            mCache.set(k, v);
        }
    }

    void
    try_broadcast()
    {
        if (!is_leader())
        {
            return;
        }
        auto& g = mCtx.group;
        while (g.next_broadcast < g.cuts.size())
        {
            auto& cut = g.cuts[g.next_broadcast];
            if (mCtx.cfg.mode != Mode::OG)
            {
                for (size_t i = cut.start; i < cut.end; ++i)
                {
                    if (!g.log[i].mvcc_pass.has_value())
                    {
                        return; // verdicts still outstanding for this block
                    }
                }
            }
            Block b;
            b.block_num = cut.block_num;
            for (size_t i = cut.start; i < cut.end; ++i)
            {
                auto const& e = g.log[i];
                Transaction tx = e.envelope;
                if (mCtx.cfg.mode == Mode::OEMVCC)
                {
                    tx.mvcc = *e.mvcc_pass ? Flag::Pass : Flag::Fail;
                }
                else if (mCtx.cfg.mode == Mode::EA)
                {
                    if (!*e.mvcc_pass)
                    {
                        continue; // pruned; its gateway was told at verdict
                    }
                    tx.mvcc = Flag::Pass;
                }
                b.txs.push_back(std::move(tx));
            }
            cut.broadcast_done = true;
            cut.broadcast_time = mEngine.now();
            cut.broadcast_size = b.txs.size();
            for (NodeId p : mCtx.peers)
            {
                mEngine.send(id(), p, BlockBroadcast{b});
            }
            for (NodeId gw : mCtx.gateways)
            {
                mEngine.send(id(), gw, BlockBroadcast{b});
            }
            ++g.next_broadcast;
        }
    }

    void
    handle_crash()
    {
        auto& g = mCtx.group;
        g.snapshot_verdicts_at_crash(mEngine.now());
        g.leader = -1;
        kill();
        for (NodeId o : mCtx.orderers)
        {
            if (o != id() && mCtx.engine.node(o).alive())
            {
                mEngine.schedule(o, Timer{TimerKind::Elect},
                                 mCtx.cfg.election_delay_ms);
            }
        }
    }

    void
    handle_elect()
    {
        auto& g = mCtx.group;
        if (g.leader < 0)
        {
            g.leader = mCtx.lowest_alive_orderer();
        }
        if (g.leader == id())
        {
            take_over();
        }
        flush_buffered();
    }

    void
    take_over()
    {
        auto& g = mCtx.group;
        rebuild_cache_from_log();
        CacheUpdate resync;
        resync.full_resync = true;
        resync.snapshot = mCache.snapshot();
        bool anyFollower = false;
        for (NodeId o : mCtx.orderers)
        {
            if (o != id() && mCtx.engine.node(o).alive())
            {
                mEngine.send(id(), o, resync);
                anyFollower = true;
            }
        }
        mBusy = false;
        mCheckCursor = 0; // maybe_start_check walks past settled verdicts
        // The resync is itself a write-through round: wait it out before the
        // first post-takeover check so followers are caught up.
        mNextFreeAt = anyFollower
                          ? mEngine.now() + mEngine.costs().cache_rtt_ms
                          : mEngine.now();
        if (g.pending_size() > 0)
        {
            arm_interval_timer();
        }
        maybe_start_check();
        try_broadcast();
    }

    // The log's verdicts are the authoritative record; replaying their update
    // sequence reproduces the crashed leader's cache exactly, including tier
    // placement, since identical set() sequences place keys identically.
    void
    rebuild_cache_from_log()
    {
        mCache = VersionCache(mCtx.cfg.cache_capacity);
        for (auto const& e : mCtx.group.log)
        {
            if (!e.mvcc_pass.has_value() || !*e.mvcc_pass)
            {
                continue;
            }
            for (auto const& [k, v] : e.envelope.rset.entries)
            {
                mCache.set(k, v + 1);
            }
            if (mCtx.cfg.bump_write_set)
            {
                for (auto const& [k, v] : e.envelope.wset.entries)
                {
                    if (e.envelope.rset.entries.count(k))
                    {
                        continue;
                    }
                    if (auto cached = mCache.lookup(k))
                    {
                        mCache.set(k, *cached + 1);
                    }
                }
            }
        }
    }

    void
    flush_buffered()
    {
        auto buffered = std::move(mAwaitingLeader);
        mAwaitingLeader.clear();
        for (auto& s : buffered)
        {
            handle_submit(s);
        }
    }

    SimContext& mCtx;
    VersionCache mCache;
    std::vector<SubmitEnvelope> mAwaitingLeader;

    // Leader-local pipeline state; rebuilt on takeover.
    bool mBusy = false;
    uint64_t mTimerGen = 0;
    size_t mCheckCursor = 0;
    SimTime mNextFreeAt = 0;
    uint64_t mChecksDone = 0;
};

} // namespace eovsim
