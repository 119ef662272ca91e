// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/context.hpp"
#include "eovsim/endorsement.hpp"

#include <map>
#include <set>

namespace eovsim
{

// Committing peer. Endorsing peers simulate chaincode for gateways and
// validate/commit broadcast blocks; a gateway's host peer (Role::Gateway
// subclass) commits blocks but never endorses.
//
// Peers are logically concurrent executors: endorsement work never queues
// behind block validation. Block validation itself is serialized per peer and
// blocks commit in block-number order.
class PeerNode : public Node
{
  public:
    PeerNode(SimContext& ctx, std::string name, Role role = Role::Peer)
        : Node(ctx.engine, role, std::move(name), ctx.cfg.seed), mCtx(ctx)
    {
        mLedger.append_block(make_genesis_block(ctx.pool_keys));
    }

    void
    on_event(Event const& ev) override
    {
        if (auto const* req = std::get_if<EndorseRequest>(&ev.payload))
        {
            handle_endorse(*req);
        }
        else if (auto const* bb = std::get_if<BlockBroadcast>(&ev.payload))
        {
            handle_block(bb->block);
        }
        else if (auto const* mark = std::get_if<PeerCacheMark>(&ev.payload))
        {
            handle_mark(*mark);
        }
        else if (auto const* t = std::get_if<Timer>(&ev.payload))
        {
            if (t->kind == TimerKind::BlockDone)
            {
                finish_block(t->index);
            }
        }
    }

    Ledger const&
    ledger() const
    {
        return mLedger;
    }

    PeerKeyCache const&
    key_cache() const
    {
        return mKeyCache;
    }

    uint64_t
    duplicate_blocks() const
    {
        return mDuplicateBlocks;
    }

    uint64_t
    endorse_simulations() const
    {
        return mEndorseSimulations;
    }

    uint64_t
    early_invalid_replies() const
    {
        return mEarlyInvalidReplies;
    }

  protected:
    // Hook for gateway hosts: runs at the commit instant with final flags.
    virtual void
    on_block_committed(Block const&)
    {
    }

    SimContext& mCtx;

  private:
    void
    handle_endorse(EndorseRequest const& req)
    {
        auto const& p = req.proposal;
        EndorseReply reply;
        reply.tx_id = p.tx_id;
        reply.peer = name();

        if (mCtx.cfg.mode == Mode::EA && mKeyCache.marked(p.target))
        {
            // The marked key's committed version is about to change; refuse
            // without executing. Costs no execution time.
            reply.outcome = EndorseOutcome::EarlyInvalid;
            reply.reason_key = p.target;
            ++mEarlyInvalidReplies;
            if (mCtx.metrics.known(p.tx_id))
            {
                mCtx.metrics.add_exec_sample(p.tx_id, 0.0);
            }
            mEngine.send(id(), req.reply_to, std::move(reply));
            return;
        }

        auto res = simulate_chaincode(mLedger.world(), p);
        if (!res.ok)
        {
            reply.outcome = EndorseOutcome::Failed;
            reply.error = res.error;
            mEngine.send(id(), req.reply_to, std::move(reply));
            return;
        }

        double execMs = mEngine.costs().endorse_exec_ms;
        ++mEndorseSimulations;
        mCtx.metrics.accrue("peer_exec", execMs);
        if (mCtx.metrics.known(p.tx_id))
        {
            mCtx.metrics.add_exec_sample(p.tx_id, execMs);
        }
        reply.outcome = EndorseOutcome::Endorsed;
        reply.rset = std::move(res.rset);
        reply.wset = std::move(res.wset);
        reply.stamp =
            EndorsementStamp{name(), endorse_sig_tag(name(), p.tx_id)};
        // Reply leaves when the simulated execution finishes.
        mEngine.send(id(), req.reply_to, std::move(reply), execMs);
    }

    void
    handle_mark(PeerCacheMark const& m)
    {
        if (mCtx.cfg.mode != Mode::EA)
        {
            return; // marks are meaningless outside early-avoidance
        }
        for (auto const& k : m.keys)
        {
            mKeyCache.mark(k);
        }
    }

    double
    validation_cost(Block const& b) const
    {
        auto const& c = mEngine.costs();
        double cost =
            static_cast<double>(b.txs.size()) * c.commit_per_tx_ms;
        switch (mCtx.cfg.mode)
        {
        case Mode::OG:
            for (auto const& tx : b.txs)
            {
                cost += c.vscc_ms;
                if (vscc_check(tx, mCtx.policy))
                {
                    cost += c.mvcc_check_ms;
                }
            }
            break;
        case Mode::OEMVCC:
            cost += static_cast<double>(b.txs.size()) * c.vscc_ms;
            break;
        case Mode::EA:
            break; // no peer-side checks at all
        }
        return cost;
    }

    void
    handle_block(Block const& b)
    {
        if (mSeenBlocks.count(b.block_num))
        {
            ++mDuplicateBlocks;
            return;
        }
        mSeenBlocks.insert(b.block_num);
        double start = std::max(mEngine.now(), mBusyUntil);
        mBusyUntil = start + validation_cost(b);
        mInbox[b.block_num] = b;
        mEngine.schedule(id(),
                         Timer{TimerKind::BlockDone, 0, b.block_num, ""},
                         mBusyUntil - mEngine.now());
    }

    // Runs at the completion instant: decide final validity, charge service
    // time, commit atomically, then notify through the hook.
    void
    finish_block(uint64_t blockNum)
    {
        auto it = mInbox.find(blockNum);
        if (it == mInbox.end())
        {
            throw SimError(ErrorKind::Invariant,
                           "block completion without a pending block");
        }
        Block b = std::move(it->second);
        mInbox.erase(it);

        auto const& c = mEngine.costs();
        switch (mCtx.cfg.mode)
        {
        case Mode::OG:
        {
            // Full pipeline: policy check, then version check against world
            // state as updated by earlier valid txs of this block.
            std::map<Key, Version> overlay;
            auto versionOf = [&](Key const& k) -> std::optional<Version> {
                auto ov = overlay.find(k);
                if (ov != overlay.end())
                {
                    return ov->second;
                }
                auto vv = mLedger.world().read_key(k);
                if (!vv)
                {
                    return std::nullopt;
                }
                return vv->version;
            };
            for (auto& tx : b.txs)
            {
                bool vsccOk = vscc_check(tx, mCtx.policy);
                mCtx.metrics.accrue("peer_vscc", c.vscc_ms);
                tx.vscc = vsccOk ? Flag::Pass : Flag::Fail;
                if (!vsccOk)
                {
                    tx.mvcc = Flag::Unchecked;
                    continue;
                }
                mCtx.metrics.accrue("peer_mvcc", c.mvcc_check_ms);
                bool mvccOk = true;
                for (auto const& [k, readVersion] : tx.rset.entries)
                {
                    auto cur = versionOf(k);
                    if (!cur || *cur != readVersion)
                    {
                        mvccOk = false;
                        break;
                    }
                }
                if (mCtx.cfg.inject_mvcc_bug && b.block_num == 1 &&
                    tx.tx_id == b.txs.front().tx_id)
                {
                    // Deterministic corruption so every committing host
                    // agrees on the wrong verdict; referee self-test hook.
                    mvccOk = !mvccOk;
                }
                tx.mvcc = mvccOk ? Flag::Pass : Flag::Fail;
                if (mvccOk)
                {
                    for (auto const& [k, _] : tx.wset.entries)
                    {
                        auto cur = versionOf(k);
                        overlay[k] = cur ? *cur + 1 : 1;
                    }
                }
            }
            break;
        }
        case Mode::OEMVCC:
            // Policy check only; version verdicts were stamped by the
            // ordering service and are final.
            for (auto& tx : b.txs)
            {
                bool vsccOk = vscc_check(tx, mCtx.policy);
                mCtx.metrics.accrue("peer_vscc", c.vscc_ms);
                tx.vscc = vsccOk ? Flag::Pass : Flag::Fail;
                mCtx.checks.require(tx.mvcc != Flag::Unchecked,
                                    "block tx without an ordering-service "
                                    "version verdict: " +
                                        tx.tx_id);
            }
            break;
        case Mode::EA:
            // Blocks contain only valid transactions; commit them all and
            // unblock their keys for future endorsements.
            for (auto const& tx : b.txs)
            {
                mCtx.checks.require(tx.vscc == Flag::Pass &&
                                        tx.mvcc == Flag::Pass,
                                    "invalid tx reached a block: " +
                                        tx.tx_id);
                for (auto const& [k, _] : tx.wset.entries)
                {
                    mKeyCache.clear(k);
                }
            }
            break;
        }

        mCtx.metrics.accrue("peer_commit", static_cast<double>(b.txs.size()) *
                                               c.commit_per_tx_ms);
        b.prev_hash = mLedger.tip_hash();
        mCtx.checks.require(b.block_num == mLedger.next_block_num(),
                            name() + ": block number gap at " +
                                std::to_string(b.block_num));
        auto const& committed = mLedger.append_block(std::move(b));
        on_block_committed(committed);
    }

    Ledger mLedger;
    PeerKeyCache mKeyCache;
    std::set<uint64_t> mSeenBlocks;
    std::map<uint64_t, Block> mInbox;
    SimTime mBusyUntil = 0;
    uint64_t mDuplicateBlocks = 0;
    uint64_t mEndorseSimulations = 0;
    uint64_t mEarlyInvalidReplies = 0;
};

} // namespace eovsim
