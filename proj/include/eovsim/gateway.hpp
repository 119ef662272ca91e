// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/validation.hpp"

#include <map>
#include <set>

namespace eovsim
{

// Gateway hosted on its own non-endorsing committing peer: drives endorsement
// collection for its clients, runs the policy check before handing envelopes
// to the ordering service, and owns terminal client notification (exactly one
// per proposal; later duplicates are dropped, first verdict wins).
class GatewayNode : public PeerNode
{
  public:
    GatewayNode(SimContext& ctx, std::string name)
        : PeerNode(ctx, std::move(name), Role::Gateway)
    {
    }

    void
    on_event(Event const& ev) override
    {
        if (auto const* p = std::get_if<Propose>(&ev.payload))
        {
            handle_propose(*p);
        }
        else if (auto const* r = std::get_if<EndorseReply>(&ev.payload))
        {
            handle_reply(*r);
        }
        else if (auto const* s = std::get_if<SubmitEnvelope>(&ev.payload))
        {
            handle_submit(*s);
        }
        else if (auto const* a = std::get_if<OrderAck>(&ev.payload))
        {
            mCtx.metrics.set_order_ack(a->tx_id, mEngine.now());
            if (auto it = mTxClient.find(a->tx_id); it != mTxClient.end())
            {
                mEngine.send(id(), it->second, OrderAck{a->tx_id});
            }
        }
        else if (auto const* inv = std::get_if<InvalidNotify>(&ev.payload))
        {
            // Ordering-service verdict for one of our envelopes.
            mCtx.metrics.set_verdict(inv->tx_id, mEngine.now());
            route_notification(inv->tx_id, inv->status);
        }
        else if (auto const* t = std::get_if<Timer>(&ev.payload))
        {
            if (t->kind == TimerKind::EndorseDeadline)
            {
                handle_deadline(t->tx_id, t->gen);
            }
            else
            {
                PeerNode::on_event(ev); // block pipeline timers
            }
        }
        else
        {
            PeerNode::on_event(ev); // BlockBroadcast and friends
        }
    }

    uint64_t
    endorsement_mismatches() const
    {
        return mMismatches;
    }

    uint64_t
    endorsement_timeouts() const
    {
        return mTimeouts;
    }

    uint64_t
    dropped_duplicate_notifications() const
    {
        return mDroppedDuplicates;
    }

    uint64_t
    dropped_unknown_notifications() const
    {
        return mDroppedUnknown;
    }

  protected:
    // Commit instant on the gateway's host peer: emit terminal statuses for
    // our own clients' transactions using the final validity flags.
    void
    on_block_committed(Block const& b) override
    {
        for (auto const& tx : b.txs)
        {
            if (!mTxClient.count(tx.tx_id))
            {
                continue; // another gateway's transaction
            }
            bool applied = tx.vscc == Flag::Pass && tx.mvcc == Flag::Pass;
            if (mTerminalSent.count(tx.tx_id))
            {
                // Orderer-invalidated txs still ride along in the block and
                // their clients already heard. A pass flag here would
                // contradict that earlier notification.
                if (applied)
                {
                    ++mDroppedDuplicates;
                }
                continue;
            }
            mCtx.metrics.set_verdict(tx.tx_id, mEngine.now());
            TxStatus status;
            if (applied)
            {
                mCtx.metrics.set_commit(tx.tx_id, mEngine.now());
                status = TxStatus::Committed;
            }
            else if (tx.vscc == Flag::Fail)
            {
                status = TxStatus::InvalidVscc;
            }
            else
            {
                status = TxStatus::InvalidMvcc;
            }
            route_notification(tx.tx_id, status);
        }
    }

  private:
    struct PendingEndorse
    {
        Proposal proposal;
        NodeId client = -1;
        std::vector<NodeId> endorsers;
        std::map<std::string, EndorseReply> replies;
        bool resolved = false;
        uint64_t gen = 0;
    };

    void
    handle_propose(Propose const& p)
    {
        auto& pending = mPending[p.proposal.tx_id];
        pending.proposal = p.proposal;
        pending.client = p.from;
        pending.gen = ++mDeadlineGen;
        mTxClient[p.proposal.tx_id] = p.from;
        for (int idx : p.endorsers)
        {
            NodeId peer = mCtx.peers.at(static_cast<size_t>(idx));
            pending.endorsers.push_back(peer);
            mEngine.send(id(), peer,
                         EndorseRequest{p.proposal, id()});
        }
        if (mCtx.cfg.endorse_timeout_ms > 0)
        {
            mEngine.schedule(id(),
                             Timer{TimerKind::EndorseDeadline, pending.gen, 0,
                                   p.proposal.tx_id},
                             mCtx.cfg.endorse_timeout_ms);
        }
    }

    void
    handle_reply(EndorseReply const& r)
    {
        auto it = mPending.find(r.tx_id);
        if (it == mPending.end() || it->second.resolved)
        {
            return; // late reply after resolution
        }
        auto& pending = it->second;

        if (r.outcome == EndorseOutcome::EarlyInvalid)
        {
            // One refusal is enough: the read is doomed, tell the client now.
            pending.resolved = true;
            mCtx.metrics.mark_early_invalid(r.tx_id);
            mCtx.metrics.set_endorse_done(r.tx_id, mEngine.now());
            mCtx.metrics.set_verdict(r.tx_id, mEngine.now());
            route_notification(r.tx_id, TxStatus::InvalidMvcc);
            return;
        }
        if (r.outcome == EndorseOutcome::Failed)
        {
            pending.resolved = true;
            mCtx.metrics.set_endorse_done(r.tx_id, mEngine.now());
            route_notification(r.tx_id, TxStatus::Rejected);
            return;
        }

        pending.replies[r.peer] = r;
        if (pending.replies.size() < pending.endorsers.size())
        {
            return;
        }

        // All endorsers answered: read sets must agree exactly, otherwise the
        // ledgers diverged mid-round and the envelope would be garbage.
        ReadSet const& first = pending.replies.begin()->second.rset;
        for (auto const& [_, reply] : pending.replies)
        {
            if (!(reply.rset == first))
            {
                ++mMismatches;
                pending.resolved = true;
                mCtx.metrics.set_endorse_done(r.tx_id, mEngine.now());
                route_notification(r.tx_id, TxStatus::Rejected);
                return;
            }
        }

        pending.resolved = true;
        Transaction env;
        env.tx_id = pending.proposal.tx_id;
        env.client = pending.proposal.client;
        env.rset = first;
        env.wset = pending.replies.begin()->second.wset;
        for (auto const& [_, reply] : pending.replies)
        {
            env.endorsements.push_back(reply.stamp);
        }
        mCtx.metrics.set_endorse_done(env.tx_id, mEngine.now());

        EndorseReply toClient;
        toClient.tx_id = env.tx_id;
        toClient.is_envelope = true;
        toClient.envelope = std::move(env);
        mEngine.send(id(), pending.client, std::move(toClient));
    }

    void
    handle_deadline(std::string const& txId, uint64_t gen)
    {
        auto it = mPending.find(txId);
        if (it == mPending.end() || it->second.resolved ||
            it->second.gen != gen)
        {
            return;
        }
        it->second.resolved = true;
        ++mTimeouts;
        route_notification(txId, TxStatus::Rejected);
    }

    void
    handle_submit(SubmitEnvelope const& s)
    {
        Transaction env = s.envelope;
        if (!mTxClient.count(env.tx_id))
        {
            // Direct submission (no endorsement round through us): resolve
            // the client by name so notifications can still route.
            auto it = mCtx.client_ids.find(env.client);
            mTxClient[env.tx_id] =
                it == mCtx.client_ids.end() ? NodeId{-1} : it->second;
        }
        mCtx.metrics.set_envelope_submit(env.tx_id, mEngine.now());

        double serviceMs = 0.0;
        if (env.bypass_gateway_vscc)
        {
            // Injected envelope: skips the gateway check entirely; peer-side
            // validation is the backstop.
        }
        else
        {
            serviceMs = mEngine.costs().vscc_ms;
            mCtx.metrics.accrue("gw_vscc", serviceMs);
            if (!vscc_check(env, mCtx.policy))
            {
                route_notification(env.tx_id, TxStatus::InvalidVscc,
                                   serviceMs);
                return;
            }
            env.vscc = Flag::Pass;
        }
        NodeId entry = pick_orderer();
        mEngine.send(id(), entry, SubmitEnvelope{std::move(env), id()},
                     serviceMs);
    }

    NodeId
    pick_orderer()
    {
        auto alive = mCtx.alive_orderers();
        if (alive.empty())
        {
            throw SimError(ErrorKind::Invariant, "no alive orderer");
        }
        NodeId o = alive[mRoundRobin % alive.size()];
        ++mRoundRobin;
        return o;
    }

    void
    route_notification(std::string const& txId, TxStatus status,
                       double extraDelay = 0.0)
    {
        auto client = mTxClient.find(txId);
        if (client == mTxClient.end() || client->second < 0)
        {
            ++mDroppedUnknown;
            return;
        }
        if (mTerminalSent.count(txId))
        {
            ++mDroppedDuplicates;
            return;
        }
        mTerminalSent.insert(txId);
        if (status == TxStatus::Committed)
        {
            mEngine.send(id(), client->second, CommitNotify{txId},
                         extraDelay);
        }
        else
        {
            mEngine.send(id(), client->second, InvalidNotify{txId, status},
                         extraDelay);
        }
    }

    std::map<std::string, PendingEndorse> mPending;
    std::map<std::string, NodeId> mTxClient;
    std::set<std::string> mTerminalSent;
    uint64_t mDeadlineGen = 0;
    uint64_t mRoundRobin = 0;
    uint64_t mMismatches = 0;
    uint64_t mTimeouts = 0;
    uint64_t mDroppedDuplicates = 0;
    uint64_t mDroppedUnknown = 0;
};

} // namespace eovsim
