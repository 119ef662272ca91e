// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/context.hpp"
#include "eovsim/engine.hpp"
#include "eovsim/workload.hpp"

#include <map>
#include <string>
#include <variant>

namespace eovsim
{

// Workload driver. Each client owns a private proposal sequence, talks to one
// fixed gateway, and paces submissions by the configured interarrival time.
// The client is the only place a transaction's terminal status is recorded:
// latency is notify time minus the proposal submit time stamped here.
class ClientNode : public Node
{
  public:
    ClientNode(SimContext& ctx, int index)
        : Node(ctx.engine, Role::Client, "client-" + std::to_string(index),
               ctx.engine.root_seed())
        , mCtx(ctx)
        , mIndex(index)
        , mRemaining(ctx.cfg.workload.tx_per_client)
        , mGateway(ctx.gateways[static_cast<size_t>(index) %
                                ctx.gateways.size()])
    {
    }

    // Arms the first submission timer. Starts are staggered across clients so
    // the aggregate arrival process is smooth from the first instant.
    void
    start()
    {
        if (mRemaining <= 0)
        {
            return;
        }
        double offset = mCtx.cfg.workload.interarrival_ms *
                        static_cast<double>(mIndex) /
                        static_cast<double>(mCtx.cfg.workload.clients);
        mEngine.schedule(id(), Timer{TimerKind::NextSubmit}, offset);
    }

    void
    on_event(Event const& ev) override
    {
        if (auto const* t = std::get_if<Timer>(&ev.payload))
        {
            if (t->kind == TimerKind::NextSubmit)
            {
                handle_next_submit();
                return;
            }
        }
        else if (auto const* r = std::get_if<EndorseReply>(&ev.payload))
        {
            handle_envelope(*r);
            return;
        }
        else if (auto const* c = std::get_if<CommitNotify>(&ev.payload))
        {
            finish(c->tx_id, TxStatus::Committed);
            return;
        }
        else if (auto const* inv = std::get_if<InvalidNotify>(&ev.payload))
        {
            finish(inv->tx_id, inv->status);
            return;
        }
        else if (std::holds_alternative<OrderAck>(ev.payload))
        {
            return; // informational only
        }
        throw SimError(ErrorKind::Invariant,
                       name() + ": unexpected " + payload_kind(ev.payload));
    }

    uint64_t
    notifications() const
    {
        return mNotifications;
    }

    uint64_t
    retries() const
    {
        return mRetries;
    }

  private:
    void
    handle_next_submit()
    {
        if (mRemaining <= 0)
        {
            return;
        }
        --mRemaining;
        submit(generate_proposal(mCtx.cfg.workload, mIndex, mTxSeq++, mRng));
        if (mRemaining > 0)
        {
            mEngine.schedule(id(), Timer{TimerKind::NextSubmit}, next_gap());
        }
    }

    double
    next_gap()
    {
        if (mCtx.cfg.workload.exponential_interarrival)
        {
            return mRng.exponential(mCtx.cfg.workload.interarrival_ms);
        }
        return mCtx.cfg.workload.interarrival_ms;
    }

    void
    submit(Proposal const& p)
    {
        mCtx.metrics.register_tx(p.tx_id, name(), p.hot, mEngine.now());
        if (mCtx.cfg.malicious_rate > 0.0 &&
            mRng.chance(mCtx.cfg.malicious_rate))
        {
            submit_forged(p);
            return;
        }
        mPending[p.tx_id] = p;
        Propose msg;
        msg.proposal = p;
        msg.endorsers =
            select_endorsers(mCtx.cfg.peers, mCtx.cfg.endorsers_per_tx, mRng);
        msg.from = id();
        mEngine.send(id(), mGateway, std::move(msg));
    }

    // A forged envelope: made-up read versions, an endorsement stamp that no
    // peer ever signed, and the gateway-check bypass a colluding gateway
    // would grant. Peer-side endorsement policy checks must catch it.
    void
    submit_forged(Proposal const& p)
    {
        mCtx.metrics.mark_malicious(p.tx_id);
        Transaction env;
        env.tx_id = p.tx_id;
        env.client = p.client;
        env.rset.entries[p.target] = 0;
        env.wset.entries[p.target] = "forged:" + p.client + ":" + p.tx_id;
        env.endorsements.push_back(EndorsementStamp{"peer-0", "forged"});
        env.client_sig = client_sig_tag(p.client, p.tx_id);
        env.times.submit = mEngine.now();
        env.bypass_gateway_vscc = true;
        SubmitEnvelope s;
        s.envelope = std::move(env);
        mEngine.send(id(), mGateway, std::move(s));
    }

    void
    handle_envelope(EndorseReply const& r)
    {
        if (!r.is_envelope)
        {
            throw SimError(ErrorKind::Invariant,
                           name() + ": raw endorsement reply");
        }
        Transaction env = r.envelope;
        if (!sign_envelope(env, mCtx.cfg.endorsement_required, mEngine.now()))
        {
            mCtx.checks.fail(name() + ": envelope below endorsement quorum");
            return;
        }
        SubmitEnvelope s;
        s.envelope = std::move(env);
        mEngine.send(id(), mGateway, std::move(s));
    }

    void
    finish(std::string const& txId, TxStatus status)
    {
        ++mNotifications;
        mCtx.metrics.terminal(txId, status, mEngine.now());
        auto it = mPending.find(txId);
        if (it == mPending.end())
        {
            return; // forged, or a duplicate notification
        }
        Proposal original = it->second;
        mPending.erase(it);
        if (mCtx.cfg.retry && status != TxStatus::Committed)
        {
            resubmit(original);
        }
    }

    // Retry keeps the original intent (same target key) under a fresh tx id,
    // so contention structure survives the resubmission.
    void
    resubmit(Proposal const& original)
    {
        ++mRetries;
        Proposal p = original;
        p.tx_id =
            "t" + std::to_string(mIndex) + "-" + std::to_string(mTxSeq++);
        mCtx.metrics.register_tx(p.tx_id, name(), p.hot, mEngine.now());
        mPending[p.tx_id] = p;
        Propose msg;
        msg.proposal = p;
        msg.endorsers =
            select_endorsers(mCtx.cfg.peers, mCtx.cfg.endorsers_per_tx, mRng);
        msg.from = id();
        mEngine.send(id(), mGateway, std::move(msg));
    }

    SimContext& mCtx;
    int mIndex;
    int mRemaining;
    NodeId mGateway;
    uint64_t mTxSeq = 0;
    uint64_t mNotifications = 0;
    uint64_t mRetries = 0;
    std::map<std::string, Proposal> mPending;
};

} // namespace eovsim
