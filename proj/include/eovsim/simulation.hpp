// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/client.hpp"
#include "eovsim/context.hpp"
#include "eovsim/engine.hpp"
#include "eovsim/gateway.hpp"
#include "eovsim/metrics.hpp"
#include "eovsim/ordering.hpp"
#include "eovsim/validation.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace eovsim
{

// Structural audit of a hash chain: dense numbering, prev_hash linkage, and
// stored hashes matching recomputed content digests. Returns problems found.
inline std::vector<std::string>
chain_problems(std::vector<Block> const& chain)
{
    std::vector<std::string> problems;
    uint64_t prev = 0;
    for (size_t i = 0; i < chain.size(); ++i)
    {
        auto const& b = chain[i];
        if (b.block_num != i)
        {
            problems.push_back("block " + std::to_string(i) +
                               " carries number " +
                               std::to_string(b.block_num));
        }
        if (b.prev_hash != prev)
        {
            problems.push_back("block " + std::to_string(i) +
                               " prev_hash does not match prior block");
        }
        if (b.this_hash != block_digest(b))
        {
            problems.push_back("block " + std::to_string(i) +
                               " content hash mismatch");
        }
        prev = b.this_hash;
    }
    return problems;
}

// Everything one run produces: the metrics summary, per-tx records, the
// ordered envelope log with verdicts, final ledger content, and the counters
// the harness and tests audit.
struct RunResult
{
    struct OrderedTx
    {
        std::string tx_id;
        ReadSet rset;
        WriteSet wset;
        std::optional<bool> verdict; // empty in the baseline mode
        SimTime arrival = -1;
        SimTime verdict_time = -1;
    };

    RunConfig cfg;
    RunSummary summary;
    std::vector<TxRecord> records;
    std::vector<OrderedTx> ordered;
    std::vector<BlockCut> cuts;

    std::map<std::string, uint64_t> node_digests; // committing node -> digest
    std::vector<Block> chain;                     // first gateway host's copy
    std::vector<LogRecord> history;
    std::map<Key, ValueVersion> final_state;
    std::vector<Key> pool_keys;

    std::vector<std::string> violations;
    bool crashed = false;
    SimTime crash_time = -1;
    std::map<std::string, bool> pre_crash_verdicts;

    std::vector<Engine::TraceEntry> trace;
    uint64_t retries = 0;
    uint64_t endorsement_mismatches = 0;
    uint64_t endorsement_timeouts = 0;
    uint64_t duplicate_blocks = 0;
    uint64_t dropped_duplicate_notifications = 0;
    uint64_t dropped_unknown_notifications = 0;
    uint64_t early_invalid_replies = 0;
    uint64_t endorse_simulations = 0;
    uint64_t orderer_checks = 0;
    uint64_t dropped_to_dead = 0;

    bool
    ok() const
    {
        return violations.empty();
    }
};

// Builds the topology for one configuration, drives it to quiescence, audits
// the cross-node invariants, and reduces the outcome to a RunResult.
//
// Topology: `orderers` ordering nodes (index 0 starts as leader), `peers`
// endorsing peers, and one gateway host per gateway which commits blocks but
// never endorses. Clients attach to gateways round-robin.
class Simulation
{
  public:
    explicit Simulation(RunConfig cfg)
        : mCfg(std::move(cfg))
        , mEngine(mCfg.costs, mCfg.seed, mCfg.collect_trace)
        , mCtx{mEngine, mCfg, mMetrics, mGroup, mChecks}
    {
        mCfg.validate();
        mChecks.enabled = mCfg.check_invariants;
        build();
    }

    RunResult
    run()
    {
        if (mRan)
        {
            throw SimError(ErrorKind::Invariant, "simulation already ran");
        }
        mRan = true;
        uint64_t delivered = mEngine.run_until();
        return reduce(delivered);
    }

    Engine&
    engine()
    {
        return mEngine;
    }

    SimContext&
    context()
    {
        return mCtx;
    }

    OrdererNode&
    orderer(size_t i)
    {
        return *mOrderers.at(i);
    }

    PeerNode&
    peer(size_t i)
    {
        return *mPeers.at(i);
    }

    GatewayNode&
    gateway(size_t i)
    {
        return *mGateways.at(i);
    }

    ClientNode&
    client(size_t i)
    {
        return *mClients.at(i);
    }

  private:
    void
    build()
    {
        mCtx.pool_keys = init_asset_pool(mCfg.workload);
        mCtx.policy.required = mCfg.endorsement_required;
        for (int i = 0; i < mCfg.peers; ++i)
        {
            mCtx.policy.eligible.insert("peer-" + std::to_string(i));
        }

        for (int i = 0; i < mCfg.orderers; ++i)
        {
            mOrderers.push_back(std::make_unique<OrdererNode>(mCtx, i));
            mCtx.orderers.push_back(mOrderers.back()->id());
        }
        for (int i = 0; i < mCfg.peers; ++i)
        {
            mPeers.push_back(std::make_unique<PeerNode>(
                mCtx, "peer-" + std::to_string(i)));
            mCtx.peers.push_back(mPeers.back()->id());
        }
        for (int i = 0; i < mCfg.gateways; ++i)
        {
            mGateways.push_back(std::make_unique<GatewayNode>(
                mCtx, "gw-" + std::to_string(i)));
            mCtx.gateways.push_back(mGateways.back()->id());
        }
        for (int i = 0; i < mCfg.workload.clients; ++i)
        {
            mClients.push_back(std::make_unique<ClientNode>(mCtx, i));
            mCtx.clients.push_back(mClients.back()->id());
            mCtx.client_ids[mClients.back()->name()] = mClients.back()->id();
        }

        mGroup.leader = mCtx.orderers.front();
        if (mCfg.crash_at_ms > 0)
        {
            mEngine.schedule(mCtx.orderers.front(), Timer{TimerKind::Crash},
                             mCfg.crash_at_ms);
        }
        for (auto& c : mClients)
        {
            c->start();
        }
    }

    RunResult
    reduce(uint64_t delivered)
    {
        RunResult res;
        res.cfg = mCfg;
        res.records = mMetrics.records();
        res.pool_keys = mCtx.pool_keys;
        res.crashed = mGroup.crashed;
        res.crash_time = mGroup.crash_time;
        res.pre_crash_verdicts = mGroup.pre_crash_verdicts;
        res.cuts = mGroup.cuts;
        res.trace = mEngine.trace();
        res.dropped_to_dead = mEngine.dropped_to_dead();
        res.orderer_checks = 0;
        for (auto& o : mOrderers)
        {
            res.orderer_checks += o->checks_done();
        }

        for (auto const& e : mGroup.log)
        {
            RunResult::OrderedTx t;
            t.tx_id = e.envelope.tx_id;
            t.rset = e.envelope.rset;
            t.wset = e.envelope.wset;
            t.verdict = e.mvcc_pass;
            t.arrival = e.arrival;
            t.verdict_time = e.verdict_time;
            res.ordered.push_back(std::move(t));
        }

        uint64_t notifications = 0;
        for (auto& c : mClients)
        {
            notifications += c->notifications();
            res.retries += c->retries();
        }
        for (auto& g : mGateways)
        {
            res.endorsement_mismatches += g->endorsement_mismatches();
            res.endorsement_timeouts += g->endorsement_timeouts();
            res.dropped_duplicate_notifications +=
                g->dropped_duplicate_notifications();
            res.dropped_unknown_notifications +=
                g->dropped_unknown_notifications();
        }
        for (auto& p : mPeers)
        {
            res.duplicate_blocks += p->duplicate_blocks();
            res.endorse_simulations += p->endorse_simulations();
            res.early_invalid_replies += p->early_invalid_replies();
        }

        auto const& lead = mGateways.front()->ledger();
        res.chain = lead.chain();
        res.history = lead.history();
        res.final_state = lead.world().entries();

        audit(res);

        res.summary = summarize(mode_name(mCfg.mode),
                                mCfg.workload.conflict_rate, mCfg.seed,
                                res.records, mCfg.warmup_frac);
        res.summary.duplicate_terminal = mMetrics.duplicate_terminal();
        res.summary.engine_events = delivered;
        res.summary.client_notify_deliveries = notifications;
        res.summary.service_ms = mMetrics.all_service_ms();
        for (auto const& c : res.cuts)
        {
            if (!c.broadcast_done)
            {
                continue;
            }
            ++res.summary.blocks;
            if (c.broadcast_size == 0)
            {
                ++res.summary.empty_blocks;
            }
        }
        res.violations = mChecks.violations;
        return res;
    }

    // Cross-node invariants audited after the event queue drains.
    void
    audit(RunResult& res)
    {
        if (!mChecks.enabled)
        {
            return;
        }
        audit_replication(res);
        audit_conservation(res);
        audit_blocks(res);
        audit_marks();
    }

    // Every committing node ends with the same chain and the same world
    // state, and versions count exactly one bump per committed write.
    void
    audit_replication(RunResult& res)
    {
        std::vector<PeerNode*> committers;
        for (auto& p : mPeers)
        {
            committers.push_back(p.get());
        }
        for (auto& g : mGateways)
        {
            committers.push_back(g.get());
        }
        uint64_t refDigest = 0;
        uint64_t refTip = 0;
        size_t refLen = 0;
        for (size_t i = 0; i < committers.size(); ++i)
        {
            auto& l = committers[i]->ledger();
            uint64_t d = l.world().digest();
            res.node_digests[committers[i]->name()] = d;
            if (i == 0)
            {
                refDigest = d;
                refTip = l.tip_hash();
                refLen = l.chain().size();
                continue;
            }
            mChecks.require(d == refDigest, committers[i]->name() +
                                                ": world state diverged");
            mChecks.require(l.tip_hash() == refTip,
                            committers[i]->name() + ": chain tip diverged");
            mChecks.require(l.chain().size() == refLen,
                            committers[i]->name() + ": chain length differs");
        }

        for (auto const& problem : chain_problems(res.chain))
        {
            mChecks.fail("chain audit: " + problem);
        }

        std::map<Key, uint64_t> writes;
        for (auto const& b : res.chain)
        {
            if (b.block_num == 0)
            {
                continue; // genesis seeds version 1 for every pool key
            }
            for (auto const& tx : b.txs)
            {
                if (tx.vscc != Flag::Pass || tx.mvcc != Flag::Pass)
                {
                    continue;
                }
                for (auto const& [k, v] : tx.wset.entries)
                {
                    ++writes[k];
                }
            }
        }
        mChecks.require(res.final_state.size() == res.pool_keys.size(),
                        "world state keys differ from the seeded pool");
        for (auto const& [k, vv] : res.final_state)
        {
            uint64_t expected = 1 + (writes.count(k) ? writes[k] : 0);
            mChecks.require(vv.version == expected,
                            "version of " + k + " is " +
                                std::to_string(vv.version) + ", expected " +
                                std::to_string(expected));
        }
    }

    void
    audit_conservation(RunResult& res)
    {
        uint64_t terminal = 0;
        uint64_t inFlight = 0;
        for (auto const& r : res.records)
        {
            if (r.status)
            {
                ++terminal;
            }
            else
            {
                ++inFlight;
            }
        }
        mChecks.require(terminal + inFlight == res.records.size(),
                        "terminal/in-flight split does not cover records");
        if (!res.crashed)
        {
            mChecks.require(inFlight == 0,
                            std::to_string(inFlight) +
                                " transactions never reached a terminal "
                                "state in a crash-free run");
        }
        mChecks.require(mMetrics.duplicate_terminal() == 0,
                        "duplicate terminal notifications were attempted");
        mChecks.require(mEngine.queue_empty(),
                        "event queue not drained at audit time");
    }

    void
    audit_blocks(RunResult& res)
    {
        double const eps = 1e-6;
        double interval = mCfg.block_interval_ms;
        double waitCap = res.crashed
                             ? 2 * interval + mCfg.election_delay_ms + eps
                             : interval + eps;
        for (size_t i = 0; i < res.cuts.size(); ++i)
        {
            auto const& c = res.cuts[i];
            mChecks.require(c.block_num == i + 1,
                            "block numbering is not dense");
            mChecks.require(c.end - c.start <=
                                static_cast<size_t>(mCfg.block_size),
                            "block " + std::to_string(c.block_num) +
                                " exceeds the size cap");
            mChecks.require(c.broadcast_done,
                            "block " + std::to_string(c.block_num) +
                                " was cut but never broadcast");
            if (c.first_arrival >= 0)
            {
                mChecks.require(c.cut_time - c.first_arrival <= waitCap,
                                "block " + std::to_string(c.block_num) +
                                    " waited past the interval cap");
            }
            if (mCfg.mode != Mode::OG && c.broadcast_done && !res.crashed)
            {
                double perTx = mCfg.costs.mvcc_check_ms +
                               mCfg.costs.cache_rtt_ms;
                double cap = static_cast<double>(c.end) * perTx +
                             mCfg.costs.cache_rtt_ms + eps;
                mChecks.require(c.broadcast_time - c.cut_time <= cap,
                                "block " + std::to_string(c.block_num) +
                                    " verdict wait exceeded the check "
                                    "pipeline bound");
            }
        }
    }

    // After quiescence no endorsement refusals can be pending: every marked
    // key was cleared by the commit of the transaction that marked it.
    void
    audit_marks()
    {
        if (mCfg.mode != Mode::EA)
        {
            return;
        }
        for (auto& p : mPeers)
        {
            mChecks.require(p->key_cache().size() == 0,
                            p->name() + ": keys still marked after drain");
        }
    }

    RunConfig mCfg;
    Engine mEngine;
    MetricsCollector mMetrics;
    OrdererShared mGroup;
    InvariantChecks mChecks;
    SimContext mCtx;
    bool mRan = false;

    std::vector<std::unique_ptr<OrdererNode>> mOrderers;
    std::vector<std::unique_ptr<PeerNode>> mPeers;
    std::vector<std::unique_ptr<GatewayNode>> mGateways;
    std::vector<std::unique_ptr<ClientNode>> mClients;
};

// One-call convenience for tests and the harness.
inline RunResult
run_one(RunConfig const& cfg)
{
    Simulation sim(cfg);
    return sim.run();
}

} // namespace eovsim
