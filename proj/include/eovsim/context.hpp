// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/engine.hpp"
#include "eovsim/metrics.hpp"
#include "eovsim/policy.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eovsim
{

// Run-scoped invariant sink. Violations don't abort the run; they fail it
// afterwards (exit code 3 in the harness).
struct InvariantChecks
{
    bool enabled = true;
    std::vector<std::string> violations;

    void
    fail(std::string msg)
    {
        violations.push_back(std::move(msg));
    }

    void
    require(bool ok, std::string const& msg)
    {
        if (enabled && !ok)
        {
            fail(msg);
        }
    }
};

// Ordered-envelope log entry. The log, cut points and issued verdicts model
// the synchronously replicated part of the ordering service's consensus
// state: they survive a leader crash. Each replica's version cache does not;
// it is replicated asynchronously with real delay.
struct OrderLogEntry
{
    Transaction envelope;
    NodeId submitting_gw = -1;
    SimTime arrival = 0;
    std::optional<bool> mvcc_pass;
    SimTime verdict_time = -1;
};

struct BlockCut
{
    size_t start = 0;
    size_t end = 0;
    uint64_t block_num = 0;
    SimTime first_arrival = -1;
    SimTime cut_time = -1;
    bool broadcast_done = false;
    SimTime broadcast_time = -1;
    size_t broadcast_size = 0;
};

struct OrdererShared
{
    NodeId leader = -1;
    std::vector<OrderLogEntry> log;
    size_t pending_start = 0;
    SimTime pending_first_arrival = -1;
    uint64_t next_block_num = 1; // genesis occupies block 0
    std::vector<BlockCut> cuts;
    size_t next_broadcast = 0;

    bool bug_injected = false;
    bool crashed = false;
    SimTime crash_time = -1;
    std::map<std::string, bool> pre_crash_verdicts;

    size_t
    pending_size() const
    {
        return log.size() - pending_start;
    }

    // Verdicts are write-once; a second write is a protocol bug and is
    // recorded, never applied.
    void
    set_verdict(size_t idx, bool pass, SimTime now, InvariantChecks& checks)
    {
        auto& e = log[idx];
        if (e.mvcc_pass.has_value())
        {
            checks.fail("verdict issued twice for " + e.envelope.tx_id);
            return;
        }
        e.mvcc_pass = pass;
        e.verdict_time = now;
    }

    void
    snapshot_verdicts_at_crash(SimTime now)
    {
        crashed = true;
        crash_time = now;
        for (auto const& e : log)
        {
            if (e.mvcc_pass.has_value())
            {
                pre_crash_verdicts[e.envelope.tx_id] = *e.mvcc_pass;
            }
        }
    }
};

// Wiring shared by every node in one run. Node id tables are filled while the
// simulation builds the topology.
struct SimContext
{
    Engine& engine;
    RunConfig const& cfg;
    MetricsCollector& metrics;
    OrdererShared& group;
    InvariantChecks& checks;

    std::vector<NodeId> orderers;
    std::vector<NodeId> peers; // endorsing peers only
    std::vector<NodeId> gateways;
    std::vector<NodeId> clients;
    std::map<std::string, NodeId> client_ids;

    EndorsementPolicy policy;
    std::vector<Key> pool_keys;

    std::vector<NodeId>
    alive_orderers() const
    {
        std::vector<NodeId> out;
        for (NodeId o : orderers)
        {
            if (engine.node(o).alive())
            {
                out.push_back(o);
            }
        }
        return out;
    }

    NodeId
    lowest_alive_orderer() const
    {
        for (NodeId o : orderers)
        {
            if (engine.node(o).alive())
            {
                return o;
            }
        }
        return -1;
    }
};

} // namespace eovsim
