// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/ledger.hpp"
#include "eovsim/rng.hpp"

#include <set>
#include <string>
#include <vector>

namespace eovsim
{

// Asset-transfer workload: every transaction reads one asset key and writes
// the same key. Contention is steered by the hot-pool probability: hot keys
// are shared by all clients, cold keys are private per client.
struct WorkloadConfig
{
    int clients = 10;
    int hot_assets = 10;
    int cold_assets_per_client = 50;
    double conflict_rate = 0.2; // probability a proposal targets the hot pool
    double interarrival_ms = 50.0;
    bool exponential_interarrival = false;
    int tx_per_client = 100;

    void
    validate() const
    {
        if (clients < 1)
        {
            throw ConfigError("clients must be >= 1");
        }
        if (conflict_rate < 0.0 || conflict_rate > 1.0)
        {
            throw ConfigError("conflict_rate must be within [0, 1]");
        }
        if (hot_assets == 0 && conflict_rate > 0.0)
        {
            throw ConfigError(
                "hot_assets=0 is incompatible with conflict_rate > 0");
        }
        if (hot_assets < 0 || cold_assets_per_client < 0)
        {
            throw ConfigError("asset pool sizes must be >= 0");
        }
        if (interarrival_ms <= 0.0)
        {
            throw ConfigError("interarrival_ms must be > 0");
        }
        if (tx_per_client < 0)
        {
            throw ConfigError("tx_per_client must be >= 0");
        }
    }
};

inline std::string
hot_key(int i)
{
    return "hot-" + std::to_string(i);
}

inline std::string
cold_key(int client, int j)
{
    return "cold-" + std::to_string(client) + "-" + std::to_string(j);
}

// All pool keys in deterministic order; the genesis commit writes each once.
inline std::vector<Key>
init_asset_pool(WorkloadConfig const& cfg)
{
    cfg.validate();
    std::vector<Key> keys;
    keys.reserve(static_cast<size_t>(cfg.hot_assets) +
                 static_cast<size_t>(cfg.clients) *
                     static_cast<size_t>(cfg.cold_assets_per_client));
    for (int i = 0; i < cfg.hot_assets; ++i)
    {
        keys.push_back(hot_key(i));
    }
    for (int c = 0; c < cfg.clients; ++c)
    {
        for (int j = 0; j < cfg.cold_assets_per_client; ++j)
        {
            keys.push_back(cold_key(c, j));
        }
    }
    return keys;
}

inline Block
make_genesis_block(std::vector<Key> const& poolKeys)
{
    Transaction genesis;
    genesis.tx_id = "genesis";
    genesis.client = "genesis";
    genesis.vscc = Flag::Pass;
    genesis.mvcc = Flag::Pass;
    for (auto const& k : poolKeys)
    {
        genesis.wset.entries[k] = "genesis";
    }
    Block b;
    b.block_num = 0;
    b.prev_hash = 0;
    b.txs.push_back(std::move(genesis));
    return b;
}

struct Proposal
{
    std::string tx_id;
    std::string client;
    int client_index = 0;
    Key target;
    bool hot = false;
};

// Target selection: hot pool with probability conflict_rate, otherwise the
// client's private cold pool. The threshold draw couples the hot/cold
// decision across conflict rates for a fixed seed.
inline Proposal
generate_proposal(WorkloadConfig const& cfg, int clientIndex, uint64_t txSeq,
                  RngStream& rng)
{
    Proposal p;
    p.client_index = clientIndex;
    p.client = "client-" + std::to_string(clientIndex);
    p.tx_id = "t" + std::to_string(clientIndex) + "-" + std::to_string(txSeq);
    p.hot = rng.chance(cfg.conflict_rate);
    if (p.hot)
    {
        p.target = hot_key(static_cast<int>(
            rng.below(static_cast<uint64_t>(cfg.hot_assets))));
    }
    else
    {
        if (cfg.cold_assets_per_client == 0)
        {
            // Degenerate pool: everything contends.
            p.hot = true;
            p.target = hot_key(static_cast<int>(
                rng.below(static_cast<uint64_t>(cfg.hot_assets))));
        }
        else
        {
            p.target = cold_key(
                clientIndex,
                static_cast<int>(rng.below(
                    static_cast<uint64_t>(cfg.cold_assets_per_client))));
        }
    }
    return p;
}

// Uniform 2-subset of the endorsing peers, order-normalized.
inline std::vector<int>
select_endorsers(int peerCount, int endorsersPerTx, RngStream& rng)
{
    if (peerCount < endorsersPerTx)
    {
        throw SimError(ErrorKind::TooFewPeers,
                       "need " + std::to_string(endorsersPerTx) +
                           " endorsing peers, have " +
                           std::to_string(peerCount));
    }
    std::set<int> picked;
    while (static_cast<int>(picked.size()) < endorsersPerTx)
    {
        int candidate =
            static_cast<int>(rng.below(static_cast<uint64_t>(peerCount)));
        // Redraw collisions: keeps the pair distribution uniform without an
        // implementation-defined shuffle.
        picked.insert(candidate);
    }
    return {picked.begin(), picked.end()};
}

inline std::string
client_sig_tag(std::string const& client, std::string const& txId)
{
    return "sig:" + client + ":" + txId;
}

inline std::string
endorse_sig_tag(std::string const& peer, std::string const& txId)
{
    return "end:" + peer + ":" + txId;
}

// Client-side signing: requires at least `required` endorsements on the
// envelope, stamps the client signature, records the envelope submit time.
// Returns false (and leaves the envelope unsigned) when endorsements are
// missing, in which case the caller records a rejected proposal.
inline bool
sign_envelope(Transaction& env, int required, SimTime now)
{
    if (static_cast<int>(env.endorsements.size()) < required)
    {
        return false;
    }
    env.client_sig = client_sig_tag(env.client, env.tx_id);
    if (env.times.submit < 0)
    {
        env.times.submit = now;
    }
    return true;
}

} // namespace eovsim
