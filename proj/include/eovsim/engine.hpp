// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/config.hpp"
#include "eovsim/event.hpp"
#include "eovsim/rng.hpp"

#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <vector>

namespace eovsim
{

enum class Role
{
    Client,
    Gateway,
    Peer,
    Orderer,
};

inline char const*
role_name(Role r)
{
    switch (r)
    {
    case Role::Client:
        return "client";
    case Role::Gateway:
        return "gw";
    case Role::Peer:
        return "peer";
    case Role::Orderer:
        return "orderer";
    }
    return "?";
}

class Engine;

class Node
{
  public:
    Node(Engine& engine, Role role, std::string name, uint64_t rootSeed);
    virtual ~Node() = default;

    virtual void on_event(Event const& ev) = 0;

    NodeId
    id() const
    {
        return mId;
    }

    Role
    role() const
    {
        return mRole;
    }

    std::string const&
    name() const
    {
        return mName;
    }

    bool
    alive() const
    {
        return mAlive;
    }

    void
    kill()
    {
        mAlive = false;
    }

  protected:
    Engine& mEngine;
    RngStream mRng;

  private:
    friend class Engine;
    NodeId mId = -1;
    Role mRole;
    std::string mName;
    bool mAlive = true;
};

// Deterministic discrete-event engine: one virtual clock, a (time, seq)
// ordered queue with FIFO tie-break, and per-node rng streams derived from
// (root seed, node name). Identical inputs give identical event sequences.
class Engine
{
  public:
    explicit Engine(CostModel const& costs, uint64_t rootSeed,
                    bool collectTrace = false)
        : mCosts(costs), mRootSeed(rootSeed), mCollectTrace(collectTrace)
    {
    }

    uint64_t
    root_seed() const
    {
        return mRootSeed;
    }

    SimTime
    now() const
    {
        return mNow;
    }

    CostModel const&
    costs() const
    {
        return mCosts;
    }

    NodeId
    register_node(Node* n)
    {
        mNodes.push_back(n);
        return static_cast<NodeId>(mNodes.size() - 1);
    }

    Node&
    node(NodeId id)
    {
        if (id < 0 || static_cast<size_t>(id) >= mNodes.size())
        {
            throw SimError(ErrorKind::UnknownNode,
                           "node id " + std::to_string(id));
        }
        return *mNodes[static_cast<size_t>(id)];
    }

    size_t
    node_count() const
    {
        return mNodes.size();
    }

    // Message latency by link class. Pairs outside the modeled topology are
    // protocol bugs, not configuration.
    double
    link_latency(Role a, Role b) const
    {
        if (a > b)
        {
            std::swap(a, b);
        }
        if (a == Role::Client && b == Role::Gateway)
        {
            return mCosts.latency_client_gw;
        }
        if (a == Role::Gateway && b == Role::Peer)
        {
            return mCosts.latency_gw_peer;
        }
        if (a == Role::Gateway && b == Role::Orderer)
        {
            return mCosts.latency_gw_orderer;
        }
        if (a == Role::Peer && b == Role::Orderer)
        {
            return mCosts.latency_orderer_peer;
        }
        if (a == Role::Orderer && b == Role::Orderer)
        {
            return mCosts.latency_orderer_orderer;
        }
        if (a == Role::Peer && b == Role::Peer)
        {
            return mCosts.latency_peer_peer;
        }
        throw SimError(ErrorKind::Invariant,
                       std::string("no link class between ") + role_name(a) +
                           " and " + role_name(b));
    }

    // Schedules a payload for `target` after `delay`; FIFO among equal times.
    void
    schedule(NodeId target, Payload payload, double delay)
    {
        if (delay < 0)
        {
            throw SimError(ErrorKind::Invariant, "negative event delay");
        }
        node(target); // existence check
        mQueue.push(Event{mNow + delay, mNextSeq++, target, std::move(payload)});
    }

    // Point-to-point message: link latency of the (src role, dst role) class
    // plus any sender-side service delay.
    void
    send(NodeId src, NodeId dst, Payload payload, double extraDelay = 0.0)
    {
        double lat = link_latency(node(src).role(), node(dst).role());
        schedule(dst, std::move(payload), lat + extraDelay);
    }

    // Runs until the queue drains or the next event is past tEnd. Returns the
    // number of delivered events. Events for dead nodes are dropped.
    uint64_t
    run_until(SimTime tEnd = std::numeric_limits<SimTime>::infinity())
    {
        uint64_t delivered = 0;
        while (!mQueue.empty() && mQueue.top().time <= tEnd)
        {
            Event ev = mQueue.top();
            mQueue.pop();
            if (ev.time < mNow)
            {
                throw SimError(ErrorKind::Invariant, "clock moved backward");
            }
            mNow = ev.time;
            Node& n = node(ev.target);
            if (!n.alive())
            {
                ++mDroppedToDead;
                continue;
            }
            if (mCollectTrace)
            {
                mTrace.push_back(TraceEntry{ev.time, ev.seq, n.name(),
                                            payload_kind(ev.payload),
                                            payload_tx_id(ev.payload)});
            }
            mDeliveredByKind[payload_kind(ev.payload)]++;
            n.on_event(ev);
            ++delivered;
        }
        return delivered;
    }

    bool
    queue_empty() const
    {
        return mQueue.empty();
    }

    uint64_t
    dropped_to_dead() const
    {
        return mDroppedToDead;
    }

    std::map<std::string, uint64_t> const&
    delivered_by_kind() const
    {
        return mDeliveredByKind;
    }

    struct TraceEntry
    {
        SimTime time;
        uint64_t seq;
        std::string target;
        std::string kind;
        std::string tx_id;
    };

    std::vector<TraceEntry> const&
    trace() const
    {
        return mTrace;
    }

  private:
    struct Later
    {
        bool
        operator()(Event const& a, Event const& b) const
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };

    CostModel mCosts;
    uint64_t mRootSeed;
    bool mCollectTrace;
    SimTime mNow = 0;
    uint64_t mNextSeq = 0;
    std::priority_queue<Event, std::vector<Event>, Later> mQueue;
    std::vector<Node*> mNodes;
    std::vector<TraceEntry> mTrace;
    std::map<std::string, uint64_t> mDeliveredByKind;
    uint64_t mDroppedToDead = 0;
};

inline Node::Node(Engine& engine, Role role, std::string name,
                  uint64_t rootSeed)
    : mEngine(engine)
    , mRng(rootSeed, name)
    , mRole(role)
    , mName(std::move(name))
{
    mId = engine.register_node(this);
}

} // namespace eovsim
