// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/ledger.hpp"
#include "eovsim/version_cache.hpp"
#include "eovsim/workload.hpp"

#include <string>
#include <variant>
#include <vector>

namespace eovsim
{

enum class TxStatus
{
    Committed,
    InvalidMvcc,
    InvalidVscc,
    Rejected,
};

inline char const*
tx_status_name(TxStatus s)
{
    switch (s)
    {
    case TxStatus::Committed:
        return "committed";
    case TxStatus::InvalidMvcc:
        return "invalid_mvcc";
    case TxStatus::InvalidVscc:
        return "invalid_vscc";
    case TxStatus::Rejected:
        return "rejected";
    }
    return "?";
}

// --- message payloads -------------------------------------------------------

// client -> gateway: start the endorsement round for one proposal. The
// client picks which endorsing peers to use (indices into the endorsing-peer
// table).
struct Propose
{
    Proposal proposal;
    std::vector<int> endorsers;
    NodeId from = -1;
};

// gateway -> endorsing peer.
struct EndorseRequest
{
    Proposal proposal;
    NodeId reply_to = -1;
};

enum class EndorseOutcome
{
    Endorsed,
    EarlyInvalid, // peer-side key cache predicts certain MVCC failure
    Failed,       // e.g. asset not found
};

// peer -> gateway, and gateway -> client once the envelope is assembled.
struct EndorseReply
{
    std::string tx_id;
    EndorseOutcome outcome = EndorseOutcome::Endorsed;
    std::string peer;
    ReadSet rset;
    WriteSet wset;
    EndorsementStamp stamp;
    Key reason_key;    // EarlyInvalid: which key was marked
    std::string error; // Failed: reason
    Transaction envelope; // gateway -> client only: assembled envelope
    bool is_envelope = false;
};

// client -> gateway -> ordering service (followers forward to the leader).
struct SubmitEnvelope
{
    Transaction envelope;
    NodeId submitting_gw = -1;
};

// leader -> submitting gateway -> client: envelope accepted for ordering.
struct OrderAck
{
    std::string tx_id;
};

struct BlockBroadcast
{
    Block block;
};

// gateway -> client terminal success.
struct CommitNotify
{
    std::string tx_id;
};

// orderer -> gateway (MVCC fail verdict) and gateway -> client terminal
// failure of any kind.
struct InvalidNotify
{
    std::string tx_id;
    TxStatus status = TxStatus::InvalidMvcc;
};

// leader -> follower write-through, or a full snapshot resync at failover.
struct CacheUpdate
{
    std::vector<std::pair<Key, Version>> updates;
    bool full_resync = false;
    VersionCache::Snapshot snapshot;
};

// orderer -> endorsing peers: keys of a tx that passed ordering-service MVCC;
// peers refuse endorsements on these keys until the commit clears them.
struct PeerCacheMark
{
    std::string tx_id;
    std::vector<Key> keys;
};

enum class TimerKind
{
    NextSubmit,      // client: submit the next proposal
    BlockCut,        // leader: block interval expired
    MvccDone,        // leader: one serialized MVCC check finished
    BlockDone,       // peer: block validation/commit finished
    EndorseDeadline, // gateway: endorsement collection timed out
    Crash,           // scripted: kill the leader
    Elect,           // scripted: leadership takeover after a crash
};

inline char const*
timer_kind_name(TimerKind k)
{
    switch (k)
    {
    case TimerKind::NextSubmit:
        return "NextSubmit";
    case TimerKind::BlockCut:
        return "BlockCut";
    case TimerKind::MvccDone:
        return "MvccDone";
    case TimerKind::BlockDone:
        return "BlockDone";
    case TimerKind::EndorseDeadline:
        return "EndorseDeadline";
    case TimerKind::Crash:
        return "Crash";
    case TimerKind::Elect:
        return "Elect";
    }
    return "?";
}

struct Timer
{
    TimerKind kind = TimerKind::NextSubmit;
    uint64_t gen = 0;     // stale-timer suppression
    uint64_t index = 0;   // MvccDone: log index; BlockDone: block number
    std::string tx_id;    // EndorseDeadline
};

using Payload =
    std::variant<Propose, EndorseRequest, EndorseReply, SubmitEnvelope,
                 OrderAck, BlockBroadcast, CommitNotify, InvalidNotify,
                 CacheUpdate, PeerCacheMark, Timer>;

inline std::string
payload_kind(Payload const& p)
{
    struct Visitor
    {
        std::string
        operator()(Propose const&) const
        {
            return "Propose";
        }
        std::string
        operator()(EndorseRequest const&) const
        {
            return "EndorseRequest";
        }
        std::string
        operator()(EndorseReply const&) const
        {
            return "EndorseReply";
        }
        std::string
        operator()(SubmitEnvelope const&) const
        {
            return "SubmitEnvelope";
        }
        std::string
        operator()(OrderAck const&) const
        {
            return "OrderAck";
        }
        std::string
        operator()(BlockBroadcast const&) const
        {
            return "BlockBroadcast";
        }
        std::string
        operator()(CommitNotify const&) const
        {
            return "CommitNotify";
        }
        std::string
        operator()(InvalidNotify const&) const
        {
            return "InvalidNotify";
        }
        std::string
        operator()(CacheUpdate const&) const
        {
            return "CacheUpdate";
        }
        std::string
        operator()(PeerCacheMark const&) const
        {
            return "PeerCacheMark";
        }
        std::string
        operator()(Timer const& t) const
        {
            return std::string("Timer:") + timer_kind_name(t.kind);
        }
    };
    return std::visit(Visitor{}, p);
}

inline std::string
payload_tx_id(Payload const& p)
{
    struct Visitor
    {
        std::string
        operator()(Propose const& m) const
        {
            return m.proposal.tx_id;
        }
        std::string
        operator()(EndorseRequest const& m) const
        {
            return m.proposal.tx_id;
        }
        std::string
        operator()(EndorseReply const& m) const
        {
            return m.tx_id;
        }
        std::string
        operator()(SubmitEnvelope const& m) const
        {
            return m.envelope.tx_id;
        }
        std::string
        operator()(OrderAck const& m) const
        {
            return m.tx_id;
        }
        std::string
        operator()(BlockBroadcast const&) const
        {
            return "";
        }
        std::string
        operator()(CommitNotify const& m) const
        {
            return m.tx_id;
        }
        std::string
        operator()(InvalidNotify const& m) const
        {
            return m.tx_id;
        }
        std::string
        operator()(CacheUpdate const&) const
        {
            return "";
        }
        std::string
        operator()(PeerCacheMark const& m) const
        {
            return m.tx_id;
        }
        std::string
        operator()(Timer const& t) const
        {
            return t.tx_id;
        }
    };
    return std::visit(Visitor{}, p);
}

struct Event
{
    SimTime time = 0;
    uint64_t seq = 0; // FIFO tie-break for equal timestamps
    NodeId target = -1;
    Payload payload;
};

} // namespace eovsim
