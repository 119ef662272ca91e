// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/common.hpp"
#include "eovsim/event.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eovsim
{

// Lifecycle record for one transaction proposal. Times are -1 until stamped.
// `submit` anchors latency: the instant the client sent the proposal.
struct TxRecord
{
    std::string tx_id;
    std::string client;
    bool hot = false;
    bool malicious = false;
    bool early_invalid = false;
    uint64_t submit_order = 0;

    SimTime submit = -1;
    SimTime endorse_done = -1;
    SimTime envelope_submit = -1;
    SimTime order_ack = -1;
    SimTime verdict = -1;
    SimTime commit = -1;
    SimTime notify = -1;

    std::optional<TxStatus> status;

    // One entry per endorsement attempt at a peer: the service time the
    // simulated execution consumed (0 for an early-invalid refusal).
    std::vector<double> exec_samples;

    bool
    terminal() const
    {
        return status.has_value();
    }
};

// Single collector per run; nodes call it directly (the engine is
// single-threaded). Terminal status is write-once: a second terminal event
// for the same tx is counted as a protocol bug rather than applied.
class MetricsCollector
{
  public:
    TxRecord&
    register_tx(std::string const& txId, std::string const& client, bool hot,
                SimTime now)
    {
        if (mIndex.count(txId))
        {
            throw SimError(ErrorKind::Invariant,
                           "tx registered twice: " + txId);
        }
        mIndex[txId] = mRecords.size();
        TxRecord r;
        r.tx_id = txId;
        r.client = client;
        r.hot = hot;
        r.submit_order = mRecords.size();
        r.submit = now;
        mRecords.push_back(std::move(r));
        return mRecords.back();
    }

    bool
    known(std::string const& txId) const
    {
        return mIndex.count(txId) != 0;
    }

    TxRecord&
    tx(std::string const& txId)
    {
        auto it = mIndex.find(txId);
        if (it == mIndex.end())
        {
            throw SimError(ErrorKind::UnknownTx, txId);
        }
        return mRecords[it->second];
    }

    void
    set_endorse_done(std::string const& txId, SimTime t)
    {
        auto& r = tx(txId);
        if (r.endorse_done < 0)
        {
            r.endorse_done = t;
        }
    }

    void
    set_envelope_submit(std::string const& txId, SimTime t)
    {
        auto& r = tx(txId);
        if (r.envelope_submit < 0)
        {
            r.envelope_submit = t;
        }
    }

    void
    set_order_ack(std::string const& txId, SimTime t)
    {
        auto& r = tx(txId);
        if (r.order_ack < 0)
        {
            r.order_ack = t;
        }
    }

    void
    set_verdict(std::string const& txId, SimTime t)
    {
        auto& r = tx(txId);
        if (r.verdict < 0)
        {
            r.verdict = t;
        }
    }

    void
    set_commit(std::string const& txId, SimTime t)
    {
        auto& r = tx(txId);
        if (r.commit < 0)
        {
            r.commit = t;
        }
    }

    void
    mark_early_invalid(std::string const& txId)
    {
        tx(txId).early_invalid = true;
    }

    void
    mark_malicious(std::string const& txId)
    {
        tx(txId).malicious = true;
    }

    void
    add_exec_sample(std::string const& txId, double ms)
    {
        tx(txId).exec_samples.push_back(ms);
    }

    void
    terminal(std::string const& txId, TxStatus status, SimTime now)
    {
        auto& r = tx(txId);
        if (r.status)
        {
            ++mDuplicateTerminal;
            return;
        }
        r.status = status;
        r.notify = now;
    }

    void
    accrue(std::string const& phase, double ms)
    {
        mServiceMs[phase] += ms;
    }

    double
    service_ms(std::string const& phase) const
    {
        auto it = mServiceMs.find(phase);
        return it == mServiceMs.end() ? 0.0 : it->second;
    }

    std::map<std::string, double> const&
    all_service_ms() const
    {
        return mServiceMs;
    }

    std::vector<TxRecord> const&
    records() const
    {
        return mRecords;
    }

    uint64_t
    duplicate_terminal() const
    {
        return mDuplicateTerminal;
    }

  private:
    std::map<std::string, size_t> mIndex;
    std::vector<TxRecord> mRecords;
    std::map<std::string, double> mServiceMs;
    uint64_t mDuplicateTerminal = 0;
};

struct ClassStats
{
    bool present = false;
    double mean = 0;
    double stddev = 0;
    uint64_t n = 0;
};

inline ClassStats
compute_stats(std::vector<double> const& xs)
{
    ClassStats s;
    if (xs.empty())
    {
        return s;
    }
    s.present = true;
    s.n = xs.size();
    double sum = 0;
    for (double x : xs)
    {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1)
    {
        double acc = 0;
        for (double x : xs)
        {
            acc += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

// Per-run aggregate. Classes: valid = committed; invalid = every other
// terminal status, so valid + invalid partitions the terminal count.
struct RunSummary
{
    std::string mode;
    double conflict_rate = 0;
    uint64_t seed = 0;

    uint64_t submitted = 0;
    uint64_t committed = 0;
    uint64_t invalid_mvcc = 0;
    uint64_t invalid_vscc = 0;
    uint64_t rejected = 0;
    uint64_t in_flight = 0;
    uint64_t early_invalid = 0;

    uint64_t counted = 0;          // post-warm-up txs
    uint64_t counted_terminal = 0; // their terminal notifications
    uint64_t counted_committed = 0;
    uint64_t counted_invalid = 0;

    SimTime window_start = 0;
    SimTime window_end = 0;
    double window_ms = 0;

    ClassStats latency_overall;
    ClassStats latency_valid;
    ClassStats latency_invalid;
    ClassStats exec_duration;

    double throughput_overall = 0; // tx/s over the measurement window
    double throughput_valid = 0;
    double throughput_invalid = 0;

    std::map<std::string, double> service_ms;

    uint64_t blocks = 0;
    uint64_t empty_blocks = 0;
    uint64_t duplicate_terminal = 0;
    uint64_t engine_events = 0;
    uint64_t client_notify_deliveries = 0;
};

// Reduces per-tx records to a RunSummary. The warm-up prefix (first
// floor(warmup_frac * N) txs by submit order) is excluded from latency,
// execution-duration and throughput figures; counts cover everything. The
// measurement window runs from the first counted submit to the last counted
// terminal notification.
inline RunSummary
summarize(std::string const& mode, double conflictRate, uint64_t seed,
          std::vector<TxRecord> const& records, double warmupFrac)
{
    RunSummary s;
    s.mode = mode;
    s.conflict_rate = conflictRate;
    s.seed = seed;
    s.submitted = records.size();

    for (auto const& r : records)
    {
        if (r.early_invalid)
        {
            ++s.early_invalid;
        }
        if (!r.status)
        {
            ++s.in_flight;
            continue;
        }
        switch (*r.status)
        {
        case TxStatus::Committed:
            ++s.committed;
            break;
        case TxStatus::InvalidMvcc:
            ++s.invalid_mvcc;
            break;
        case TxStatus::InvalidVscc:
            ++s.invalid_vscc;
            break;
        case TxStatus::Rejected:
            ++s.rejected;
            break;
        }
    }

    size_t skip = static_cast<size_t>(
        std::floor(warmupFrac * static_cast<double>(records.size())));
    if (skip >= records.size())
    {
        throw SimError(ErrorKind::EmptyWindow,
                       "warm-up excludes every transaction");
    }

    std::vector<double> latAll, latValid, latInvalid, execSamples;
    bool haveWindow = false;
    for (size_t i = skip; i < records.size(); ++i)
    {
        auto const& r = records[i];
        ++s.counted;
        if (!haveWindow)
        {
            s.window_start = r.submit;
            haveWindow = true;
        }
        for (double x : r.exec_samples)
        {
            execSamples.push_back(x);
        }
        if (!r.status)
        {
            continue;
        }
        ++s.counted_terminal;
        s.window_end = std::max(s.window_end, r.notify);
        double lat = r.notify - r.submit;
        latAll.push_back(lat);
        if (*r.status == TxStatus::Committed)
        {
            ++s.counted_committed;
            latValid.push_back(lat);
        }
        else
        {
            ++s.counted_invalid;
            latInvalid.push_back(lat);
        }
    }

    if (s.counted_terminal == 0)
    {
        throw SimError(ErrorKind::EmptyWindow,
                       "no terminal notifications after warm-up");
    }
    s.window_ms = s.window_end - s.window_start;
    if (!(s.window_ms > 0))
    {
        throw SimError(ErrorKind::EmptyWindow, "measurement window is empty");
    }

    s.latency_overall = compute_stats(latAll);
    s.latency_valid = compute_stats(latValid);
    s.latency_invalid = compute_stats(latInvalid);
    s.exec_duration = compute_stats(execSamples);

    double windowS = s.window_ms / 1000.0;
    s.throughput_overall =
        static_cast<double>(s.counted_terminal) / windowS;
    s.throughput_valid =
        static_cast<double>(s.counted_committed) / windowS;
    s.throughput_invalid =
        static_cast<double>(s.counted_invalid) / windowS;
    return s;
}

} // namespace eovsim
