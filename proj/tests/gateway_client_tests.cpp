// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace eovsim;
using namespace eovsim::testsupport;

TEST_CASE("endorsement deadlines reject every proposal when set too tight")
{
    auto rc = quick_config(Mode::OG, 0.2, 1);
    rc.workload.tx_per_client = 10;
    rc.endorse_timeout_ms = 0.5; // below one request/reply round trip
    auto res = run_one(rc);
    REQUIRE(res.ok());
    REQUIRE(res.summary.rejected == res.summary.submitted);
    REQUIRE(res.endorsement_timeouts == res.summary.submitted);
    REQUIRE(res.summary.committed == 0);
    // Late replies after the deadline are dropped without duplicates.
    REQUIRE(res.summary.duplicate_terminal == 0);
}

TEST_CASE("a zero deadline disables the endorsement timer")
{
    auto rc = quick_config(Mode::OG, 0.2, 1);
    rc.workload.tx_per_client = 10;
    rc.endorse_timeout_ms = 0.0;
    auto res = run_one(rc);
    REQUIRE(res.endorsement_timeouts == 0);
    REQUIRE(res.summary.rejected == 0);
    REQUIRE(res.summary.in_flight == 0);
}

TEST_CASE("clients resubmit failed transactions when retry is on")
{
    auto rc = quick_config(Mode::OG, 0.9, 2);
    rc.workload.hot_assets = 2; // force plenty of conflicts
    rc.retry = true;
    auto res = run_one(rc);
    REQUIRE(res.ok());
    REQUIRE(res.retries > 0);
    REQUIRE(res.summary.submitted ==
            static_cast<uint64_t>(rc.workload.clients) *
                    static_cast<uint64_t>(rc.workload.tx_per_client) +
                res.retries);
    REQUIRE(res.summary.in_flight == 0);
    // Every retry is a fresh transaction id, so the referee still agrees.
    REQUIRE(referee_run(res).ok());
}

TEST_CASE("forged envelopes are rejected by peer validation in the baseline")
{
    auto rc = quick_config(Mode::OG, 0.3, 3);
    rc.malicious_rate = 0.3;
    auto res = run_one(rc);
    REQUIRE(res.ok());

    uint64_t malicious = 0;
    for (auto const& r : res.records)
    {
        if (r.malicious)
        {
            ++malicious;
            REQUIRE(r.status.has_value());
            REQUIRE(*r.status == TxStatus::InvalidVscc);
        }
    }
    REQUIRE(malicious > 0);
    REQUIRE(res.summary.invalid_vscc >= malicious);

    // The referee skips policy rejections and still clears the honest txs.
    auto rep = referee_run(res);
    REQUIRE(rep.ok());
    REQUIRE(rep.skipped_policy_failures == malicious);
}

TEST_CASE("forged envelopes never commit in the relocated mode")
{
    auto rc = quick_config(Mode::OEMVCC, 0.3, 4);
    rc.malicious_rate = 0.3;
    auto res = run_one(rc);
    REQUIRE(res.ok());

    uint64_t malicious = 0;
    for (auto const& r : res.records)
    {
        if (r.malicious)
        {
            ++malicious;
            REQUIRE(r.status.has_value());
            // The ordering service may flag the conflict first; either way
            // the forgery never commits.
            bool rejectedSomewhere = *r.status == TxStatus::InvalidVscc ||
                                     *r.status == TxStatus::InvalidMvcc;
            REQUIRE(rejectedSomewhere);
        }
    }
    REQUIRE(malicious > 0);

    std::set<uint64_t> digests;
    for (auto const& [name, d] : res.node_digests)
    {
        digests.insert(d);
    }
    REQUIRE(digests.size() == 1);
}

TEST_CASE("multiple gateways share the client load")
{
    auto rc = quick_config(Mode::OEMVCC, 0.5, 5);
    rc.gateways = 2;
    auto res = run_one(rc);
    REQUIRE(res.ok());
    REQUIRE(res.summary.in_flight == 0);
    REQUIRE(referee_run(res).ok());
    // Both gateway hosts commit: peers + two gateway hosts replicate.
    REQUIRE(res.node_digests.size() == 4 + 2);
}

TEST_CASE("endorsements can demand a full quorum")
{
    auto rc = quick_config(Mode::OG, 0.5, 6);
    rc.endorsers_per_tx = 3;
    rc.endorsement_required = 3;
    auto res = run_one(rc);
    REQUIRE(res.ok());
    REQUIRE(res.summary.committed > 0);
    REQUIRE(referee_run(res).ok());
}

TEST_CASE("notification bookkeeping never double-fires")
{
    for (Mode m : {Mode::OG, Mode::OEMVCC, Mode::EA})
    {
        auto const& res = cached_run(quick_config(m, 0.8, 7));
        REQUIRE(res.summary.duplicate_terminal == 0);
        REQUIRE(res.dropped_duplicate_notifications == 0);
        REQUIRE(res.dropped_unknown_notifications == 0);
        // Drained run: every transaction heard back exactly once.
        REQUIRE(res.summary.in_flight == 0);
        REQUIRE(res.summary.client_notify_deliveries ==
                res.summary.submitted);
    }
}
