// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/ledger.hpp"
#include "eovsim/workload.hpp"

#include <set>
#include <string>

namespace eovsim
{

struct EndorsementPolicy
{
    int required = 1;
    std::set<std::string> eligible; // endorsing-peer names
};

// Endorsement-policy check (VSCC). Shared verbatim by the gateway and by
// peer-side validation so both routes give identical verdicts: the client
// signature must verify and at least `required` distinct eligible peers must
// carry valid endorsement tags.
inline bool
vscc_check(Transaction const& tx, EndorsementPolicy const& policy)
{
    if (tx.client_sig != client_sig_tag(tx.client, tx.tx_id))
    {
        return false;
    }
    std::set<std::string> valid;
    for (auto const& e : tx.endorsements)
    {
        if (!policy.eligible.count(e.peer))
        {
            continue;
        }
        if (e.tag != endorse_sig_tag(e.peer, tx.tx_id))
        {
            continue;
        }
        valid.insert(e.peer);
    }
    return static_cast<int>(valid.size()) >= policy.required;
}

} // namespace eovsim
