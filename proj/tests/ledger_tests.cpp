// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "eovsim/ledger.hpp"
#include "eovsim/simulation.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace eovsim;

namespace
{

Transaction
make_tx(std::string id, Flag vscc, Flag mvcc,
        std::map<Key, std::string> writes = {})
{
    Transaction t;
    t.tx_id = std::move(id);
    t.vscc = vscc;
    t.mvcc = mvcc;
    t.wset.entries = std::move(writes);
    return t;
}

Block
make_block(uint64_t num, uint64_t prev, std::vector<Transaction> txs)
{
    Block b;
    b.block_num = num;
    b.prev_hash = prev;
    b.txs = std::move(txs);
    return b;
}

} // namespace

TEST_CASE("digest is stable and order sensitive")
{
    REQUIRE(Digest().feed("abc").value() == Digest().feed("abc").value());
    REQUIRE(Digest().feed("ab").feed("c").value() !=
            Digest().feed("a").feed("bc").value());
    REQUIRE(Digest().feed_u64(1).feed_u64(2).value() !=
            Digest().feed_u64(2).feed_u64(1).value());
}

TEST_CASE("hex64 prints 16 lowercase hex digits")
{
    REQUIRE(hex64(0) == "0000000000000000");
    REQUIRE(hex64(0xdeadbeef) == "00000000deadbeef");
    REQUIRE(hex64(~uint64_t{0}) == "ffffffffffffffff");
}

TEST_CASE("write set application bumps versions by exactly one")
{
    WorldState w;
    WriteSet ws;
    ws.entries = {{"a", "1"}, {"b", "1"}};
    w.apply_write_set(ws);
    REQUIRE(w.read_key("a")->version == 1);
    REQUIRE(w.read_key("b")->version == 1);
    ws.entries = {{"a", "2"}};
    w.apply_write_set(ws);
    REQUIRE(w.read_key("a")->version == 2);
    REQUIRE(w.read_key("a")->value == "2");
    REQUIRE(w.read_key("b")->version == 1);
    REQUIRE(!w.read_key("missing").has_value());
}

TEST_CASE("world digest depends on keys, values and versions")
{
    WorldState a;
    WorldState b;
    WriteSet ws;
    ws.entries = {{"k", "v"}};
    a.apply_write_set(ws);
    b.apply_write_set(ws);
    REQUIRE(a.digest() == b.digest());
    b.apply_write_set(ws); // same value, higher version
    REQUIRE(a.digest() != b.digest());
}

TEST_CASE("ledger applies only fully valid transactions")
{
    Ledger l;
    l.append_block(make_block(
        0, 0,
        {make_tx("genesis", Flag::Pass, Flag::Pass, {{"a", "genesis"}})}));
    l.append_block(make_block(
        1, l.tip_hash(),
        {make_tx("ok", Flag::Pass, Flag::Pass, {{"a", "x"}}),
         make_tx("badver", Flag::Pass, Flag::Fail, {{"a", "y"}}),
         make_tx("badsig", Flag::Fail, Flag::Unchecked, {{"a", "z"}})}));

    REQUIRE(l.world().read_key("a")->value == "x");
    REQUIRE(l.world().read_key("a")->version == 2);
    REQUIRE(l.history().size() == 4);
    REQUIRE(l.history()[2].mvcc == Flag::Fail);
    REQUIRE(l.history()[3].vscc == Flag::Fail);
}

TEST_CASE("ledger rejects out-of-sequence blocks")
{
    Ledger l;
    l.append_block(make_block(0, 0, {}));
    REQUIRE_THROWS_AS(l.append_block(make_block(2, l.tip_hash(), {})),
                      SimError);
}

TEST_CASE("ledger rejects a block whose prev_hash is not the tip")
{
    Ledger l;
    l.append_block(make_block(0, 0, {}));
    REQUIRE_THROWS_AS(l.append_block(make_block(1, 12345, {})), SimError);
}

TEST_CASE("two ledgers fed identical blocks agree on tip and digest")
{
    Ledger a;
    Ledger b;
    for (uint64_t i = 0; i < 5; ++i)
    {
        auto blk = make_block(
            i, a.tip_hash(),
            {make_tx("t" + std::to_string(i), Flag::Pass, Flag::Pass,
                     {{"k" + std::to_string(i % 2), std::to_string(i)}})});
        a.append_block(blk);
        b.append_block(blk);
    }
    REQUIRE(a.tip_hash() == b.tip_hash());
    REQUIRE(a.world().digest() == b.world().digest());
}

TEST_CASE("block digest covers the validity flags")
{
    auto b1 = make_block(1, 7, {make_tx("t", Flag::Pass, Flag::Pass)});
    auto b2 = make_block(1, 7, {make_tx("t", Flag::Pass, Flag::Fail)});
    REQUIRE(block_digest(b1) != block_digest(b2));
}

TEST_CASE("chain audit catches tampered content")
{
    Ledger l;
    l.append_block(make_block(0, 0, {make_tx("g", Flag::Pass, Flag::Pass)}));
    l.append_block(make_block(1, l.tip_hash(),
                              {make_tx("t1", Flag::Pass, Flag::Pass)}));
    REQUIRE(chain_problems(l.chain()).empty());

    auto tampered = l.chain();
    tampered[1].txs[0].mvcc = Flag::Fail; // flip a flag after sealing
    REQUIRE(!chain_problems(tampered).empty());

    auto renumbered = l.chain();
    renumbered[1].block_num = 5;
    REQUIRE(!chain_problems(renumbered).empty());

    auto relinked = l.chain();
    relinked[1].prev_hash ^= 1;
    REQUIRE(!chain_problems(relinked).empty());
}
