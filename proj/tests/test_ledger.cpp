// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"
#include <dynconsent/crypto.hpp>
#include <dynconsent/ledger.hpp>
#include <gtest/gtest.h>

using namespace dynconsent;
using namespace dynconsent::ledger;
using dynconsent::test::error_of;

namespace
{
/// Test double: per-sender counters. Payload byte 0xFF fails; an empty payload is malformed.
class Counter final : public StateMachine
{
public:
    static constexpr uint64_t base_gas = 21000;
    static constexpr uint64_t per_byte = 100;

    ExecutionResult execute(const Transaction& tx, const BlockContext&) override
    {
        ExecutionResult r;
        if (tx.payload.empty())
        {
            r.error = Errc::MalformedPayload;
            return r;
        }
        if (tx.payload[0] == 0xFF)
        {
            r.error = Errc::NotOwner;
            return r;
        }
        counters[tx.sender] += tx.payload[0];
        r.execution_gas = per_byte * tx.payload.size();
        r.transaction_gas = base_gas + r.execution_gas;
        if (!tx.target)
        {
            Address a;
            std::copy_n(tx.tx_id.bytes.begin(), a.bytes.size(), a.bytes.begin());
            r.created = a;
        }
        r.events.push_back({1, tx.target.value_or(Address{}), tx.sender, tx.payload});
        return r;
    }
    [[nodiscard]] uint64_t estimate_gas(const Transaction& tx) const override
    {
        return base_gas + per_byte * tx.payload.size();
    }
    [[nodiscard]] bytes state_encoding() const override
    {
        Encoder e;
        e.u32(static_cast<uint32_t>(counters.size()));
        for (const auto& [a, v] : counters)
            e.fixed(a).u64(v);
        return e.data();
    }
    [[nodiscard]] std::unique_ptr<StateMachine> fresh() const override { return std::make_unique<Counter>(); }

    std::map<Address, uint64_t> counters;
};

struct Fixture
{
    Ledger ledger{std::make_unique<Counter>()};
    Address alice = ledger.create_account(Role::Provider, ether(1)).address;
    Address bob = ledger.create_account(Role::Requester, ether(1)).address;
    Address sup = ledger.create_account(Role::Supervisor, ether(1)).address;
    Address target = Address{};

    Hash256 send(const Address& from, bytes payload)
    {
        return ledger.submit_transaction(ledger.make_transaction(from, target, std::move(payload)));
    }
};

Wei fee_of(uint64_t gas)
{
    return gwei(8) * gas;
}
}  // namespace

TEST(Ledger, GenesisAndAllocations)
{
    Fixture f;
    EXPECT_EQ(f.ledger.height(), 0u);
    const auto b = f.ledger.mine_block();
    EXPECT_EQ(b.header.height, 1u);
    EXPECT_EQ(b.allocations.size(), 3u);
    EXPECT_TRUE(b.transactions.empty());
    EXPECT_EQ(f.ledger.account(f.alice)->balance, ether(1));
    EXPECT_EQ(f.ledger.total_balance(), ether(3));
    EXPECT_EQ(f.ledger.chain().front().header.prev_hash, Hash256{});
}

TEST(Ledger, SubmissionRejections)
{
    Fixture f;
    Address stranger;
    stranger.bytes[0] = 0x42;
    EXPECT_EQ(error_of([&] { f.send(stranger, {1}); }), Errc::UnknownSender);
    EXPECT_EQ(error_of([&] { f.send(f.sup, {1}); }), Errc::ReadOnlyRole);

    const auto poor = f.ledger.create_account(Role::Requester, fee_of(21099)).address;
    EXPECT_EQ(error_of([&] { f.send(poor, {1}); }), Errc::InsufficientFunds);
    const auto exact = f.ledger.create_account(Role::Requester, fee_of(21100)).address;
    EXPECT_EQ(error_of([&] { f.send(exact, {1}); }), Errc::None);

    const auto tx = f.ledger.make_transaction(f.alice, f.target, {2});
    f.ledger.submit_transaction(tx);
    EXPECT_EQ(error_of([&] { f.ledger.submit_transaction(tx); }), Errc::Duplicate);
    f.ledger.mine_block();
    EXPECT_EQ(error_of([&] { f.ledger.submit_transaction(tx); }), Errc::Duplicate);

    auto forged = f.ledger.make_transaction(f.alice, f.target, {3});
    forged.payload = {4};
    EXPECT_EQ(error_of([&] { f.ledger.submit_transaction(forged); }), Errc::Decode);
}

TEST(Ledger, EmptyPool)
{
    Fixture f;
    f.ledger.mine_block();
    EXPECT_EQ(error_of([&] { f.ledger.mine_block(); }), Errc::EmptyPool);

    Ledger open{std::make_unique<Counter>(), LedgerConfig{gwei(8), Wei{}, true}};
    EXPECT_NO_THROW(open.mine_block());
    EXPECT_EQ(open.height(), 1u);
}

TEST(Ledger, FifoOrderAndReceipts)
{
    Fixture f;
    std::vector<Hash256> ids;
    for (uint8_t i = 1; i <= 5; ++i)
        ids.push_back(f.send(i % 2 ? f.alice : f.bob, bytes(i, i)));
    EXPECT_EQ(f.ledger.pool_size(), 5u);
    const auto b = f.ledger.mine_block();
    EXPECT_EQ(f.ledger.pool_size(), 0u);
    ASSERT_EQ(b.transactions.size(), 5u);
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        EXPECT_EQ(b.transactions[i].tx_id, ids[i]);
        EXPECT_EQ(b.receipts[i].tx_id, ids[i]);
        EXPECT_TRUE(b.receipts[i].success());
        EXPECT_EQ(b.receipts[i].transaction_gas, 21000 + 100 * (i + 1));
        EXPECT_EQ(b.receipts[i].fee, fee_of(21000 + 100 * (i + 1)));
        EXPECT_EQ(f.ledger.find(ids[i])->height, 1u);
    }
    EXPECT_EQ(b.transactions[0].sequence, 0u);
    EXPECT_EQ(b.transactions[2].sequence, 1u);
}

TEST(Ledger, FailedTransactionStaysAndCostsNothing)
{
    Fixture f;
    f.ledger.mine_block();
    const auto ok = f.send(f.alice, {7});
    const auto bad = f.send(f.alice, {0xFF});
    const auto b = f.ledger.mine_block();
    ASSERT_EQ(b.receipts.size(), 2u);
    EXPECT_EQ(b.receipts[1].tx_id, bad);
    EXPECT_EQ(b.receipts[1].error, Errc::NotOwner);
    EXPECT_EQ(b.receipts[1].fee, Wei{});
    EXPECT_TRUE(b.receipts[1].events.empty());
    EXPECT_EQ(f.ledger.account(f.alice)->balance, ether(1) - fee_of(21100));
    EXPECT_TRUE(f.ledger.find(ok)->receipt.success());
}

TEST(Ledger, OutOfGas)
{
    Fixture f;
    auto tx = f.ledger.make_transaction(f.alice, f.target, {1, 2, 3});
    tx.gas_limit = 21000;
    tx.tx_id = tx.compute_id();
    f.ledger.submit_transaction(tx);
    const auto b = f.ledger.mine_block();
    EXPECT_EQ(b.receipts[0].error, Errc::OutOfGas);
    EXPECT_EQ(f.ledger.account(f.alice)->balance, ether(1));
    EXPECT_TRUE(validate_chain(f.ledger.chain(), Counter{}).ok);
}

TEST(Ledger, ConservationProperty)
{
    // Property: balances plus collected fees (plus rewards) always equal the total prefund.
    test::Gen gen{1234};
    for (int run = 0; run < 20; ++run)
    {
        const bool rewarded = gen.coin();
        Ledger l{std::make_unique<Counter>(), LedgerConfig{gwei(8), rewarded ? ether(2) : Wei{}, false}};
        std::vector<Address> actors;
        Wei prefunded{};
        for (int i = 0; i < 4; ++i)
        {
            const auto amount = gwei(gen.range(200'000, 5'000'000));
            actors.push_back(l.create_account(gen.coin() ? Role::Provider : Role::Requester, amount).address);
            prefunded += amount;
        }
        uint64_t blocks = 0;
        for (int step = 0; step < 40; ++step)
        {
            const auto& who = gen.pick(actors);
            bytes payload = gen.range(0, 5) == 0 ? bytes{0xFF} : gen.blob(gen.range(0, 20));
            try
            {
                l.submit_transaction(l.make_transaction(who, gen.coin() ? std::optional<Address>{} : Address{}, payload));
            }
            catch (const Error& e)
            {
                EXPECT_EQ(e.code(), Errc::InsufficientFunds);
            }
            if (gen.range(0, 3) == 0)
            {
                if (l.pool_size() > 0 || l.height() == 0)
                {
                    l.mine_block();
                    ++blocks;
                }
            }
        }
        if (l.pool_size() > 0)
        {
            l.mine_block();
            ++blocks;
        }
        Wei rewards = rewarded ? ether(2) * blocks : Wei{};
        EXPECT_EQ(l.total_balance(), prefunded + rewards - l.fees_collected());
        Wei fee_sum{};
        for (const auto& b : l.chain())
            for (const auto& r : b.receipts)
                fee_sum += r.fee;
        EXPECT_EQ(fee_sum, l.fees_collected());
        const auto report = validate_chain(l.chain(), Counter{}, l.config());
        EXPECT_TRUE(report.ok) << report.reason;
    }
}

TEST(Ledger, HistoryAndCreation)
{
    Fixture f;
    const auto created_tx = f.ledger.make_transaction(f.alice, std::nullopt, {1});
    f.ledger.submit_transaction(created_tx);
    const auto b = f.ledger.mine_block();
    ASSERT_TRUE(b.receipts[0].created);
    const auto contract = *b.receipts[0].created;
    f.ledger.submit_transaction(f.ledger.make_transaction(f.bob, contract, {2}));
    f.ledger.submit_transaction(f.ledger.make_transaction(f.bob, f.target, {3}));
    f.ledger.mine_block();
    const auto h = f.ledger.history(contract);
    ASSERT_EQ(h.size(), 2u);
    EXPECT_EQ(h[0].transaction.tx_id, created_tx.tx_id);
    EXPECT_EQ(h[1].transaction.sender, f.bob);
    EXPECT_EQ(h[1].height, 2u);
    EXPECT_EQ(f.ledger.history(f.bob).size(), 2u);
    Address nobody;
    nobody.bytes[5] = 9;
    EXPECT_EQ(error_of([&] { (void)f.ledger.history(nobody); }), Errc::UnknownAddress);
}

TEST(Ledger, DifficultyIsMetAndValidated)
{
    Fixture f;
    f.send(f.alice, {1});
    const auto b = f.ledger.mine_block(10);
    EXPECT_GE(leading_zero_bits(b.block_hash), 10u);
    EXPECT_EQ(b.header.difficulty, 10u);
    EXPECT_TRUE(validate_chain(f.ledger.chain(), Counter{}, {}, 10).ok);

    f.send(f.alice, {2});
    f.ledger.mine_block(2);
    const auto weak = validate_chain(f.ledger.chain(), Counter{}, {}, 10);
    EXPECT_FALSE(weak.ok);
    EXPECT_EQ(weak.first_invalid_height, 2u);
}

TEST(Ledger, LeadingZeroBitsOracle)
{
    Hash256 h;
    EXPECT_EQ(leading_zero_bits(h), 256u);
    h.bytes[0] = 0x80;
    EXPECT_EQ(leading_zero_bits(h), 0u);
    h.bytes[0] = 0x01;
    EXPECT_EQ(leading_zero_bits(h), 7u);
    h.bytes[0] = 0;
    h.bytes[3] = 0x10;
    EXPECT_EQ(leading_zero_bits(h), 27u);
}

namespace
{
std::vector<Block> busy_chain(Ledger& l)
{
    const auto a = l.create_account(Role::Provider, ether(5)).address;
    const auto b = l.create_account(Role::Requester, ether(5)).address;
    l.mine_block();
    for (uint8_t i = 0; i < 6; ++i)
    {
        l.submit_transaction(l.make_transaction(i % 2 ? a : b, i % 3 ? std::optional<Address>{} : Address{},
            i == 4 ? bytes{0xFF} : bytes(i + 1u, i)));
        if (i % 2)
            l.mine_block(1);
    }
    return l.chain();
}
}  // namespace

TEST(Ledger, ExportImportReplay)
{
    Ledger l{std::make_unique<Counter>()};
    const auto chain = busy_chain(l);
    const auto text = export_chain(chain);
    const auto back = import_chain(text);
    ASSERT_EQ(back.size(), chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i)
        EXPECT_EQ(back[i].encode(), chain[i].encode());
    EXPECT_EQ(export_chain(back), text);

    const auto report = validate_chain(back, Counter{});
    ASSERT_TRUE(report.ok) << report.reason;
    EXPECT_EQ(report.blocks_checked, chain.size());
    const auto [lock, state] = l.state();
    EXPECT_EQ(report.state_hash, sha256(state->state_encoding()));
}

TEST(Ledger, ReplayIsDeterministic)
{
    Ledger a{std::make_unique<Counter>()};
    Ledger b{std::make_unique<Counter>()};
    EXPECT_EQ(export_chain(busy_chain(a)), export_chain(busy_chain(b)));
}

TEST(Ledger, EveryBitFlipIsDetected)
{
    Ledger l{std::make_unique<Counter>()};
    const auto chain = busy_chain(l);
    std::vector<bytes> encoded;
    for (const auto& b : chain)
        encoded.push_back(b.encode());

    test::Gen gen{2026};
    for (int trial = 0; trial < 1000; ++trial)
    {
        auto copy = encoded;
        const auto height = gen.range(0, copy.size() - 1);
        auto& blk = copy[height];
        const auto bit = gen.range(0, blk.size() * 8 - 1);
        blk[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));

        std::string text;
        for (const auto& e : copy)
            text += to_hex(e) + "\n";
        const auto report = validate_chain_text(text, Counter{});
        ASSERT_FALSE(report.ok) << "height " << height << " bit " << bit;
        EXPECT_LE(report.first_invalid_height.value_or(~0ull), height) << report.reason;
    }
}

TEST(Ledger, TamperedFieldsAreNamed)
{
    Ledger l{std::make_unique<Counter>()};
    const auto chain = busy_chain(l);

    auto swapped = chain;
    std::swap(swapped[2], swapped[3]);
    EXPECT_EQ(validate_chain(swapped, Counter{}).first_invalid_height, 2u);

    auto receipt = chain;
    receipt[2].receipts[0].execution_gas += 1;
    auto r = validate_chain(receipt, Counter{});
    EXPECT_EQ(r.reason, "tx_root mismatch");

    // Rebuilt hashes without the pow search still fail replay.
    auto rebuilt = chain;
    rebuilt[2].receipts[0].fee = rebuilt[2].receipts[0].fee + Wei{1};
    for (std::size_t i = 2; i < rebuilt.size(); ++i)
    {
        auto& b = rebuilt[i];
        b.header.prev_hash = rebuilt[i - 1].block_hash;
        b.header.tx_root = b.compute_tx_root();
        b.header.difficulty = 0;
        b.block_hash = b.header.hash();
    }
    r = validate_chain(rebuilt, Counter{});
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.first_invalid_height, 2u);
    EXPECT_EQ(r.reason, "replayed receipt differs");
}

TEST(Ledger, BlockDecodeIsStrict)
{
    Ledger l{std::make_unique<Counter>()};
    const auto chain = busy_chain(l);
    auto enc = chain[2].encode();
    EXPECT_EQ(Block::decode(enc).encode(), enc);
    enc.push_back(0);
    EXPECT_EQ(error_of([&] { (void)Block::decode(enc); }), Errc::Decode);
    enc.resize(enc.size() - 2);
    EXPECT_EQ(error_of([&] { (void)Block::decode(enc); }), Errc::Decode);
}
