// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/crypto.hpp>
#include <dynconsent/ledger.hpp>
#include <algorithm>

namespace dynconsent::ledger
{
namespace
{
constexpr uint8_t max_role = static_cast<uint8_t>(Role::Supervisor);

Role decode_role(Decoder& d)
{
    const auto r = d.u8();
    if (r > max_role)
        throw Error{Errc::Decode, "role out of range"};
    return static_cast<Role>(r);
}

template <typename T>
void encode_optional(Encoder& e, const std::optional<T>& v)
{
    e.boolean(v.has_value());
    if (v)
        e.fixed(*v);
}

std::optional<Address> decode_optional_address(Decoder& d)
{
    if (!d.boolean())
        return std::nullopt;
    return d.fixed<Address::size>();
}

Address address_from(const Hash256& h)
{
    Address a;
    std::copy_n(h.bytes.begin() + 12, a.bytes.size(), a.bytes.begin());
    return a;
}

/// Applies transactions to accounts and state. Shared by mining and replay so both follow
/// exactly the same rules.
struct Executor
{
    std::map<Address, Account>& accounts;
    Wei& fees;
    StateMachine& state;

    Receipt apply(const Transaction& tx, const BlockContext& ctx)
    {
        Receipt r;
        r.tx_id = tx.tx_id;
        const auto it = accounts.find(tx.sender);
        if (it == accounts.end())
        {
            r.error = Errc::UnknownSender;
            return r;
        }
        auto& sender = it->second;
        if (sender.role == Role::Supervisor)
        {
            r.error = Errc::ReadOnlyRole;
            return r;
        }
        if (sender.balance < tx.gas_price * tx.gas_limit)
        {
            r.error = Errc::InsufficientFunds;
            return r;
        }
        if (state.estimate_gas(tx) > tx.gas_limit)
        {
            r.error = Errc::OutOfGas;
            return r;
        }
        auto result = state.execute(tx, ctx);
        r.error = result.error;
        if (!r.success())
            return r;
        r.transaction_gas = result.transaction_gas;
        r.execution_gas = result.execution_gas;
        r.fee = tx.gas_price * result.transaction_gas;
        r.created = result.created;
        r.output = std::move(result.output);
        r.events = std::move(result.events);
        sender.balance -= r.fee;
        fees += r.fee;
        return r;
    }

    void reward(Wei amount)
    {
        if (amount.value == 0)
            return;
        auto [it, inserted] = accounts.try_emplace(miner_address(), Account{miner_address(), Wei{}, Role::Supervisor});
        it->second.balance += amount;
    }
};
}  // namespace

std::string_view to_string(Role r) noexcept
{
    switch (r)
    {
    case Role::Provider: return "provider";
    case Role::Requester: return "requester";
    case Role::Supervisor: return "supervisor";
    }
    return "unknown";
}

Address miner_address()
{
    return address_from(sha256(Encoder{}.str("miner").data()));
}

void Allocation::encode(Encoder& e) const
{
    e.fixed(address).u8(static_cast<uint8_t>(role)).wei(prefund);
}

Allocation Allocation::decode(Decoder& d)
{
    Allocation a;
    a.address = d.fixed<Address::size>();
    a.role = decode_role(d);
    a.prefund = d.wei();
    return a;
}

void Transaction::encode(Encoder& e) const
{
    e.fixed(tx_id).fixed(sender);
    encode_optional(e, target);
    e.blob(payload).u64(gas_limit).wei(gas_price).u64(sequence).blob(signature);
}

Hash256 Transaction::compute_id() const
{
    Encoder e;
    e.fixed(sender);
    encode_optional(e, target);
    e.blob(payload).u64(gas_limit).wei(gas_price).u64(sequence).blob(signature);
    return sha256(e.data());
}

Transaction Transaction::decode(Decoder& d)
{
    Transaction tx;
    tx.tx_id = d.fixed<Hash256::size>();
    tx.sender = d.fixed<Address::size>();
    tx.target = decode_optional_address(d);
    tx.payload = d.blob();
    tx.gas_limit = d.u64();
    tx.gas_price = d.wei();
    tx.sequence = d.u64();
    tx.signature = d.blob();
    return tx;
}

void LogEvent::encode(Encoder& e) const
{
    e.u8(kind).fixed(contract).fixed(subject).blob(data);
}

LogEvent LogEvent::decode(Decoder& d)
{
    LogEvent ev;
    ev.kind = d.u8();
    ev.contract = d.fixed<Address::size>();
    ev.subject = d.fixed<Address::size>();
    ev.data = d.blob();
    return ev;
}

void Receipt::encode(Encoder& e) const
{
    e.fixed(tx_id).u16(static_cast<uint16_t>(error)).u64(transaction_gas).u64(execution_gas).wei(fee);
    encode_optional(e, created);
    e.blob(output).u32(static_cast<uint32_t>(events.size()));
    for (const auto& ev : events)
        ev.encode(e);
}

Receipt Receipt::decode(Decoder& d)
{
    Receipt r;
    r.tx_id = d.fixed<Hash256::size>();
    r.error = static_cast<Errc>(d.u16());
    r.transaction_gas = d.u64();
    r.execution_gas = d.u64();
    r.fee = d.wei();
    r.created = decode_optional_address(d);
    r.output = d.blob();
    const auto n = d.count(1 + 2 * Address::size + 4);
    r.events.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
        r.events.push_back(LogEvent::decode(d));
    return r;
}

bytes BlockHeader::encode() const
{
    Encoder e;
    e.u64(height).fixed(prev_hash).fixed(tx_root).u64(timestamp).u32(difficulty).u64(nonce);
    return std::move(e).data();
}

Hash256 BlockHeader::hash() const
{
    return sha256(encode());
}

Hash256 Block::compute_tx_root() const
{
    Encoder e;
    e.u32(static_cast<uint32_t>(allocations.size()));
    for (const auto& a : allocations)
        a.encode(e);
    e.u32(static_cast<uint32_t>(transactions.size()));
    for (const auto& tx : transactions)
        tx.encode(e);
    e.u32(static_cast<uint32_t>(receipts.size()));
    for (const auto& r : receipts)
        r.encode(e);
    return sha256(e.data());
}

bytes Block::encode() const
{
    Encoder e;
    e.u64(header.height)
        .fixed(header.prev_hash)
        .fixed(header.tx_root)
        .u64(header.timestamp)
        .u32(header.difficulty)
        .u64(header.nonce)
        .fixed(block_hash);
    e.u32(static_cast<uint32_t>(allocations.size()));
    for (const auto& a : allocations)
        a.encode(e);
    e.u32(static_cast<uint32_t>(transactions.size()));
    for (const auto& tx : transactions)
        tx.encode(e);
    e.u32(static_cast<uint32_t>(receipts.size()));
    for (const auto& r : receipts)
        r.encode(e);
    return std::move(e).data();
}

Block Block::decode(bytes_view data)
{
    Decoder d{data};
    Block b;
    b.header.height = d.u64();
    b.header.prev_hash = d.fixed<Hash256::size>();
    b.header.tx_root = d.fixed<Hash256::size>();
    b.header.timestamp = d.u64();
    b.header.difficulty = d.u32();
    b.header.nonce = d.u64();
    b.block_hash = d.fixed<Hash256::size>();
    const auto na = d.count(Address::size + 1 + 16);
    for (uint32_t i = 0; i < na; ++i)
        b.allocations.push_back(Allocation::decode(d));
    const auto nt = d.count(32 + 20 + 1);
    for (uint32_t i = 0; i < nt; ++i)
    {
        b.transactions.push_back(Transaction::decode(d));
        b.transactions.back().block_height = b.header.height;
    }
    const auto nr = d.count(32 + 2);
    for (uint32_t i = 0; i < nr; ++i)
        b.receipts.push_back(Receipt::decode(d));
    d.finish();
    return b;
}

Ledger::Ledger(std::unique_ptr<StateMachine> state, LedgerConfig config)
  : state_{std::move(state)}, config_{config}
{
    Block genesis;
    genesis.header.tx_root = genesis.compute_tx_root();
    genesis.block_hash = genesis.header.hash();
    blocks_.push_back(std::move(genesis));
}

Account Ledger::create_account(Role role, Wei prefund)
{
    std::unique_lock chain_lock{chain_mutex_};
    std::lock_guard pool_lock{pool_mutex_};
    Address address;
    do
    {
        address = address_from(sha256(Encoder{}.str("account").u64(accounts_created_++).data()));
    } while (accounts_.contains(address));
    Account a{address, prefund, role};
    accounts_.emplace(address, a);
    pending_allocations_.push_back({address, role, prefund});
    return a;
}

Transaction Ledger::make_transaction(const Address& sender, std::optional<Address> target, bytes payload)
{
    Transaction tx;
    tx.sender = sender;
    tx.target = target;
    tx.payload = std::move(payload);
    tx.gas_price = config_.gas_price;
    {
        std::shared_lock chain_lock{chain_mutex_};
        tx.gas_limit = state_->estimate_gas(tx);
    }
    {
        std::lock_guard pool_lock{pool_mutex_};
        tx.sequence = next_sequence_[sender]++;
    }
    tx.tx_id = tx.compute_id();
    return tx;
}

Hash256 Ledger::submit_transaction(Transaction tx)
{
    std::shared_lock chain_lock{chain_mutex_};
    std::lock_guard pool_lock{pool_mutex_};
    const auto it = accounts_.find(tx.sender);
    if (it == accounts_.end())
        throw Error{Errc::UnknownSender, tx.sender.hex()};
    if (it->second.role == Role::Supervisor)
        throw Error{Errc::ReadOnlyRole, tx.sender.hex()};
    if (it->second.balance < tx.gas_price * tx.gas_limit)
        throw Error{Errc::InsufficientFunds, tx.sender.hex()};
    if (tx.compute_id() != tx.tx_id)
        throw Error{Errc::Decode, "tx_id does not match transaction fields"};
    if (known_ids_.contains(tx.tx_id) ||
        std::ranges::any_of(pool_, [&](const Transaction& p) { return p.tx_id == tx.tx_id; }))
        throw Error{Errc::Duplicate, tx.tx_id.hex()};
    const auto id = tx.tx_id;
    pool_.push_back(std::move(tx));
    return id;
}

Block Ledger::mine_block(uint32_t difficulty)
{
    std::unique_lock chain_lock{chain_mutex_};
    Block b;
    {
        std::lock_guard pool_lock{pool_mutex_};
        if (pool_.empty() && pending_allocations_.empty() && !config_.allow_empty_blocks)
            throw Error{Errc::EmptyPool};
        b.transactions.assign(std::make_move_iterator(pool_.begin()), std::make_move_iterator(pool_.end()));
        pool_.clear();
        b.allocations = std::move(pending_allocations_);
        pending_allocations_.clear();
    }

    const auto height = static_cast<uint64_t>(blocks_.size());
    const BlockContext ctx{height, height};
    Executor exec{accounts_, fees_, *state_};
    for (auto& tx : b.transactions)
    {
        b.receipts.push_back(exec.apply(tx, ctx));
        tx.block_height = height;
    }
    exec.reward(config_.block_reward);

    b.header.height = height;
    b.header.prev_hash = blocks_.back().block_hash;
    b.header.tx_root = b.compute_tx_root();
    b.header.timestamp = height;
    b.header.difficulty = difficulty;
    for (b.header.nonce = 0;; ++b.header.nonce)
    {
        b.block_hash = b.header.hash();
        if (leading_zero_bits(b.block_hash) >= difficulty)
            break;
    }

    for (std::size_t i = 0; i < b.transactions.size(); ++i)
    {
        const auto& tx = b.transactions[i];
        const Location loc{height, i};
        known_ids_.insert(tx.tx_id);
        tx_index_.emplace(tx.tx_id, loc);
        address_index_[tx.sender].push_back(loc);
        if (tx.target && *tx.target != tx.sender)
            address_index_[*tx.target].push_back(loc);
        if (const auto& created = b.receipts[i].created)
            address_index_[*created].push_back(loc);
    }
    blocks_.push_back(b);
    return b;
}

std::vector<Block> Ledger::chain() const
{
    std::shared_lock lock{chain_mutex_};
    return blocks_;
}

uint64_t Ledger::height() const
{
    std::shared_lock lock{chain_mutex_};
    return blocks_.size() - 1;
}

std::size_t Ledger::pool_size() const
{
    std::lock_guard lock{pool_mutex_};
    return pool_.size();
}

std::optional<Account> Ledger::account(const Address& address) const
{
    std::shared_lock lock{chain_mutex_};
    const auto it = accounts_.find(address);
    if (it == accounts_.end())
        return std::nullopt;
    return it->second;
}

std::vector<Account> Ledger::accounts() const
{
    std::shared_lock lock{chain_mutex_};
    std::vector<Account> out;
    for (const auto& [_, a] : accounts_)
        out.push_back(a);
    return out;
}

Wei Ledger::total_balance() const
{
    std::shared_lock lock{chain_mutex_};
    Wei total;
    for (const auto& [_, a] : accounts_)
        total += a.balance;
    return total;
}

Wei Ledger::fees_collected() const
{
    std::shared_lock lock{chain_mutex_};
    return fees_;
}

std::optional<HistoryEntry> Ledger::find(const Hash256& tx_id) const
{
    std::shared_lock lock{chain_mutex_};
    const auto it = tx_index_.find(tx_id);
    if (it == tx_index_.end())
        return std::nullopt;
    const auto& b = blocks_[it->second.height];
    return HistoryEntry{it->second.height, b.transactions[it->second.index], b.receipts[it->second.index]};
}

std::vector<HistoryEntry> Ledger::history(const Address& address) const
{
    std::shared_lock lock{chain_mutex_};
    const auto it = address_index_.find(address);
    if (it == address_index_.end())
        throw Error{Errc::UnknownAddress, address.hex()};
    std::vector<HistoryEntry> out;
    out.reserve(it->second.size());
    for (const auto& loc : it->second)
    {
        const auto& b = blocks_[loc.height];
        out.push_back({loc.height, b.transactions[loc.index], b.receipts[loc.index]});
    }
    return out;
}

std::pair<std::shared_lock<std::shared_mutex>, const StateMachine*> Ledger::state() const
{
    return {std::shared_lock{chain_mutex_}, state_.get()};
}

ValidityReport validate_chain(const std::vector<Block>& chain, const StateMachine& prototype,
    const LedgerConfig& config, uint32_t min_difficulty)
{
    ValidityReport report;
    const auto fail = [&](uint64_t height, std::string reason) {
        report.ok = false;
        report.first_invalid_height = height;
        report.reason = std::move(reason);
        return report;
    };

    auto state = prototype.fresh();
    std::map<Address, Account> accounts;
    std::map<Address, uint64_t> last_sequence;
    Wei fees;
    Executor exec{accounts, fees, *state};

    for (std::size_t i = 0; i < chain.size(); ++i)
    {
        const auto& b = chain[i];
        const auto& h = b.header;
        if (h.height != i)
            return fail(i, "linkage: height " + std::to_string(h.height) + " at position " + std::to_string(i));
        if (h.prev_hash != (i == 0 ? Hash256{} : chain[i - 1].block_hash))
            return fail(i, "linkage: prev_hash does not match predecessor");
        if (h.timestamp != h.height)
            return fail(i, "timestamp is not the logical tick");
        if (b.compute_tx_root() != h.tx_root)
            return fail(i, "tx_root mismatch");
        if (h.hash() != b.block_hash)
            return fail(i, "block hash mismatch");
        if ((i > 0 && h.difficulty < min_difficulty) || leading_zero_bits(b.block_hash) < h.difficulty)
            return fail(i, "difficulty not met");
        if (b.receipts.size() != b.transactions.size())
            return fail(i, "receipt count mismatch");
        if (i == 0 && (!b.transactions.empty() || !b.allocations.empty()))
            return fail(i, "genesis must be empty");

        for (const auto& a : b.allocations)
        {
            if (!accounts.emplace(a.address, Account{a.address, a.prefund, a.role}).second)
                return fail(i, "allocation for existing account");
        }
        const BlockContext ctx{h.height, h.timestamp};
        for (std::size_t t = 0; t < b.transactions.size(); ++t)
        {
            const auto& tx = b.transactions[t];
            if (tx.compute_id() != tx.tx_id)
                return fail(i, "tx_id mismatch");
            const auto seq = last_sequence.find(tx.sender);
            if (seq != last_sequence.end() && tx.sequence <= seq->second)
                return fail(i, "sender sequence not increasing");
            last_sequence[tx.sender] = tx.sequence;
            if (exec.apply(tx, ctx) != b.receipts[t])
                return fail(i, "replayed receipt differs");
        }
        exec.reward(config.block_reward);
        ++report.blocks_checked;
    }
    report.state_hash = sha256(state->state_encoding());
    return report;
}

std::string export_chain(const std::vector<Block>& chain)
{
    std::string out;
    for (const auto& b : chain)
    {
        out += to_hex(b.encode());
        out += '\n';
    }
    return out;
}

namespace
{
std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> lines;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            lines.push_back(line);
        if (nl == std::string_view::npos)
            break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}
}  // namespace

std::vector<Block> import_chain(std::string_view text)
{
    std::vector<Block> chain;
    for (const auto line : lines_of(text))
        chain.push_back(Block::decode(from_hex(line)));
    return chain;
}

ValidityReport validate_chain_text(std::string_view text, const StateMachine& prototype,
    const LedgerConfig& config, uint32_t min_difficulty)
{
    std::vector<Block> chain;
    std::optional<std::pair<uint64_t, std::string>> decode_failure;
    for (const auto line : lines_of(text))
    {
        try
        {
            chain.push_back(Block::decode(from_hex(line)));
        }
        catch (const Error& e)
        {
            decode_failure.emplace(chain.size(), e.what());
            break;
        }
    }
    auto report = validate_chain(chain, prototype, config, min_difficulty);
    if (report.ok && decode_failure)
    {
        report.ok = false;
        report.first_invalid_height = decode_failure->first;
        report.reason = "undecodable block: " + decode_failure->second;
        report.state_hash = {};
    }
    return report;
}
}  // namespace dynconsent::ledger
