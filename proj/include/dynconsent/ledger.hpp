// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// A minimal hash-chained ledger with one deterministic miner.
///
/// Accounts are prefunded on creation; the creation is recorded in the next mined block so a
/// chain export replays from nothing. Transactions queue FIFO in a pool; mining drains the pool,
/// executes every transaction against a StateMachine, debits fees, searches a nonce meeting the
/// difficulty and appends the block. Failed transactions stay in the block with their error code.
///
/// Block hash = H(height, prev_hash, tx_root, timestamp, difficulty, nonce), where tx_root
/// commits to the block's allocations, transactions and receipts.

#include "common.hpp"
#include "encoding.hpp"
#include "errors.hpp"
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace dynconsent::ledger
{
enum class Role : uint8_t
{
    Provider,
    Requester,
    Supervisor,
};
std::string_view to_string(Role r) noexcept;

struct Account
{
    Address address;
    Wei balance;
    Role role = Role::Requester;

    friend bool operator==(const Account&, const Account&) = default;
};

/// Account creation, recorded in the first block mined after it.
struct Allocation
{
    Address address;
    Role role = Role::Requester;
    Wei prefund;

    void encode(Encoder& e) const;
    static Allocation decode(Decoder& d);
    friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Transaction
{
    Hash256 tx_id;
    Address sender;
    std::optional<Address> target;  ///< nullopt marks contract creation
    bytes payload;
    uint64_t gas_limit = 0;  ///< upper-bound estimate, checked against the balance
    Wei gas_price;
    uint64_t sequence = 0;  ///< per-sender submission counter
    bytes signature;        ///< reserved; senders are authenticated by identity in-simulator
    std::optional<uint64_t> block_height;  ///< set once mined, not part of the encoding

    /// Hash over every encoded field except tx_id.
    [[nodiscard]] Hash256 compute_id() const;
    void encode(Encoder& e) const;
    static Transaction decode(Decoder& d);
};

struct LogEvent
{
    uint8_t kind = 0;
    Address contract;
    Address subject;
    bytes data;

    void encode(Encoder& e) const;
    static LogEvent decode(Decoder& d);
    friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

struct Receipt
{
    Hash256 tx_id;
    Errc error = Errc::None;
    uint64_t transaction_gas = 0;
    uint64_t execution_gas = 0;
    Wei fee;
    std::optional<Address> created;
    bytes output;
    std::vector<LogEvent> events;

    [[nodiscard]] bool success() const noexcept { return error == Errc::None; }
    void encode(Encoder& e) const;
    static Receipt decode(Decoder& d);
    friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct BlockHeader
{
    uint64_t height = 0;
    Hash256 prev_hash;
    Hash256 tx_root;
    uint64_t timestamp = 0;  ///< logical tick, equal to height
    uint32_t difficulty = 0;
    uint64_t nonce = 0;

    [[nodiscard]] bytes encode() const;
    [[nodiscard]] Hash256 hash() const;
};

struct Block
{
    BlockHeader header;
    Hash256 block_hash;
    std::vector<Allocation> allocations;
    std::vector<Transaction> transactions;
    std::vector<Receipt> receipts;  ///< parallel to transactions

    [[nodiscard]] Hash256 compute_tx_root() const;
    [[nodiscard]] bytes encode() const;
    /// Strict: throws Error{Errc::Decode} on any malformed or trailing byte.
    static Block decode(bytes_view data);
};

struct BlockContext
{
    uint64_t height = 0;
    uint64_t timestamp = 0;
};

struct ExecutionResult
{
    Errc error = Errc::None;
    uint64_t transaction_gas = 0;
    uint64_t execution_gas = 0;
    std::optional<Address> created;
    bytes output;
    std::vector<LogEvent> events;
};

/// The contract layer the ledger drives. execute() must leave the state untouched when it
/// reports an error.
class StateMachine
{
public:
    virtual ~StateMachine() = default;
    virtual ExecutionResult execute(const Transaction& tx, const BlockContext& ctx) = 0;
    /// Upper bound on the transaction gas execute() may charge for tx.
    [[nodiscard]] virtual uint64_t estimate_gas(const Transaction& tx) const = 0;
    /// Canonical encoding of the full state; equal states encode identically.
    [[nodiscard]] virtual bytes state_encoding() const = 0;
    /// Same configuration, empty state. Used to replay a chain.
    [[nodiscard]] virtual std::unique_ptr<StateMachine> fresh() const = 0;
};

struct LedgerConfig
{
    Wei gas_price = gwei(8);
    Wei block_reward;  ///< credited to miner_address() per block; default none
    bool allow_empty_blocks = false;
};

/// Address credited with block rewards.
Address miner_address();

struct HistoryEntry
{
    uint64_t height = 0;
    Transaction transaction;
    Receipt receipt;
};

class Ledger
{
public:
    explicit Ledger(std::unique_ptr<StateMachine> state, LedgerConfig config = {});

    Account create_account(Role role, Wei prefund);

    /// Fills sequence, gas limit, gas price and tx_id for a new transaction from sender.
    [[nodiscard]] Transaction make_transaction(
        const Address& sender, std::optional<Address> target, bytes payload);

    /// Queues tx. Throws UnknownSender, ReadOnlyRole, InsufficientFunds or Duplicate.
    Hash256 submit_transaction(Transaction tx);

    /// Drains the pool into a new block. Throws EmptyPool when there is nothing to mine and
    /// empty blocks are not enabled.
    Block mine_block(uint32_t difficulty = 0);

    [[nodiscard]] std::vector<Block> chain() const;
    [[nodiscard]] uint64_t height() const;
    [[nodiscard]] std::size_t pool_size() const;
    [[nodiscard]] std::optional<Account> account(const Address& address) const;
    [[nodiscard]] std::vector<Account> accounts() const;
    [[nodiscard]] Wei total_balance() const;
    [[nodiscard]] Wei fees_collected() const;
    [[nodiscard]] std::optional<HistoryEntry> find(const Hash256& tx_id) const;
    /// Transactions sent to, or creating, address, in chain order. Throws UnknownAddress when
    /// nothing ever touched it.
    [[nodiscard]] std::vector<HistoryEntry> history(const Address& address) const;

    /// Read access to the executed state. Hold the returned lock while using the reference.
    [[nodiscard]] std::pair<std::shared_lock<std::shared_mutex>, const StateMachine*> state() const;
    [[nodiscard]] const LedgerConfig& config() const noexcept { return config_; }

private:
    struct Location
    {
        uint64_t height;
        std::size_t index;
    };

    mutable std::mutex pool_mutex_;
    std::deque<Transaction> pool_;
    std::vector<Allocation> pending_allocations_;
    std::map<Address, uint64_t> next_sequence_;

    mutable std::shared_mutex chain_mutex_;
    std::unique_ptr<StateMachine> state_;
    LedgerConfig config_;
    std::vector<Block> blocks_;
    std::map<Address, Account> accounts_;
    Wei fees_;
    std::set<Hash256> known_ids_;
    std::map<Hash256, Location> tx_index_;
    std::map<Address, std::vector<Location>> address_index_;
    uint64_t accounts_created_ = 0;
};

struct ValidityReport
{
    bool ok = true;
    std::optional<uint64_t> first_invalid_height;
    std::string reason;
    std::size_t blocks_checked = 0;
    Hash256 state_hash;  ///< hash of the replayed state encoding (valid chains only)
};

/// Checks height sequence, prev-hash linkage, tx_root, block hash, difficulty (at least
/// min_difficulty past genesis, and the header's own), tx ids, sender sequences, and replays every
/// transaction from an empty state, comparing receipts and balances.
ValidityReport validate_chain(const std::vector<Block>& chain, const StateMachine& prototype,
    const LedgerConfig& config = {}, uint32_t min_difficulty = 0);

/// One hex-encoded block per line.
std::string export_chain(const std::vector<Block>& chain);
std::vector<Block> import_chain(std::string_view text);
/// Like validate_chain on import_chain(text), but a line that fails to decode is reported as
/// a violation at that height instead of throwing.
ValidityReport validate_chain_text(std::string_view text, const StateMachine& prototype,
    const LedgerConfig& config = {}, uint32_t min_difficulty = 0);
}  // namespace dynconsent::ledger
