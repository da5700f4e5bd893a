// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Wires the ledger, the contract VM and the datastore together.
///
/// Contract events drive the datastore after every mined block: a GrantIssued event mints a
/// token, GrantInvalidated and Revoked invalidate tokens, and Revoked also erases the payload.

#include "contract_vm.hpp"
#include "ledger.hpp"
#include "registry.hpp"
#include <filesystem>
#include <map>
#include <memory>

namespace dynconsent
{
struct PlatformOptions
{
    ledger::LedgerConfig ledger;
    std::shared_ptr<const gas::GasSchedule> schedule;  ///< calibrated() when null
    std::filesystem::path store_root;
    Hash256 token_seed;
    uint32_t difficulty = 0;
};

class Platform
{
public:
    explicit Platform(PlatformOptions options);

    ledger::Account create_account(ledger::Role role, Wei prefund);

    /// Queues op from sender. target is empty for DeployOp.
    Hash256 submit(const Address& sender, std::optional<Address> target, const vm::Operation& op);
    /// Mines the pool and feeds the resulting events to the datastore.
    ledger::Block mine();
    /// Submits, mines, and throws Error with the receipt's code if the transaction failed.
    ledger::Receipt transact(const Address& sender, std::optional<Address> target, const vm::Operation& op);

    /// Registers the payload, deploys its contract and binds the two. Returns the contract.
    Address publish_dataset(const Address& owner, matcher::DatasetMeta meta, bytes_view payload);

    /// Token minted for the grant recorded by the AccessData transaction access_tx.
    [[nodiscard]] std::optional<registry::AccessToken> token_for(const Hash256& access_tx) const;
    /// Fetches the payload and logs the redemption on-chain. Throws the datastore's error.
    bytes redeem(const Address& requester, const Hash256& token_id);
    /// Erases the payload and logs the deletion on-chain.
    void delete_dataset(const Address& owner, const Address& contract);

    [[nodiscard]] ledger::Ledger& ledger() noexcept { return *ledger_; }
    [[nodiscard]] const ledger::Ledger& ledger() const noexcept { return *ledger_; }
    [[nodiscard]] registry::Registry& datastore() noexcept { return *registry_; }
    [[nodiscard]] const gas::GasSchedule& schedule() const noexcept { return *schedule_; }
    [[nodiscard]] std::optional<vm::ContractState> contract(const Address& address) const;
    [[nodiscard]] uint32_t difficulty() const noexcept { return difficulty_; }

private:
    void process(const ledger::Block& block);

    std::shared_ptr<const gas::GasSchedule> schedule_;
    std::unique_ptr<ledger::Ledger> ledger_;
    std::unique_ptr<registry::Registry> registry_;
    uint32_t difficulty_;
    std::map<Hash256, Hash256> token_by_tx_;
};
}  // namespace dynconsent
