// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Off-chain datastore.
///
/// Payloads live in a content-addressed directory (one file per digest, named by its hex).
/// Each dataset is bound to the contract governing it. Tokens are minted against live grants
/// and re-checked against the contract state on every redemption.

#include "common.hpp"
#include "matcher.hpp"
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace dynconsent::registry
{
using matcher::DatasetMeta;

/// "store://<digest hex>"
std::string datastore_uri(const Hash256& digest);

struct StoredDataset
{
    DatasetMeta meta;
    uint64_t created_at = 0;
    bool deleted = false;  ///< payload erased
    bool revoked = false;  ///< erased because the governing contract was revoked
    std::optional<Address> contract;
};

struct AccessToken
{
    Hash256 token_id;
    Address contract;
    Address requester;
    Hash256 grant_ref;
    uint64_t issued_at = 0;
    bool valid = true;

    friend bool operator==(const AccessToken&, const AccessToken&) = default;
};

/// What the contract layer currently says about (contract, requester).
struct GrantStatus
{
    bool contract_known = false;
    bool revoked = false;
    std::optional<Hash256> grant_ref;
};
using GrantLookup = std::function<GrantStatus(const Address& contract, const Address& requester)>;

class Registry
{
public:
    /// Token ids are drawn from sha256(token_seed || counter).
    Registry(std::filesystem::path root, GrantLookup lookup, Hash256 token_seed = {});

    /// Stores payload and returns meta with datastore_uri filled in. Throws DigestMismatch,
    /// DuplicateId, InvalidStatement or IoFailure.
    DatasetMeta register_dataset(DatasetMeta meta, bytes_view payload, uint64_t tick = 0);
    /// Throws UnknownId, or DuplicateId when the dataset is already bound.
    void bind_contract(const std::string& dataset_id, const Address& contract);

    /// Throws UnknownGrant or RevokedContract.
    AccessToken issue_token(const Address& contract, const Address& requester, const Hash256& grant_ref,
        uint64_t height);
    /// Returns the payload. Throws InvalidToken for unknown, invalidated or revoked tokens,
    /// Deleted once the owner deleted the dataset, and DigestMismatch if the stored file was
    /// altered.
    bytes redeem_token(const Hash256& token_id, const Address& requester);
    /// Throws UnknownId or NotOwner.
    void delete_dataset(const Address& owner, const std::string& dataset_id);

    /// Invalidates the requester's tokens on contract.
    void invalidate_grant(const Address& contract, const Address& requester);
    /// Invalidates every token on contract and erases the bound payload.
    void on_contract_revoked(const Address& contract);

    /// Bound, undeleted datasets whose cohort is relevant to target, in registration order.
    /// Any matches every dataset.
    [[nodiscard]] std::vector<std::pair<DatasetMeta, Address>> discover(const ontology::Cohort& target) const;

    [[nodiscard]] std::optional<StoredDataset> dataset(const std::string& dataset_id) const;
    [[nodiscard]] std::optional<AccessToken> token(const Hash256& token_id) const;
    [[nodiscard]] std::vector<AccessToken> tokens() const;
    [[nodiscard]] std::string tokens_json() const;
    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

private:
    [[nodiscard]] std::filesystem::path path_of(const Hash256& digest) const;
    void erase_locked(StoredDataset& d);
    void invalidate_locked(const Address& contract, const std::optional<Address>& requester);

    std::filesystem::path root_;
    GrantLookup lookup_;
    Hash256 token_seed_;
    uint64_t token_counter_ = 0;

    mutable std::shared_mutex mutex_;
    std::vector<std::string> order_;
    std::map<std::string, StoredDataset> datasets_;
    std::map<Address, std::string> by_contract_;
    std::map<Hash256, AccessToken> tokens_;
};
}  // namespace dynconsent::registry
