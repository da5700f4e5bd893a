// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/crypto.hpp>
#include <dynconsent/encoding.hpp>
#include <dynconsent/errors.hpp>
#include <dynconsent/registry.hpp>
#include <nlohmann/json.hpp>
#include <fstream>
#include <mutex>

namespace dynconsent::registry
{
namespace fs = std::filesystem;
using ontology::Cohort;

std::string datastore_uri(const Hash256& digest)
{
    return "store://" + digest.hex();
}

Registry::Registry(fs::path root, GrantLookup lookup, Hash256 token_seed)
  : root_{std::move(root)}, lookup_{std::move(lookup)}, token_seed_{token_seed}
{
    if (!lookup_)
        throw std::invalid_argument{"Registry requires a grant lookup"};
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec)
        throw Error{Errc::IoFailure, root_.string() + ": " + ec.message()};
}

fs::path Registry::path_of(const Hash256& digest) const
{
    return root_ / digest.hex();
}

DatasetMeta Registry::register_dataset(DatasetMeta meta, bytes_view payload, uint64_t tick)
{
    meta.validate();
    if (sha256(payload) != meta.content_digest)
        throw Error{Errc::DigestMismatch, meta.dataset_id};
    meta.datastore_uri = datastore_uri(meta.content_digest);

    std::unique_lock lock{mutex_};
    if (datasets_.contains(meta.dataset_id))
        throw Error{Errc::DuplicateId, meta.dataset_id};

    const auto path = path_of(meta.content_digest);
    if (!fs::exists(path))
    {
        const auto tmp = fs::path{path}.concat(".tmp");
        {
            std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
            out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
            if (!out)
                throw Error{Errc::IoFailure, tmp.string()};
        }
        std::error_code ec;
        fs::rename(tmp, path, ec);
        if (ec)
            throw Error{Errc::IoFailure, path.string() + ": " + ec.message()};
    }
    order_.push_back(meta.dataset_id);
    datasets_.emplace(meta.dataset_id, StoredDataset{meta, tick, false, false, std::nullopt});
    return meta;
}

void Registry::bind_contract(const std::string& dataset_id, const Address& contract)
{
    std::unique_lock lock{mutex_};
    const auto it = datasets_.find(dataset_id);
    if (it == datasets_.end())
        throw Error{Errc::UnknownId, dataset_id};
    if (it->second.contract || by_contract_.contains(contract))
        throw Error{Errc::DuplicateId, dataset_id + " already bound"};
    it->second.contract = contract;
    by_contract_.emplace(contract, dataset_id);
}

AccessToken Registry::issue_token(const Address& contract, const Address& requester, const Hash256& grant_ref,
    uint64_t height)
{
    const auto status = lookup_(contract, requester);
    if (!status.contract_known)
        throw Error{Errc::UnknownGrant, "unknown contract " + contract.hex()};
    if (status.revoked)
        throw Error{Errc::RevokedContract, contract.hex()};
    if (!status.grant_ref || *status.grant_ref != grant_ref)
        throw Error{Errc::UnknownGrant, "no live grant for " + requester.hex()};

    std::unique_lock lock{mutex_};
    if (!by_contract_.contains(contract))
        throw Error{Errc::UnknownGrant, "contract has no bound dataset"};
    AccessToken t;
    t.token_id = sha256(Encoder{}.fixed(token_seed_).u64(token_counter_++).data());
    t.contract = contract;
    t.requester = requester;
    t.grant_ref = grant_ref;
    t.issued_at = height;
    tokens_.emplace(t.token_id, t);
    return t;
}

bytes Registry::redeem_token(const Hash256& token_id, const Address& requester)
{
    AccessToken t;
    Hash256 digest;
    {
        std::shared_lock lock{mutex_};
        const auto it = tokens_.find(token_id);
        if (it == tokens_.end() || it->second.requester != requester)
            throw Error{Errc::InvalidToken, token_id.hex()};
        t = it->second;
        const auto& d = datasets_.at(by_contract_.at(t.contract));
        if (d.revoked)
            throw Error{Errc::InvalidToken, token_id.hex()};
        if (d.deleted)
            throw Error{Errc::Deleted, d.meta.dataset_id};
        if (!t.valid)
            throw Error{Errc::InvalidToken, token_id.hex()};
        digest = d.meta.content_digest;
    }

    const auto status = lookup_(t.contract, t.requester);
    if (status.revoked || !status.grant_ref || *status.grant_ref != t.grant_ref)
    {
        std::unique_lock lock{mutex_};
        tokens_.at(token_id).valid = false;
        throw Error{Errc::InvalidToken, token_id.hex()};
    }

    std::shared_lock lock{mutex_};
    std::ifstream in{path_of(digest), std::ios::binary};
    if (!in)
        throw Error{Errc::IoFailure, path_of(digest).string()};
    bytes payload{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
    if (sha256(payload) != digest)
        throw Error{Errc::DigestMismatch, "stored payload altered"};
    return payload;
}

void Registry::erase_locked(StoredDataset& d)
{
    if (d.deleted)
        return;
    d.deleted = true;
    if (d.contract)
        invalidate_locked(*d.contract, std::nullopt);
    // The file is shared by every dataset with identical content.
    for (const auto& [id, other] : datasets_)
        if (!other.deleted && other.meta.content_digest == d.meta.content_digest)
            return;
    std::error_code ec;
    fs::remove(path_of(d.meta.content_digest), ec);
    if (ec)
        throw Error{Errc::IoFailure, ec.message()};
}

void Registry::invalidate_locked(const Address& contract, const std::optional<Address>& requester)
{
    for (auto& [_, t] : tokens_)
        if (t.contract == contract && (!requester || t.requester == *requester))
            t.valid = false;
}

void Registry::delete_dataset(const Address& owner, const std::string& dataset_id)
{
    std::unique_lock lock{mutex_};
    const auto it = datasets_.find(dataset_id);
    if (it == datasets_.end())
        throw Error{Errc::UnknownId, dataset_id};
    if (it->second.meta.owner != owner)
        throw Error{Errc::NotOwner, dataset_id};
    erase_locked(it->second);
}

void Registry::invalidate_grant(const Address& contract, const Address& requester)
{
    std::unique_lock lock{mutex_};
    invalidate_locked(contract, requester);
}

void Registry::on_contract_revoked(const Address& contract)
{
    std::unique_lock lock{mutex_};
    invalidate_locked(contract, std::nullopt);
    if (const auto it = by_contract_.find(contract); it != by_contract_.end())
    {
        auto& d = datasets_.at(it->second);
        d.revoked = true;
        erase_locked(d);
    }
}

std::vector<std::pair<DatasetMeta, Address>> Registry::discover(const Cohort& target) const
{
    std::shared_lock lock{mutex_};
    std::vector<std::pair<DatasetMeta, Address>> out;
    for (const auto& id : order_)
    {
        const auto& d = datasets_.at(id);
        if (d.deleted || !d.contract)
            continue;
        if (target.kind != Cohort::Kind::Any && d.meta.cohort != target)
            continue;
        out.emplace_back(d.meta, *d.contract);
    }
    return out;
}

std::optional<StoredDataset> Registry::dataset(const std::string& dataset_id) const
{
    std::shared_lock lock{mutex_};
    const auto it = datasets_.find(dataset_id);
    if (it == datasets_.end())
        return std::nullopt;
    return it->second;
}

std::optional<AccessToken> Registry::token(const Hash256& token_id) const
{
    std::shared_lock lock{mutex_};
    const auto it = tokens_.find(token_id);
    if (it == tokens_.end())
        return std::nullopt;
    return it->second;
}

std::vector<AccessToken> Registry::tokens() const
{
    std::shared_lock lock{mutex_};
    std::vector<AccessToken> out;
    for (const auto& [_, t] : tokens_)
        out.push_back(t);
    return out;
}

std::string Registry::tokens_json() const
{
    auto doc = nlohmann::ordered_json::array();
    for (const auto& t : tokens())
        doc.push_back({{"token_id", t.token_id.hex()}, {"contract", t.contract.hex()},
            {"requester", t.requester.hex()}, {"grant_ref", t.grant_ref.hex()}, {"issued_at", t.issued_at},
            {"valid", t.valid}});
    return doc.dump(2);
}
}  // namespace dynconsent::registry
