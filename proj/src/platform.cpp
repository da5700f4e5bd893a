// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/errors.hpp>
#include <dynconsent/platform.hpp>

namespace dynconsent
{
Platform::Platform(PlatformOptions options)
  : schedule_{options.schedule ? options.schedule :
                                 std::make_shared<const gas::GasSchedule>(gas::GasSchedule::calibrated())},
    difficulty_{options.difficulty}
{
    ledger_ = std::make_unique<ledger::Ledger>(std::make_unique<vm::ContractVm>(schedule_), options.ledger);
    auto lookup = [this](const Address& contract, const Address& requester) {
        registry::GrantStatus status;
        const auto [lock, machine] = ledger_->state();
        const auto* c = static_cast<const vm::ContractVm*>(machine)->contract(contract);
        if (!c)
            return status;
        status.contract_known = true;
        status.revoked = c->revoked;
        if (const auto g = c->grants.find(requester); g != c->grants.end())
            status.grant_ref = g->second.token_id;
        return status;
    };
    registry_ = std::make_unique<registry::Registry>(options.store_root, lookup, options.token_seed);
}

ledger::Account Platform::create_account(ledger::Role role, Wei prefund)
{
    return ledger_->create_account(role, prefund);
}

Hash256 Platform::submit(const Address& sender, std::optional<Address> target, const vm::Operation& op)
{
    return ledger_->submit_transaction(ledger_->make_transaction(sender, target, vm::encode_operation(op)));
}

ledger::Block Platform::mine()
{
    auto block = ledger_->mine_block(difficulty_);
    process(block);
    return block;
}

void Platform::process(const ledger::Block& block)
{
    for (const auto& receipt : block.receipts)
    {
        for (const auto& ev : receipt.events)
        {
            switch (static_cast<vm::EventKind>(ev.kind))
            {
            case vm::EventKind::GrantIssued:
            {
                Decoder d{ev.data};
                const auto grant_ref = d.fixed<Hash256::size>();
                const auto token = registry_->issue_token(ev.contract, ev.subject, grant_ref, block.header.height);
                token_by_tx_.insert_or_assign(receipt.tx_id, token.token_id);
                break;
            }
            case vm::EventKind::GrantInvalidated: registry_->invalidate_grant(ev.contract, ev.subject); break;
            case vm::EventKind::Revoked: registry_->on_contract_revoked(ev.contract); break;
            default: break;
            }
        }
    }
}

ledger::Receipt Platform::transact(const Address& sender, std::optional<Address> target, const vm::Operation& op)
{
    const auto id = submit(sender, target, op);
    mine();
    auto entry = ledger_->find(id);
    if (!entry)
        throw Error{Errc::RunAborted, "transaction not mined"};
    if (!entry->receipt.success())
        throw Error{entry->receipt.error, std::string{vm::function_id(op)} + " failed"};
    return std::move(entry->receipt);
}

Address Platform::publish_dataset(const Address& owner, matcher::DatasetMeta meta, bytes_view payload)
{
    meta.owner = owner;
    meta = registry_->register_dataset(std::move(meta), payload, ledger_->height());
    const auto receipt = transact(owner, std::nullopt, vm::DeployOp{meta});
    registry_->bind_contract(meta.dataset_id, *receipt.created);
    return *receipt.created;
}

std::optional<registry::AccessToken> Platform::token_for(const Hash256& access_tx) const
{
    const auto it = token_by_tx_.find(access_tx);
    if (it == token_by_tx_.end())
        return std::nullopt;
    return registry_->token(it->second);
}

bytes Platform::redeem(const Address& requester, const Hash256& token_id)
{
    auto payload = registry_->redeem_token(token_id, requester);
    const auto token = registry_->token(token_id);
    transact(requester, token->contract, vm::RedeemLogOp{token_id});
    return payload;
}

void Platform::delete_dataset(const Address& owner, const Address& contract)
{
    const auto state = this->contract(contract);
    if (!state)
        throw Error{Errc::UnknownAddress, contract.hex()};
    registry_->delete_dataset(owner, state->dataset.dataset_id);
    transact(owner, contract, vm::DeleteLogOp{state->dataset.dataset_id});
}

std::optional<vm::ContractState> Platform::contract(const Address& address) const
{
    const auto [lock, machine] = ledger_->state();
    const auto* c = static_cast<const vm::ContractVm*>(machine)->contract(address);
    if (!c)
        return std::nullopt;
    return *c;
}
}  // namespace dynconsent
