// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/contract_vm.hpp>
#include <dynconsent/crypto.hpp>
#include <dynconsent/errors.hpp>
#include <algorithm>
#include <chrono>

namespace dynconsent::vm
{
using namespace ontology;
using ledger::BlockContext;
using ledger::ExecutionResult;
using ledger::LogEvent;
using ledger::Transaction;

namespace
{
template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <typename E>
E decode_enum(Decoder& d, E max)
{
    const auto v = d.u8();
    if (v > static_cast<uint8_t>(max))
        throw Error{Errc::Decode, "enumeration out of range"};
    return static_cast<E>(v);
}

void encode_strings(Encoder& e, const std::set<std::string>& s)
{
    e.u32(static_cast<uint32_t>(s.size()));
    for (const auto& v : s)
        e.str(v);
}

std::set<std::string> decode_strings(Decoder& d)
{
    std::set<std::string> s;
    const auto n = d.count(4);
    std::string prev;
    for (uint32_t i = 0; i < n; ++i)
    {
        auto v = d.str();
        if (i > 0 && v <= prev)
            throw Error{Errc::Decode, "string set not in canonical order"};
        prev = v;
        s.insert(std::move(v));
    }
    return s;
}

enum class OpTag : uint8_t
{
    Deploy = 1,
    UploadPrimary,
    UploadSecondary,
    UploadRequirements,
    PurposeCategory,
    Geography,
    Profit,
    Person,
    RequesterTerms,
    ResetPurpose,
    AccessData,
    Revoke,
    RedeemLog,
    DeleteLog,
};

enum class InvalidationCause : uint8_t
{
    ConsentMismatch = 0,
    TermsChanged = 1,
    Revoked = 2,
};

LogEvent event(EventKind kind, const Address& contract, const Address& subject, bytes data = {})
{
    return {static_cast<uint8_t>(kind), contract, subject, std::move(data)};
}

Hash256 grant_reference(const Address& contract, const Address& requester, uint64_t nonce)
{
    return sha256(Encoder{}.str("grant").fixed(contract).fixed(requester).u64(nonce).data());
}

/// Re-runs the matcher over every stored grant against the current consent, dropping the
/// ones that no longer hold.
void reevaluate_grants(ContractState& c, std::vector<LogEvent>& events)
{
    for (auto it = c.grants.begin(); it != c.grants.end();)
    {
        const auto& g = it->second;
        const auto decision = matcher::evaluate(c.consent, g.purpose, c.dataset, g.evaluated_on);
        const bool terms_ok = c.consent.requirements.empty() || g.acknowledged_terms == c.consent.requirements;
        if (decision.granted && terms_ok)
        {
            ++it;
            continue;
        }
        Encoder e;
        e.u8(static_cast<uint8_t>(decision.granted ? InvalidationCause::TermsChanged :
                                                     InvalidationCause::ConsentMismatch));
        codec::encode(e, decision);
        events.push_back(event(EventKind::GrantInvalidated, c.address, it->first, std::move(e).data()));
        it = c.grants.erase(it);
    }
}

void require_owner(const ContractState& c, const Address& caller)
{
    if (caller != c.owner)
        throw Error{Errc::NotOwner};
}

void require_live(const ContractState& c)
{
    if (c.revoked)
        throw Error{Errc::Revoked};
}

void encode_state(Encoder& e, const ContractState& c)
{
    e.fixed(c.address).fixed(c.owner);
    codec::encode(e, c.consent);
    codec::encode(e, c.dataset);
    e.u32(static_cast<uint32_t>(c.purpose_inbox.size()));
    for (const auto& [requester, draft] : c.purpose_inbox)
    {
        e.fixed(requester).boolean(draft.category.has_value());
        if (draft.category)
            e.u8(static_cast<uint8_t>(*draft.category));
        e.u32(static_cast<uint32_t>(draft.subcategories.size()));
        for (const auto& s : draft.subcategories)
            codec::encode(e, s);
        codec::encode(e, draft.target_cohort);
        e.boolean(draft.profit_intent.has_value());
        if (draft.profit_intent)
            e.boolean(*draft.profit_intent);
        e.str(draft.geography);
        e.u32(static_cast<uint32_t>(draft.person.size()));
        for (const auto& [k, v] : draft.person)
            e.str(k).str(v);
        e.boolean(draft.acknowledged_terms.has_value());
        if (draft.acknowledged_terms)
            encode_strings(e, *draft.acknowledged_terms);
    }
    e.u32(static_cast<uint32_t>(c.grants.size()));
    for (const auto& [requester, g] : c.grants)
    {
        e.fixed(requester).u64(g.granted_at).fixed(g.token_id);
        codec::encode(e, g.decision);
        codec::encode(e, g.consent);
        codec::encode(e, g.purpose);
        codec::encode(e, g.evaluated_on);
        encode_strings(e, g.acknowledged_terms);
    }
    e.boolean(c.revoked).u64(c.nonce);
}
}  // namespace

namespace codec
{
void encode(Encoder& e, const ConsentPrimaryCategory& v)
{
    e.u8(static_cast<uint8_t>(v.code)).str(v.disease_tag);
}

void encode(Encoder& e, const ConsentSecondaryCategory& v)
{
    e.u8(static_cast<uint8_t>(v.kind));
    encode_strings(e, v.geography_blocklist);
    e.boolean(v.expiry.has_value());
    if (v.expiry)
        encode(e, *v.expiry);
}

void encode(Encoder& e, const ConsentStatement& v)
{
    e.boolean(v.primary.has_value());
    if (v.primary)
        encode(e, *v.primary);
    e.u32(static_cast<uint32_t>(v.secondary.size()));
    for (const auto& s : v.secondary)
        encode(e, s);
    encode_strings(e, v.requirements);
}

void encode(Encoder& e, const PurposeSubcategory& v)
{
    e.u8(static_cast<uint8_t>(v.code)).str(v.disease_tag);
}

void encode(Encoder& e, const Cohort& v)
{
    e.u8(static_cast<uint8_t>(v.kind)).str(v.disease);
}

void encode(Encoder& e, const PurposeStatement& v)
{
    e.u8(static_cast<uint8_t>(v.category)).u32(static_cast<uint32_t>(v.subcategories.size()));
    for (const auto& s : v.subcategories)
        encode(e, s);
    e.boolean(v.profit_intent).str(v.requester_geography);
    encode(e, v.target_cohort);
}

void encode(Encoder& e, const DatasetMeta& v)
{
    e.str(v.dataset_id);
    encode(e, v.cohort);
    e.fixed(v.owner).str(v.datastore_uri).fixed(v.content_digest).u64(v.record_count);
}

void encode(Encoder& e, const MatchDecision& v)
{
    e.boolean(v.granted).u32(static_cast<uint32_t>(v.reasons.size()));
    for (const auto r : v.reasons)
        e.u8(static_cast<uint8_t>(r));
}

void encode(Encoder& e, const Date& v)
{
    e.i64(std::chrono::sys_days{v}.time_since_epoch().count());
}

ConsentPrimaryCategory decode_primary(Decoder& d)
{
    ConsentPrimaryCategory v;
    v.code = decode_enum(d, ConsentCode::DS_CC);
    v.disease_tag = d.str();
    v.validate();
    return v;
}

ConsentSecondaryCategory decode_secondary(Decoder& d)
{
    ConsentSecondaryCategory v;
    v.kind = decode_enum(d, SecondaryKind::TimeLimit);
    v.geography_blocklist = decode_strings(d);
    if (d.boolean())
        v.expiry = decode_date(d);
    v.validate();
    return v;
}

ConsentStatement decode_consent(Decoder& d)
{
    ConsentStatement v;
    if (d.boolean())
        v.primary = decode_primary(d);
    const auto n = d.count(6);
    for (uint32_t i = 0; i < n; ++i)
        v.secondary.push_back(decode_secondary(d));
    v.requirements = decode_strings(d);
    v.validate();
    return v;
}

PurposeSubcategory decode_subpurpose(Decoder& d)
{
    PurposeSubcategory v;
    v.code = decode_enum(d, SubpurposeCode::DS_CLIN);
    v.disease_tag = d.str();
    v.validate();
    return v;
}

Cohort decode_cohort(Decoder& d)
{
    Cohort v;
    v.kind = decode_enum(d, Cohort::Kind::Disease);
    v.disease = d.str();
    if ((v.kind == Cohort::Kind::Disease) == v.disease.empty() || v.disease != normalize_tag(v.disease))
        throw Error{Errc::Decode, "malformed cohort"};
    return v;
}

PurposeStatement decode_purpose(Decoder& d)
{
    PurposeStatement v;
    v.category = decode_enum(d, PurposeCode::CC);
    const auto n = d.count(5);
    for (uint32_t i = 0; i < n; ++i)
        v.subcategories.push_back(decode_subpurpose(d));
    v.profit_intent = d.boolean();
    v.requester_geography = d.str();
    v.target_cohort = decode_cohort(d);
    v.validate();
    return v;
}

DatasetMeta decode_dataset(Decoder& d)
{
    DatasetMeta v;
    v.dataset_id = d.str();
    v.cohort = decode_cohort(d);
    v.owner = d.fixed<Address::size>();
    v.datastore_uri = d.str();
    v.content_digest = d.fixed<Hash256::size>();
    v.record_count = d.u64();
    v.validate();
    return v;
}

MatchDecision decode_decision(Decoder& d)
{
    MatchDecision v;
    v.granted = d.boolean();
    const auto n = d.count(1);
    for (uint32_t i = 0; i < n; ++i)
        v.reasons.push_back(decode_enum(d, matcher::Reason::Granted));
    return v;
}

Date decode_date(Decoder& d)
{
    const Date v{std::chrono::sys_days{std::chrono::days{d.i64()}}};
    if (!v.ok())
        throw Error{Errc::Decode, "date out of range"};
    return v;
}
}  // namespace codec

bytes encode_operation(const Operation& op)
{
    Encoder e;
    std::visit(overloaded{
                   [&](const DeployOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::Deploy));
                       codec::encode(e, o.dataset);
                   },
                   [&](const UploadPrimaryOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::UploadPrimary));
                       codec::encode(e, o.category);
                   },
                   [&](const UploadSecondaryOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::UploadSecondary)).u32(static_cast<uint32_t>(o.secondary.size()));
                       for (const auto& s : o.secondary)
                           codec::encode(e, s);
                   },
                   [&](const UploadRequirementsOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::UploadRequirements));
                       encode_strings(e, o.requirements);
                   },
                   [&](const PurposeCategoryOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::PurposeCategory)).u8(static_cast<uint8_t>(o.category));
                       e.u32(static_cast<uint32_t>(o.subcategories.size()));
                       for (const auto& s : o.subcategories)
                           codec::encode(e, s);
                       codec::encode(e, o.target_cohort);
                   },
                   [&](const GeographyOp& o) { e.u8(static_cast<uint8_t>(OpTag::Geography)).str(o.region); },
                   [&](const ProfitOp& o) { e.u8(static_cast<uint8_t>(OpTag::Profit)).boolean(o.profit_intent); },
                   [&](const PersonOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::Person)).u32(static_cast<uint32_t>(o.attributes.size()));
                       for (const auto& [k, v] : o.attributes)
                           e.str(k).str(v);
                   },
                   [&](const RequesterTermsOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::RequesterTerms));
                       encode_strings(e, o.acknowledged);
                   },
                   [&](const ResetPurposeOp&) { e.u8(static_cast<uint8_t>(OpTag::ResetPurpose)); },
                   [&](const AccessDataOp& o) {
                       e.u8(static_cast<uint8_t>(OpTag::AccessData));
                       codec::encode(e, o.now);
                   },
                   [&](const RevokeOp&) { e.u8(static_cast<uint8_t>(OpTag::Revoke)); },
                   [&](const RedeemLogOp& o) { e.u8(static_cast<uint8_t>(OpTag::RedeemLog)).fixed(o.token_id); },
                   [&](const DeleteLogOp& o) { e.u8(static_cast<uint8_t>(OpTag::DeleteLog)).str(o.dataset_id); },
               },
        op);
    return std::move(e).data();
}

Operation decode_operation(bytes_view payload)
{
    try
    {
        Decoder d{payload};
        Operation op;
        switch (decode_enum(d, OpTag::DeleteLog))
        {
        case OpTag::Deploy: op = DeployOp{codec::decode_dataset(d)}; break;
        case OpTag::UploadPrimary: op = UploadPrimaryOp{codec::decode_primary(d)}; break;
        case OpTag::UploadSecondary:
        {
            UploadSecondaryOp o;
            const auto n = d.count(6);
            for (uint32_t i = 0; i < n; ++i)
                o.secondary.push_back(codec::decode_secondary(d));
            op = std::move(o);
            break;
        }
        case OpTag::UploadRequirements: op = UploadRequirementsOp{decode_strings(d)}; break;
        case OpTag::PurposeCategory:
        {
            PurposeCategoryOp o;
            o.category = decode_enum(d, PurposeCode::CC);
            const auto n = d.count(5);
            for (uint32_t i = 0; i < n; ++i)
                o.subcategories.push_back(codec::decode_subpurpose(d));
            o.target_cohort = codec::decode_cohort(d);
            op = std::move(o);
            break;
        }
        case OpTag::Geography: op = GeographyOp{d.str()}; break;
        case OpTag::Profit: op = ProfitOp{d.boolean()}; break;
        case OpTag::Person:
        {
            PersonOp o;
            const auto n = d.count(8);
            for (uint32_t i = 0; i < n; ++i)
            {
                auto k = d.str();
                o.attributes.insert_or_assign(std::move(k), d.str());
            }
            op = std::move(o);
            break;
        }
        case OpTag::RequesterTerms: op = RequesterTermsOp{decode_strings(d)}; break;
        case OpTag::ResetPurpose: op = ResetPurposeOp{}; break;
        case OpTag::AccessData: op = AccessDataOp{codec::decode_date(d)}; break;
        case OpTag::Revoke: op = RevokeOp{}; break;
        case OpTag::RedeemLog: op = RedeemLogOp{d.fixed<Hash256::size>()}; break;
        case OpTag::DeleteLog: op = DeleteLogOp{d.str()}; break;
        default: throw Error{Errc::Decode, "unknown operation"};
        }
        d.finish();
        return op;
    }
    catch (const Error& e)
    {
        throw Error{Errc::MalformedPayload, e.what()};
    }
}

std::string_view function_id(const Operation& op)
{
    return std::visit(overloaded{
                          [](const DeployOp&) { return gas::fn::deployment; },
                          [](const UploadPrimaryOp&) { return gas::fn::upload_primary; },
                          [](const UploadSecondaryOp&) { return gas::fn::upload_secondary; },
                          [](const UploadRequirementsOp&) { return gas::fn::upload_requirements; },
                          [](const PurposeCategoryOp& o) {
                              switch (o.category)
                              {
                              case PurposeCode::GRU: return gas::fn::give_research_purpose;
                              case PurposeCode::HMB: return gas::fn::give_hmb_purpose;
                              case PurposeCode::CC: return gas::fn::give_clinical_purpose;
                              }
                              return gas::fn::give_research_purpose;
                          },
                          [](const GeographyOp&) { return gas::fn::give_geographic; },
                          [](const ProfitOp&) { return gas::fn::give_profit; },
                          [](const PersonOp&) { return gas::fn::give_person; },
                          [](const RequesterTermsOp&) { return gas::fn::give_requester_terms; },
                          [](const ResetPurposeOp&) { return gas::fn::reset_purpose; },
                          [](const AccessDataOp&) { return gas::fn::access_data; },
                          [](const RevokeOp&) { return gas::fn::revoke; },
                          [](const RedeemLogOp&) { return gas::fn::redeem_token; },
                          [](const DeleteLogOp&) { return gas::fn::delete_dataset; },
                      },
        op);
}

PurposeStatement PurposeDraft::assemble() const
{
    if (!category)
        throw Error{Errc::PurposeIncomplete, "no purpose category submitted"};
    PurposeStatement p;
    p.category = *category;
    p.subcategories = subcategories;
    p.profit_intent = profit_intent.value_or(true);
    p.requester_geography = geography;
    p.target_cohort = target_cohort;
    p.validate();
    return p;
}

gas::ConsentShape ContractState::shape() const noexcept
{
    const bool secondary = !consent.secondary.empty();
    const bool requirements = !consent.requirements.empty();
    if (secondary && requirements)
        return gas::ConsentShape::WithSecondaryAndRequirements;
    if (secondary || requirements)
        return gas::ConsentShape::WithSecondary;
    return gas::ConsentShape::PrimaryOnly;
}

AccessOutcome decode_access_outcome(bytes_view output)
{
    Decoder d{output};
    AccessOutcome out;
    out.decision = codec::decode_decision(d);
    if (d.boolean())
        out.grant_ref = d.fixed<Hash256::size>();
    d.finish();
    return out;
}

Address contract_address(const Address& owner, uint64_t deploy_index)
{
    const auto h = sha256(Encoder{}.str("contract").fixed(owner).u64(deploy_index).data());
    Address a;
    std::copy_n(h.bytes.begin() + 12, a.bytes.size(), a.bytes.begin());
    return a;
}

ContractVm::ContractVm(std::shared_ptr<const gas::GasSchedule> schedule) : schedule_{std::move(schedule)}
{
    if (!schedule_)
        throw std::invalid_argument{"ContractVm requires a gas schedule"};
}

const ContractState* ContractVm::contract(const Address& address) const
{
    const auto it = contracts_.find(address);
    return it == contracts_.end() ? nullptr : &it->second;
}

std::vector<Address> ContractVm::contracts() const
{
    std::vector<Address> out;
    out.reserve(contracts_.size());
    for (const auto& [a, _] : contracts_)
        out.push_back(a);
    return out;
}

uint64_t ContractVm::estimate_gas(const Transaction& tx) const
{
    try
    {
        const auto op = decode_operation(tx.payload);
        return schedule_->gas_of(function_id(op), gas::ConsentShape::WithSecondaryAndRequirements).transaction_gas;
    }
    catch (const Error&)
    {
        return 0;
    }
}

ExecutionResult ContractVm::execute(const Transaction& tx, const BlockContext& ctx)
{
    ExecutionResult result;
    try
    {
        const auto op = decode_operation(tx.payload);
        const auto fid = function_id(op);

        if (const auto* deploy = std::get_if<DeployOp>(&op))
        {
            if (tx.target)
                throw Error{Errc::MalformedPayload, "deployment must not target an address"};
            if (deploy->dataset.owner != tx.sender)
                throw Error{Errc::NotOwner, "dataset owner differs from deployer"};
            auto& count = deploy_counts_[tx.sender];
            const auto address = contract_address(tx.sender, count);
            if (contracts_.contains(address))
                throw Error{Errc::Duplicate, "contract address collision"};
            ContractState c;
            c.address = address;
            c.owner = tx.sender;
            c.dataset = deploy->dataset;
            c.nonce = 1;
            const auto cost = schedule_->gas_of(fid);
            ++count;
            contracts_.emplace(address, std::move(c));
            result.transaction_gas = cost.transaction_gas;
            result.execution_gas = cost.execution_gas;
            result.created = address;
            result.events.push_back(event(EventKind::Deployed, address, tx.sender));
            return result;
        }

        if (!tx.target)
            throw Error{Errc::MalformedPayload, "operation requires a target contract"};
        const auto it = contracts_.find(*tx.target);
        if (it == contracts_.end())
            throw Error{Errc::UnknownAddress, tx.target->hex()};

        // Work on a copy; commit only once every check has passed.
        ContractState next = it->second;
        const auto& caller = tx.sender;
        auto shape = next.shape();
        std::vector<LogEvent> events;

        const auto consent_event = [&] {
            Encoder e;
            codec::encode(e, next.consent);
            events.push_back(event(EventKind::ConsentUpdated, next.address, caller, std::move(e).data()));
        };
        const auto draft = [&]() -> PurposeDraft& {
            require_live(next);
            return next.purpose_inbox[caller];
        };
        const auto purpose_event = [&] { events.push_back(event(EventKind::PurposeUpdated, next.address, caller)); };

        std::visit(overloaded{
                       [](const DeployOp&) {},
                       [&](const UploadPrimaryOp& o) {
                           require_owner(next, caller);
                           require_live(next);
                           o.category.validate();
                           next.consent.primary = o.category;
                           consent_event();
                           reevaluate_grants(next, events);
                       },
                       [&](const UploadSecondaryOp& o) {
                           require_owner(next, caller);
                           require_live(next);
                           if (!next.consent.primary)
                               throw Error{Errc::PrimaryMissing};
                           auto secondary = o.secondary;
                           std::ranges::sort(secondary, {}, &ConsentSecondaryCategory::kind);
                           next.consent.secondary = std::move(secondary);
                           next.consent.validate();
                           consent_event();
                           reevaluate_grants(next, events);
                       },
                       [&](const UploadRequirementsOp& o) {
                           require_owner(next, caller);
                           require_live(next);
                           if (!next.consent.primary)
                               throw Error{Errc::PrimaryMissing};
                           next.consent.requirements = o.requirements;
                           next.consent.validate();
                           consent_event();
                           reevaluate_grants(next, events);
                       },
                       [&](const PurposeCategoryOp& o) {
                           auto& d = draft();
                           if (d.category && *d.category != o.category)
                               throw Error{Errc::ConflictingFragment,
                                   "purpose category already set to " + std::string{render_purpose_code(*d.category)}};
                           PurposeStatement check{o.category, o.subcategories, false, {}, o.target_cohort};
                           check.validate();
                           d.category = o.category;
                           for (const auto& s : o.subcategories)
                               if (std::ranges::find(d.subcategories, s) == d.subcategories.end())
                                   d.subcategories.push_back(s);
                           d.target_cohort = o.target_cohort;
                           purpose_event();
                       },
                       [&](const GeographyOp& o) {
                           const auto region = to_upper(trim(o.region));
                           PurposeStatement check;
                           check.requester_geography = region;
                           check.validate();
                           draft().geography = region;
                           purpose_event();
                       },
                       [&](const ProfitOp& o) {
                           draft().profit_intent = o.profit_intent;
                           purpose_event();
                       },
                       [&](const PersonOp& o) {
                           auto& d = draft();
                           for (const auto& [k, v] : o.attributes)
                               d.person.insert_or_assign(k, v);
                           purpose_event();
                       },
                       [&](const RequesterTermsOp& o) {
                           draft().acknowledged_terms = o.acknowledged;
                           purpose_event();
                       },
                       [&](const ResetPurposeOp&) {
                           require_live(next);
                           next.purpose_inbox.erase(caller);
                           purpose_event();
                       },
                       [&](const AccessDataOp& o) {
                           require_live(next);
                           const auto d = next.purpose_inbox.find(caller);
                           if (d == next.purpose_inbox.end())
                               throw Error{Errc::PurposeIncomplete, "no purpose submitted"};
                           const auto purpose = d->second.assemble();
                           const auto acknowledged = d->second.acknowledged_terms.value_or(std::set<std::string>{});
                           if (!next.consent.requirements.empty() && acknowledged != next.consent.requirements)
                               throw Error{Errc::TermsNotAcknowledged};

                           const auto decision = matcher::evaluate(next.consent, purpose, next.dataset, o.now);
                           Encoder out;
                           codec::encode(out, decision);
                           Encoder data;
                           if (decision.granted)
                           {
                               AccessGrant g{caller, ctx.height, grant_reference(next.address, caller, next.nonce),
                                   decision, next.consent, purpose, o.now, acknowledged};
                               out.boolean(true).fixed(g.token_id);
                               data.fixed(g.token_id);
                               codec::encode(data, decision);
                               next.grants.insert_or_assign(caller, std::move(g));
                               events.push_back(event(EventKind::GrantIssued, next.address, caller, std::move(data).data()));
                           }
                           else
                           {
                               out.boolean(false);
                               codec::encode(data, decision);
                               events.push_back(event(EventKind::AccessDenied, next.address, caller, std::move(data).data()));
                           }
                           result.output = std::move(out).data();
                       },
                       [&](const RevokeOp&) {
                           require_owner(next, caller);
                           if (next.revoked)
                               return;
                           next.revoked = true;
                           for (const auto& [requester, _] : next.grants)
                           {
                               Encoder e;
                               e.u8(static_cast<uint8_t>(InvalidationCause::Revoked));
                               events.push_back(event(EventKind::GrantInvalidated, next.address, requester, std::move(e).data()));
                           }
                           next.grants.clear();
                           next.purpose_inbox.clear();
                           events.push_back(event(EventKind::Revoked, next.address, caller));
                       },
                       [&](const RedeemLogOp& o) {
                           events.push_back(event(EventKind::RedemptionLogged, next.address, caller,
                               bytes(o.token_id.bytes.begin(), o.token_id.bytes.end())));
                       },
                       [&](const DeleteLogOp& o) {
                           require_owner(next, caller);
                           if (o.dataset_id != next.dataset.dataset_id)
                               throw Error{Errc::UnknownId, o.dataset_id};
                           events.push_back(event(EventKind::DeletionLogged, next.address, caller,
                               bytes(o.dataset_id.begin(), o.dataset_id.end())));
                       },
                   },
            op);

        const auto cost = schedule_->gas_of(fid, shape);
        ++next.nonce;
        it->second = std::move(next);
        result.transaction_gas = cost.transaction_gas;
        result.execution_gas = cost.execution_gas;
        result.events = std::move(events);
        return result;
    }
    catch (const Error& e)
    {
        ExecutionResult failed;
        failed.error = e.code();
        return failed;
    }
}

bytes ContractVm::state_encoding() const
{
    Encoder e;
    e.u32(static_cast<uint32_t>(deploy_counts_.size()));
    for (const auto& [owner, n] : deploy_counts_)
        e.fixed(owner).u64(n);
    e.u32(static_cast<uint32_t>(contracts_.size()));
    for (const auto& [_, c] : contracts_)
        encode_state(e, c);
    return std::move(e).data();
}

std::unique_ptr<ledger::StateMachine> ContractVm::fresh() const
{
    return std::make_unique<ContractVm>(schedule_);
}
}  // namespace dynconsent::vm
