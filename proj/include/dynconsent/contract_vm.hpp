// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Per-provider consent contracts executed by the ledger.
///
/// Each contract holds one dataset reference, the provider's consent statement, a purpose
/// inbox per requester (assembled from many small fragment calls), the access grants issued
/// so far, and a revocation flag. Every state change arrives as a ledger transaction and is
/// charged from the gas schedule.

#include "encoding.hpp"
#include "gas_meter.hpp"
#include "ledger.hpp"
#include "matcher.hpp"
#include "ontology.hpp"
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace dynconsent::vm
{
using matcher::DatasetMeta;
using matcher::MatchDecision;
using ontology::Cohort;
using ontology::ConsentPrimaryCategory;
using ontology::ConsentSecondaryCategory;
using ontology::ConsentStatement;
using ontology::Date;
using ontology::PurposeCode;
using ontology::PurposeStatement;
using ontology::PurposeSubcategory;

struct DeployOp
{
    DatasetMeta dataset;
};
struct UploadPrimaryOp
{
    ConsentPrimaryCategory category;
};
struct UploadSecondaryOp
{
    std::vector<ConsentSecondaryCategory> secondary;
};
struct UploadRequirementsOp
{
    std::set<std::string> requirements;
};
/// giveResearchPurpose / giveHMBPurpose / giveClinicalPurpose, selected by category.
/// The target cohort travels with the category fragment.
struct PurposeCategoryOp
{
    PurposeCode category = PurposeCode::GRU;
    std::vector<PurposeSubcategory> subcategories;
    Cohort target_cohort;
};
struct GeographyOp
{
    std::string region;
};
struct ProfitOp
{
    bool profit_intent = false;
};
struct PersonOp
{
    std::map<std::string, std::string> attributes;
};
struct RequesterTermsOp
{
    std::set<std::string> acknowledged;
};
struct ResetPurposeOp
{};
struct AccessDataOp
{
    Date now;
};
struct RevokeOp
{};
struct RedeemLogOp
{
    Hash256 token_id;
};
struct DeleteLogOp
{
    std::string dataset_id;
};

using Operation = std::variant<DeployOp, UploadPrimaryOp, UploadSecondaryOp, UploadRequirementsOp,
    PurposeCategoryOp, GeographyOp, ProfitOp, PersonOp, RequesterTermsOp, ResetPurposeOp,
    AccessDataOp, RevokeOp, RedeemLogOp, DeleteLogOp>;

bytes encode_operation(const Operation& op);
/// Throws Error{Errc::MalformedPayload}.
Operation decode_operation(bytes_view payload);
/// Gas schedule function id charged for op.
std::string_view function_id(const Operation& op);

enum class EventKind : uint8_t
{
    Deployed = 1,
    ConsentUpdated = 2,
    PurposeUpdated = 3,
    GrantIssued = 4,
    AccessDenied = 5,
    GrantInvalidated = 6,
    Revoked = 7,
    RedemptionLogged = 8,
    DeletionLogged = 9,
};

struct AccessGrant
{
    Address requester;
    uint64_t granted_at = 0;  ///< block height
    Hash256 token_id;         ///< grant reference the datastore binds its tokens to
    MatchDecision decision;
    ConsentStatement consent;  ///< consent in force when granted
    PurposeStatement purpose;
    Date evaluated_on;
    std::set<std::string> acknowledged_terms;

    friend bool operator==(const AccessGrant&, const AccessGrant&) = default;
};

/// A requester's purpose under construction.
struct PurposeDraft
{
    std::optional<PurposeCode> category;
    std::vector<PurposeSubcategory> subcategories;
    Cohort target_cohort;
    /// Undeclared profit intent is treated as commercial.
    std::optional<bool> profit_intent;
    std::string geography;
    std::map<std::string, std::string> person;
    std::optional<std::set<std::string>> acknowledged_terms;

    /// Throws Error{Errc::PurposeIncomplete} without a category.
    [[nodiscard]] PurposeStatement assemble() const;

    friend bool operator==(const PurposeDraft&, const PurposeDraft&) = default;
};

struct ContractState
{
    Address address;
    Address owner;
    ConsentStatement consent;  ///< empty primary until the first upload
    DatasetMeta dataset;
    std::map<Address, PurposeDraft> purpose_inbox;
    std::map<Address, AccessGrant> grants;
    bool revoked = false;
    uint64_t nonce = 0;

    [[nodiscard]] gas::ConsentShape shape() const noexcept;
};

/// Decoded output of an AccessData receipt.
struct AccessOutcome
{
    MatchDecision decision;
    std::optional<Hash256> grant_ref;
};
AccessOutcome decode_access_outcome(bytes_view output);

/// Deterministic address for the deploy_index-th contract deployed by owner.
Address contract_address(const Address& owner, uint64_t deploy_index);

/// Canonical encodings of the domain values carried in payloads and state.
namespace codec
{
void encode(Encoder& e, const ConsentPrimaryCategory& v);
void encode(Encoder& e, const ConsentSecondaryCategory& v);
void encode(Encoder& e, const ConsentStatement& v);
void encode(Encoder& e, const PurposeSubcategory& v);
void encode(Encoder& e, const Cohort& v);
void encode(Encoder& e, const PurposeStatement& v);
void encode(Encoder& e, const DatasetMeta& v);
void encode(Encoder& e, const MatchDecision& v);
void encode(Encoder& e, const Date& v);

ConsentPrimaryCategory decode_primary(Decoder& d);
ConsentSecondaryCategory decode_secondary(Decoder& d);
ConsentStatement decode_consent(Decoder& d);
PurposeSubcategory decode_subpurpose(Decoder& d);
Cohort decode_cohort(Decoder& d);
PurposeStatement decode_purpose(Decoder& d);
DatasetMeta decode_dataset(Decoder& d);
MatchDecision decode_decision(Decoder& d);
Date decode_date(Decoder& d);
}  // namespace codec

class ContractVm final : public ledger::StateMachine
{
public:
    explicit ContractVm(std::shared_ptr<const gas::GasSchedule> schedule);

    ledger::ExecutionResult execute(const ledger::Transaction& tx, const ledger::BlockContext& ctx) override;
    [[nodiscard]] uint64_t estimate_gas(const ledger::Transaction& tx) const override;
    [[nodiscard]] bytes state_encoding() const override;
    [[nodiscard]] std::unique_ptr<ledger::StateMachine> fresh() const override;

    [[nodiscard]] const ContractState* contract(const Address& address) const;
    [[nodiscard]] std::vector<Address> contracts() const;
    [[nodiscard]] const gas::GasSchedule& schedule() const noexcept { return *schedule_; }

private:
    std::shared_ptr<const gas::GasSchedule> schedule_;
    std::map<Address, ContractState> contracts_;
    std::map<Address, uint64_t> deploy_counts_;
};
}  // namespace dynconsent::vm
