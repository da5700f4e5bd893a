// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dynconsent
{
/// Error codes shared by every module. Values are persisted in receipts, so never renumber.
enum class Errc : uint16_t
{
    None = 0,
    // ontology
    UnknownCode = 1,
    MalformedDiseaseTag = 2,
    InvalidStatement = 3,
    // ledger
    InsufficientFunds = 10,
    UnknownSender = 11,
    Duplicate = 12,
    EmptyPool = 13,
    ReadOnlyRole = 14,
    OutOfGas = 15,
    // contract
    NotOwner = 20,
    Revoked = 21,
    PrimaryMissing = 22,
    ConflictingFragment = 23,
    PurposeIncomplete = 24,
    TermsNotAcknowledged = 25,
    UnknownAddress = 26,
    MalformedPayload = 27,
    // gas
    UnknownFunction = 30,
    // registry
    DigestMismatch = 40,
    DuplicateId = 41,
    RevokedContract = 42,
    UnknownGrant = 43,
    InvalidToken = 44,
    Deleted = 45,
    UnknownId = 46,
    // harness
    InvalidMix = 50,
    IoFailure = 51,
    InvalidConfig = 52,
    RunAborted = 53,
    // encoding
    Decode = 60,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error
{
public:
    Error(Errc code, const std::string& detail)
      : std::runtime_error{std::string{to_string(code)} + (detail.empty() ? "" : ": " + detail)},
        code_{code}
    {}
    explicit Error(Errc code) : Error{code, {}} {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};
}  // namespace dynconsent
