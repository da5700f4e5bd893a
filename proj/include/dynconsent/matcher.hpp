// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common.hpp"
#include "ontology.hpp"
#include <string>
#include <utility>
#include <vector>

namespace dynconsent::matcher
{
using ontology::Cohort;
using ontology::ConsentStatement;
using ontology::Date;
using ontology::PurposeStatement;

struct DatasetMeta
{
    std::string dataset_id;  ///< e.g. "D#002"
    Cohort cohort;           ///< Healthy or Disease, never Any
    Address owner;
    std::string datastore_uri;
    Hash256 content_digest;
    uint64_t record_count = 0;

    void validate() const;
    friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Reason codes, in check order. Persisted on-chain; never renumber.
enum class Reason : uint8_t
{
    PrimaryCategoryMismatch = 0,
    ProfitForbidden = 1,
    GeographyBlocked = 2,
    Expired = 3,
    CohortIrrelevant = 4,
    Granted = 5,
};
std::string_view to_string(Reason r) noexcept;

struct MatchDecision
{
    bool granted = false;
    std::vector<Reason> reasons;

    friend bool operator==(const MatchDecision&, const MatchDecision&) = default;
};

enum class ReasonDetail
{
    FirstFailure,
    AllFailures,
};

/// The policy decision point. Checks run in a fixed order: primary category, profit,
/// geography, time limit, cohort. With FirstFailure only the first failing check is reported.
MatchDecision evaluate(const ConsentStatement& consent, const PurposeStatement& purpose,
    const DatasetMeta& meta, const Date& now, ReasonDetail detail = ReasonDetail::FirstFailure);

/// granted / total, kept unreduced; 0/0 reads as 0.
struct Fraction
{
    uint64_t granted = 0;
    uint64_t total = 0;

    [[nodiscard]] Fraction reduced() const noexcept;
    [[nodiscard]] double decimal() const noexcept;
    /// "20/29", or "0/0".
    [[nodiscard]] std::string exact() const;
    /// Percentage with two decimals, e.g. "68.97".
    [[nodiscard]] std::string percent() const;

    friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct BatchResult
{
    std::vector<std::pair<std::string, MatchDecision>> decisions;
    Fraction fraction;
};

/// One decision per entry, order preserved. Throws Error{Errc::DuplicateId} on repeated ids.
BatchResult batch_match(const std::vector<std::pair<ConsentStatement, DatasetMeta>>& registry_view,
    const PurposeStatement& purpose, const Date& now, ReasonDetail detail = ReasonDetail::FirstFailure);

/// {"dataset_id":...,"granted":...,"reasons":[...]} on one line, no trailing newline.
std::string to_json_line(const std::string& dataset_id, const MatchDecision& decision);
}  // namespace dynconsent::matcher
