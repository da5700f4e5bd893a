// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/errors.hpp>
#include <dynconsent/matcher.hpp>
#include <nlohmann/json.hpp>
#include <chrono>
#include <numeric>
#include <set>

namespace dynconsent::matcher
{
using namespace ontology;

void DatasetMeta::validate() const
{
    if (dataset_id.empty())
        throw Error{Errc::InvalidStatement, "empty dataset id"};
    if (cohort.kind == Cohort::Kind::Any)
        throw Error{Errc::InvalidStatement, "dataset cohort must be healthy or disease"};
    if (cohort.kind == Cohort::Kind::Disease && cohort.disease.empty())
        throw Error{Errc::InvalidStatement, "disease cohort requires a tag"};
}

std::string_view to_string(Reason r) noexcept
{
    switch (r)
    {
    case Reason::PrimaryCategoryMismatch: return "PrimaryCategoryMismatch";
    case Reason::ProfitForbidden: return "ProfitForbidden";
    case Reason::GeographyBlocked: return "GeographyBlocked";
    case Reason::Expired: return "Expired";
    case Reason::CohortIrrelevant: return "CohortIrrelevant";
    case Reason::Granted: return "Granted";
    }
    return "Unknown";
}

namespace
{
bool primary_permits(const ConsentStatement& consent, const PurposeStatement& purpose)
{
    if (!consent.primary)
        return false;
    if (purpose.subcategories.empty())
        return category_permits(*consent.primary, purpose.category, std::nullopt);
    return std::ranges::all_of(purpose.subcategories, [&](const PurposeSubcategory& s) {
        return category_permits(*consent.primary, purpose.category, s);
    });
}

bool profit_allowed(const ConsentStatement& consent, const PurposeStatement& purpose)
{
    return !purpose.profit_intent || !consent.has(SecondaryKind::NonProfitOnly);
}

/// An undeclared requester geography never passes a geographic restriction.
bool geography_allowed(const ConsentStatement& consent, const PurposeStatement& purpose)
{
    const auto* geo = consent.find(SecondaryKind::GeographicRestriction);
    if (geo == nullptr)
        return true;
    return !purpose.requester_geography.empty() &&
           !geo->geography_blocklist.contains(purpose.requester_geography);
}

bool within_time_limit(const ConsentStatement& consent, const Date& now)
{
    const auto* limit = consent.find(SecondaryKind::TimeLimit);
    return limit == nullptr || std::chrono::sys_days{now} <= std::chrono::sys_days{*limit->expiry};
}

bool cohort_relevant(const PurposeStatement& purpose, const DatasetMeta& meta)
{
    return purpose.target_cohort.kind == Cohort::Kind::Any || purpose.target_cohort == meta.cohort;
}
}  // namespace

MatchDecision evaluate(const ConsentStatement& consent, const PurposeStatement& purpose,
    const DatasetMeta& meta, const Date& now, ReasonDetail detail)
{
    MatchDecision d;
    const auto check = [&](bool ok, Reason failure) {
        if (!ok && (d.reasons.empty() || detail == ReasonDetail::AllFailures))
            d.reasons.push_back(failure);
    };
    check(primary_permits(consent, purpose), Reason::PrimaryCategoryMismatch);
    check(profit_allowed(consent, purpose), Reason::ProfitForbidden);
    check(geography_allowed(consent, purpose), Reason::GeographyBlocked);
    check(within_time_limit(consent, now), Reason::Expired);
    check(cohort_relevant(purpose, meta), Reason::CohortIrrelevant);

    d.granted = d.reasons.empty();
    if (d.granted)
        d.reasons.push_back(Reason::Granted);
    return d;
}

Fraction Fraction::reduced() const noexcept
{
    const auto g = std::gcd(granted, total);
    if (g == 0)
        return {0, 0};
    return {granted / g, total / g};
}

double Fraction::decimal() const noexcept
{
    return total == 0 ? 0.0 : static_cast<double>(granted) / static_cast<double>(total);
}

std::string Fraction::exact() const
{
    return std::to_string(granted) + "/" + std::to_string(total);
}

std::string Fraction::percent() const
{
    // Integer rounding (half up) keeps the text identical on every platform.
    if (total == 0)
        return "0.00";
    const auto basis_points = (granted * 20000 + total) / (2 * total);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%02llu", static_cast<unsigned long long>(basis_points / 100),
        static_cast<unsigned long long>(basis_points % 100));
    return buf;
}

BatchResult batch_match(const std::vector<std::pair<ConsentStatement, DatasetMeta>>& registry_view,
    const PurposeStatement& purpose, const Date& now, ReasonDetail detail)
{
    BatchResult out;
    std::set<std::string> seen;
    out.decisions.reserve(registry_view.size());
    for (const auto& [consent, meta] : registry_view)
    {
        if (!seen.insert(meta.dataset_id).second)
            throw Error{Errc::DuplicateId, meta.dataset_id};
        auto decision = evaluate(consent, purpose, meta, now, detail);
        out.fraction.granted += decision.granted ? 1 : 0;
        out.decisions.emplace_back(meta.dataset_id, std::move(decision));
    }
    out.fraction.total = registry_view.size();
    return out;
}

std::string to_json_line(const std::string& dataset_id, const MatchDecision& decision)
{
    nlohmann::ordered_json j;
    j["dataset_id"] = dataset_id;
    j["granted"] = decision.granted;
    auto reasons = nlohmann::ordered_json::array();
    for (const auto r : decision.reasons)
        reasons.push_back(std::string{to_string(r)});
    j["reasons"] = std::move(reasons);
    return j.dump();
}
}  // namespace dynconsent::matcher
