// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Scenario engine: builds the provider population, drives every provider and requester
/// through the platform one mined block per step, and writes the resulting reports.

#include "common.hpp"
#include "ledger.hpp"
#include "matcher.hpp"
#include "ontology.hpp"
#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dynconsent::harness
{
using matcher::Fraction;
using matcher::MatchDecision;
using ontology::Cohort;
using ontology::ConsentStatement;
using ontology::Date;
using ontology::PurposeStatement;

enum class ProviderProfile : uint8_t
{
    Open,
    Restrictive,
    VeryRestrictive,
};
inline constexpr std::array all_provider_profiles{
    ProviderProfile::Open, ProviderProfile::Restrictive, ProviderProfile::VeryRestrictive};
std::string_view to_string(ProviderProfile p) noexcept;

enum class RequesterProfile : uint8_t
{
    Req1,
    Req2,
    Req3,
};
inline constexpr std::array all_requester_profiles{
    RequesterProfile::Req1, RequesterProfile::Req2, RequesterProfile::Req3};
std::string_view to_string(RequesterProfile r) noexcept;

/// Open: GRU-CC. Restrictive: HMB-CC. VeryRestrictive: DS-diabetes-CC with NPU.
ConsentStatement consent_template(ProviderProfile p);
/// Req1: GRU:NMDS, commercial, any cohort. Req2: HMB:FB, commercial, healthy.
/// Req3: HMB:DS-diabetes, non-profit, diabetic.
PurposeStatement purpose_template(RequesterProfile r);

struct CohortCounts
{
    uint32_t diabetic = 0;
    uint32_t healthy = 0;
    friend bool operator==(const CohortCounts&, const CohortCounts&) = default;
};

struct ScenarioConfig
{
    std::string name = "custom";
    /// Explicit per-profile counts, indexed by ProviderProfile. Takes precedence over fractions.
    std::optional<std::array<CohortCounts, 3>> counts;
    std::array<double, 3> fractions{1.0, 0.0, 0.0};
    uint32_t healthy = 20;
    uint32_t diabetic = 9;
    uint64_t seed = 42;
    uint32_t difficulty = 0;
    Wei gas_price = gwei(8);
    double eth_usd = 204.0;
    Date date = ontology::parse_date("2026-01-01");

    /// Throws InvalidMix or InvalidConfig.
    void validate() const;

    /// Built-in scenarios 1, 2 and 3. Throws InvalidConfig otherwise.
    static ScenarioConfig scenario(int number);
    /// key = value lines; '#' starts a comment. Throws InvalidConfig.
    /// Keys absent from text keep their value from base.
    static ScenarioConfig parse(std::string_view text, ScenarioConfig base);
    static ScenarioConfig parse(std::string_view text);
    static ScenarioConfig load(const std::filesystem::path& path, ScenarioConfig base);
    static ScenarioConfig load(const std::filesystem::path& path);
};

struct Member
{
    std::string dataset_id;  ///< D#001.., H#001..
    Cohort cohort;
    ProviderProfile profile = ProviderProfile::Open;
    friend bool operator==(const Member&, const Member&) = default;
};

/// Profile counts per cohort for config: the explicit counts, or largest-remainder rounding of
/// the fractions over each cohort (ties go to the earlier profile).
std::array<CohortCounts, 3> profile_counts(const ScenarioConfig& config);

/// Diabetic datasets first, then healthy, each in id order. Profiles are dealt to each cohort
/// by a seeded shuffle. Throws InvalidMix.
std::vector<Member> build_population(const ScenarioConfig& config);

/// Deterministic pseudo-random payload for a dataset.
bytes synthetic_payload(std::string_view dataset_id, std::size_t size = 4096);

struct MemberResult
{
    Member member;
    Address provider;
    Address contract;
};

struct RequesterResult
{
    RequesterProfile id = RequesterProfile::Req1;
    Address account;
    Fraction fraction;
    std::vector<std::string> matched;  ///< dataset ids, in contact order
    uint64_t contacts = 0;
};

struct ActorGas
{
    std::string actor;
    std::string role;
    std::string profile;
    uint64_t transactions = 0;
    uint64_t transaction_gas = 0;
    uint64_t execution_gas = 0;
    Wei fee;                 ///< debited: transaction gas × price
    std::string ether;       ///< execution gas × price at table precision
    double usd = 0;
};

struct LatencySample
{
    std::string actor;
    std::string step;
    uint64_t sequence = 0;
    double ms = 0;
};

struct ActorLatency
{
    std::string actor;
    uint64_t interactions = 0;
    double total_ms = 0;
    double mean_ms = 0;
};

struct MatchCell
{
    std::string dataset_id;
    Cohort cohort;
    ProviderProfile profile = ProviderProfile::Open;
    RequesterProfile requester = RequesterProfile::Req1;
    MatchDecision decision;
};

struct ChainStats
{
    uint64_t blocks = 0;
    uint64_t transactions = 0;
    uint64_t failed_transactions = 0;
    bool valid = false;
    std::string head_hash;
    std::string state_hash;
};

struct ScenarioReport
{
    ScenarioConfig config;
    std::vector<MemberResult> members;
    std::vector<RequesterResult> requesters;
    std::vector<ActorGas> gas;
    std::vector<LatencySample> latency;
    std::vector<ActorLatency> latency_summary;
    std::vector<MatchCell> matching;
    ChainStats chain;
    std::vector<std::string> notes;
    std::string chain_export;
    std::string tokens_json;

    [[nodiscard]] const RequesterResult& requester(RequesterProfile r) const;
};

/// Runs the scenario against a fresh platform whose datastore lives under store_root.
/// Any failed transaction aborts with Error{Errc::RunAborted}.
ScenarioReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& store_root);

/// Number of distinct contracts the requester transacted with.
uint64_t contact_count(RequesterProfile requester, const ScenarioReport& report);

/// access.csv, gas.csv, latency.csv, matching.csv, report.json, chain.txt and tokens.json.
/// Everything except latency.csv (wall-clock) is byte-stable for a fixed config.
void emit_report(const ScenarioReport& report, const std::filesystem::path& out_dir);

std::string access_csv(const ScenarioReport& report);
std::string gas_csv(const ScenarioReport& report);
std::string latency_csv(const ScenarioReport& report);
std::string matching_csv(const ScenarioReport& report);
std::string report_json(const ScenarioReport& report);
}  // namespace dynconsent::harness
