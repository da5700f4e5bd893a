// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "common.hpp"
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dynconsent::gas
{
/// How much of a consent statement a contract holds; selects the AccessData cost.
enum class ConsentShape : uint8_t
{
    PrimaryOnly,
    WithSecondary,
    WithSecondaryAndRequirements,
};

struct GasCost
{
    uint64_t transaction_gas = 0;
    uint64_t execution_gas = 0;

    friend bool operator==(const GasCost&, const GasCost&) = default;
};

/// One row of the calibrated schedule. The reference columns hold the published ether and
/// USD figures as printed, so parity can be checked at their printed precision.
struct ScheduleRow
{
    std::string function_id;
    GasCost cost;
    std::string reference_ether;
    std::string reference_usd;

    friend bool operator==(const ScheduleRow&, const ScheduleRow&) = default;
};

namespace fn
{
inline constexpr std::string_view deployment = "Deployment";
inline constexpr std::string_view upload_primary = "UploadDataPrimaryCategory";
inline constexpr std::string_view upload_secondary = "UploadDataSecondaryCategory";
inline constexpr std::string_view upload_requirements = "UploadDataRequirements";
inline constexpr std::string_view give_research_purpose = "giveResearchPurpose";
inline constexpr std::string_view give_hmb_purpose = "giveHMBPurpose";
inline constexpr std::string_view give_clinical_purpose = "giveClinicalPurpose";
inline constexpr std::string_view give_geographic = "giveGeographicSpecificRestriction";
inline constexpr std::string_view give_profit = "giveProfit";
inline constexpr std::string_view give_person = "givePerson";
inline constexpr std::string_view give_requester_terms = "giveDataRequesterTerms";
inline constexpr std::string_view access_data = "AccessData";
inline constexpr std::string_view access_data_max = "AccessData (Max)";
inline constexpr std::string_view access_data_min = "AccessData (Min)";
// Not part of the calibrated table; zero unless overridden.
inline constexpr std::string_view reset_purpose = "resetPurpose";
inline constexpr std::string_view revoke = "revoke";
inline constexpr std::string_view redeem_token = "redeemToken";
inline constexpr std::string_view delete_dataset = "deleteDataset";
}  // namespace fn

/// Number of decimals the published ether column is rounded to.
inline constexpr unsigned table_ether_decimals = 7;

class GasSchedule
{
public:
    /// The calibrated default: 13 rows, 8 Gwei, 204 USD/ETH, zero-cost extras.
    static GasSchedule calibrated();
    static GasSchedule from_json(std::string_view text);
    static GasSchedule load(const std::filesystem::path& path);
    [[nodiscard]] std::string to_json() const;

    /// Fixed lookup. "AccessData" resolves through the consent shape: PrimaryOnly takes the
    /// Min row, WithSecondaryAndRequirements the Max row, WithSecondary the floor of their
    /// midpoint. Throws Error{Errc::UnknownFunction}.
    [[nodiscard]] GasCost gas_of(std::string_view function_id,
        ConsentShape shape = ConsentShape::PrimaryOnly) const;

    void set_override(std::string_view function_id, GasCost cost);

    [[nodiscard]] const std::vector<ScheduleRow>& rows() const noexcept { return rows_; }
    [[nodiscard]] const std::map<std::string, GasCost, std::less<>>& overrides() const noexcept
    {
        return overrides_;
    }
    [[nodiscard]] Wei gas_price() const noexcept { return gas_price_; }
    [[nodiscard]] double eth_usd() const noexcept { return eth_usd_; }
    void set_gas_price(Wei price) noexcept { gas_price_ = price; }
    void set_eth_usd(double usd) noexcept { eth_usd_ = usd; }

    /// Every calibrated row present and transaction_gas >= execution_gas.
    void validate() const;

    friend bool operator==(const GasSchedule&, const GasSchedule&) = default;

private:
    std::vector<ScheduleRow> rows_;
    std::map<std::string, GasCost, std::less<>> overrides_;
    Wei gas_price_ = gwei(8);
    double eth_usd_ = 204.0;
};

/// gas × price.
Wei ether_cost(uint64_t gas, Wei gas_price) noexcept;
/// Half-up rounding of a wei amount to the given number of ether decimals.
Wei round_ether(Wei amount, unsigned decimals) noexcept;
/// Decimal ether text with exactly `decimals` digits after the point (rounded half up).
std::string format_ether(Wei amount, unsigned decimals);
/// ether × eth_usd rounded to 5 decimal places.
double usd_cost(Wei ether_amount, double eth_usd) noexcept;
std::string format_usd(double usd);

/// Parity of the schedule against its own reference columns.
struct ParityRow
{
    std::string function_id;
    GasCost cost;
    std::string computed_ether;  ///< at the reference's printed precision
    std::string reference_ether;
    bool ether_exact = false;
    double computed_usd = 0;  ///< from ether rounded to table precision
    double reference_usd = 0;
    double usd_relative_error = 0;
    double usd_tolerance = 0;
    [[nodiscard]] bool usd_ok() const noexcept { return usd_relative_error <= usd_tolerance; }
    [[nodiscard]] bool ok() const noexcept { return ether_exact && usd_ok(); }
};

/// USD tolerance is 0.1% per row, 2% for Deployment (its published USD cell implies a
/// slightly different exchange rate).
std::vector<ParityRow> table_parity(const GasSchedule& schedule);
}  // namespace dynconsent::gas
