// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/errors.hpp>
#include <dynconsent/gas_meter.hpp>
#include <nlohmann/json.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dynconsent::gas
{
namespace
{
unsigned __int128 pow10(unsigned n) noexcept
{
    unsigned __int128 v = 1;
    while (n-- > 0)
        v *= 10;
    return v;
}

unsigned printed_decimals(std::string_view text) noexcept
{
    const auto dot = text.find('.');
    return dot == std::string_view::npos ? 0 : static_cast<unsigned>(text.size() - dot - 1);
}

const std::string_view calibrated_ids[] = {fn::deployment, fn::upload_primary, fn::upload_secondary,
    fn::upload_requirements, fn::give_research_purpose, fn::give_hmb_purpose,
    fn::give_clinical_purpose, fn::give_geographic, fn::give_profit, fn::give_person,
    fn::give_requester_terms, fn::access_data_max, fn::access_data_min};
}  // namespace

GasSchedule GasSchedule::calibrated()
{
    GasSchedule s;
    s.rows_ = {
        {std::string{fn::deployment}, {2372326, 1765926}, "0.0141274", "2.92437"},
        {std::string{fn::upload_primary}, {88129, 64745}, "0.000518", "0.10567"},
        {std::string{fn::upload_secondary}, {26814, 3622}, "0.000029", "0.00592"},
        {std::string{fn::upload_requirements}, {60053, 36285}, "0.0002903", "0.05922"},
        {std::string{fn::give_research_purpose}, {87280, 63896}, "0.0005112", "0.10428"},
        {std::string{fn::give_hmb_purpose}, {45902, 22198}, "0.0001776", "0.03623"},
        {std::string{fn::give_clinical_purpose}, {44699, 21635}, "0.0001731", "0.03531"},
        {std::string{fn::give_geographic}, {25182, 2374}, "0.000019", "0.00388"},
        {std::string{fn::give_profit}, {44723, 21723}, "0.0001738", "0.03546"},
        {std::string{fn::give_person}, {45357, 22101}, "0.0001768", "0.03606"},
        {std::string{fn::give_requester_terms}, {46265, 22177}, "0.0001774", "0.03619"},
        {std::string{fn::access_data_max}, {84341, 60253}, "0.000482", "0.09833"},
        {std::string{fn::access_data_min}, {32543, 8455}, "0.0000676", "0.01379"},
    };
    for (const auto id : {fn::reset_purpose, fn::revoke, fn::redeem_token, fn::delete_dataset})
        s.overrides_.emplace(std::string{id}, GasCost{});
    return s;
}

GasCost GasSchedule::gas_of(std::string_view function_id, ConsentShape shape) const
{
    if (const auto it = overrides_.find(function_id); it != overrides_.end())
        return it->second;
    const auto row = [&](std::string_view id) -> const GasCost& {
        const auto it = std::ranges::find(rows_, id, &ScheduleRow::function_id);
        if (it == rows_.end())
            throw Error{Errc::UnknownFunction, std::string{id}};
        return it->cost;
    };
    if (function_id != fn::access_data)
        return row(function_id);

    switch (shape)
    {
    case ConsentShape::PrimaryOnly: return row(fn::access_data_min);
    case ConsentShape::WithSecondaryAndRequirements: return row(fn::access_data_max);
    case ConsentShape::WithSecondary:
    {
        const auto& lo = row(fn::access_data_min);
        const auto& hi = row(fn::access_data_max);
        return {(lo.transaction_gas + hi.transaction_gas) / 2, (lo.execution_gas + hi.execution_gas) / 2};
    }
    }
    throw Error{Errc::UnknownFunction, "bad consent shape"};
}

void GasSchedule::set_override(std::string_view function_id, GasCost cost)
{
    overrides_.insert_or_assign(std::string{function_id}, cost);
}

void GasSchedule::validate() const
{
    for (const auto id : calibrated_ids)
        if (std::ranges::find(rows_, id, &ScheduleRow::function_id) == rows_.end())
            throw Error{Errc::InvalidConfig, "gas schedule lacks row " + std::string{id}};
    for (const auto& r : rows_)
        if (r.cost.transaction_gas < r.cost.execution_gas)
            throw Error{Errc::InvalidConfig, "transaction gas below execution gas for " + r.function_id};
    if (eth_usd_ < 0 || !std::isfinite(eth_usd_))
        throw Error{Errc::InvalidConfig, "bad eth_usd"};
}

std::string GasSchedule::to_json() const
{
    nlohmann::ordered_json doc;
    doc["gas_price_wei"] = gas_price_.to_string();
    doc["eth_usd"] = eth_usd_;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_)
    {
        nlohmann::ordered_json j;
        j["action"] = r.function_id;
        j["transaction_cost"] = r.cost.transaction_gas;
        j["execution_cost"] = r.cost.execution_gas;
        j["ether_cost"] = r.reference_ether;
        j["usd_cost"] = r.reference_usd;
        rows.push_back(std::move(j));
    }
    doc["rows"] = std::move(rows);
    auto extra = nlohmann::ordered_json::object();
    for (const auto& [id, cost] : overrides_)
        extra[id] = {{"transaction_cost", cost.transaction_gas}, {"execution_cost", cost.execution_gas}};
    doc["overrides"] = std::move(extra);
    return doc.dump(2) + "\n";
}

GasSchedule GasSchedule::from_json(std::string_view text)
{
    GasSchedule s;
    try
    {
        const auto doc = nlohmann::json::parse(text);
        const auto price = doc.at("gas_price_wei").get<std::string>();
        unsigned __int128 v = 0;
        if (price.empty() || !std::ranges::all_of(price, [](char c) { return c >= '0' && c <= '9'; }))
            throw Error{Errc::InvalidConfig, "gas_price_wei must be a decimal string"};
        for (const char c : price)
            v = v * 10 + static_cast<unsigned>(c - '0');
        s.gas_price_ = Wei{v};
        s.eth_usd_ = doc.at("eth_usd").get<double>();
        for (const auto& j : doc.at("rows"))
            s.rows_.push_back({j.at("action").get<std::string>(),
                {j.at("transaction_cost").get<uint64_t>(), j.at("execution_cost").get<uint64_t>()},
                j.value("ether_cost", std::string{}), j.value("usd_cost", std::string{})});
        if (doc.contains("overrides"))
            for (const auto& [id, j] : doc.at("overrides").items())
                s.overrides_.emplace(id,
                    GasCost{j.at("transaction_cost").get<uint64_t>(), j.at("execution_cost").get<uint64_t>()});
    }
    catch (const nlohmann::json::exception& e)
    {
        throw Error{Errc::InvalidConfig, std::string{"gas schedule: "} + e.what()};
    }
    s.validate();
    return s;
}

GasSchedule GasSchedule::load(const std::filesystem::path& path)
{
    std::ifstream in{path};
    if (!in)
        throw Error{Errc::IoFailure, "cannot open " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

Wei ether_cost(uint64_t gas, Wei gas_price) noexcept
{
    return gas_price * gas;
}

Wei round_ether(Wei amount, unsigned decimals) noexcept
{
    if (decimals >= 18)
        return amount;
    const auto unit = pow10(18 - decimals);
    return Wei{(amount.value + unit / 2) / unit * unit};
}

std::string format_ether(Wei amount, unsigned decimals)
{
    decimals = std::min(decimals, 18u);
    const auto rounded = round_ether(amount, decimals).value;
    const auto whole = rounded / wei_per_ether;
    auto frac = (rounded % wei_per_ether) / pow10(18 - decimals);
    std::string s = Wei{whole}.to_string();
    if (decimals == 0)
        return s;
    std::string digits(decimals, '0');
    for (auto i = decimals; i-- > 0;)
    {
        digits[i] = static_cast<char>('0' + static_cast<int>(frac % 10));
        frac /= 10;
    }
    return s + "." + digits;
}

double usd_cost(Wei ether_amount, double eth_usd) noexcept
{
    const auto eth = static_cast<long double>(ether_amount.value) / static_cast<long double>(wei_per_ether);
    return static_cast<double>(std::round(eth * static_cast<long double>(eth_usd) * 1e5L) / 1e5L);
}

std::string format_usd(double usd)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5f", usd);
    return buf;
}

std::vector<ParityRow> table_parity(const GasSchedule& schedule)
{
    std::vector<ParityRow> out;
    for (const auto& r : schedule.rows())
    {
        if (r.reference_ether.empty())
            continue;
        ParityRow p;
        p.function_id = r.function_id;
        p.cost = r.cost;
        p.reference_ether = r.reference_ether;
        const auto cost = ether_cost(r.cost.execution_gas, schedule.gas_price());
        p.computed_ether = format_ether(cost, printed_decimals(r.reference_ether));
        p.ether_exact = p.computed_ether == r.reference_ether;
        p.computed_usd = usd_cost(round_ether(cost, table_ether_decimals), schedule.eth_usd());
        p.reference_usd = r.reference_usd.empty() ? 0.0 : std::stod(r.reference_usd);
        p.usd_relative_error =
            p.reference_usd == 0 ? 0.0 : std::abs(p.computed_usd - p.reference_usd) / p.reference_usd;
        p.usd_tolerance = r.function_id == fn::deployment ? 0.02 : 0.001;
        out.push_back(std::move(p));
    }
    return out;
}
}  // namespace dynconsent::gas
