// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/crypto.hpp>
#include <dynconsent/errors.hpp>
#include <dynconsent/gas_meter.hpp>
#include <dynconsent/harness.hpp>
#include <dynconsent/platform.hpp>
#include <nlohmann/json.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace dynconsent::harness
{
using namespace ontology;
namespace fs = std::filesystem;

std::string_view to_string(ProviderProfile p) noexcept
{
    switch (p)
    {
    case ProviderProfile::Open: return "Open";
    case ProviderProfile::Restrictive: return "Restrictive";
    case ProviderProfile::VeryRestrictive: return "VeryRestrictive";
    }
    return "Unknown";
}

std::string_view to_string(RequesterProfile r) noexcept
{
    switch (r)
    {
    case RequesterProfile::Req1: return "Req1";
    case RequesterProfile::Req2: return "Req2";
    case RequesterProfile::Req3: return "Req3";
    }
    return "Unknown";
}

ConsentStatement consent_template(ProviderProfile p)
{
    ConsentStatement s;
    switch (p)
    {
    case ProviderProfile::Open: s.primary = ConsentPrimaryCategory::make(ConsentCode::GRU_CC); break;
    case ProviderProfile::Restrictive: s.primary = ConsentPrimaryCategory::make(ConsentCode::HMB_CC); break;
    case ProviderProfile::VeryRestrictive:
        s.primary = ConsentPrimaryCategory::make(ConsentCode::DS_CC, "diabetes");
        s.secondary.push_back(ConsentSecondaryCategory::non_profit_only());
        break;
    }
    return s;
}

PurposeStatement purpose_template(RequesterProfile r)
{
    PurposeStatement p;
    switch (r)
    {
    case RequesterProfile::Req1:
        p.category = PurposeCode::GRU;
        p.subcategories = {PurposeSubcategory::make(SubpurposeCode::NMDS)};
        p.profit_intent = true;
        p.target_cohort = Cohort::any();
        break;
    case RequesterProfile::Req2:
        p.category = PurposeCode::HMB;
        p.subcategories = {PurposeSubcategory::make(SubpurposeCode::FB)};
        p.profit_intent = true;
        p.target_cohort = Cohort::healthy();
        break;
    case RequesterProfile::Req3:
        p.category = PurposeCode::HMB;
        p.subcategories = {PurposeSubcategory::make(SubpurposeCode::DS_SUB, "diabetes")};
        p.profit_intent = false;
        p.target_cohort = Cohort::disease_of("diabetes");
        break;
    }
    return p;
}

// ---------------------------------------------------------------------------------------------
// Configuration

namespace
{
constexpr uint32_t max_cohort_size = 999;  // ids are three digits
constexpr std::string_view profile_keys[] = {"open", "restrictive", "very_restrictive"};

template <typename T>
T parse_number(std::string_view key, std::string_view text)
{
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error{Errc::InvalidConfig, std::string{key} + ": not a number: " + std::string{text}};
    return v;
}

uint32_t parse_count(std::string_view key, std::string_view text)
{
    const auto v = parse_number<uint64_t>(key, text);
    if (v > max_cohort_size)
        throw Error{Errc::InvalidConfig, std::string{key} + ": at most 999"};
    return static_cast<uint32_t>(v);
}
}  // namespace

void ScenarioConfig::validate() const
{
    if (healthy + diabetic == 0)
        throw Error{Errc::InvalidMix, "empty population"};
    if (healthy > max_cohort_size || diabetic > max_cohort_size)
        throw Error{Errc::InvalidMix, "cohort larger than 999"};
    if (counts)
    {
        uint64_t h = 0, d = 0;
        for (const auto& c : *counts)
        {
            h += c.healthy;
            d += c.diabetic;
        }
        if (h != healthy || d != diabetic)
            throw Error{Errc::InvalidMix, "profile counts do not sum to the population"};
    }
    else
    {
        double sum = 0;
        for (const auto f : fractions)
        {
            if (!std::isfinite(f) || f < 0 || f > 1)
                throw Error{Errc::InvalidMix, "fraction outside [0, 1]"};
            sum += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error{Errc::InvalidMix, "fractions do not sum to 1"};
    }
    if (!std::isfinite(eth_usd) || eth_usd < 0)
        throw Error{Errc::InvalidConfig, "eth_usd must be non-negative"};
    if (!date.ok())
        throw Error{Errc::InvalidConfig, "bad date"};
}

ScenarioConfig ScenarioConfig::scenario(int number)
{
    ScenarioConfig c;
    c.name = std::to_string(number);
    switch (number)
    {
    case 1: c.fractions = {1.0, 0.0, 0.0}; break;
    case 2: c.counts = std::array<CohortCounts, 3>{{{4, 8}, {3, 9}, {2, 3}}}; break;
    case 3: c.counts = std::array<CohortCounts, 3>{{{3, 6}, {2, 7}, {4, 7}}}; break;
    default: throw Error{Errc::InvalidConfig, "unknown scenario " + std::to_string(number)};
    }
    return c;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text, ScenarioConfig c)
{
    bool saw_counts = false, saw_mix = false, saw_population = false;
    std::array<CohortCounts, 3> counts{};
    std::array<double, 3> fractions{};

    std::istringstream in{std::string{text}};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        const auto line = trim(std::string_view{raw}.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error{Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value"};
        const auto key = trim(std::string_view{line}.substr(0, eq));
        const auto value = trim(std::string_view{line}.substr(eq + 1));

        if (key == "scenario")
            c.name = std::string{value};
        else if (key == "seed")
            c.seed = parse_number<uint64_t>(key, value);
        else if (key == "difficulty")
        {
            c.difficulty = parse_number<uint32_t>(key, value);
            if (c.difficulty > 32)
                throw Error{Errc::InvalidConfig, "difficulty above 32 bits"};
        }
        else if (key == "gas_price_gwei")
            c.gas_price = gwei(parse_number<uint64_t>(key, value));
        else if (key == "eth_usd")
            c.eth_usd = parse_number<double>(key, value);
        else if (key == "date")
        {
            try
            {
                c.date = parse_date(value);
            }
            catch (const Error& e)
            {
                throw Error{Errc::InvalidConfig, std::string{"date: "} + e.what()};
            }
        }
        else if (key == "population.healthy")
        {
            c.healthy = parse_count(key, value);
            saw_population = true;
        }
        else if (key == "population.diabetic")
        {
            c.diabetic = parse_count(key, value);
            saw_population = true;
        }
        else
        {
            bool matched = false;
            for (std::size_t p = 0; p < 3 && !matched; ++p)
            {
                const auto pk = std::string{profile_keys[p]};
                if (key == "mix." + pk)
                {
                    fractions[p] = parse_number<double>(key, value);
                    saw_mix = matched = true;
                }
                else if (key == "counts." + pk + ".healthy")
                {
                    counts[p].healthy = parse_count(key, value);
                    saw_counts = matched = true;
                }
                else if (key == "counts." + pk + ".diabetic")
                {
                    counts[p].diabetic = parse_count(key, value);
                    saw_counts = matched = true;
                }
            }
            if (!matched)
                throw Error{Errc::InvalidConfig, "line " + std::to_string(line_no) + ": unknown key " + key};
        }
    }

    if (saw_counts && saw_mix)
        throw Error{Errc::InvalidConfig, "give either mix.* or counts.*, not both"};
    if (saw_mix)
    {
        c.fractions = fractions;
        c.counts.reset();
    }
    if (saw_counts)
    {
        c.counts = counts;
        if (!saw_population)
        {
            c.healthy = c.diabetic = 0;
            for (const auto& k : counts)
            {
                c.healthy += k.healthy;
                c.diabetic += k.diabetic;
            }
        }
    }
    c.validate();
    return c;
}

ScenarioConfig ScenarioConfig::parse(std::string_view text)
{
    return parse(text, ScenarioConfig{});
}

ScenarioConfig ScenarioConfig::load(const fs::path& path)
{
    return load(path, ScenarioConfig{});
}

ScenarioConfig ScenarioConfig::load(const fs::path& path, ScenarioConfig base)
{
    std::ifstream in{path};
    if (!in)
        throw Error{Errc::IoFailure, "cannot read " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), std::move(base));
}

// ---------------------------------------------------------------------------------------------
// Population

namespace
{
std::array<uint32_t, 3> largest_remainder(const std::array<double, 3>& fractions, uint32_t n)
{
    std::array<uint32_t, 3> out{};
    std::array<double, 3> rem{};
    uint32_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i)
    {
        const double quota = fractions[i] * n;
        out[i] = static_cast<uint32_t>(std::floor(quota + 1e-9));
        rem[i] = quota - out[i];
        assigned += out[i];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
    for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned)
        ++out[order[k]];
    return out;
}

/// Uniform draw from [0, n), rejection-sampled so the result does not depend on the standard
/// library's distribution implementation.
uint64_t bounded(std::mt19937_64& rng, uint64_t n)
{
    const uint64_t rem = (UINT64_MAX % n + 1) % n;
    if (rem == 0)
        return rng() % n;
    const uint64_t limit = 0 - rem;
    uint64_t x;
    do
        x = rng();
    while (x >= limit);
    return x % n;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[bounded(rng, i)]);
}

std::string dataset_id(char prefix, uint32_t n)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "%c#%03u", prefix, n);
    return buf;
}
}  // namespace

std::array<CohortCounts, 3> profile_counts(const ScenarioConfig& config)
{
    config.validate();
    if (config.counts)
        return *config.counts;
    const auto d = largest_remainder(config.fractions, config.diabetic);
    const auto h = largest_remainder(config.fractions, config.healthy);
    std::array<CohortCounts, 3> out{};
    for (std::size_t i = 0; i < 3; ++i)
        out[i] = {d[i], h[i]};
    return out;
}

std::vector<Member> build_population(const ScenarioConfig& config)
{
    const auto counts = profile_counts(config);
    std::vector<ProviderProfile> diabetic, healthy;
    for (std::size_t i = 0; i < 3; ++i)
    {
        diabetic.insert(diabetic.end(), counts[i].diabetic, all_provider_profiles[i]);
        healthy.insert(healthy.end(), counts[i].healthy, all_provider_profiles[i]);
    }
    std::mt19937_64 rng{config.seed};
    shuffle(diabetic, rng);
    shuffle(healthy, rng);

    std::vector<Member> out;
    out.reserve(diabetic.size() + healthy.size());
    for (uint32_t i = 0; i < diabetic.size(); ++i)
        out.push_back({dataset_id('D', i + 1), Cohort::disease_of("diabetes"), diabetic[i]});
    for (uint32_t i = 0; i < healthy.size(); ++i)
        out.push_back({dataset_id('H', i + 1), Cohort::healthy(), healthy[i]});
    return out;
}

bytes synthetic_payload(std::string_view id, std::size_t size)
{
    bytes out;
    out.reserve(size + 32);
    for (uint64_t block = 0; out.size() < size; ++block)
    {
        const auto h = sha256(Encoder{}.str("payload").str(id).u64(block).data());
        out.insert(out.end(), h.bytes.begin(), h.bytes.end());
    }
    out.resize(size);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Running

namespace
{
constexpr uint64_t nominal_record_count = 3 * 24 * 60 * 60;  // three days at 1 Hz

class Stopwatch
{
public:
    Stopwatch() : start_{std::chrono::steady_clock::now()} {}
    [[nodiscard]] double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/// Submits and mines one harness step, aborting the run when any of its transactions failed.
std::vector<ledger::Receipt> step(Platform& platform, const Address& sender, const Address& target,
    const std::vector<vm::Operation>& ops, std::string_view what)
{
    std::vector<Hash256> ids;
    for (const auto& op : ops)
        ids.push_back(platform.submit(sender, target, op));
    platform.mine();
    std::vector<ledger::Receipt> receipts;
    for (const auto& id : ids)
    {
        auto entry = platform.ledger().find(id);
        if (!entry || !entry->receipt.success())
            throw Error{Errc::RunAborted,
                std::string{what} + " failed: " +
                    std::string{entry ? to_string(entry->receipt.error) : std::string_view{"not mined"}}};
        receipts.push_back(std::move(entry->receipt));
    }
    return receipts;
}

std::string requester_note(const ScenarioReport& r)
{
    const auto& req2 = r.requester(RequesterProfile::Req2);
    const char* reference = r.config.name == "2" ? "68.96%" : "51.72%";
    return "Req2 obtains " + req2.fraction.exact() + " (" + req2.fraction.percent() +
           "%) with cohort-filtered matching; the reference figure of " + reference +
           " is not reproducible under a single consistent consent semantics.";
}
}  // namespace

const RequesterResult& ScenarioReport::requester(RequesterProfile r) const
{
    const auto it = std::ranges::find(requesters, r, &RequesterResult::id);
    if (it == requesters.end())
        throw Error{Errc::UnknownId, std::string{to_string(r)}};
    return *it;
}

ScenarioReport run_scenario(const ScenarioConfig& config, const fs::path& store_root)
{
    config.validate();
    ScenarioReport report;
    report.config = config;
    const auto population = build_population(config);

    auto schedule = std::make_shared<gas::GasSchedule>(gas::GasSchedule::calibrated());
    schedule->set_gas_price(config.gas_price);
    schedule->set_eth_usd(config.eth_usd);

    PlatformOptions options;
    options.ledger.gas_price = config.gas_price;
    options.schedule = schedule;
    options.store_root = store_root;
    options.token_seed = sha256(Encoder{}.str("tokens").u64(config.seed).data());
    options.difficulty = config.difficulty;
    Platform platform{options};

    const Wei prefund = ether(100);
    std::map<Address, std::pair<std::string, std::string>> actors;  // address -> (name, role)

    for (const auto& m : population)
    {
        const auto account = platform.create_account(ledger::Role::Provider, prefund);
        report.members.push_back({m, account.address, {}});
        actors.emplace(account.address, std::pair{m.dataset_id, std::string{"provider"}});
    }
    for (const auto r : all_requester_profiles)
    {
        RequesterResult rr;
        rr.id = r;
        rr.account = platform.create_account(ledger::Role::Requester, prefund).address;
        actors.emplace(rr.account, std::pair{std::string{to_string(r)}, std::string{"requester"}});
        report.requesters.push_back(std::move(rr));
    }
    platform.create_account(ledger::Role::Supervisor, Wei{});
    platform.mine();

    auto record = [&](const std::string& actor, std::string_view what, const Stopwatch& sw) {
        const auto seq = static_cast<uint64_t>(
            std::ranges::count(report.latency, actor, &LatencySample::actor));
        report.latency.push_back({actor, std::string{what}, seq, sw.ms()});
    };

    // Providers publish datasets and consent.
    for (auto& mr : report.members)
    {
        const auto& id = mr.member.dataset_id;
        const auto payload = synthetic_payload(id);
        matcher::DatasetMeta meta;
        meta.dataset_id = id;
        meta.cohort = mr.member.cohort;
        meta.content_digest = sha256(payload);
        meta.record_count = nominal_record_count;
        {
            Stopwatch sw;
            try
            {
                mr.contract = platform.publish_dataset(mr.provider, meta, payload);
            }
            catch (const Error& e)
            {
                throw Error{Errc::RunAborted, "deploy " + id + ": " + e.what()};
            }
            record(id, "deploy", sw);
        }
        const auto consent = consent_template(mr.member.profile);
        {
            Stopwatch sw;
            step(platform, mr.provider, mr.contract, {vm::UploadPrimaryOp{*consent.primary}}, "upload primary " + id);
            record(id, "upload_primary", sw);
        }
        if (!consent.secondary.empty())
        {
            Stopwatch sw;
            step(platform, mr.provider, mr.contract, {vm::UploadSecondaryOp{consent.secondary}},
                "upload secondary " + id);
            record(id, "upload_secondary", sw);
        }
    }

    // Requesters discover, query, access and redeem.
    std::vector<std::pair<ConsentStatement, matcher::DatasetMeta>> view;
    for (const auto& mr : report.members)
        view.emplace_back(consent_template(mr.member.profile), platform.contract(mr.contract)->dataset);

    for (auto& rr : report.requesters)
    {
        const auto name = std::string{to_string(rr.id)};
        const auto purpose = purpose_template(rr.id);
        const auto expected = matcher::batch_match(view, purpose, config.date);
        std::map<std::string, MatchDecision> expected_by_id(expected.decisions.begin(), expected.decisions.end());

        for (const auto& [meta, contract] : platform.datastore().discover(purpose.target_cohort))
        {
            {
                Stopwatch sw;
                step(platform, rr.account, contract,
                    {vm::PurposeCategoryOp{purpose.category, purpose.subcategories, purpose.target_cohort},
                        vm::ProfitOp{purpose.profit_intent}},
                    "query " + meta.dataset_id);
                record(name, "query", sw);
            }
            ledger::Receipt access;
            Hash256 access_id;
            {
                Stopwatch sw;
                access_id = platform.submit(rr.account, contract, vm::AccessDataOp{config.date});
                platform.mine();
                access = platform.ledger().find(access_id)->receipt;
                if (!access.success())
                    throw Error{Errc::RunAborted,
                        "access " + meta.dataset_id + " failed: " + std::string{to_string(access.error)}};
                record(name, "access", sw);
            }
            const auto outcome = vm::decode_access_outcome(access.output);
            if (outcome.decision != expected_by_id.at(meta.dataset_id))
                throw Error{Errc::RunAborted, "on-chain decision for " + meta.dataset_id + " disagrees with the matcher"};
            if (!outcome.decision.granted)
                continue;
            rr.matched.push_back(meta.dataset_id);
            const auto token = platform.token_for(access_id);
            if (!token)
                throw Error{Errc::RunAborted, "no token minted for " + meta.dataset_id};
            Stopwatch sw;
            bytes payload;
            try
            {
                payload = platform.redeem(rr.account, token->token_id);
            }
            catch (const Error& e)
            {
                throw Error{Errc::RunAborted, "redeem " + meta.dataset_id + ": " + e.what()};
            }
            if (sha256(payload) != meta.content_digest)
                throw Error{Errc::RunAborted, "redeemed payload digest mismatch for " + meta.dataset_id};
            record(name, "redeem", sw);
        }
        rr.fraction = {rr.matched.size(), report.members.size()};
        if (rr.fraction.granted != expected.fraction.granted)
            throw Error{Errc::RunAborted, name + ": on-chain grants disagree with the matcher"};

        for (std::size_t i = 0; i < report.members.size(); ++i)
        {
            const auto& m = report.members[i].member;
            report.matching.push_back({m.dataset_id, m.cohort, m.profile, rr.id, expected.decisions[i].second});
        }
    }

    // Gas and contacts straight from the chain.
    const auto chain = platform.ledger().chain();
    std::map<Address, ActorGas> gas;
    std::map<Address, std::set<Address>> touched;
    for (const auto& b : chain)
    {
        for (std::size_t i = 0; i < b.transactions.size(); ++i)
        {
            const auto& tx = b.transactions[i];
            const auto& rc = b.receipts[i];
            auto& g = gas[tx.sender];
            ++g.transactions;
            g.transaction_gas += rc.transaction_gas;
            g.execution_gas += rc.execution_gas;
            g.fee += rc.fee;
            if (!rc.success())
                ++report.chain.failed_transactions;
            if (tx.target)
                touched[tx.sender].insert(*tx.target);
        }
        report.chain.transactions += b.transactions.size();
    }
    auto emit_gas = [&](const Address& a, std::string profile) {
        auto g = gas[a];
        const auto& [name, role] = actors.at(a);
        g.actor = name;
        g.role = role;
        g.profile = std::move(profile);
        const auto rounded = gas::round_ether(gas::ether_cost(g.execution_gas, config.gas_price), gas::table_ether_decimals);
        g.ether = gas::format_ether(rounded, gas::table_ether_decimals);
        g.usd = gas::usd_cost(rounded, config.eth_usd);
        report.gas.push_back(std::move(g));
    };
    for (const auto& mr : report.members)
        emit_gas(mr.provider, std::string{to_string(mr.member.profile)});
    for (auto& rr : report.requesters)
    {
        emit_gas(rr.account, "");
        rr.contacts = touched[rr.account].size();
    }

    std::map<std::string, ActorLatency> lat;
    for (const auto& s : report.latency)
    {
        auto& l = lat[s.actor];
        l.actor = s.actor;
        l.total_ms += s.ms;
    }
    for (const auto& mr : report.members)
    {
        auto l = lat[mr.member.dataset_id];
        l.interactions = 1;
        l.mean_ms = l.total_ms;
        report.latency_summary.push_back(l);
    }
    for (const auto& rr : report.requesters)
    {
        auto l = lat[std::string{to_string(rr.id)}];
        l.actor = to_string(rr.id);
        l.interactions = rr.contacts;
        l.mean_ms = rr.contacts ? l.total_ms / static_cast<double>(rr.contacts) : 0.0;
        report.latency_summary.push_back(l);
    }

    const auto validity = ledger::validate_chain(chain, vm::ContractVm{schedule}, options.ledger, config.difficulty);
    report.chain.blocks = chain.size();
    report.chain.valid = validity.ok;
    report.chain.head_hash = chain.back().block_hash.hex();
    report.chain.state_hash = validity.state_hash.hex();
    if (!validity.ok)
        throw Error{Errc::RunAborted, "chain failed validation: " + validity.reason};
    report.chain_export = ledger::export_chain(chain);
    report.tokens_json = platform.datastore().tokens_json();

    if (config.name == "2" || config.name == "3")
        report.notes.push_back(requester_note(report));
    return report;
}

uint64_t contact_count(RequesterProfile requester, const ScenarioReport& report)
{
    return report.requester(requester).contacts;
}

// ---------------------------------------------------------------------------------------------
// Reports

namespace
{
std::string fixed(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string reasons_text(const MatchDecision& d)
{
    std::string out;
    for (const auto r : d.reasons)
    {
        if (!out.empty())
            out += ';';
        out += matcher::to_string(r);
    }
    return out;
}

void write_file(const fs::path& path, std::string_view content)
{
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error{Errc::IoFailure, "cannot write " + path.string()};
}
}  // namespace

std::string access_csv(const ScenarioReport& report)
{
    std::string out = "requester_id,granted,total,fraction_exact,fraction_pct\n";
    for (const auto& r : report.requesters)
        out += std::string{to_string(r.id)} + ',' + std::to_string(r.fraction.granted) + ',' +
               std::to_string(r.fraction.total) + ',' + r.fraction.exact() + ',' + r.fraction.percent() + '\n';
    return out;
}

std::string gas_csv(const ScenarioReport& report)
{
    std::string out = "actor,role,profile,transactions,transaction_gas,execution_gas,fee_wei,ether,usd\n";
    for (const auto& g : report.gas)
        out += g.actor + ',' + g.role + ',' + g.profile + ',' + std::to_string(g.transactions) + ',' +
               std::to_string(g.transaction_gas) + ',' + std::to_string(g.execution_gas) + ',' + g.fee.to_string() +
               ',' + g.ether + ',' + gas::format_usd(g.usd) + '\n';
    return out;
}

std::string latency_csv(const ScenarioReport& report)
{
    std::string out = "actor,step,sequence,elapsed_ms\n";
    for (const auto& s : report.latency)
        out += s.actor + ',' + s.step + ',' + std::to_string(s.sequence) + ',' + fixed(s.ms, 3) + '\n';
    return out;
}

std::string matching_csv(const ScenarioReport& report)
{
    std::string out = "dataset_id,cohort,profile,requester,granted,reasons\n";
    for (const auto& c : report.matching)
        out += c.dataset_id + ',' + c.cohort.to_string() + ',' + std::string{to_string(c.profile)} + ',' +
               std::string{to_string(c.requester)} + ',' + (c.decision.granted ? "true" : "false") + ',' +
               reasons_text(c.decision) + '\n';
    return out;
}

std::string report_json(const ScenarioReport& report)
{
    using nlohmann::ordered_json;
    const auto& c = report.config;
    ordered_json doc;
    doc["scenario"] = c.name;
    doc["seed"] = c.seed;
    doc["difficulty"] = c.difficulty;
    doc["gas_price_wei"] = c.gas_price.to_string();
    doc["eth_usd"] = c.eth_usd;
    doc["date"] = format_date(c.date);

    const auto counts = profile_counts(c);
    auto profiles = ordered_json::array();
    for (std::size_t i = 0; i < 3; ++i)
        profiles.push_back({{"profile", to_string(all_provider_profiles[i])}, {"diabetic", counts[i].diabetic},
            {"healthy", counts[i].healthy}});
    doc["population"] = {{"diabetic", c.diabetic}, {"healthy", c.healthy}, {"profiles", profiles}};

    auto requesters = ordered_json::array();
    for (const auto& r : report.requesters)
        requesters.push_back({{"id", to_string(r.id)}, {"granted", r.fraction.granted}, {"total", r.fraction.total},
            {"fraction_exact", r.fraction.exact()}, {"fraction_pct", r.fraction.percent()},
            {"fraction_decimal", r.fraction.decimal()}, {"contacts", r.contacts}, {"matched", r.matched}});
    doc["requesters"] = requesters;

    auto gas = ordered_json::array();
    for (const auto& g : report.gas)
        gas.push_back({{"actor", g.actor}, {"role", g.role}, {"profile", g.profile}, {"transactions", g.transactions},
            {"transaction_gas", g.transaction_gas}, {"execution_gas", g.execution_gas},
            {"fee_wei", g.fee.to_string()}, {"ether", g.ether}, {"usd", gas::format_usd(g.usd)}});
    doc["gas"] = gas;

    doc["chain"] = {{"blocks", report.chain.blocks}, {"transactions", report.chain.transactions},
        {"failed_transactions", report.chain.failed_transactions}, {"valid", report.chain.valid},
        {"head_hash", report.chain.head_hash}, {"state_hash", report.chain.state_hash}};
    doc["notes"] = report.notes;
    return doc.dump(2) + '\n';
}

void emit_report(const ScenarioReport& report, const fs::path& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error{Errc::IoFailure, out_dir.string() + ": " + ec.message()};
    write_file(out_dir / "access.csv", access_csv(report));
    write_file(out_dir / "gas.csv", gas_csv(report));
    write_file(out_dir / "latency.csv", latency_csv(report));
    write_file(out_dir / "matching.csv", matching_csv(report));
    write_file(out_dir / "report.json", report_json(report));
    write_file(out_dir / "chain.txt", report.chain_export);
    write_file(out_dir / "tokens.json", report.tokens_json + '\n');
}
}  // namespace dynconsent::harness
