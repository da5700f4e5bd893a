// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero if any fails.

#include "support.hpp"
#include <dynconsent/contract_vm.hpp>
#include <dynconsent/crypto.hpp>
#include <dynconsent/gas_meter.hpp>
#include <dynconsent/harness.hpp>
#include <dynconsent/platform.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace dynconsent;
using namespace dynconsent::harness;
using dynconsent::test::Gen;
using dynconsent::test::TempDir;

namespace
{
// Pinned tolerances.
constexpr double max_scenario_seconds = 10.0;
constexpr double usd_row_tolerance = 0.001;         // relative, 12 rows
constexpr double usd_deployment_tolerance = 0.02;   // relative, Deployment row
constexpr double secondary_delta_usd = 0.00592;     // exact at 5 decimals
constexpr double deployment_reference_usd = 2.92;
constexpr double deployment_tolerance = 0.02;       // relative
constexpr double population_reference_usd = 87.0;
constexpr double population_tolerance_usd = 1.0;
constexpr int tamper_trials = 1000;
constexpr int latency_repetitions = 10;
constexpr double min_r_squared = 0.95;
// Latency runs mine with proof of work so each interaction includes block production. At
// difficulty 0 a step takes tens of microseconds and scheduler jitter dominates.
constexpr uint32_t latency_difficulty = 12;

struct Outcome
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(double v, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

const ScenarioReport& scenario(int n, double* seconds = nullptr)
{
    static TempDir dir{"acceptance"};
    static std::map<int, std::pair<ScenarioReport, double>> cache;
    if (!cache.contains(n))
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = run_scenario(ScenarioConfig::scenario(n), dir / ("s" + std::to_string(n)));
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        cache.emplace(n, std::pair{std::move(r), dt.count()});
    }
    if (seconds)
        *seconds = cache.at(n).second;
    return cache.at(n).first;
}

std::shared_ptr<gas::GasSchedule> calibrated()
{
    return std::make_shared<gas::GasSchedule>(gas::GasSchedule::calibrated());
}

Outcome ac1()
{
    Outcome o;
    const uint64_t expected[3][3] = {{29, 20, 9}, {12, 17, 9}, {9, 13, 9}};
    std::string summary;
    for (int n = 1; n <= 3; ++n)
    {
        double seconds = 0;
        const auto& r = scenario(n, &seconds);
        for (const auto req : all_requester_profiles)
        {
            const auto f = r.requester(req).fraction;
            const auto want = expected[n - 1][static_cast<std::size_t>(req)];
            o.require(f.granted == want && f.total == 29, "S" + std::to_string(n) + " " +
                                                              std::string{to_string(req)} + " = " + f.exact() +
                                                              ", expected " + std::to_string(want) + "/29");
        }
        o.require(seconds < max_scenario_seconds, "S" + std::to_string(n) + " took " + fmt(seconds, 2) + " s");
        summary += "S" + std::to_string(n) + " " + r.requester(RequesterProfile::Req1).fraction.exact() + " " +
                   r.requester(RequesterProfile::Req2).fraction.exact() + " " +
                   r.requester(RequesterProfile::Req3).fraction.exact() + " (" + fmt(seconds, 2) + " s); ";
    }
    if (o.pass)
        o.detail = summary + "S1 Req2 " + scenario(1).requester(RequesterProfile::Req2).fraction.percent() + "%";
    return o;
}

Outcome ac2()
{
    Outcome o;
    // [profile][requester][cohort: 0 diabetic, 1 healthy]
    const bool grid[3][3][2] = {
        {{true, true}, {false, true}, {true, false}},
        {{false, false}, {false, true}, {true, false}},
        {{false, false}, {false, false}, {true, false}},
    };
    const ontology::Date day = ontology::parse_date("2026-01-01");
    for (const auto p : all_provider_profiles)
        for (const auto r : all_requester_profiles)
            for (int c = 0; c < 2; ++c)
            {
                matcher::DatasetMeta meta;
                meta.dataset_id = c == 0 ? "D#X" : "H#X";
                meta.cohort = c == 0 ? Cohort::disease_of("diabetes") : Cohort::healthy();
                const auto d = matcher::evaluate(consent_template(p), purpose_template(r), meta, day);
                o.require(d.granted == grid[static_cast<std::size_t>(p)][static_cast<std::size_t>(r)][c],
                    std::string{to_string(p)} + "/" + std::string{to_string(r)} + "/" + meta.cohort.to_string());
            }

    const auto& s1 = scenario(1);
    const std::map<std::string, std::array<bool, 3>> rows = {
        {"D#002", {true, false, true}},
        {"H#002", {true, true, false}},
    };
    for (const auto& [id, want] : rows)
        for (const auto& cell : s1.matching)
            if (cell.dataset_id == id)
                o.require(cell.decision.granted == want[static_cast<std::size_t>(cell.requester)],
                    "S1 " + id + " " + std::string{to_string(cell.requester)});
    if (o.pass)
        o.detail = "18-cell grid; S1 D#002 Y/N/Y, H#002 Y/Y/N";
    return o;
}

struct PublishedRow
{
    const char* action;
    uint64_t tx;
    uint64_t exec;
    const char* ether;
    double usd;
};
// Published cost table, typed in by hand.
const PublishedRow published[] = {
    {"Deployment", 2372326, 1765926, "0.0141274", 2.92437},
    {"UploadDataPrimaryCategory", 88129, 64745, "0.000518", 0.10567},
    {"UploadDataSecondaryCategory", 26814, 3622, "0.000029", 0.00592},
    {"UploadDataRequirements", 60053, 36285, "0.0002903", 0.05922},
    {"giveResearchPurpose", 87280, 63896, "0.0005112", 0.10428},
    {"giveHMBPurpose", 45902, 22198, "0.0001776", 0.03623},
    {"giveClinicalPurpose", 44699, 21635, "0.0001731", 0.03531},
    {"giveGeographicSpecificRestriction", 25182, 2374, "0.000019", 0.00388},
    {"giveProfit", 44723, 21723, "0.0001738", 0.03546},
    {"givePerson", 45357, 22101, "0.0001768", 0.03606},
    {"giveDataRequesterTerms", 46265, 22177, "0.0001774", 0.03619},
    {"AccessData (Max)", 84341, 60253, "0.000482", 0.09833},
    {"AccessData (Min)", 32543, 8455, "0.0000676", 0.01379},
};

double row_usd(uint64_t exec)
{
    return gas::usd_cost(gas::round_ether(gas::ether_cost(exec, gwei(8)), gas::table_ether_decimals), 204.0);
}

Outcome ac3()
{
    Outcome o;
    const auto s = gas::GasSchedule::calibrated();
    double worst = 0;
    for (const auto& p : published)
    {
        const std::string_view ether{p.ether};
        const auto decimals = static_cast<unsigned>(ether.size() - ether.find('.') - 1);
        const auto cost = s.gas_of(p.action);
        o.require(cost.transaction_gas == p.tx && cost.execution_gas == p.exec, std::string{p.action} + " gas");
        const auto computed = gas::format_ether(gas::ether_cost(p.exec, gwei(8)), decimals);
        o.require(computed == ether, std::string{p.action} + " ether " + computed + " vs " + p.ether);
        const double rel = std::fabs(row_usd(p.exec) - p.usd) / p.usd;
        const bool deploy = std::string_view{p.action} == "Deployment";
        o.require(rel <= (deploy ? usd_deployment_tolerance : usd_row_tolerance),
            std::string{p.action} + " usd off by " + fmt(rel * 100, 3) + "%");
        if (!deploy)
            worst = std::max(worst, rel);
    }
    if (o.pass)
        o.detail = "13/13 ether exact; worst USD row " + fmt(worst * 100, 3) + "%, Deployment " +
                   fmt(std::fabs(row_usd(1765926) - 2.92437) / 2.92437 * 100, 2) + "%; deployment 1765926/2372326";
    return o;
}

Outcome ac4()
{
    Outcome o;
    const auto s = gas::GasSchedule::calibrated();
    // Consent submission cost per provider as the sum of its rows' USD costs.
    const double open = row_usd(s.gas_of(gas::fn::upload_primary).execution_gas);
    const double very = open + row_usd(s.gas_of(gas::fn::upload_secondary).execution_gas);
    const double delta = std::round((very - open) * 1e5) / 1e5;
    o.require(std::fabs(delta - secondary_delta_usd) < 5e-7, "consent delta $" + fmt(delta, 5));

    // The same delta, observed as gas on the chain of a mixed scenario.
    const auto& r = scenario(2);
    std::map<std::string, uint64_t> by_profile;
    for (const auto& g : r.gas)
        if (g.role == "provider")
            by_profile[g.profile] = g.execution_gas;
    o.require(by_profile["VeryRestrictive"] - by_profile["Open"] == s.gas_of(gas::fn::upload_secondary).execution_gas,
        "on-chain provider gas delta");

    const double deploy = row_usd(s.gas_of(gas::fn::deployment).execution_gas);
    o.require(std::fabs(deploy - deployment_reference_usd) / deployment_reference_usd <= deployment_tolerance,
        "deployment $" + fmt(deploy, 5));

    double population = 0;
    for (const auto& g : scenario(1).gas)
        if (g.role == "provider")
            population += g.usd;
    o.require(std::fabs(population - population_reference_usd) <= population_tolerance_usd,
        "population $" + fmt(population, 2));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string{"delta $"} + fmt(delta, 5) + " (" +
                fmt(delta / open * 100, 1) + "% of primary upload), deployment $" + fmt(deploy, 5) +
                ", 29-provider deploy+consent $" + fmt(population, 2);
    return o;
}

Outcome ac5()
{
    Outcome o;
    for (int n = 1; n <= 3; ++n)
    {
        const auto& r = scenario(n);
        const uint64_t want[3] = {29, 20, 9};
        for (const auto req : all_requester_profiles)
        {
            const auto got = contact_count(req, r);
            o.require(got == want[static_cast<std::size_t>(req)],
                "S" + std::to_string(n) + " " + std::string{to_string(req)} + " contacted " + std::to_string(got));
        }
    }
    if (o.pass)
        o.detail = "Req1 29, Req2 20, Req3 9 in all scenarios";
    return o;
}

Outcome ac6()
{
    Outcome o;
    const vm::ContractVm prototype{calibrated()};
    const auto& r = scenario(2);
    const auto chain = ledger::import_chain(r.chain_export);

    // Tamper evidence.
    Gen gen{6};
    int detected = 0;
    std::vector<bytes> encoded;
    for (const auto& b : chain)
        encoded.push_back(b.encode());
    for (int t = 0; t < tamper_trials; ++t)
    {
        const auto h = gen.range(0, encoded.size() - 1);
        const auto bit = gen.range(0, encoded[h].size() * 8 - 1);
        auto& blk = encoded[h];
        blk[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        std::string text;
        for (const auto& e : encoded)
            text += to_hex(e) + "\n";
        blk[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
        detected += !ledger::validate_chain_text(text, prototype).ok;
    }
    o.require(detected == tamper_trials, std::to_string(detected) + "/" + std::to_string(tamper_trials) + " tampers detected");

    // Replay determinism.
    const auto a = ledger::validate_chain(chain, prototype);
    const auto b = ledger::validate_chain(chain, prototype);
    o.require(a.ok && b.ok && a.state_hash == b.state_hash && a.state_hash.hex() == r.chain.state_hash,
        "replay state hash differs");

    // Conservation and FIFO on a live platform.
    TempDir dir{"ac6"};
    Platform p{PlatformOptions{{}, calibrated(), dir / "store", {}, 0}};
    std::vector<Address> providers;
    Wei prefund{};
    for (int i = 0; i < 5; ++i)
    {
        providers.push_back(p.create_account(ledger::Role::Provider, ether(10)).address);
        prefund += ether(10);
    }
    const auto req = p.create_account(ledger::Role::Requester, ether(10)).address;
    prefund += ether(10);
    p.mine();
    std::vector<Address> contracts;
    for (std::size_t i = 0; i < providers.size(); ++i)
    {
        matcher::DatasetMeta m;
        m.dataset_id = "H#00" + std::to_string(i);
        m.cohort = Cohort::healthy();
        m.owner = providers[i];
        const auto payload = synthetic_payload(m.dataset_id);
        m.content_digest = sha256(payload);
        contracts.push_back(p.publish_dataset(providers[i], m, payload));
    }
    std::vector<Hash256> submitted;
    for (std::size_t i = 0; i < contracts.size(); ++i)
    {
        submitted.push_back(p.submit(providers[i], contracts[i],
            vm::UploadPrimaryOp{ontology::ConsentPrimaryCategory::make(ontology::ConsentCode::GRU_CC)}));
        submitted.push_back(p.submit(req, contracts[i], vm::PurposeCategoryOp{ontology::PurposeCode::GRU, {}, {}}));
    }
    const auto block = p.mine();
    std::vector<Hash256> mined;
    for (const auto& tx : block.transactions)
        mined.push_back(tx.tx_id);
    o.require(mined == submitted, "block order differs from submission order");
    o.require(p.ledger().total_balance() + p.ledger().fees_collected() == prefund, "balances not conserved");

    if (o.pass)
        o.detail = std::to_string(detected) + "/" + std::to_string(tamper_trials) +
                   " bit flips detected; replay state " + a.state_hash.hex().substr(0, 16) + "; conservation and FIFO hold";
    return o;
}

Outcome ac7()
{
    Outcome o;
    Gen gen{77};
    uint64_t checked = 0;
    for (int run = 0; run < 10; ++run)
    {
        TempDir dir{"ac7"};
        Platform p{PlatformOptions{{}, calibrated(), dir / "store", {}, 0}};
        std::vector<Address> providers, requesters, contracts;
        for (int i = 0; i < 4; ++i)
            providers.push_back(p.create_account(ledger::Role::Provider, ether(10)).address);
        for (int i = 0; i < 3; ++i)
            requesters.push_back(p.create_account(ledger::Role::Requester, ether(10)).address);
        p.mine();
        for (std::size_t i = 0; i < providers.size(); ++i)
        {
            matcher::DatasetMeta m;
            m.dataset_id = "D#00" + std::to_string(i);
            m.cohort = Cohort::disease_of("diabetes");
            m.owner = providers[i];
            const auto payload = synthetic_payload(m.dataset_id + std::to_string(run));
            m.content_digest = sha256(payload);
            contracts.push_back(p.publish_dataset(providers[i], m, payload));
            p.transact(providers[i], contracts.back(),
                vm::UploadPrimaryOp{ontology::ConsentPrimaryCategory::make(ontology::ConsentCode::GRU_CC)});
        }

        std::map<Address, std::vector<std::pair<Address, Hash256>>> issued;  // contract -> (requester, token)
        std::set<Address> dead;
        uint64_t last_height = p.ledger().height();
        uint64_t last_txs = 0;
        for (int step = 0; step < 60; ++step)
        {
            const auto i = gen.range(0, contracts.size() - 1);
            const auto& c = contracts[i];
            const auto& who = gen.pick(requesters);
            const auto action = gen.range(0, 9);
            if (action < 6 && !p.contract(c)->revoked)
            {
                p.submit(who, c, vm::ResetPurposeOp{});
                p.submit(who, c, vm::PurposeCategoryOp{ontology::PurposeCode::GRU, {}, Cohort::any()});
                p.submit(who, c, vm::ProfitOp{gen.coin()});
                p.mine();
                const auto tx = p.submit(who, c, vm::AccessDataOp{ontology::parse_date("2026-01-01")});
                p.mine();
                if (const auto t = p.token_for(tx))
                {
                    issued[c].emplace_back(who, t->token_id);
                    if (!dead.contains(c))
                        o.require(p.redeem(who, t->token_id).size() == 4096, "fresh token failed");
                }
            }
            else if (action == 6 && !p.contract(c)->revoked)
            {
                p.transact(providers[i], c, vm::RevokeOp{});
                dead.insert(c);
            }
            else if (action == 7 && !dead.contains(c))
            {
                p.delete_dataset(providers[i], c);
                dead.insert(c);
            }

            for (const auto& dc : dead)
                for (const auto& [holder, token] : issued[dc])
                {
                    ++checked;
                    const auto code = test::error_of([&] { p.redeem(holder, token); });
                    o.require(code == Errc::InvalidToken || code == Errc::Deleted, "token redeemed after revoke/delete");
                }

            uint64_t txs = 0;
            for (const auto& b : p.ledger().chain())
                txs += b.transactions.size();
            o.require(p.ledger().height() >= last_height && txs >= last_txs, "history shrank");
            last_height = p.ledger().height();
            last_txs = txs;
        }
    }
    if (o.pass)
        o.detail = std::to_string(checked) + " post-revocation redemptions refused over 10 randomized runs";
    return o;
}

Outcome ac8()
{
    Outcome o;
    std::vector<double> xs, ys;
    TempDir dir{"ac8"};
    std::map<uint64_t, double> mean_total;
    for (int rep = 0; rep < latency_repetitions; ++rep)
    {
        auto cfg = ScenarioConfig::scenario(1);
        cfg.difficulty = latency_difficulty;
        const auto r = run_scenario(cfg, dir / std::to_string(rep));
        for (const auto& l : r.latency_summary)
            if (l.actor.starts_with("Req"))
            {
                xs.push_back(static_cast<double>(l.interactions));
                ys.push_back(l.total_ms);
                mean_total[l.interactions] += l.total_ms / latency_repetitions;
            }
    }
    const auto n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 0.0;
    o.require(xs.size() == 3u * latency_repetitions, "expected 30 samples");
    o.require(r2 >= min_r_squared, "R^2 = " + fmt(r2, 4));
    std::string means;
    for (const auto& [contacts, ms] : mean_total)
    {
        double lo = 1e300, hi = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (xs[i] == static_cast<double>(contacts))
                lo = std::min(lo, ys[i]), hi = std::max(hi, ys[i]);
        means += std::to_string(contacts) + ":" + fmt(ms, 2) + "ms [" + fmt(lo, 2) + "," + fmt(hi, 2) + "] ";
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::string{"difficulty "} + std::to_string(latency_difficulty) +
                ", R^2 " + fmt(r2, 4) + ", slope " + fmt(slope, 4) +
                " ms/contact, mean totals " + means;
    return o;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in{p, std::ios::binary};
    return {std::istreambuf_iterator<char>{in}, {}};
}

Outcome ac9()
{
    Outcome o;
    TempDir dir{"ac9"};
    for (const auto* out : {"a", "b"})
    {
        const auto cmd = std::string{DYNCONSENT_CLI} + " run --scenario 2 --seed 42 --out " + (dir / out).string() +
                         " > /dev/null";
        o.require(std::system(cmd.c_str()) == 0, std::string{"run "} + out + " failed");
    }
    int same = 0;
    for (const auto* f : {"access.csv", "gas.csv", "matching.csv", "report.json", "chain.txt", "tokens.json"})
    {
        const auto a = slurp(dir / "a" / f);
        const bool eq = !a.empty() && a == slurp(dir / "b" / f);
        o.require(eq, std::string{f} + " differs");
        same += eq;
    }
    if (o.pass)
        o.detail = std::to_string(same) + "/6 report files byte-identical (latency.csv is wall-clock)";
    return o;
}
}  // namespace

int main()
{
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria)
    {
        Outcome o;
        try
        {
            o = check();
        }
        catch (const std::exception& e)
        {
            o.pass = false;
            o.detail = std::string{"exception: "} + e.what();
        }
        std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
