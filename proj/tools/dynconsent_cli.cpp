// dynconsent: Consent-driven data sharing on a simulated ledger
// Copyright 2026 The dynconsent Authors.
// SPDX-License-Identifier: Apache-2.0

#include <dynconsent/contract_vm.hpp>
#include <dynconsent/errors.hpp>
#include <dynconsent/gas_meter.hpp>
#include <dynconsent/harness.hpp>
#include <dynconsent/ledger.hpp>
#include <dynconsent/matcher.hpp>
#include <dynconsent/ontology.hpp>
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
using namespace dynconsent;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct RunArgs
{
    std::string scenario;
    std::optional<uint64_t> seed;
    std::string out = "out";
    std::string config;
    std::optional<uint32_t> difficulty;
};

int cmd_run(const RunArgs& a)
{
    harness::ScenarioConfig config;
    try
    {
        if (a.scenario != "custom")
            config = harness::ScenarioConfig::scenario(std::stoi(a.scenario));
        else if (a.config.empty())
        {
            std::cerr << "run --scenario custom requires --config\n";
            return exit_usage;
        }
        if (!a.config.empty())
            config = harness::ScenarioConfig::load(a.config, config);
        if (a.seed)
            config.seed = *a.seed;
        if (a.difficulty)
            config.difficulty = *a.difficulty;
        config.validate();
    }
    catch (const Error& e)
    {
        std::cerr << "config: " << e.what() << '\n';
        return e.code() == Errc::IoFailure ? exit_failed : exit_usage;
    }

    try
    {
        const std::filesystem::path out{a.out};
        const auto report = harness::run_scenario(config, out / "store");
        harness::emit_report(report, out);
        std::cout << harness::access_csv(report);
        for (const auto& l : report.latency_summary)
            if (l.interactions > 1)
                std::printf("latency %s: %llu interactions, %.3f ms mean\n", l.actor.c_str(),
                    static_cast<unsigned long long>(l.interactions), l.mean_ms);
        for (const auto& n : report.notes)
            std::cout << "note: " << n << '\n';
        std::cout << "chain: " << report.chain.blocks << " blocks, valid\n";
        return exit_ok;
    }
    catch (const Error& e)
    {
        std::cerr << "run failed: " << e.what() << '\n';
        return exit_failed;
    }
}

int cmd_validate(const std::string& file, uint32_t difficulty)
{
    std::ifstream in{file};
    if (!in)
    {
        std::cerr << "cannot read " << file << '\n';
        return exit_failed;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const vm::ContractVm prototype{std::make_shared<const gas::GasSchedule>(gas::GasSchedule::calibrated())};
    const auto r = ledger::validate_chain_text(ss.str(), prototype, {}, difficulty);
    if (r.ok)
    {
        std::cout << "OK " << r.blocks_checked << " blocks, state " << r.state_hash.hex() << '\n';
        return exit_ok;
    }
    std::cout << "INVALID at height " << (r.first_invalid_height ? std::to_string(*r.first_invalid_height) : "?")
              << ": " << r.reason << '\n';
    return exit_failed;
}

int cmd_gas_table()
{
    const auto rows = gas::table_parity(gas::GasSchedule::calibrated());
    bool ok = true;
    std::printf("%-36s %10s %10s %12s %12s %10s %10s %s\n", "function", "tx_gas", "exec_gas", "ether",
        "ref_ether", "usd", "ref_usd", "status");
    for (const auto& r : rows)
    {
        ok = ok && r.ok();
        std::printf("%-36s %10llu %10llu %12s %12s %10s %10s %s\n", r.function_id.c_str(),
            static_cast<unsigned long long>(r.cost.transaction_gas),
            static_cast<unsigned long long>(r.cost.execution_gas), r.computed_ether.c_str(),
            r.reference_ether.c_str(), gas::format_usd(r.computed_usd).c_str(),
            gas::format_usd(r.reference_usd).c_str(), r.ok() ? "ok" : "MISMATCH");
    }
    return ok ? exit_ok : exit_failed;
}

struct MatchArgs
{
    std::string consent;
    std::string purpose;
    bool profit = false;
    std::string geography;
    std::string cohort = "any";
    std::string dataset_cohort = "healthy";
    std::string date = "2026-01-01";
    bool all_reasons = false;
};

int cmd_match(const MatchArgs& a)
{
    ontology::ConsentStatement consent;
    ontology::PurposeStatement purpose;
    matcher::DatasetMeta meta;
    ontology::Date now;
    try
    {
        consent = ontology::parse_consent_statement(a.consent);
        const auto code = ontology::parse_purpose_code(a.purpose);
        purpose.category = code.category;
        purpose.subcategories = code.subcategories;
        purpose.profit_intent = a.profit;
        purpose.requester_geography = to_upper(trim(a.geography));
        purpose.target_cohort = ontology::Cohort::parse(a.cohort);
        purpose.validate();
        meta.dataset_id = "cli";
        meta.cohort = ontology::Cohort::parse(a.dataset_cohort);
        meta.validate();
        now = ontology::parse_date(a.date);
    }
    catch (const Error& e)
    {
        std::cerr << e.what() << '\n';
        return exit_usage;
    }
    const auto d = matcher::evaluate(consent, purpose, meta, now,
        a.all_reasons ? matcher::ReasonDetail::AllFailures : matcher::ReasonDetail::FirstFailure);
    if (d.granted)
        std::cout << "Granted\n";
    else
    {
        std::cout << "Denied:";
        for (const auto r : d.reasons)
            std::cout << ' ' << matcher::to_string(r);
        std::cout << '\n';
    }
    return exit_ok;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Consent-driven data sharing on a simulated ledger"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write reports");
    run_cmd->add_option("--scenario", run.scenario, "1, 2, 3 or custom")
        ->required()
        ->check(CLI::IsMember({"1", "2", "3", "custom"}));
    run_cmd->add_option("--seed", run.seed, "Population shuffle seed");
    run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--config", run.config, "key = value scenario file");
    run_cmd->add_option("--difficulty", run.difficulty, "Proof-of-work leading zero bits")
        ->check(CLI::Range(0, 32));

    std::string chain_file;
    uint32_t min_difficulty = 0;
    auto* validate_cmd = app.add_subcommand("validate-chain", "Verify an exported chain");
    validate_cmd->add_option("file", chain_file, "Chain export")->required();
    validate_cmd->add_option("--difficulty", min_difficulty, "Minimum difficulty required");

    auto* gas_cmd = app.add_subcommand("gas-table", "Check the gas schedule against its reference columns");

    MatchArgs match;
    auto* match_cmd = app.add_subcommand("match", "Evaluate one consent against one purpose");
    match_cmd->add_option("--consent", match.consent, "e.g. HMB-CC or DS-diabetes-CC,NPU")->required();
    match_cmd->add_option("--purpose", match.purpose, "e.g. HMB:FB")->required();
    match_cmd->add_flag("--profit", match.profit, "Commercial use");
    match_cmd->add_option("--geography", match.geography, "Requester region code");
    match_cmd->add_option("--cohort", match.cohort, "Target cohort: any, healthy, disease:<tag>")
        ->capture_default_str();
    match_cmd->add_option("--dataset-cohort", match.dataset_cohort, "Dataset cohort")->capture_default_str();
    match_cmd->add_option("--date", match.date, "Evaluation date")->capture_default_str();
    match_cmd->add_flag("--all-reasons", match.all_reasons, "Report every failing check");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_usage;
    }

    if (*run_cmd)
        return cmd_run(run);
    if (*validate_cmd)
        return cmd_validate(chain_file, min_difficulty);
    if (*gas_cmd)
        return cmd_gas_table();
    if (*match_cmd)
        return cmd_match(match);
    return exit_usage;
}
