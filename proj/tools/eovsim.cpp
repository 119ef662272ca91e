// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// Command-line front end. Three subcommands:
//
//   run     sweep mode x conflict_rate x seed, write results and reports
//   oracle  replay an order dump through the serial oracle and diff verdicts
//   verify  recheck the hash chain of a ledger dump
//
// Exit codes: 0 ok, 2 bad configuration, 3 invariant or chain violation,
// 4 oracle mismatch.

#include "eovsim/experiment.hpp"
#include "eovsim/oracle.hpp"
#include "eovsim/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <streambuf>
#include <string>
#include <vector>

namespace
{

using namespace eovsim;

struct NullBuf : std::streambuf
{
    int
    overflow(int c) override
    {
        return c;
    }
};

struct RunOptions
{
    std::string config_path;
    std::vector<std::string> sets;
    std::string mode;
    std::string rates;
    std::string seeds;
    std::string out_dir;
    bool oracle = false;
    bool trace = false;
    bool retry = false;
    bool bump_write_set = false;
    bool dump_order = false;
    bool dump_ledger = false;
    bool quiet = false;
};

int
cmd_run(RunOptions const& opt)
{
    ExperimentConfig xcfg;
    if (!opt.config_path.empty())
    {
        load_config_file(xcfg, opt.config_path);
    }
    for (auto const& kv : opt.sets)
    {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        apply_config_entry(xcfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    // Dedicated flags win over the config file and --set entries.
    if (!opt.mode.empty())
    {
        apply_config_entry(xcfg, "mode", opt.mode);
    }
    if (!opt.rates.empty())
    {
        apply_config_entry(xcfg, "conflict_rates", opt.rates);
    }
    if (!opt.seeds.empty())
    {
        apply_config_entry(xcfg, "seeds", opt.seeds);
    }
    if (!opt.out_dir.empty())
    {
        xcfg.out_dir = opt.out_dir;
    }
    xcfg.run_oracle = xcfg.run_oracle || opt.oracle;
    xcfg.write_trace = xcfg.write_trace || opt.trace;
    xcfg.dump_order = xcfg.dump_order || opt.dump_order;
    xcfg.dump_ledger = xcfg.dump_ledger || opt.dump_ledger;
    if (opt.retry)
    {
        xcfg.base.retry = true;
    }
    if (opt.bump_write_set)
    {
        xcfg.base.bump_write_set = true;
    }
    apply_seed_env(xcfg);

    NullBuf nullBuf;
    std::ostream nullLog(&nullBuf);
    return run_experiment(xcfg, opt.quiet ? nullLog : std::cout).exit_code;
}

Flag
parse_flag_name(std::string const& s)
{
    if (s == "pass")
    {
        return Flag::Pass;
    }
    if (s == "fail")
    {
        return Flag::Fail;
    }
    if (s == "unchecked")
    {
        return Flag::Unchecked;
    }
    throw SimError(ErrorKind::Io, "unknown flag name '" + s + "'");
}

nlohmann::json
parse_json_line(std::string const& line, std::string const& path, int lineno)
{
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
    {
        throw SimError(ErrorKind::Io, "line " + std::to_string(lineno) +
                                          " of '" + path +
                                          "' is not valid JSON");
    }
    return j;
}

int
cmd_oracle(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw SimError(ErrorKind::Io, "cannot open '" + path + "'");
    }

    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
    {
        throw SimError(ErrorKind::Io, "'" + path + "' is empty");
    }
    ++lineno;
    auto header = parse_json_line(line, path, lineno);
    if (header.value("kind", "") != "order_dump")
    {
        throw SimError(ErrorKind::Io,
                       "'" + path + "' does not start with an order_dump "
                                    "header line");
    }
    std::vector<Key> poolKeys =
        header.at("genesis_keys").get<std::vector<Key>>();

    std::vector<OracleTx> txs;
    std::vector<std::optional<bool>> reported;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
        {
            continue;
        }
        auto j = parse_json_line(line, path, lineno);
        OracleTx tx;
        tx.tx_id = j.at("tx_id").get<std::string>();
        for (auto const& [k, v] : j.at("rset").items())
        {
            tx.rset.entries[k] = v.get<Version>();
        }
        for (auto const& [k, v] : j.at("wset").items())
        {
            tx.wset.entries[k] = v.get<std::string>();
        }
        auto const& verdict = j.at("verdict");
        reported.push_back(verdict.is_null()
                               ? std::optional<bool>{}
                               : std::optional<bool>{verdict.get<bool>()});
        txs.push_back(std::move(tx));
    }

    OracleResult res = serial_oracle(oracle_genesis(poolKeys), txs);

    uint64_t checked = 0;
    uint64_t skipped = 0;
    uint64_t mismatches = 0;
    for (size_t i = 0; i < txs.size(); ++i)
    {
        if (!reported[i].has_value())
        {
            ++skipped;
            continue;
        }
        ++checked;
        if (*reported[i] != res.verdicts[i])
        {
            ++mismatches;
            std::cout << "mismatch at pos " << i << " tx " << txs[i].tx_id
                      << ": simulator=" << (*reported[i] ? "pass" : "fail")
                      << " oracle=" << (res.verdicts[i] ? "pass" : "fail")
                      << '\n';
        }
    }
    std::cout << "oracle: " << txs.size() << " ordered txs, " << checked
              << " verdicts checked, " << skipped << " without a verdict, "
              << mismatches << " mismatches\n";
    std::cout << "oracle: " << res.valid_count
              << " valid txs, final state digest "
              << hex64(res.final_digest) << '\n';
    return mismatches == 0 ? EXIT_OK : EXIT_ORACLE;
}

uint64_t
parse_hex64(nlohmann::json const& j, char const* field)
{
    std::string s = j.at(field).get<std::string>();
    char* end = nullptr;
    uint64_t v = std::strtoull(s.c_str(), &end, 16);
    if (end == s.c_str() || *end != '\0')
    {
        throw SimError(ErrorKind::Io,
                       std::string(field) + " '" + s + "' is not hex");
    }
    return v;
}

int
cmd_verify(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw SimError(ErrorKind::Io, "cannot open '" + path + "'");
    }

    std::vector<Block> chain;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
        {
            continue;
        }
        auto j = parse_json_line(line, path, lineno);
        Block b;
        b.block_num = j.at("block_num").get<uint64_t>();
        b.prev_hash = parse_hex64(j, "prev_hash");
        b.this_hash = parse_hex64(j, "this_hash");
        for (auto const& t : j.at("txs"))
        {
            Transaction tx;
            tx.tx_id = t.at("tx_id").get<std::string>();
            tx.vscc = parse_flag_name(t.at("vscc").get<std::string>());
            tx.mvcc = parse_flag_name(t.at("mvcc").get<std::string>());
            b.txs.push_back(std::move(tx));
        }
        chain.push_back(std::move(b));
    }

    auto problems = chain_problems(chain);
    for (auto const& p : problems)
    {
        std::cout << "chain problem: " << p << '\n';
    }
    std::cout << "verify: " << chain.size() << " blocks, "
              << problems.size() << " problems\n";
    return problems.empty() ? EXIT_OK : EXIT_INVARIANT;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"deterministic simulator for execute-order-validate "
                 "permissioned ledgers"};
    app.require_subcommand(1);

    RunOptions opt;
    auto* run =
        app.add_subcommand("run", "run a simulation sweep and write reports");
    run->add_option("--config", opt.config_path,
                    "key=value config file, # comments allowed");
    run->add_option("--set", opt.sets,
                    "override one config entry as key=value (repeatable)");
    run->add_option("--mode", opt.mode,
                    "og, oemvcc, ea, a comma list, or all");
    run->add_option("--rates", opt.rates, "comma list of conflict rates");
    run->add_option("--seeds", opt.seeds, "comma list of seeds");
    run->add_option("--out", opt.out_dir,
                    "output directory (default: results)");
    run->add_flag("--oracle", opt.oracle,
                  "replay every run through the serial oracle and diff");
    run->add_flag("--trace", opt.trace, "write per-run event trace files");
    run->add_flag("--retry", opt.retry,
                  "clients resubmit transactions that fail validation");
    run->add_flag("--bump-write-set", opt.bump_write_set,
                  "ordering cache also advances blind-write versions");
    run->add_flag("--dump-order", opt.dump_order,
                  "write per-run ordered transaction dumps");
    run->add_flag("--dump-ledger", opt.dump_ledger,
                  "write per-run ledger dumps");
    run->add_flag("--quiet", opt.quiet, "suppress per-run progress lines");

    std::string orderFile;
    auto* orc = app.add_subcommand(
        "oracle", "replay an order dump through the serial oracle");
    orc->add_option("file", orderFile, "order-*.jsonl from run --dump-order")
        ->required();

    std::string ledgerFile;
    auto* ver = app.add_subcommand(
        "verify", "recheck the hash chain of a ledger dump");
    ver->add_option("file", ledgerFile,
                    "ledger-*.jsonl from run --dump-ledger")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
        {
            return cmd_run(opt);
        }
        if (orc->parsed())
        {
            return cmd_oracle(orderFile);
        }
        return cmd_verify(ledgerFile);
    }
    catch (ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return EXIT_CONFIG;
    }
    catch (SimError const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_INVARIANT;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
