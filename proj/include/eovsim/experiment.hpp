// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/report.hpp"

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace eovsim
{

// Exit codes shared by the sweep driver and the command-line front end.
inline constexpr int EXIT_OK = 0;
inline constexpr int EXIT_CONFIG = 2;
inline constexpr int EXIT_INVARIANT = 3;
inline constexpr int EXIT_ORACLE = 4;

struct ExperimentOutcome
{
    int exit_code = EXIT_OK;
    std::vector<RunResult> results;
    std::vector<RefereeReport> referee_reports; // parallel, when --oracle
};

// Sequential sweep over mode x conflict_rate x seed. Writes results.csv,
// results.json and the three figure data files into out_dir; per-run trace,
// order and ledger dumps behind their flags. Invariant violations and
// referee mismatches are reported in full and reflected in the exit code,
// never silently swallowed.
inline ExperimentOutcome
run_experiment(ExperimentConfig const& xcfg, std::ostream& log)
{
    xcfg.validate();
    std::filesystem::create_directories(xcfg.out_dir);

    ExperimentOutcome out;
    bool anyViolation = false;
    bool anyMismatch = false;

    for (Mode mode : xcfg.modes)
    {
        for (double rate : xcfg.conflict_rates)
        {
            for (uint64_t seed : xcfg.seeds)
            {
                RunConfig rc = xcfg.make_run(mode, rate, seed);
                RunResult res = run_one(rc);
                auto const& s = res.summary;
                log << s.mode << " rate=" << fmt_rate(rate)
                    << " seed=" << seed << ": submitted=" << s.submitted
                    << " committed=" << s.committed
                    << " invalid=" << (s.invalid_mvcc + s.invalid_vscc)
                    << " rejected=" << s.rejected
                    << " tps=" << fmt_double(s.throughput_overall)
                    << " blocks=" << s.blocks << '\n';

                if (!res.ok())
                {
                    anyViolation = true;
                    for (auto const& v : res.violations)
                    {
                        log << "  invariant violation: " << v << '\n';
                    }
                }
                if (xcfg.run_oracle)
                {
                    RefereeReport rep = referee_run(res);
                    if (!rep.ok())
                    {
                        anyMismatch = true;
                        for (auto const& m : rep.mismatches)
                        {
                            log << "  referee mismatch: " << m << '\n';
                        }
                    }
                    else
                    {
                        log << "  referee: " << rep.compared
                            << " verdicts agree\n";
                    }
                    out.referee_reports.push_back(std::move(rep));
                }

                std::string tag = run_file_tag(s);
                if (xcfg.write_trace)
                {
                    write_trace_file(xcfg.out_dir + "/trace-" + tag +
                                         ".jsonl",
                                     res);
                }
                if (xcfg.dump_order)
                {
                    write_order_dump(xcfg.out_dir + "/order-" + tag +
                                         ".jsonl",
                                     res);
                }
                if (xcfg.dump_ledger)
                {
                    write_ledger_dump(xcfg.out_dir + "/ledger-" + tag +
                                          ".jsonl",
                                      res);
                }
                out.results.push_back(std::move(res));
            }
        }
    }

    write_results_csv(xcfg.out_dir + "/results.csv", out.results);
    write_results_json(xcfg.out_dir + "/results.json", xcfg, out.results,
                       out.referee_reports);
    write_figures(xcfg.out_dir, xcfg, out.results);
    log << "report written to " << xcfg.out_dir << "/\n";

    if (anyMismatch)
    {
        out.exit_code = EXIT_ORACLE;
    }
    else if (anyViolation)
    {
        out.exit_code = EXIT_INVARIANT;
    }
    return out;
}

} // namespace eovsim
