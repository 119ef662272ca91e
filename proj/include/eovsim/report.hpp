// Copyright 2026 the eovsim developers. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "eovsim/referee.hpp"
#include "eovsim/simulation.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace eovsim
{

// All report files are pure functions of the run results, and every float is
// formatted through one fixed-width snprintf path, so identical runs produce
// byte-identical files.

inline std::string
fmt_double(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// Compact form for file names and figure keys: 0.2 stays "0.2".
inline std::string
fmt_rate(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::ofstream
open_out(std::string const& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
    {
        throw SimError(ErrorKind::Io, "cannot write " + path);
    }
    return os;
}

inline std::string
run_file_tag(RunSummary const& s)
{
    return s.mode + "-" + fmt_rate(s.conflict_rate) + "-" +
           std::to_string(s.seed);
}

// --- results.csv -------------------------------------------------------------

inline void
csv_row(std::ostream& os, RunSummary const& s, std::string const& metric,
        std::string const& cls, double mean, double stddev, uint64_t n)
{
    os << s.mode << ',' << fmt_rate(s.conflict_rate) << ',' << s.seed << ','
       << metric << ',' << cls << ',' << fmt_double(mean) << ','
       << fmt_double(stddev) << ',' << n << '\n';
}

inline void
csv_stat_row(std::ostream& os, RunSummary const& s, std::string const& metric,
             std::string const& cls, ClassStats const& st)
{
    if (st.present)
    {
        csv_row(os, s, metric, cls, st.mean, st.stddev, st.n);
    }
}

inline void
csv_count_row(std::ostream& os, RunSummary const& s, std::string const& cls,
              uint64_t value)
{
    csv_row(os, s, "count", cls, static_cast<double>(value), 0.0, 1);
}

inline void
write_results_csv(std::string const& path,
                  std::vector<RunResult> const& results)
{
    auto os = open_out(path);
    os << "mode,conflict_rate,seed,metric,class,mean,stddev,n\n";
    for (auto const& r : results)
    {
        auto const& s = r.summary;
        csv_stat_row(os, s, "latency_ms", "overall", s.latency_overall);
        csv_stat_row(os, s, "latency_ms", "valid", s.latency_valid);
        csv_stat_row(os, s, "latency_ms", "invalid", s.latency_invalid);
        csv_stat_row(os, s, "exec_duration_ms", "overall", s.exec_duration);
        csv_row(os, s, "throughput_tps", "overall", s.throughput_overall,
                0.0, s.counted_terminal);
        csv_row(os, s, "throughput_tps", "valid", s.throughput_valid, 0.0,
                s.counted_committed);
        csv_row(os, s, "throughput_tps", "invalid", s.throughput_invalid,
                0.0, s.counted_invalid);
        csv_count_row(os, s, "submitted", s.submitted);
        csv_count_row(os, s, "committed", s.committed);
        csv_count_row(os, s, "invalid_mvcc", s.invalid_mvcc);
        csv_count_row(os, s, "invalid_vscc", s.invalid_vscc);
        csv_count_row(os, s, "rejected", s.rejected);
        csv_count_row(os, s, "in_flight", s.in_flight);
        csv_count_row(os, s, "early_invalid", s.early_invalid);
        csv_count_row(os, s, "counted", s.counted);
        csv_count_row(os, s, "counted_terminal", s.counted_terminal);
        csv_count_row(os, s, "blocks", s.blocks);
        csv_count_row(os, s, "empty_blocks", s.empty_blocks);
        csv_count_row(os, s, "retries", r.retries);
        for (auto const& [phase, ms] : s.service_ms)
        {
            csv_row(os, s, "service_ms", phase, ms, 0.0, 1);
        }
    }
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

// --- results.json ------------------------------------------------------------

inline nlohmann::ordered_json
stats_json(ClassStats const& st)
{
    if (!st.present)
    {
        return nullptr;
    }
    nlohmann::ordered_json j;
    j["mean"] = st.mean;
    j["stddev"] = st.stddev;
    j["n"] = st.n;
    return j;
}

inline nlohmann::ordered_json
settings_json(ExperimentConfig const& xcfg)
{
    auto const& b = xcfg.base;
    nlohmann::ordered_json j;
    for (auto m : xcfg.modes)
    {
        j["modes"].push_back(mode_name(m));
    }
    j["conflict_rates"] = xcfg.conflict_rates;
    j["seeds"] = xcfg.seeds;
    j["workload"] = {{"clients", b.workload.clients},
                     {"hot_assets", b.workload.hot_assets},
                     {"cold_assets_per_client",
                      b.workload.cold_assets_per_client},
                     {"interarrival_ms", b.workload.interarrival_ms},
                     {"interarrival_dist",
                      b.workload.exponential_interarrival ? "exp" : "fixed"},
                     {"tx_per_client", b.workload.tx_per_client}};
    j["topology"] = {{"peers", b.peers},
                     {"gateways", b.gateways},
                     {"orderers", b.orderers},
                     {"endorsers_per_tx", b.endorsers_per_tx},
                     {"endorsement_required", b.endorsement_required}};
    j["ordering"] = {{"block_size", b.block_size},
                     {"block_interval_ms", b.block_interval_ms},
                     {"cache_capacity", b.cache_capacity},
                     {"crash_at_ms", b.crash_at_ms},
                     {"election_delay_ms", b.election_delay_ms}};
    j["costs"] = {{"latency_client_gw_ms", b.costs.latency_client_gw},
                  {"latency_gw_peer_ms", b.costs.latency_gw_peer},
                  {"latency_gw_orderer_ms", b.costs.latency_gw_orderer},
                  {"latency_orderer_orderer_ms",
                   b.costs.latency_orderer_orderer},
                  {"latency_orderer_peer_ms", b.costs.latency_orderer_peer},
                  {"latency_peer_peer_ms", b.costs.latency_peer_peer},
                  {"endorse_exec_ms", b.costs.endorse_exec_ms},
                  {"vscc_ms", b.costs.vscc_ms},
                  {"mvcc_check_ms", b.costs.mvcc_check_ms},
                  {"commit_per_tx_ms", b.costs.commit_per_tx_ms},
                  {"cache_rtt_ms", b.costs.cache_rtt_ms}};
    j["flags"] = {{"retry", b.retry},
                  {"bump_write_set", b.bump_write_set},
                  {"malicious_rate", b.malicious_rate},
                  {"warmup_frac", b.warmup_frac},
                  {"endorse_timeout_ms", b.endorse_timeout_ms},
                  {"check_invariants", b.check_invariants},
                  {"oracle", xcfg.run_oracle},
                  {"trace", xcfg.write_trace}};
    j["measurement"] = {
        {"warmup", "first floor(warmup_frac x submitted) transactions by "
                   "submission order are excluded from latency, execution "
                   "duration and throughput"},
        {"window", "first counted submission to last counted terminal "
                   "notification"},
        {"latency", "terminal notification time minus proposal submission "
                    "time, per transaction"},
        {"throughput", "counted terminal notifications divided by the "
                       "window, in tx/s"},
        {"execution_duration", "simulated chaincode service time per "
                               "endorsement attempt; an early-invalid "
                               "refusal samples 0"}};
    return j;
}

inline nlohmann::ordered_json
run_json(RunResult const& r, RefereeReport const* referee)
{
    auto const& s = r.summary;
    nlohmann::ordered_json j;
    j["mode"] = s.mode;
    j["conflict_rate"] = s.conflict_rate;
    j["seed"] = s.seed;
    j["submitted"] = s.submitted;
    j["committed"] = s.committed;
    j["invalid_mvcc"] = s.invalid_mvcc;
    j["invalid_vscc"] = s.invalid_vscc;
    j["rejected"] = s.rejected;
    j["in_flight"] = s.in_flight;
    j["early_invalid"] = s.early_invalid;
    j["counted"] = s.counted;
    j["counted_terminal"] = s.counted_terminal;
    j["window_ms"] = s.window_ms;
    j["latency_ms"] = {{"overall", stats_json(s.latency_overall)},
                       {"valid", stats_json(s.latency_valid)},
                       {"invalid", stats_json(s.latency_invalid)}};
    j["exec_duration_ms"] = stats_json(s.exec_duration);
    j["throughput_tps"] = {{"overall", s.throughput_overall},
                           {"valid", s.throughput_valid},
                           {"invalid", s.throughput_invalid}};
    j["service_ms"] = s.service_ms;
    j["blocks"] = s.blocks;
    j["empty_blocks"] = s.empty_blocks;
    j["retries"] = r.retries;
    j["engine_events"] = s.engine_events;
    if (r.cfg.crash_at_ms > 0)
    {
        j["crashed"] = r.crashed;
        j["crash_time_ms"] = r.crash_time;
        j["pre_crash_verdicts"] = r.pre_crash_verdicts.size();
    }
    j["violations"] = r.violations;
    if (referee)
    {
        j["oracle"] = {{"compared", referee->compared},
                       {"skipped_policy_failures",
                        referee->skipped_policy_failures},
                       {"state_checked", referee->state_checked},
                       {"state_match", referee->state_match},
                       {"mismatches", referee->mismatches}};
    }
    return j;
}

inline void
write_results_json(std::string const& path, ExperimentConfig const& xcfg,
                   std::vector<RunResult> const& results,
                   std::vector<RefereeReport> const& refereeReports)
{
    nlohmann::ordered_json j;
    j["settings"] = settings_json(xcfg);
    j["runs"] = nlohmann::ordered_json::array();
    for (size_t i = 0; i < results.size(); ++i)
    {
        RefereeReport const* rep =
            i < refereeReports.size() ? &refereeReports[i] : nullptr;
        j["runs"].push_back(run_json(results[i], rep));
    }
    auto os = open_out(path);
    os << j.dump(2) << '\n';
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

// --- figure data files -------------------------------------------------------

// Per (mode, rate) cell: the across-seed distribution of per-run means.
struct FigureCell
{
    std::vector<double> overall;
    std::vector<double> valid;
    std::vector<double> invalid;
};

inline void
fig_stat(std::ostream& os, std::vector<double> const& xs)
{
    auto st = compute_stats(xs);
    if (!st.present)
    {
        os << " nan nan";
        return;
    }
    os << ' ' << fmt_double(st.mean) << ' ' << fmt_double(st.stddev);
}

// One row per (mode, rate); columns are across-seed mean and sample stddev
// for each class. Ready for gnuplot-style consumption.
inline void
write_figure(std::string const& path, std::string const& quantity,
             ExperimentConfig const& xcfg,
             std::map<std::pair<std::string, double>, FigureCell> const& grid,
             bool withClasses)
{
    auto os = open_out(path);
    os << "# " << quantity << " by mode and conflict rate; across-seed mean "
       << "and sample stddev of per-run means\n";
    if (withClasses)
    {
        os << "# mode conflict_rate overall_mean overall_stddev valid_mean "
           << "valid_stddev invalid_mean invalid_stddev seeds\n";
    }
    else
    {
        os << "# mode conflict_rate mean stddev seeds\n";
    }
    for (auto m : xcfg.modes)
    {
        for (double rate : xcfg.conflict_rates)
        {
            auto it = grid.find({mode_name(m), rate});
            if (it == grid.end())
            {
                continue;
            }
            os << mode_name(m) << ' ' << fmt_rate(rate);
            fig_stat(os, it->second.overall);
            if (withClasses)
            {
                fig_stat(os, it->second.valid);
                fig_stat(os, it->second.invalid);
            }
            os << ' ' << it->second.overall.size() << '\n';
        }
    }
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

inline void
write_figures(std::string const& dir, ExperimentConfig const& xcfg,
              std::vector<RunResult> const& results)
{
    std::map<std::pair<std::string, double>, FigureCell> exec, lat, tps;
    for (auto const& r : results)
    {
        auto const& s = r.summary;
        auto key = std::make_pair(s.mode, s.conflict_rate);
        if (s.exec_duration.present)
        {
            exec[key].overall.push_back(s.exec_duration.mean);
        }
        if (s.latency_overall.present)
        {
            lat[key].overall.push_back(s.latency_overall.mean);
        }
        if (s.latency_valid.present)
        {
            lat[key].valid.push_back(s.latency_valid.mean);
        }
        if (s.latency_invalid.present)
        {
            lat[key].invalid.push_back(s.latency_invalid.mean);
        }
        tps[key].overall.push_back(s.throughput_overall);
        tps[key].valid.push_back(s.throughput_valid);
        tps[key].invalid.push_back(s.throughput_invalid);
    }
    write_figure(dir + "/fig4.dat", "execution duration (ms)", xcfg, exec,
                 false);
    write_figure(dir + "/fig5.dat", "latency (ms)", xcfg, lat, true);
    write_figure(dir + "/fig6.dat", "throughput (tx/s)", xcfg, tps, true);
}

// --- per-run dumps -----------------------------------------------------------

inline void
write_trace_file(std::string const& path, RunResult const& r)
{
    auto os = open_out(path);
    for (auto const& e : r.trace)
    {
        nlohmann::ordered_json j;
        j["time"] = e.time;
        j["seq"] = e.seq;
        j["target"] = e.target;
        j["kind"] = e.kind;
        if (!e.tx_id.empty())
        {
            j["tx_id"] = e.tx_id;
        }
        os << j.dump() << '\n';
    }
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

// The total order with everything the serial referee needs: genesis keys in
// the header line, then one line per ordered envelope with the verdict the
// run reached (from ordering verdicts, or from commit flags in the baseline).
inline void
write_order_dump(std::string const& path, RunResult const& r)
{
    std::map<std::string, Flag> mvccByTx;
    for (auto const& rec : r.history)
    {
        mvccByTx[rec.tx_id] = rec.mvcc;
    }

    auto os = open_out(path);
    nlohmann::ordered_json header;
    header["kind"] = "order_dump";
    header["mode"] = r.summary.mode;
    header["conflict_rate"] = r.summary.conflict_rate;
    header["seed"] = r.summary.seed;
    header["cache_capacity"] = r.cfg.cache_capacity;
    header["bump_write_set"] = r.cfg.bump_write_set;
    header["genesis_keys"] = r.pool_keys;
    os << header.dump() << '\n';

    for (size_t i = 0; i < r.ordered.size(); ++i)
    {
        auto const& t = r.ordered[i];
        nlohmann::ordered_json j;
        j["pos"] = i;
        j["tx_id"] = t.tx_id;
        j["rset"] = t.rset.entries;
        j["wset"] = t.wset.entries;
        if (t.verdict.has_value())
        {
            j["verdict"] = *t.verdict;
        }
        else if (auto it = mvccByTx.find(t.tx_id);
                 it != mvccByTx.end() && it->second != Flag::Unchecked)
        {
            j["verdict"] = it->second == Flag::Pass;
        }
        else
        {
            j["verdict"] = nullptr;
        }
        j["arrival"] = t.arrival;
        if (t.verdict_time >= 0)
        {
            j["verdict_time"] = t.verdict_time;
        }
        os << j.dump() << '\n';
    }
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

inline void
write_ledger_dump(std::string const& path, RunResult const& r)
{
    auto os = open_out(path);
    for (auto const& b : r.chain)
    {
        nlohmann::ordered_json j;
        j["block_num"] = b.block_num;
        j["prev_hash"] = hex64(b.prev_hash);
        j["this_hash"] = hex64(b.this_hash);
        j["txs"] = nlohmann::ordered_json::array();
        for (auto const& tx : b.txs)
        {
            nlohmann::ordered_json t;
            t["tx_id"] = tx.tx_id;
            t["vscc"] = flag_name(tx.vscc);
            t["mvcc"] = flag_name(tx.mvcc);
            t["wset_keys"] = nlohmann::ordered_json::array();
            for (auto const& [k, v] : tx.wset.entries)
            {
                t["wset_keys"].push_back(k);
            }
            j["txs"].push_back(std::move(t));
        }
        os << j.dump() << '\n';
    }
    if (!os)
    {
        throw SimError(ErrorKind::Io, "short write to " + path);
    }
}

} // namespace eovsim
