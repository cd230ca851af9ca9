// brb-lab: run scenarios, fuzz them, compare protocol costs and re-check trace files.
//
// Exit codes: 0 all checked properties pass, 1 a property failed, 2 invalid input.

#include "brb/campaign.hpp"
#include "brb/params.hpp"
#include "brb/properties.hpp"
#include "brb/scenario.hpp"
#include "brb/simnet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace brb;

namespace
{
    constexpr int kExitFail = 1;
    constexpr int kExitInvalid = 2;

    std::string default_out_dir()
    {
        if (const char *env = std::getenv("BRB_LAB_OUT"); env != nullptr && *env != '\0')
            return env;
        return "brb-out";
    }

    void write_file(const fs::path &path, const std::string &content)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write '" + path.string() + "'");
        out << content;
    }

    std::string metrics_row(const std::string &label, const Metrics &m)
    {
        std::ostringstream row;
        row << "label,total,INIT,WITNESS,ECHO,READY,byzantine_total,deliveries,max_delivery_depth\n";
        auto tag = [&](const char *t) {
            const auto it = m.messages_by_tag.find(t);
            return it == m.messages_by_tag.end() ? 0 : it->second;
        };
        row << label << ',' << m.total << ',' << tag("INIT") << ',' << tag("WITNESS") << ',' << tag("ECHO") << ','
            << tag("READY") << ',' << m.byzantine_total << ',' << m.deliveries << ',' << m.max_delivery_depth << '\n';
        return row.str();
    }

    /// Prints the first failing verdict and returns the exit code for the verdict set.
    int verdict_exit(const std::vector<Verdict> &verdicts)
    {
        for (const auto &v : verdicts)
        {
            if (v.status != Status::Pass)
            {
                std::cerr << status_name(v.status) << ' ' << v.property << " at seq_no="
                          << (v.violating_seq ? std::to_string(*v.violating_seq) : "-") << ": " << v.detail << '\n';
                return kExitFail;
            }
        }
        return 0;
    }

    int cmd_run(const std::string &scenario_file, std::optional<std::uint64_t> seed, const std::string &out_dir,
                ReportFormat format)
    {
        Scenario scenario = load_scenario_file(scenario_file);
        if (seed)
            scenario = scenario_for_seed(scenario, *seed);
        const Trace trace = run(scenario);
        const auto verdicts = check_all(trace);
        const auto m = metrics(trace);
        const auto report = format_report(verdicts, m, format);

        fs::create_directories(out_dir);
        save_trace(trace, (fs::path(out_dir) / "trace.jsonl").string());
        write_file(fs::path(out_dir) / "report.txt", report);
        write_file(fs::path(out_dir) / "metrics.csv", metrics_row(fs::path(scenario_file).stem().string(), m));
        std::cout << report;
        if (trace.abort_reason)
            std::cerr << "run aborted: " << *trace.abort_reason << '\n';
        return verdict_exit(verdicts);
    }

    int cmd_check(const std::string &trace_file, ReportFormat format)
    {
        const Trace trace = load_trace(trace_file);
        const auto verdicts = check_all(trace);
        std::cout << format_report(verdicts, metrics(trace), format);
        return verdict_exit(verdicts);
    }

    int cmd_fuzz(const std::string &scenario_file, std::uint64_t first_seed, std::uint64_t num_seeds, int jobs,
                 const std::string &out_dir, ReportFormat format)
    {
        const Scenario scenario = load_scenario_file(scenario_file);
        const auto results = run_campaign_parallel(scenario, first_seed, num_seeds, jobs);
        const auto summary = summarize(results);

        std::ostringstream out;
        if (format == ReportFormat::Structured)
        {
            nlohmann::json doc{{"runs", summary.runs},
                               {"first_seed", first_seed},
                               {"pass_counts", summary.pass_counts},
                               {"cap_hits", summary.cap_hits},
                               {"errors", summary.errors},
                               {"failing_seeds", summary.failing_seeds}};
            out << doc.dump(2) << '\n';
        }
        else if (format == ReportFormat::Csv)
        {
            out << "property,passed,runs\n";
            for (const auto &[name, count] : summary.pass_counts)
                out << name << ',' << count << ',' << summary.runs << '\n';
            out << "cap_hits," << summary.cap_hits << ",\n";
        }
        else
        {
            out << "fuzz " << fs::path(scenario_file).filename().string() << ": " << summary.runs << " seeds from "
                << first_seed << '\n';
            for (const auto &[name, count] : summary.pass_counts)
                out << "  " << std::left << std::setw(14) << name << count << '/' << summary.runs << " PASS\n";
            out << "  cap hits: " << summary.cap_hits << ", errors: " << summary.errors << '\n';
            if (!summary.failing_seeds.empty())
            {
                out << "  failing seeds:";
                for (std::size_t i = 0; i < summary.failing_seeds.size() && i < 20; ++i)
                    out << ' ' << summary.failing_seeds[i];
                if (summary.failing_seeds.size() > 20)
                    out << " ...";
                out << '\n';
            }
        }
        std::cout << out.str();

        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "fuzz_summary.txt", out.str());
        if (summary.all_passed())
            return 0;

        for (const auto &r : results)
        {
            if (!r.error.empty())
            {
                std::cerr << "seed " << r.seed << ": " << r.error << '\n';
                return kExitFail;
            }
        }
        const auto seed = summary.failing_seeds.front();
        if (const auto cx = shrink(scenario, seed))
        {
            const auto path = fs::path(out_dir) / "counterexample.jsonl";
            save_trace(cx->trace, path.string());
            std::cerr << "FAIL " << cx->property << " (seed " << seed << "), shrunk to " << cx->forced_receives << " of "
                      << cx->original_receives << " forced receives; counterexample: " << path.string() << '\n';
            verdict_exit(check_all(cx->trace));
        }
        return kExitFail;
    }

    struct CompareRow
    {
        std::uint32_t n;
        std::uint32_t t;
        std::string algorithm;
        std::uint64_t messages;
        std::uint32_t depth;
    };

    int cmd_compare(const std::vector<std::uint32_t> &ns, const std::vector<std::string> &algorithms,
                    std::optional<std::uint32_t> t_override, ReportFormat format)
    {
        std::vector<CompareRow> rows;
        std::vector<std::string> footnotes;
        for (const auto n : ns)
        {
            const std::uint32_t t = t_override.value_or((n - 1) / 3);
            for (const auto &algo : algorithms)
            {
                Scenario s;
                if (algo == "brb")
                    s = all_correct_scenario(n, t, Algorithm::Brb, ThresholdMode::Quorum);
                else if (algo == "brb_nminus_t")
                    s = all_correct_scenario(n, t, Algorithm::Brb, ThresholdMode::NMinusT);
                else if (algo == "bracha")
                    s = all_correct_scenario(n, t, Algorithm::Bracha);
                else
                    throw ScenarioError("unknown algorithm '" + algo + "' (expected brb | bracha | brb_nminus_t)");
                const auto m = metrics(run(s));
                rows.push_back(CompareRow{n, t, algo, m.total, m.max_delivery_depth});
            }
            const auto quorum = deliver_threshold(SystemParams::make(n, t, ThresholdMode::Quorum));
            const auto nmt = deliver_threshold(SystemParams::make(n, t, ThresholdMode::NMinusT));
            footnotes.push_back("n=" + std::to_string(n) + ", t=" + std::to_string(t) + ": deliver threshold " +
                                std::to_string(quorum) + " (quorum) vs " + std::to_string(nmt) + " (n-t)");
        }

        switch (format)
        {
        case ReportFormat::Structured:
        {
            nlohmann::json doc{{"rows", nlohmann::json::array()}, {"footnotes", footnotes}};
            for (const auto &r : rows)
                doc["rows"].push_back({{"n", r.n}, {"t", r.t}, {"algorithm", r.algorithm}, {"messages", r.messages}, {"depth", r.depth}});
            std::cout << doc.dump(2) << '\n';
            break;
        }
        case ReportFormat::Csv:
            std::cout << "n,t,algorithm,messages,depth\n";
            for (const auto &r : rows)
                std::cout << r.n << ',' << r.t << ',' << r.algorithm << ',' << r.messages << ',' << r.depth << '\n';
            break;
        case ReportFormat::Text:
            std::cout << std::right << std::setw(5) << "n" << std::setw(5) << "t" << "  " << std::left << std::setw(14)
                      << "algorithm" << std::right << std::setw(10) << "messages" << std::setw(7) << "depth" << '\n';
            for (const auto &r : rows)
            {
                std::cout << std::right << std::setw(5) << r.n << std::setw(5) << r.t << "  " << std::left
                          << std::setw(14) << r.algorithm << std::right << std::setw(10) << r.messages << std::setw(7)
                          << r.depth << '\n';
            }
            std::cout << '\n';
            for (const auto &f : footnotes)
                std::cout << "* " << f << '\n';
            break;
        }
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Byzantine reliable broadcast lab"};
    app.require_subcommand(1);

    std::string format_name = "text";
    std::string out_dir = default_out_dir();

    auto *run_cmd = app.add_subcommand("run", "run one scenario, write trace + verdict report");
    std::string scenario_file;
    std::optional<std::uint64_t> seed;
    run_cmd->add_option("scenario", scenario_file, "scenario file (JSON)")->required();
    run_cmd->add_option("--seed", seed, "override the scheduler with seeded_random(seed)");
    run_cmd->add_option("--out", out_dir, "output directory (default $BRB_LAB_OUT or ./brb-out)");
    run_cmd->add_option("--format", format_name, "text | csv | structured");

    auto *fuzz_cmd = app.add_subcommand("fuzz", "run a seeded campaign; shrink the first failure");
    std::uint64_t num_seeds = 1000;
    std::uint64_t first_seed = 0;
    int jobs = 0;
    fuzz_cmd->add_option("scenario", scenario_file, "scenario file (JSON)")->required();
    fuzz_cmd->add_option("--seeds", num_seeds, "number of seeds");
    fuzz_cmd->add_option("--seed", first_seed, "first seed");
    fuzz_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    fuzz_cmd->add_option("--out", out_dir, "output directory");
    fuzz_cmd->add_option("--format", format_name, "text | csv | structured");

    auto *compare_cmd = app.add_subcommand("compare", "message/step cost table for all-correct runs");
    std::vector<std::uint32_t> ns = {4, 7, 10, 21, 31};
    std::vector<std::string> algorithms = {"brb", "bracha", "brb_nminus_t"};
    std::optional<std::uint32_t> t_override;
    compare_cmd->add_option("--n", ns, "process counts")->delimiter(',');
    compare_cmd->add_option("--algorithm", algorithms, "brb | bracha | brb_nminus_t")->delimiter(',');
    compare_cmd->add_option("--t", t_override, "fault budget (default floor((n-1)/3))");
    compare_cmd->add_option("--format", format_name, "text | csv | structured");

    auto *check_cmd = app.add_subcommand("check", "re-verdict an existing trace file");
    std::string trace_file;
    check_cmd->add_option("trace", trace_file, "trace file (JSON lines)")->required();
    check_cmd->add_option("--format", format_name, "text | csv | structured");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    try
    {
        const auto format = parse_report_format(format_name);
        if (*run_cmd)
            return cmd_run(scenario_file, seed, out_dir, format);
        if (*fuzz_cmd)
            return cmd_fuzz(scenario_file, first_seed, num_seeds, jobs, out_dir, format);
        if (*compare_cmd)
            return cmd_compare(ns, algorithms, t_override, format);
        if (*check_cmd)
            return cmd_check(trace_file, format);
    }
    catch (const ScenarioError &e)
    {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kExitInvalid;
    }
    catch (const DecodeError &e)
    {
        std::cerr << "invalid trace: " << e.what() << '\n';
        return kExitInvalid;
    }
    catch (const ParamsError &e)
    {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitInvalid;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return 0;
}
