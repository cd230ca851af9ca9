#include "brb/campaign.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace brb
{
    bool SeedResult::all_passed() const noexcept
    {
        if (!error.empty())
            return false;
        for (Status s : statuses)
        {
            if (s != Status::Pass)
                return false;
        }
        return true;
    }

    std::string SeedResult::first_failure() const
    {
        if (!error.empty())
            return "error";
        static const std::vector<std::string> names = {"validity", "integrity", "agreement", "termination1",
                                                       "termination2", "channel"};
        for (std::size_t i = 0; i < statuses.size() && i < names.size(); ++i)
        {
            if (statuses[i] != Status::Pass)
                return names[i];
        }
        return {};
    }

    Scenario scenario_for_seed(const Scenario &base, std::uint64_t seed)
    {
        Scenario s = base;
        s.scheduler = policy::SeededRandom{seed};
        s.adversary_seed = seed;
        return s;
    }

    SeedResult run_seed(const Scenario &base, std::uint64_t seed)
    {
        SeedResult out;
        out.seed = seed;
        try
        {
            const Trace trace = run(scenario_for_seed(base, seed));
            for (const auto &v : check_all(trace))
                out.statuses.push_back(v.status);
            out.hit_cap = trace.abort_reason.has_value();
            out.steps = trace.steps;
        }
        catch (const std::exception &e)
        {
            out.error = e.what();
        }
        return out;
    }

    std::vector<SeedResult> run_campaign_serial(const Scenario &base, std::uint64_t first_seed, std::uint64_t count)
    {
        std::vector<SeedResult> results;
        results.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i)
            results.push_back(run_seed(base, first_seed + i));
        return results;
    }

    std::vector<SeedResult> run_campaign_parallel(const Scenario &base, std::uint64_t first_seed, std::uint64_t count,
                                                  int jobs)
    {
        std::vector<SeedResult> results(count);
        const auto n = static_cast<std::int64_t>(count);
#ifdef _OPENMP
        if (jobs <= 0)
            jobs = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
#else
        (void)jobs;
#endif
        for (std::int64_t i = 0; i < n; ++i)
        {
            // run_seed never throws; each iteration owns its slot.
            results[static_cast<std::size_t>(i)] = run_seed(base, first_seed + static_cast<std::uint64_t>(i));
        }
        return results;
    }

    CampaignSummary summarize(const std::vector<SeedResult> &results)
    {
        CampaignSummary s;
        s.runs = results.size();
        const std::vector<std::string> names = {"validity", "integrity", "agreement", "termination1", "termination2",
                                                "channel"};
        for (const auto &name : names)
            s.pass_counts[name] = 0;
        for (const auto &r : results)
        {
            for (std::size_t i = 0; i < r.statuses.size() && i < names.size(); ++i)
            {
                if (r.statuses[i] == Status::Pass)
                    ++s.pass_counts[names[i]];
            }
            if (r.hit_cap)
                ++s.cap_hits;
            if (!r.error.empty())
                ++s.errors;
            if (!r.all_passed())
                s.failing_seeds.push_back(r.seed);
        }
        return s;
    }

    namespace
    {
        bool violates(const Trace &trace, const std::string &property)
        {
            for (const auto &v : check_all(trace))
            {
                if (v.property == property)
                    return v.status == Status::Fail;
            }
            return false;
        }
    } // namespace

    std::optional<Counterexample> shrink(const Scenario &base, std::uint64_t seed)
    {
        const Scenario original_scenario = scenario_for_seed(base, seed);
        const Trace original = run(original_scenario);
        std::string property;
        for (const auto &v : check_all(original))
        {
            if (v.status == Status::Fail)
            {
                property = v.property;
                break;
            }
        }
        if (property.empty())
            return std::nullopt;

        // Position of each receive in the original record list.
        std::vector<std::size_t> receive_at;
        for (std::size_t i = 0; i < original.records.size(); ++i)
        {
            if (original.records[i].kind == RecordKind::Receive)
                receive_at.push_back(i);
        }

        Scenario fifo = base;
        fifo.scheduler = policy::Fifo{};
        fifo.adversary_seed = original_scenario.effective_adversary_seed();

        for (std::size_t k = 0; k <= receive_at.size(); ++k)
        {
            // Prefix ends just before the (k+1)-th receive, so it holds exactly k forced receives.
            const std::size_t cut = k < receive_at.size() ? receive_at[k] : original.records.size();
            const std::vector<TraceRecord> prefix(original.records.begin(),
                                                  original.records.begin() + static_cast<std::ptrdiff_t>(cut));
            Trace candidate = replay(prefix, fifo);
            if (violates(candidate, property))
            {
                return Counterexample{property, fifo, std::move(candidate), k, receive_at.size()};
            }
        }
        // Unreachable in practice: the full prefix reproduces the original run.
        return Counterexample{property, original_scenario, original, receive_at.size(), receive_at.size()};
    }
} // namespace brb
