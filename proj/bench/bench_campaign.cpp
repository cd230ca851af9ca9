#include "brb/campaign.hpp"

#include <benchmark/benchmark.h>

using namespace brb;

namespace
{
    Scenario equivocation_n7()
    {
        Scenario s;
        s.params = SystemParams::make(7, 2);
        s.broadcasts.push_back({ProcessId{1}, 0, "real"});
        s.byzantine.push_back({ProcessId{7}, strategy::EquivocateInit{"a", "b", {}, false, 0}});
        s.byzantine.push_back({ProcessId{6}, strategy::TwoFacedWitness{{ProcessId{1}, 0}, {}, "a", "b"}});
        return s;
    }

    void BM_CampaignSerial(benchmark::State &state)
    {
        const auto s = equivocation_n7();
        for (auto _ : state)
            benchmark::DoNotOptimize(run_campaign_serial(s, 0, static_cast<std::uint64_t>(state.range(0))));
        state.SetItemsProcessed(state.iterations() * state.range(0));
    }

    void BM_CampaignParallel(benchmark::State &state)
    {
        const auto s = equivocation_n7();
        for (auto _ : state)
            benchmark::DoNotOptimize(run_campaign_parallel(s, 0, static_cast<std::uint64_t>(state.range(0)), 0));
        state.SetItemsProcessed(state.iterations() * state.range(0));
    }

    void BM_SingleRun(benchmark::State &state)
    {
        const auto s = all_correct_scenario(static_cast<std::uint32_t>(state.range(0)),
                                            static_cast<std::uint32_t>((state.range(0) - 1) / 3));
        for (auto _ : state)
            benchmark::DoNotOptimize(run(s));
    }
} // namespace

BENCHMARK(BM_CampaignSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CampaignParallel)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SingleRun)->Arg(4)->Arg(10)->Arg(31);

BENCHMARK_MAIN();
