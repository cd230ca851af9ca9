// Linked against a mutant build of the library. Exits 0 iff a seeded campaign exposes the
// mutant, i.e. the checkers are not vacuous.
//   PROBE_FORWARD: forward at tally >= t. Expect a correct process to forward a flooded fake value.
//   PROBE_DELIVER: deliver at tally >= t+1. Expect an agreement or validity violation under equivocation.

#include "brb/campaign.hpp"
#include "brb/params.hpp"
#include "brb/properties.hpp"
#include "brb/simnet.hpp"

#include <iostream>

using namespace brb;

namespace
{
    constexpr std::uint64_t kSeeds = 1000;

#if defined(PROBE_FORWARD)
    int probe()
    {
        const auto params = SystemParams::make(4, 1);
        if (forward_threshold(params) != params.t())
        {
            std::cerr << "probe linked against a non-mutant library\n";
            return 2;
        }
        struct Config
        {
            std::uint32_t n, t;
        };
        for (const Config c : {Config{4, 1}, Config{7, 2}})
        {
            Scenario s;
            s.params = SystemParams::make(c.n, c.t);
            s.broadcasts.push_back({ProcessId{1}, 0, "real"});
            const InstanceKey target{ProcessId{2}, 0};
            for (std::uint32_t b = 0; b < c.t; ++b)
                s.byzantine.push_back({ProcessId{c.n - b}, strategy::FakeWitnessFlood{target, "fake"}});

            std::uint64_t caught = 0;
            for (std::uint64_t seed = 0; seed < kSeeds; ++seed)
            {
                const auto trace = run(scenario_for_seed(s, seed));
                if (count_correct_sends(trace, MessageTag::Witness, target, "fake") > 0)
                    ++caught;
            }
            std::cout << "forward-at-t mutant, n=" << c.n << " t=" << c.t << ": fake value forwarded in " << caught
                      << "/" << kSeeds << " schedules\n";
            if (caught == 0)
                return 1;
        }
        return 0;
    }
#elif defined(PROBE_DELIVER)
    int probe()
    {
        const auto params = SystemParams::make(4, 1);
        if (deliver_threshold(params) != params.t() + 1)
        {
            std::cerr << "probe linked against a non-mutant library\n";
            return 2;
        }
        Scenario s;
        s.params = params;
        s.broadcasts.push_back({ProcessId{1}, 0, "real"});
        s.byzantine.push_back({ProcessId{4}, strategy::EquivocateInit{"va", "vb", {}, true, 0}});

        std::uint64_t caught = 0;
        for (std::uint64_t seed = 0; seed < kSeeds; ++seed)
        {
            const auto trace = run(scenario_for_seed(s, seed));
            if (!check_agreement(trace).passed() || !check_validity(trace).passed())
                ++caught;
        }
        std::cout << "deliver-at-t+1 mutant, n=4 t=1 equivocation: agreement/validity violated in " << caught << "/"
                  << kSeeds << " schedules\n";
        return caught > 0 ? 0 : 1;
    }
#else
#error "define PROBE_FORWARD or PROBE_DELIVER"
#endif
} // namespace

int main()
{
    return probe();
}
