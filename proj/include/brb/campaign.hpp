#pragma once

// Seeded fuzz campaigns over one scenario. run_campaign_parallel fans the seeds out with
// OpenMP; run_campaign_serial is the reference it is tested against. Both return results
// ordered by seed, so summaries do not depend on worker scheduling.

#include "brb/properties.hpp"
#include "brb/scenario.hpp"
#include "brb/simnet.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace brb
{
    struct SeedResult
    {
        std::uint64_t seed = 0;
        /// One entry per check_all() verdict, same order.
        std::vector<Status> statuses;
        bool hit_cap = false;
        std::uint64_t steps = 0;
        /// Non-empty when the run itself threw (invalid adversary sends, ...).
        std::string error;

        bool all_passed() const noexcept;
        /// Name of the first non-passing property, or empty.
        std::string first_failure() const;

        friend bool operator==(const SeedResult &, const SeedResult &) = default;
    };

    struct CampaignSummary
    {
        std::uint64_t runs = 0;
        std::map<std::string, std::uint64_t> pass_counts;
        std::uint64_t cap_hits = 0;
        std::uint64_t errors = 0;
        std::vector<std::uint64_t> failing_seeds;

        bool all_passed() const noexcept { return failing_seeds.empty() && errors == 0; }
    };

    /// The scenario with a SeededRandom(seed) scheduler and adversary randomness tied to the same seed.
    Scenario scenario_for_seed(const Scenario &base, std::uint64_t seed);

    SeedResult run_seed(const Scenario &base, std::uint64_t seed);

    std::vector<SeedResult> run_campaign_serial(const Scenario &base, std::uint64_t first_seed, std::uint64_t count);
    std::vector<SeedResult> run_campaign_parallel(const Scenario &base, std::uint64_t first_seed, std::uint64_t count,
                                                  int jobs);

    CampaignSummary summarize(const std::vector<SeedResult> &results);

    struct Counterexample
    {
        std::string property;
        /// Fifo-scheduled scenario with the adversary seed pinned; replaying `trace` under it
        /// regenerates the same trace.
        Scenario scenario;
        Trace trace;
        /// Number of receives forced from the original schedule before Fifo takes over.
        std::uint64_t forced_receives = 0;
        std::uint64_t original_receives = 0;
    };

    /// Finds the shortest prefix of the failing schedule that, completed by Fifo, still violates
    /// the same property. Returns nullopt if the seed does not fail.
    std::optional<Counterexample> shrink(const Scenario &base, std::uint64_t seed);
} // namespace brb
