#pragma once

#include "brb/adversary.hpp"
#include "brb/params.hpp"
#include "brb/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace brb
{
    enum class Algorithm : std::uint8_t
    {
        Brb,
        Bracha,
    };

    std::string_view algorithm_name(Algorithm a) noexcept;

    struct ByzantineSpec
    {
        ProcessId id;
        AdversaryStrategy strategy;

        friend bool operator==(const ByzantineSpec &, const ByzantineSpec &) = default;
    };

    struct BroadcastSpec
    {
        ProcessId sender;
        std::uint64_t sn = 0;
        Payload value;

        friend bool operator==(const BroadcastSpec &, const BroadcastSpec &) = default;
    };

    namespace policy
    {
        struct SeededRandom
        {
            std::uint64_t seed = 0;
            friend bool operator==(const SeededRandom &, const SeededRandom &) = default;
        };

        struct Fifo
        {
            friend bool operator==(const Fifo &, const Fifo &) = default;
        };

        /// Declarative priority rule over in-flight messages. Unset filters match anything.
        struct OrderingRule
        {
            enum class Action : std::uint8_t
            {
                Starve,
                Prefer,
            };
            Action action = Action::Starve;
            std::optional<MessageTag> tag;
            std::optional<ProcessId> from;
            std::optional<ProcessId> to;
            std::optional<ProcessId> key_sender;
            std::optional<Payload> value;
            /// Rule stops applying once this process has delivered anything.
            std::optional<ProcessId> until_delivered_by;

            friend bool operator==(const OrderingRule &, const OrderingRule &) = default;
        };

        /// Picks the oldest preferred, non-starved message; falls back to the oldest non-starved,
        /// then to the oldest overall (starved messages are still delivered eventually).
        struct AdversarialScript
        {
            std::vector<OrderingRule> rules;
            friend bool operator==(const AdversarialScript &, const AdversarialScript &) = default;
        };
    } // namespace policy

    using SchedulerPolicy = std::variant<policy::SeededRandom, policy::Fifo, policy::AdversarialScript>;

    struct Scenario
    {
        SystemParams params = SystemParams::make(4, 1);
        Algorithm algorithm = Algorithm::Brb;
        std::vector<ByzantineSpec> byzantine;
        std::vector<BroadcastSpec> broadcasts;
        SchedulerPolicy scheduler = policy::Fifo{};
        /// Seed for adversary randomness; defaults to the scheduler seed (0 for non-random policies).
        std::optional<std::uint64_t> adversary_seed;
        /// Cap on scheduler steps; defaults to 50*n^2.
        std::optional<std::uint64_t> max_events;
        std::uint64_t max_payload_bytes = 4096;

        bool is_byzantine(ProcessId p) const noexcept;
        std::uint64_t effective_max_events() const noexcept;
        std::uint64_t effective_adversary_seed() const noexcept;

        friend bool operator==(const Scenario &, const Scenario &) = default;
    };

    /// Checks the cross-field rules: |byzantine| <= t, distinct ids, broadcasts only at correct
    /// processes with consecutive sn from 0, payload sizes, strategy validity. Throws ScenarioError.
    void validate(const Scenario &s);

    /// Parses and validates the JSON scenario schema. Errors name the line (syntax) or field path.
    Scenario parse_scenario(std::string_view text);
    Scenario load_scenario_file(const std::string &path);
    std::string scenario_to_json(const Scenario &s);

    /// All processes correct, one broadcast from p1, FIFO scheduling.
    Scenario all_correct_scenario(std::uint32_t n, std::uint32_t t, Algorithm algorithm = Algorithm::Brb,
                                  ThresholdMode mode = ThresholdMode::Quorum);
} // namespace brb
