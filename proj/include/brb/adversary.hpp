#pragma once

#include "brb/params.hpp"
#include "brb/rng.hpp"
#include "brb/types.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace brb
{
    /// Raised for scenarios that cannot be executed as written (bad ids, impersonation, ...).
    class ScenarioError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    namespace strategy
    {
        struct Silent
        {
            friend bool operator==(const Silent &, const Silent &) = default;
        };

        /// Sends INIT((self, sn), value) to `recipients` only, then stops.
        /// An empty recipient list means a random subset drawn from the adversary rng.
        struct CrashMidBroadcast
        {
            std::vector<ProcessId> recipients;
            Payload value = "crash";
            std::uint64_t sn = 0;

            friend bool operator==(const CrashMidBroadcast &, const CrashMidBroadcast &) = default;
        };

        /// INIT((self, sn), value_a) to partition A, INIT((self, sn), value_b) to every other process.
        /// with_witness additionally sends WITNESS(value_a) to A and WITNESS(value_b) to the rest.
        /// An empty partition means a random split.
        struct EquivocateInit
        {
            Payload value_a = "a";
            Payload value_b = "b";
            std::vector<ProcessId> partition_a;
            bool with_witness = false;
            std::uint64_t sn = 0;

            friend bool operator==(const EquivocateInit &, const EquivocateInit &) = default;
        };

        /// Broadcasts WITNESS(target, fake_value) to all processes.
        struct FakeWitnessFlood
        {
            InstanceKey target;
            Payload fake_value = "fake";

            friend bool operator==(const FakeWitnessFlood &, const FakeWitnessFlood &) = default;
        };

        /// WITNESS(target, value_a) to partition A and WITNESS(target, value_b) to every other process.
        struct TwoFacedWitness
        {
            InstanceKey target;
            std::vector<ProcessId> partition_a;
            Payload value_a = "a";
            Payload value_b = "b";

            friend bool operator==(const TwoFacedWitness &, const TwoFacedWitness &) = default;
        };

        struct ScriptSend
        {
            /// Declared origin. Must be absent or equal to the scripted process itself.
            std::optional<ProcessId> from;
            /// Empty means every process.
            std::vector<ProcessId> to;
            MessageTag tag = MessageTag::Witness;
            InstanceKey key;
            Payload value;
            /// Use the value of the triggering received message instead of `value`.
            bool echo_value = false;

            friend bool operator==(const ScriptSend &, const ScriptSend &) = default;
        };

        struct ReceiveMatch
        {
            std::optional<MessageTag> tag;
            std::optional<ProcessId> from;
            std::optional<ProcessId> key_sender;
            std::optional<Payload> value;

            friend bool operator==(const ReceiveMatch &, const ReceiveMatch &) = default;
        };

        struct ScriptRule
        {
            /// nullopt: fire at start. Otherwise fire on matching receipts.
            std::optional<ReceiveMatch> on_receive;
            std::uint32_t max_fires = 1;
            std::vector<ScriptSend> sends;

            friend bool operator==(const ScriptRule &, const ScriptRule &) = default;
        };

        struct Custom
        {
            std::vector<ScriptRule> rules;

            friend bool operator==(const Custom &, const Custom &) = default;
        };
    } // namespace strategy

    using AdversaryStrategy = std::variant<strategy::Silent, strategy::CrashMidBroadcast, strategy::EquivocateInit,
                                           strategy::FakeWitnessFlood, strategy::TwoFacedWitness, strategy::Custom>;

    std::string_view strategy_name(const AdversaryStrategy &s) noexcept;

    /// Rejects out-of-range process ids and scripts that declare another process as origin.
    void validate_strategy(const AdversaryStrategy &s, ProcessId self, const SystemParams &params);

    struct ReceivedMessage
    {
        ProcessId from;
        ProtocolMessage msg;
    };

    /// What a Byzantine process knows when it acts: its own identity, the system size,
    /// everything it has received, and the receipt that woke it (none at start).
    struct AdversaryView
    {
        ProcessId self;
        SystemParams params;
        std::vector<ReceivedMessage> received;
        std::optional<ReceivedMessage> trigger;
    };

    /// A scripted Byzantine process. Only Send actions are ever produced; the transport
    /// stamps them with `self`, so impersonation is impossible by construction.
    class AdversaryProcess
    {
    public:
        AdversaryProcess(AdversaryStrategy strategy, ProcessId self, SystemParams params);

        const AdversaryStrategy &strategy() const noexcept { return strategy_; }
        ProcessId id() const noexcept { return view_.self; }

        /// Actions at simulation start.
        Actions start(Rng &rng);
        /// Actions in reaction to a receipt.
        Actions on_receive(ProcessId from, const ProtocolMessage &msg, Rng &rng);

    private:
        AdversaryStrategy strategy_;
        AdversaryView view_;
        std::vector<std::uint32_t> fires_;
    };

    /// One adversary step as a function of (strategy, view, rng). `fires` counts how often each
    /// Custom rule has fired and is updated in place; built-in strategies act only at start.
    Actions step_adversary(const AdversaryStrategy &s, const AdversaryView &view, Rng &rng,
                           std::vector<std::uint32_t> &fires);
} // namespace brb
