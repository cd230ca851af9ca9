#pragma once

#include "brb/params.hpp"
#include "brb/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace brb
{
    /// Per-instance protocol flags and witness tallies of one correct process.
    struct InstanceState
    {
        bool init_seen = false;
        bool witness_broadcast = false;
        bool delivered = false;
        std::optional<Payload> delivered_value;
        /// value -> distinct WITNESS senders for that value
        std::map<Payload, std::set<ProcessId>> witness_tally;

        friend bool operator==(const InstanceState &, const InstanceState &) = default;
    };

    /// Counters for inputs that signal Byzantine misbehaviour. They never affect protocol state.
    struct Diagnostics
    {
        /// INIT whose transport sender differs from key.sender.
        std::uint64_t spoofed_inits = 0;
        /// Tags this protocol does not speak.
        std::uint64_t foreign_tags = 0;

        friend bool operator==(const Diagnostics &, const Diagnostics &) = default;
    };

    /// Full state of one correct process running the two-step INIT/WITNESS broadcast.
    /// Transitions are deterministic functions of (state, event); nothing here performs I/O.
    struct ProcessState
    {
        SystemParams params;
        ProcessId self_id;
        std::map<InstanceKey, InstanceState> instances;
        std::uint64_t next_sn = 0;
        Diagnostics diagnostics;

        ProcessState(SystemParams p, ProcessId self) : params(p), self_id(self) {}

        friend bool operator==(const ProcessState &, const ProcessState &) = default;
    };

    /// RB-broadcast of a new value: n INIT sends under the next sequence number.
    /// Local instance state is untouched; the own INIT loops back through the network.
    Actions rb_broadcast(ProcessState &state, const Payload &value);

    /// INIT received over the channel from transport_sender.
    Actions handle_init(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg);

    /// WITNESS received over the channel from transport_sender. May forward and deliver in one event.
    Actions handle_witness(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg);

    /// Dispatch on msg.tag. ECHO/READY are counted as foreign and ignored.
    Actions handle_message(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg);

    /// Versioned JSON encoding of the full state; restore(snapshot(s)) == s.
    std::string snapshot(const ProcessState &state);
    /// Throws DecodeError on malformed or truncated input.
    ProcessState restore(std::string_view encoded);

    std::string encode_message(const ProtocolMessage &msg);
    ProtocolMessage decode_message(std::string_view encoded);
} // namespace brb
