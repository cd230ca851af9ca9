#pragma once

// Three-phase INIT/ECHO/READY echo broadcast, kept only as a cost baseline.
// Thresholds follow Bracha's published algorithm (Inf. & Comp. 1987):
//   ECHO from > (n+t)/2 -> READY, READY from t+1 -> READY, READY from 2t+1 -> deliver.

#include "brb/core.hpp"
#include "brb/params.hpp"
#include "brb/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace brb
{
    struct BrachaInstance
    {
        bool init_seen = false;
        bool echo_sent = false;
        bool ready_sent = false;
        bool delivered = false;
        std::optional<Payload> delivered_value;
        std::map<Payload, std::set<ProcessId>> echoes;
        std::map<Payload, std::set<ProcessId>> readies;

        friend bool operator==(const BrachaInstance &, const BrachaInstance &) = default;
    };

    struct BrachaState
    {
        SystemParams params;
        ProcessId self_id;
        std::map<InstanceKey, BrachaInstance> instances;
        std::uint64_t next_sn = 0;
        Diagnostics diagnostics;

        BrachaState(SystemParams p, ProcessId self) : params(p), self_id(self) {}

        friend bool operator==(const BrachaState &, const BrachaState &) = default;
    };

    std::uint32_t bracha_echo_threshold(const SystemParams &params) noexcept;
    std::uint32_t bracha_ready_amplify_threshold(const SystemParams &params) noexcept;
    std::uint32_t bracha_deliver_threshold(const SystemParams &params) noexcept;

    Actions bracha_broadcast(BrachaState &state, const Payload &value);
    Actions handle_bracha(BrachaState &state, ProcessId transport_sender, const ProtocolMessage &msg);

    std::string snapshot(const BrachaState &state);
    BrachaState restore_bracha(std::string_view encoded);
} // namespace brb
