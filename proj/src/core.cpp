#include "brb/core.hpp"

namespace brb
{
    Actions rb_broadcast(ProcessState &state, const Payload &value)
    {
        const InstanceKey key{state.self_id, state.next_sn++};
        Actions out;
        broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Init, key, value});
        return out;
    }

    Actions handle_init(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg)
    {
        Actions out;
        // The channel identifies the sender; an INIT for someone else's instance is forged.
        if (transport_sender != msg.key.sender)
        {
            ++state.diagnostics.spoofed_inits;
            return out;
        }

        InstanceState &inst = state.instances[msg.key];
        const bool first_init = !inst.init_seen;
        inst.init_seen = true;
        if (first_init && !inst.witness_broadcast)
        {
            inst.witness_broadcast = true;
            broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Witness, msg.key, msg.value});
        }
        return out;
    }

    Actions handle_witness(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg)
    {
        Actions out;
        InstanceState &inst = state.instances[msg.key];
        auto &senders = inst.witness_tally[msg.value];
        senders.insert(transport_sender);
        const auto tally = static_cast<std::uint32_t>(senders.size());

        if (tally >= forward_threshold(state.params) && !inst.witness_broadcast)
        {
            inst.witness_broadcast = true;
            broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Witness, msg.key, msg.value});
        }
        if (tally >= deliver_threshold(state.params) && !inst.delivered)
        {
            inst.delivered = true;
            inst.delivered_value = msg.value;
            out.emplace_back(DeliverAction{msg.key, msg.value});
        }
        return out;
    }

    Actions handle_message(ProcessState &state, ProcessId transport_sender, const ProtocolMessage &msg)
    {
        switch (msg.tag)
        {
        case MessageTag::Init:
            return handle_init(state, transport_sender, msg);
        case MessageTag::Witness:
            return handle_witness(state, transport_sender, msg);
        default:
            ++state.diagnostics.foreign_tags;
            return {};
        }
    }
} // namespace brb
