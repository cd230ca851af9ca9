#include "brb/bracha.hpp"
#include "json_util.hpp"

namespace brb
{
    std::uint32_t bracha_echo_threshold(const SystemParams &params) noexcept
    {
        return (params.n() + params.t()) / 2 + 1;
    }

    std::uint32_t bracha_ready_amplify_threshold(const SystemParams &params) noexcept
    {
        return params.t() + 1;
    }

    std::uint32_t bracha_deliver_threshold(const SystemParams &params) noexcept
    {
        return 2 * params.t() + 1;
    }

    Actions bracha_broadcast(BrachaState &state, const Payload &value)
    {
        const InstanceKey key{state.self_id, state.next_sn++};
        Actions out;
        broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Init, key, value});
        return out;
    }

    namespace
    {
        void send_ready(BrachaState &state, BrachaInstance &inst, const ProtocolMessage &msg, Actions &out)
        {
            inst.ready_sent = true;
            broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Ready, msg.key, msg.value});
        }
    } // namespace

    Actions handle_bracha(BrachaState &state, ProcessId transport_sender, const ProtocolMessage &msg)
    {
        Actions out;
        switch (msg.tag)
        {
        case MessageTag::Init:
        {
            if (transport_sender != msg.key.sender)
            {
                ++state.diagnostics.spoofed_inits;
                return out;
            }
            BrachaInstance &inst = state.instances[msg.key];
            const bool first = !inst.init_seen;
            inst.init_seen = true;
            if (first && !inst.echo_sent)
            {
                inst.echo_sent = true;
                broadcast_to_all(out, state.params.n(), ProtocolMessage{MessageTag::Echo, msg.key, msg.value});
            }
            return out;
        }
        case MessageTag::Echo:
        {
            BrachaInstance &inst = state.instances[msg.key];
            auto &senders = inst.echoes[msg.value];
            senders.insert(transport_sender);
            if (senders.size() >= bracha_echo_threshold(state.params) && !inst.ready_sent)
            {
                send_ready(state, inst, msg, out);
            }
            return out;
        }
        case MessageTag::Ready:
        {
            BrachaInstance &inst = state.instances[msg.key];
            auto &senders = inst.readies[msg.value];
            senders.insert(transport_sender);
            if (senders.size() >= bracha_ready_amplify_threshold(state.params) && !inst.ready_sent)
            {
                send_ready(state, inst, msg, out);
            }
            if (senders.size() >= bracha_deliver_threshold(state.params) && !inst.delivered)
            {
                inst.delivered = true;
                inst.delivered_value = msg.value;
                out.emplace_back(DeliverAction{msg.key, msg.value});
            }
            return out;
        }
        default:
            ++state.diagnostics.foreign_tags;
            return out;
        }
    }

    using detail::json;

    namespace
    {
        constexpr std::string_view kFormat = "bracha-process-state";

        json tally_to_json(const std::map<Payload, std::set<ProcessId>> &tally)
        {
            json out = json::array();
            for (const auto &[value, senders] : tally)
            {
                json ids = json::array();
                for (ProcessId p : senders)
                {
                    ids.push_back(p.index);
                }
                out.push_back(json{{"value", to_hex(value)}, {"senders", std::move(ids)}});
            }
            return out;
        }

        void tally_from_json(const json &j, std::map<Payload, std::set<ProcessId>> &tally)
        {
            for (const auto &jt : j)
            {
                auto &senders = tally[from_hex(jt.at("value").get<std::string>())];
                for (const auto &id : jt.at("senders"))
                {
                    senders.insert(ProcessId{id.get<std::uint32_t>()});
                }
            }
        }
    } // namespace

    std::string snapshot(const BrachaState &state)
    {
        json instances = json::array();
        for (const auto &[key, inst] : state.instances)
        {
            instances.push_back(json{
                {"key", detail::key_to_json(key)},
                {"init_seen", inst.init_seen},
                {"echo_sent", inst.echo_sent},
                {"ready_sent", inst.ready_sent},
                {"delivered", inst.delivered},
                {"delivered_value", inst.delivered_value ? json(to_hex(*inst.delivered_value)) : json(nullptr)},
                {"echoes", tally_to_json(inst.echoes)},
                {"readies", tally_to_json(inst.readies)},
            });
        }
        json doc{
            {"format", kFormat},
            {"version", 1},
            {"params", detail::params_to_json(state.params)},
            {"self", state.self_id.index},
            {"next_sn", state.next_sn},
            {"diagnostics", {{"spoofed_inits", state.diagnostics.spoofed_inits}, {"foreign_tags", state.diagnostics.foreign_tags}}},
            {"instances", std::move(instances)},
        };
        return doc.dump();
    }

    BrachaState restore_bracha(std::string_view encoded)
    {
        return detail::decode_json(encoded, "bracha state", [](const json &doc) {
            detail::expect_format(doc, kFormat, 1);
            BrachaState state(detail::params_from_json(doc.at("params")), ProcessId{doc.at("self").get<std::uint32_t>()});
            state.next_sn = doc.at("next_sn").get<std::uint64_t>();
            state.diagnostics.spoofed_inits = doc.at("diagnostics").at("spoofed_inits").get<std::uint64_t>();
            state.diagnostics.foreign_tags = doc.at("diagnostics").at("foreign_tags").get<std::uint64_t>();
            for (const auto &ji : doc.at("instances"))
            {
                BrachaInstance inst;
                inst.init_seen = ji.at("init_seen").get<bool>();
                inst.echo_sent = ji.at("echo_sent").get<bool>();
                inst.ready_sent = ji.at("ready_sent").get<bool>();
                inst.delivered = ji.at("delivered").get<bool>();
                if (const auto &dv = ji.at("delivered_value"); !dv.is_null())
                {
                    inst.delivered_value = from_hex(dv.get<std::string>());
                }
                tally_from_json(ji.at("echoes"), inst.echoes);
                tally_from_json(ji.at("readies"), inst.readies);
                state.instances.emplace(detail::key_from_json(ji.at("key")), std::move(inst));
            }
            return state;
        });
    }
} // namespace brb
