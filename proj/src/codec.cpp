#include "brb/core.hpp"
#include "json_util.hpp"

namespace brb
{
    namespace detail
    {
        json params_to_json(const SystemParams &p)
        {
            return json{{"n", p.n()}, {"t", p.t()}, {"mode", mode_name(p.mode())}, {"unsafe_allow", p.unsafe_allow()}};
        }

        SystemParams params_from_json(const json &j)
        {
            return SystemParams::make(j.at("n").get<std::uint32_t>(), j.at("t").get<std::uint32_t>(),
                                      parse_mode(j.at("mode").get<std::string>()),
                                      j.at("unsafe_allow").get<bool>());
        }

        json key_to_json(const InstanceKey &key)
        {
            return json{{"sender", key.sender.index}, {"sn", key.sn}};
        }

        InstanceKey key_from_json(const json &j)
        {
            return InstanceKey{ProcessId{j.at("sender").get<std::uint32_t>()}, j.at("sn").get<std::uint64_t>()};
        }

        json message_to_json(const ProtocolMessage &msg)
        {
            return json{{"tag", tag_name(msg.tag)}, {"key", key_to_json(msg.key)}, {"value", to_hex(msg.value)}};
        }

        ProtocolMessage message_from_json(const json &j)
        {
            return ProtocolMessage{parse_tag(j.at("tag").get<std::string>()), key_from_json(j.at("key")),
                                   from_hex(j.at("value").get<std::string>())};
        }

        void expect_format(const json &j, std::string_view format, int version)
        {
            if (j.at("format").get<std::string>() != format)
            {
                throw DecodeError("expected format '" + std::string(format) + "'");
            }
            if (j.at("version").get<int>() != version)
            {
                throw DecodeError("unsupported " + std::string(format) + " version");
            }
        }
    } // namespace detail

    using detail::json;

    namespace
    {
        constexpr std::string_view kStateFormat = "brb-process-state";
        constexpr std::string_view kMessageFormat = "brb-message";
        constexpr int kVersion = 1;
    } // namespace

    std::string snapshot(const ProcessState &state)
    {
        json instances = json::array();
        for (const auto &[key, inst] : state.instances)
        {
            json tally = json::array();
            for (const auto &[value, senders] : inst.witness_tally)
            {
                json ids = json::array();
                for (ProcessId p : senders)
                {
                    ids.push_back(p.index);
                }
                tally.push_back(json{{"value", to_hex(value)}, {"senders", std::move(ids)}});
            }
            instances.push_back(json{
                {"key", detail::key_to_json(key)},
                {"init_seen", inst.init_seen},
                {"witness_broadcast", inst.witness_broadcast},
                {"delivered", inst.delivered},
                {"delivered_value", inst.delivered_value ? json(to_hex(*inst.delivered_value)) : json(nullptr)},
                {"witness_tally", std::move(tally)},
            });
        }
        json doc{
            {"format", kStateFormat},
            {"version", kVersion},
            {"params", detail::params_to_json(state.params)},
            {"self", state.self_id.index},
            {"next_sn", state.next_sn},
            {"diagnostics", {{"spoofed_inits", state.diagnostics.spoofed_inits}, {"foreign_tags", state.diagnostics.foreign_tags}}},
            {"instances", std::move(instances)},
        };
        return doc.dump();
    }

    ProcessState restore(std::string_view encoded)
    {
        return detail::decode_json(encoded, "process state", [](const json &doc) {
            detail::expect_format(doc, kStateFormat, kVersion);
            ProcessState state(detail::params_from_json(doc.at("params")), ProcessId{doc.at("self").get<std::uint32_t>()});
            state.next_sn = doc.at("next_sn").get<std::uint64_t>();
            state.diagnostics.spoofed_inits = doc.at("diagnostics").at("spoofed_inits").get<std::uint64_t>();
            state.diagnostics.foreign_tags = doc.at("diagnostics").at("foreign_tags").get<std::uint64_t>();
            for (const auto &ji : doc.at("instances"))
            {
                InstanceState inst;
                inst.init_seen = ji.at("init_seen").get<bool>();
                inst.witness_broadcast = ji.at("witness_broadcast").get<bool>();
                inst.delivered = ji.at("delivered").get<bool>();
                const auto &dv = ji.at("delivered_value");
                if (!dv.is_null())
                {
                    inst.delivered_value = from_hex(dv.get<std::string>());
                }
                if (inst.delivered != inst.delivered_value.has_value())
                {
                    throw DecodeError("delivered flag and delivered_value disagree");
                }
                for (const auto &jt : ji.at("witness_tally"))
                {
                    auto &senders = inst.witness_tally[from_hex(jt.at("value").get<std::string>())];
                    for (const auto &id : jt.at("senders"))
                    {
                        senders.insert(ProcessId{id.get<std::uint32_t>()});
                    }
                }
                state.instances.emplace(detail::key_from_json(ji.at("key")), std::move(inst));
            }
            return state;
        });
    }

    std::string encode_message(const ProtocolMessage &msg)
    {
        json doc = detail::message_to_json(msg);
        doc["format"] = kMessageFormat;
        doc["version"] = kVersion;
        return doc.dump();
    }

    ProtocolMessage decode_message(std::string_view encoded)
    {
        return detail::decode_json(encoded, "message", [](const json &doc) {
            detail::expect_format(doc, kMessageFormat, kVersion);
            return detail::message_from_json(doc);
        });
    }
} // namespace brb
