#pragma once

// Internal JSON helpers shared by the state, message and trace encodings.

#include "brb/params.hpp"
#include "brb/types.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace brb::detail
{
    using nlohmann::json;

    json params_to_json(const SystemParams &p);
    SystemParams params_from_json(const json &j);

    json key_to_json(const InstanceKey &key);
    InstanceKey key_from_json(const json &j);

    json message_to_json(const ProtocolMessage &msg);
    ProtocolMessage message_from_json(const json &j);

    /// Parses text and runs fn on the document, mapping every library or params error to DecodeError.
    template <typename Fn>
    auto decode_json(std::string_view text, std::string_view what, Fn &&fn)
    {
        try
        {
            return fn(json::parse(text));
        }
        catch (const DecodeError &)
        {
            throw;
        }
        catch (const std::exception &e)
        {
            throw DecodeError(std::string(what) + ": " + e.what());
        }
    }

    /// Checks the {"format": ..., "version": ...} envelope.
    void expect_format(const json &j, std::string_view format, int version);
} // namespace brb::detail

namespace brb
{
    struct Scenario;
}

namespace brb::detail
{
    json scenario_to_json_value(const Scenario &s);
    /// Throws ScenarioError with the offending field path.
    Scenario scenario_from_json_value(const json &j);
} // namespace brb::detail
