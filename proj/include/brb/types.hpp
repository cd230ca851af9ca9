#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace brb
{
    /// Opaque value carried by a broadcast. Compared by byte equality only.
    using Payload = std::string;

    /// 1-based process index. Always attached by the transport, never taken from message content.
    struct ProcessId
    {
        std::uint32_t index = 0;

        friend constexpr auto operator<=>(const ProcessId &, const ProcessId &) = default;
    };

    /// Identifies one broadcast instance: the originating process and its sequence number.
    struct InstanceKey
    {
        ProcessId sender;
        std::uint64_t sn = 0;

        friend constexpr auto operator<=>(const InstanceKey &, const InstanceKey &) = default;
    };

    enum class MessageTag : std::uint8_t
    {
        Init,
        Witness,
        // Bracha baseline only.
        Echo,
        Ready,
    };

    std::string_view tag_name(MessageTag tag) noexcept;
    MessageTag parse_tag(std::string_view name);

    struct ProtocolMessage
    {
        MessageTag tag = MessageTag::Init;
        InstanceKey key;
        Payload value;

        friend bool operator==(const ProtocolMessage &, const ProtocolMessage &) = default;
    };

    struct SendAction
    {
        ProcessId dest;
        ProtocolMessage msg;

        friend bool operator==(const SendAction &, const SendAction &) = default;
    };

    struct DeliverAction
    {
        InstanceKey key;
        Payload value;

        friend bool operator==(const DeliverAction &, const DeliverAction &) = default;
    };

    using Action = std::variant<SendAction, DeliverAction>;
    using Actions = std::vector<Action>;

    /// Appends one Send per process p1..pn, self included.
    void broadcast_to_all(Actions &out, std::uint32_t n, const ProtocolMessage &msg);

    class DecodeError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    std::string to_hex(std::string_view bytes);
    /// Throws DecodeError on odd length or non-hex characters.
    std::string from_hex(std::string_view hex);
} // namespace brb
