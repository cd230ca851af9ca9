#include "brb/types.hpp"
#include "brb/params.hpp"

#include <string>

namespace brb
{
    std::string_view tag_name(MessageTag tag) noexcept
    {
        switch (tag)
        {
        case MessageTag::Init:
            return "INIT";
        case MessageTag::Witness:
            return "WITNESS";
        case MessageTag::Echo:
            return "ECHO";
        case MessageTag::Ready:
            return "READY";
        }
        return "?";
    }

    MessageTag parse_tag(std::string_view name)
    {
        if (name == "INIT")
            return MessageTag::Init;
        if (name == "WITNESS")
            return MessageTag::Witness;
        if (name == "ECHO")
            return MessageTag::Echo;
        if (name == "READY")
            return MessageTag::Ready;
        throw DecodeError("unknown message tag '" + std::string(name) + "'");
    }

    void broadcast_to_all(Actions &out, std::uint32_t n, const ProtocolMessage &msg)
    {
        out.reserve(out.size() + n);
        for (std::uint32_t i = 1; i <= n; ++i)
        {
            out.emplace_back(SendAction{ProcessId{i}, msg});
        }
    }

    std::string to_hex(std::string_view bytes)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(bytes.size() * 2);
        for (unsigned char c : bytes)
        {
            out.push_back(digits[c >> 4]);
            out.push_back(digits[c & 0x0f]);
        }
        return out;
    }

    namespace
    {
        int hex_value(char c)
        {
            if (c >= '0' && c <= '9')
                return c - '0';
            if (c >= 'a' && c <= 'f')
                return c - 'a' + 10;
            if (c >= 'A' && c <= 'F')
                return c - 'A' + 10;
            return -1;
        }
    } // namespace

    std::string from_hex(std::string_view hex)
    {
        if (hex.size() % 2 != 0)
        {
            throw DecodeError("hex string has odd length");
        }
        std::string out;
        out.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2)
        {
            const int hi = hex_value(hex[i]);
            const int lo = hex_value(hex[i + 1]);
            if (hi < 0 || lo < 0)
            {
                throw DecodeError("invalid hex digit");
            }
            out.push_back(static_cast<char>((hi << 4) | lo));
        }
        return out;
    }

    std::string_view mode_name(ThresholdMode mode) noexcept
    {
        return mode == ThresholdMode::Quorum ? "quorum" : "n_minus_t";
    }

    ThresholdMode parse_mode(std::string_view name)
    {
        if (name == "quorum")
            return ThresholdMode::Quorum;
        if (name == "n_minus_t")
            return ThresholdMode::NMinusT;
        throw ParamsError("unknown threshold mode '" + std::string(name) + "' (expected quorum | n_minus_t)");
    }

    SystemParams SystemParams::make(std::uint32_t n, std::uint32_t t, ThresholdMode mode, bool unsafe_allow)
    {
        if (n < 2)
        {
            throw ParamsError("n must be at least 2");
        }
        if (t >= n)
        {
            throw ParamsError("t must be smaller than n");
        }
        if (n <= 3 * t && !unsafe_allow)
        {
            throw ParamsError("n must exceed 3t (set unsafe_allow to build a boundary scenario)");
        }
        return SystemParams(n, t, mode, unsafe_allow);
    }

    // BRB_MUTATION selects deliberately broken thresholds for the mutation-test builds:
    //   1: forward at tally >= t, 2: deliver at tally >= t+1.
#ifndef BRB_MUTATION
#define BRB_MUTATION 0
#endif

    std::uint32_t forward_threshold(const SystemParams &params) noexcept
    {
#if BRB_MUTATION == 1
        return params.t();
#else
        return params.t() + 1;
#endif
    }

    std::uint32_t deliver_threshold(const SystemParams &params) noexcept
    {
#if BRB_MUTATION == 2
        return params.t() + 1;
#else
        if (params.mode() == ThresholdMode::NMinusT)
        {
            return params.n() - params.t();
        }
        return (params.n() + params.t()) / 2 + 1;
#endif
    }
} // namespace brb
