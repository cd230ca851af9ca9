#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace brb
{
    enum class ThresholdMode : std::uint8_t
    {
        /// Deliver on strictly more than (n+t)/2 distinct witnesses.
        Quorum,
        /// Deliver on n-t distinct witnesses.
        NMinusT,
    };

    std::string_view mode_name(ThresholdMode mode) noexcept;
    ThresholdMode parse_mode(std::string_view name);

    class ParamsError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// System size and fault budget. Construct through make(), which enforces n > 3t
    /// unless unsafe_allow is set (used only for resilience-boundary exhibits).
    class SystemParams
    {
    public:
        static SystemParams make(std::uint32_t n, std::uint32_t t,
                                 ThresholdMode mode = ThresholdMode::Quorum,
                                 bool unsafe_allow = false);

        std::uint32_t n() const noexcept { return n_; }
        std::uint32_t t() const noexcept { return t_; }
        ThresholdMode mode() const noexcept { return mode_; }
        bool unsafe_allow() const noexcept { return unsafe_allow_; }

        friend bool operator==(const SystemParams &, const SystemParams &) = default;

    private:
        SystemParams(std::uint32_t n, std::uint32_t t, ThresholdMode mode, bool unsafe_allow)
            : n_(n), t_(t), mode_(mode), unsafe_allow_(unsafe_allow) {}

        std::uint32_t n_;
        std::uint32_t t_;
        ThresholdMode mode_;
        bool unsafe_allow_;
    };

    /// Number of distinct WITNESS senders for one value that triggers forwarding (t+1).
    std::uint32_t forward_threshold(const SystemParams &params) noexcept;

    /// Number of distinct WITNESS senders for one value that triggers delivery:
    /// floor((n+t)/2)+1 in Quorum mode, n-t in NMinusT mode.
    std::uint32_t deliver_threshold(const SystemParams &params) noexcept;
} // namespace brb
