#pragma once

#include "brb/simnet.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace brb
{
    enum class Status : std::uint8_t
    {
        Pass,
        Fail,
        Inconclusive,
    };

    std::string_view status_name(Status s) noexcept;

    struct Verdict
    {
        std::string property;
        Status status = Status::Pass;
        /// Record that witnesses the violation; for liveness failures, the last record of the trace.
        std::optional<std::uint64_t> violating_seq;
        std::string detail;

        bool passed() const noexcept { return status == Status::Pass; }
    };

    // Each checker is a pure function of the trace. Correct vs Byzantine comes from the embedded
    // scenario; "eventually" means "by quiescence", so non-quiescent traces are Inconclusive.

    /// Deliveries of a correct sender's instance match an injected broadcast.
    Verdict check_validity(const Trace &trace);
    /// At most one delivery per (process, key).
    Verdict check_integrity(const Trace &trace);
    /// No two correct processes deliver different values for one key.
    Verdict check_agreement(const Trace &trace);
    /// Every injected broadcast is delivered by every correct process.
    Verdict check_termination1(const Trace &trace);
    /// A value delivered by one correct process is delivered by all correct processes.
    Verdict check_termination2(const Trace &trace);
    /// Channel audit: each receive matches an earlier identical send with the same depth,
    /// and at quiescence every send was received exactly once.
    Verdict check_channel(const Trace &trace);

    inline constexpr std::array<std::string_view, 5> kRbProperties = {
        "validity", "integrity", "agreement", "termination1", "termination2"};

    /// The five RB properties followed by the channel audit.
    std::vector<Verdict> check_all(const Trace &trace);

    struct Metrics
    {
        /// Sends by correct processes to other processes, by tag name.
        std::map<std::string, std::uint64_t> messages_by_tag;
        std::uint64_t total = 0;
        /// Same accounting for Byzantine senders, reported separately.
        std::map<std::string, std::uint64_t> byzantine_by_tag;
        std::uint64_t byzantine_total = 0;
        /// Largest causal depth of a delivery at a correct process (0 if none).
        std::uint32_t max_delivery_depth = 0;
        std::uint64_t deliveries = 0;
        /// Index i-1: messages sent to others by process i.
        std::vector<std::uint64_t> per_process_sent;
    };

    Metrics metrics(const Trace &trace);

    /// Sends by correct processes of (tag, key, value), self-sends included.
    std::uint64_t count_correct_sends(const Trace &trace, MessageTag tag, const InstanceKey &key, const Payload &value);

    enum class ReportFormat : std::uint8_t
    {
        Text,
        Csv,
        Structured,
    };

    ReportFormat parse_report_format(std::string_view s);

    /// Verdict table plus metrics in the requested format.
    std::string format_report(const std::vector<Verdict> &verdicts, const Metrics &m, ReportFormat format);
} // namespace brb
