#pragma once

#include "brb/scenario.hpp"
#include "brb/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace brb
{
    enum class RecordKind : std::uint8_t
    {
        Send,
        Receive,
        Deliver,
        /// Input rejected by a correct process (spoofed INIT, foreign tag).
        Anomaly,
    };

    std::string_view record_kind_name(RecordKind k) noexcept;

    /// One line of the event log.
    ///   Send:    source -> dest, msg, depth = 1 + depth of the triggering event (injections are 0).
    ///   Receive: source -> dest, msg, depth = depth of the matching send; cause = seq of that send.
    ///   Deliver: at dest (== source), msg.key/msg.value, depth = depth of the triggering receive.
    ///   Anomaly: at dest, msg as received, cause = seq of the receive.
    struct TraceRecord
    {
        std::uint64_t seq = 0;
        RecordKind kind = RecordKind::Send;
        ProcessId source;
        ProcessId dest;
        ProtocolMessage msg;
        std::uint32_t depth = 0;
        /// Seq of the triggering record; 0 when triggered by an injection.
        std::uint64_t cause = 0;
        std::string note;

        friend bool operator==(const TraceRecord &, const TraceRecord &) = default;
    };

    struct Trace
    {
        Scenario scenario;
        std::vector<TraceRecord> records;
        /// Snapshot of process i at index i-1; empty for Byzantine processes.
        std::vector<std::string> final_snapshots;
        bool quiescent = false;
        /// Number of scheduler steps (receives) executed.
        std::uint64_t steps = 0;
        /// Set when the run stopped at the event cap.
        std::optional<std::string> abort_reason;

        friend bool operator==(const Trace &, const Trace &) = default;
    };

    class ReplayError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Executes the scenario to quiescence (or the event cap). Deterministic for a fixed scenario.
    Trace run(const Scenario &scenario);

    /// Re-executes `scenario`, forcing the receive order recorded in `prefix` and checking that
    /// every prefix record is regenerated exactly; the scenario's scheduler then finishes the run.
    /// Throws ReplayError when the prefix is not reproducible under the scenario.
    Trace replay(const std::vector<TraceRecord> &prefix, const Scenario &scenario);

    /// Line-delimited JSON: a versioned header carrying the scenario, one line per record,
    /// one line per final snapshot, and a closing summary line.
    std::string write_trace(const Trace &trace);
    /// Throws DecodeError (format) or ScenarioError (embedded scenario).
    Trace read_trace(std::string_view text);

    void save_trace(const Trace &trace, const std::string &path);
    Trace load_trace(const std::string &path);
} // namespace brb
