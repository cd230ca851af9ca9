#include "brb/properties.hpp"
#include "json_util.hpp"

#include <iomanip>
#include <set>
#include <sstream>

namespace brb
{
    std::string_view status_name(Status s) noexcept
    {
        switch (s)
        {
        case Status::Pass:
            return "PASS";
        case Status::Fail:
            return "FAIL";
        case Status::Inconclusive:
            return "INCONCLUSIVE";
        }
        return "?";
    }

    namespace
    {
        std::string key_str(const InstanceKey &k)
        {
            return "(" + std::to_string(k.sender.index) + "," + std::to_string(k.sn) + ")";
        }

        std::string proc_str(ProcessId p)
        {
            return "p" + std::to_string(p.index);
        }

        std::optional<Verdict> require_quiescent(const Trace &trace, std::string_view property)
        {
            if (trace.quiescent)
                return std::nullopt;
            return Verdict{std::string(property), Status::Inconclusive, std::nullopt,
                           "trace is not quiescent" + (trace.abort_reason ? ": " + *trace.abort_reason : std::string())};
        }

        Verdict pass(std::string_view property)
        {
            return Verdict{std::string(property), Status::Pass, std::nullopt, {}};
        }

        Verdict fail(std::string_view property, std::optional<std::uint64_t> seq, std::string detail)
        {
            return Verdict{std::string(property), Status::Fail, seq, std::move(detail)};
        }

        std::uint64_t last_seq(const Trace &trace)
        {
            return trace.records.empty() ? 0 : trace.records.back().seq;
        }

        std::vector<ProcessId> correct_processes(const Trace &trace)
        {
            std::vector<ProcessId> out;
            for (std::uint32_t i = 1; i <= trace.scenario.params.n(); ++i)
            {
                if (!trace.scenario.is_byzantine(ProcessId{i}))
                    out.push_back(ProcessId{i});
            }
            return out;
        }

        /// First delivered value per (process, key) at correct processes.
        std::map<std::pair<ProcessId, InstanceKey>, Payload> first_deliveries(const Trace &trace)
        {
            std::map<std::pair<ProcessId, InstanceKey>, Payload> out;
            for (const auto &r : trace.records)
            {
                if (r.kind == RecordKind::Deliver && !trace.scenario.is_byzantine(r.dest))
                    out.emplace(std::pair{r.dest, r.msg.key}, r.msg.value);
            }
            return out;
        }
    } // namespace

    Verdict check_validity(const Trace &trace)
    {
        constexpr std::string_view name = "validity";
        if (auto v = require_quiescent(trace, name))
            return *v;
        std::map<InstanceKey, Payload> injected;
        for (const auto &b : trace.scenario.broadcasts)
            injected.emplace(InstanceKey{b.sender, b.sn}, b.value);

        for (const auto &r : trace.records)
        {
            if (r.kind != RecordKind::Deliver || trace.scenario.is_byzantine(r.dest) ||
                trace.scenario.is_byzantine(r.msg.key.sender))
                continue;
            const auto it = injected.find(r.msg.key);
            if (it == injected.end())
                return fail(name, r.seq, proc_str(r.dest) + " delivered " + key_str(r.msg.key) + " that was never broadcast");
            if (it->second != r.msg.value)
                return fail(name, r.seq, proc_str(r.dest) + " delivered a value for " + key_str(r.msg.key) +
                                             " different from the broadcast one");
        }
        return pass(name);
    }

    Verdict check_integrity(const Trace &trace)
    {
        constexpr std::string_view name = "integrity";
        if (auto v = require_quiescent(trace, name))
            return *v;
        std::set<std::pair<ProcessId, InstanceKey>> seen;
        for (const auto &r : trace.records)
        {
            if (r.kind != RecordKind::Deliver || trace.scenario.is_byzantine(r.dest))
                continue;
            if (!seen.emplace(r.dest, r.msg.key).second)
                return fail(name, r.seq, proc_str(r.dest) + " delivered " + key_str(r.msg.key) + " twice");
        }
        return pass(name);
    }

    Verdict check_agreement(const Trace &trace)
    {
        constexpr std::string_view name = "agreement";
        if (auto v = require_quiescent(trace, name))
            return *v;
        std::map<InstanceKey, std::pair<ProcessId, Payload>> first;
        for (const auto &r : trace.records)
        {
            if (r.kind != RecordKind::Deliver || trace.scenario.is_byzantine(r.dest))
                continue;
            const auto [it, inserted] = first.emplace(r.msg.key, std::pair{r.dest, r.msg.value});
            if (!inserted && it->second.second != r.msg.value)
                return fail(name, r.seq, proc_str(r.dest) + " and " + proc_str(it->second.first) +
                                             " delivered different values for " + key_str(r.msg.key));
        }
        return pass(name);
    }

    Verdict check_termination1(const Trace &trace)
    {
        constexpr std::string_view name = "termination1";
        if (auto v = require_quiescent(trace, name))
            return *v;
        const auto delivered = first_deliveries(trace);
        for (const auto &b : trace.scenario.broadcasts)
        {
            const InstanceKey key{b.sender, b.sn};
            for (ProcessId p : correct_processes(trace))
            {
                const auto it = delivered.find({p, key});
                if (it == delivered.end() || it->second != b.value)
                    return fail(name, last_seq(trace), proc_str(p) + " never delivered broadcast " + key_str(key));
            }
        }
        return pass(name);
    }

    Verdict check_termination2(const Trace &trace)
    {
        constexpr std::string_view name = "termination2";
        if (auto v = require_quiescent(trace, name))
            return *v;
        const auto delivered = first_deliveries(trace);
        for (const auto &[where, value] : delivered)
        {
            for (ProcessId p : correct_processes(trace))
            {
                const auto it = delivered.find({p, where.second});
                if (it == delivered.end() || it->second != value)
                    return fail(name, last_seq(trace),
                                proc_str(where.first) + " delivered " + key_str(where.second) + " but " + proc_str(p) +
                                    (it == delivered.end() ? " never did" : " delivered a different value"));
            }
        }
        return pass(name);
    }

    Verdict check_channel(const Trace &trace)
    {
        constexpr std::string_view name = "channel";
        std::map<std::uint64_t, const TraceRecord *> unmatched;
        for (const auto &r : trace.records)
        {
            if (r.kind == RecordKind::Send)
            {
                unmatched.emplace(r.seq, &r);
            }
            else if (r.kind == RecordKind::Receive)
            {
                const auto it = unmatched.find(r.cause);
                if (it == unmatched.end())
                    return fail(name, r.seq, "receive without a matching unreceived earlier send");
                const TraceRecord &s = *it->second;
                if (s.source != r.source || s.dest != r.dest || s.msg != r.msg || s.depth != r.depth)
                    return fail(name, r.seq, "received message differs from the send #" + std::to_string(s.seq));
                unmatched.erase(it);
            }
        }
        if (trace.quiescent && !unmatched.empty())
            return fail(name, unmatched.begin()->first, "send never received although the trace is quiescent");
        if (!trace.quiescent)
            return Verdict{std::string(name), Status::Inconclusive, std::nullopt, "trace is not quiescent"};
        return pass(name);
    }

    std::vector<Verdict> check_all(const Trace &trace)
    {
        return {check_validity(trace), check_integrity(trace), check_agreement(trace),
                check_termination1(trace), check_termination2(trace), check_channel(trace)};
    }

    Metrics metrics(const Trace &trace)
    {
        Metrics m;
        m.per_process_sent.assign(trace.scenario.params.n(), 0);
        for (const auto &r : trace.records)
        {
            if (r.kind == RecordKind::Send && r.source != r.dest)
            {
                const auto tag = std::string(tag_name(r.msg.tag));
                if (trace.scenario.is_byzantine(r.source))
                {
                    ++m.byzantine_by_tag[tag];
                    ++m.byzantine_total;
                }
                else
                {
                    ++m.messages_by_tag[tag];
                    ++m.total;
                }
                ++m.per_process_sent[r.source.index - 1];
            }
            else if (r.kind == RecordKind::Deliver && !trace.scenario.is_byzantine(r.dest))
            {
                ++m.deliveries;
                m.max_delivery_depth = std::max(m.max_delivery_depth, r.depth);
            }
        }
        return m;
    }

    std::uint64_t count_correct_sends(const Trace &trace, MessageTag tag, const InstanceKey &key, const Payload &value)
    {
        std::uint64_t count = 0;
        for (const auto &r : trace.records)
        {
            if (r.kind == RecordKind::Send && !trace.scenario.is_byzantine(r.source) && r.msg.tag == tag &&
                r.msg.key == key && r.msg.value == value)
                ++count;
        }
        return count;
    }

    ReportFormat parse_report_format(std::string_view s)
    {
        if (s == "text")
            return ReportFormat::Text;
        if (s == "csv")
            return ReportFormat::Csv;
        if (s == "structured")
            return ReportFormat::Structured;
        throw std::invalid_argument("unknown format '" + std::string(s) + "' (expected text | csv | structured)");
    }

    namespace
    {
        std::string tags_inline(const std::map<std::string, std::uint64_t> &tags)
        {
            std::string out;
            for (const auto &[tag, count] : tags)
            {
                if (!out.empty())
                    out += ' ';
                out += tag + "=" + std::to_string(count);
            }
            return out.empty() ? "-" : out;
        }
    } // namespace

    std::string format_report(const std::vector<Verdict> &verdicts, const Metrics &m, ReportFormat format)
    {
        std::ostringstream out;
        switch (format)
        {
        case ReportFormat::Text:
        {
            out << std::left << std::setw(14) << "property" << std::setw(14) << "verdict" << std::setw(8) << "seq"
                << "detail\n";
            for (const auto &v : verdicts)
            {
                out << std::setw(14) << v.property << std::setw(14) << status_name(v.status) << std::setw(8)
                    << (v.violating_seq ? std::to_string(*v.violating_seq) : "-") << v.detail << '\n';
            }
            out << "\nmessages (correct, excluding self-sends): " << tags_inline(m.messages_by_tag) << " total=" << m.total
                << '\n';
            out << "messages (byzantine, not counted): " << tags_inline(m.byzantine_by_tag) << " total=" << m.byzantine_total
                << '\n';
            out << "deliveries=" << m.deliveries << " max_delivery_depth=" << m.max_delivery_depth << '\n';
            out << "per-process sent:";
            for (std::size_t i = 0; i < m.per_process_sent.size(); ++i)
                out << " p" << i + 1 << "=" << m.per_process_sent[i];
            out << '\n';
            break;
        }
        case ReportFormat::Csv:
        {
            out << "property,verdict,seq,detail\n";
            for (const auto &v : verdicts)
            {
                out << v.property << ',' << status_name(v.status) << ','
                    << (v.violating_seq ? std::to_string(*v.violating_seq) : "") << ",\"" << v.detail << "\"\n";
            }
            out << "\nmetric,value\n";
            for (const auto &[tag, count] : m.messages_by_tag)
                out << "messages_" << tag << ',' << count << '\n';
            out << "total," << m.total << '\n';
            out << "byzantine_total," << m.byzantine_total << '\n';
            out << "deliveries," << m.deliveries << '\n';
            out << "max_delivery_depth," << m.max_delivery_depth << '\n';
            break;
        }
        case ReportFormat::Structured:
        {
            using detail::json;
            json props = json::array();
            for (const auto &v : verdicts)
            {
                props.push_back(json{{"property", v.property},
                                     {"verdict", status_name(v.status)},
                                     {"seq", v.violating_seq ? json(*v.violating_seq) : json(nullptr)},
                                     {"detail", v.detail}});
            }
            json doc{{"properties", std::move(props)},
                     {"metrics",
                      {{"messages_by_tag", m.messages_by_tag},
                       {"total", m.total},
                       {"byzantine_by_tag", m.byzantine_by_tag},
                       {"byzantine_total", m.byzantine_total},
                       {"deliveries", m.deliveries},
                       {"max_delivery_depth", m.max_delivery_depth},
                       {"per_process_sent", m.per_process_sent}}}};
            out << doc.dump(2) << '\n';
            break;
        }
        }
        return out.str();
    }
} // namespace brb
