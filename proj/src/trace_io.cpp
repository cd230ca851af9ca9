#include "brb/simnet.hpp"
#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace brb
{
    using detail::json;

    namespace
    {
        constexpr std::string_view kTraceFormat = "brb-trace";
        constexpr int kTraceVersion = 1;

        RecordKind parse_kind(const std::string &s)
        {
            if (s == "send")
                return RecordKind::Send;
            if (s == "receive")
                return RecordKind::Receive;
            if (s == "deliver")
                return RecordKind::Deliver;
            if (s == "anomaly")
                return RecordKind::Anomaly;
            throw DecodeError("unknown record kind '" + s + "'");
        }

        json record_json(const TraceRecord &r)
        {
            json j{
                {"seq", r.seq},
                {"kind", record_kind_name(r.kind)},
                {"src", r.source.index},
                {"dst", r.dest.index},
                {"sender", r.msg.key.sender.index},
                {"sn", r.msg.key.sn},
                {"value", to_hex(r.msg.value)},
                {"depth", r.depth},
                {"cause", r.cause},
            };
            if (r.kind != RecordKind::Deliver)
                j["tag"] = tag_name(r.msg.tag);
            if (!r.note.empty())
                j["note"] = r.note;
            return j;
        }

        TraceRecord record_from_json(const json &j)
        {
            TraceRecord r;
            r.seq = j.at("seq").get<std::uint64_t>();
            r.kind = parse_kind(j.at("kind").get<std::string>());
            r.source = ProcessId{j.at("src").get<std::uint32_t>()};
            r.dest = ProcessId{j.at("dst").get<std::uint32_t>()};
            r.msg.key = InstanceKey{ProcessId{j.at("sender").get<std::uint32_t>()}, j.at("sn").get<std::uint64_t>()};
            r.msg.value = from_hex(j.at("value").get<std::string>());
            r.msg.tag = r.kind == RecordKind::Deliver ? MessageTag::Init : parse_tag(j.at("tag").get<std::string>());
            r.depth = j.at("depth").get<std::uint32_t>();
            r.cause = j.at("cause").get<std::uint64_t>();
            if (j.contains("note"))
                r.note = j.at("note").get<std::string>();
            return r;
        }
    } // namespace

    std::string write_trace(const Trace &trace)
    {
        std::string out;
        out += json{{"format", kTraceFormat}, {"version", kTraceVersion},
                    {"scenario", detail::scenario_to_json_value(trace.scenario)}}
                   .dump();
        out += '\n';
        for (const auto &r : trace.records)
        {
            out += record_json(r).dump();
            out += '\n';
        }
        for (std::size_t i = 0; i < trace.final_snapshots.size(); ++i)
        {
            const auto &snap = trace.final_snapshots[i];
            out += json{{"kind", "snapshot"}, {"proc", i + 1}, {"state", snap.empty() ? json(nullptr) : json::parse(snap)}}.dump();
            out += '\n';
        }
        out += json{{"kind", "end"},
                    {"quiescent", trace.quiescent},
                    {"steps", trace.steps},
                    {"abort", trace.abort_reason ? json(*trace.abort_reason) : json(nullptr)}}
                   .dump();
        out += '\n';
        return out;
    }

    Trace read_trace(std::string_view text)
    {
        Trace trace;
        std::size_t pos = 0;
        std::size_t line_no = 0;
        bool have_header = false;
        bool have_end = false;
        while (pos < text.size())
        {
            auto eol = text.find('\n', pos);
            if (eol == std::string_view::npos)
                eol = text.size();
            const auto line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (line.empty())
                continue;
            if (have_end)
                throw DecodeError("trace line " + std::to_string(line_no) + ": data after end record");
            try
            {
                const json j = json::parse(line);
                if (!have_header)
                {
                    detail::expect_format(j, kTraceFormat, kTraceVersion);
                    trace.scenario = detail::scenario_from_json_value(j.at("scenario"));
                    have_header = true;
                    continue;
                }
                const auto kind = j.at("kind").get<std::string>();
                if (kind == "snapshot")
                {
                    const auto proc = j.at("proc").get<std::size_t>();
                    if (proc != trace.final_snapshots.size() + 1)
                        throw DecodeError("snapshot records out of order");
                    const auto &state = j.at("state");
                    trace.final_snapshots.push_back(state.is_null() ? std::string() : state.dump());
                }
                else if (kind == "end")
                {
                    trace.quiescent = j.at("quiescent").get<bool>();
                    trace.steps = j.at("steps").get<std::uint64_t>();
                    if (!j.at("abort").is_null())
                        trace.abort_reason = j.at("abort").get<std::string>();
                    have_end = true;
                }
                else
                {
                    auto r = record_from_json(j);
                    if (r.seq != trace.records.size() + 1)
                        throw DecodeError("non-consecutive seq " + std::to_string(r.seq));
                    trace.records.push_back(std::move(r));
                }
            }
            catch (const DecodeError &e)
            {
                throw DecodeError("trace line " + std::to_string(line_no) + ": " + e.what());
            }
            catch (const ScenarioError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw DecodeError("trace line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (!have_header)
            throw DecodeError("trace has no header line");
        if (!have_end)
            throw DecodeError("trace is truncated (no end record)");
        return trace;
    }

    void save_trace(const Trace &trace, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write trace file '" + path + "'");
        out << write_trace(trace);
    }

    Trace load_trace(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open trace file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return read_trace(buf.str());
    }
} // namespace brb
