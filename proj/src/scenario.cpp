#include "brb/scenario.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace brb
{
    using detail::json;

    std::string_view algorithm_name(Algorithm a) noexcept
    {
        return a == Algorithm::Brb ? "brb" : "bracha";
    }

    bool Scenario::is_byzantine(ProcessId p) const noexcept
    {
        return std::any_of(byzantine.begin(), byzantine.end(), [p](const ByzantineSpec &b) { return b.id == p; });
    }

    std::uint64_t Scenario::effective_max_events() const noexcept
    {
        const std::uint64_t n = params.n();
        return max_events.value_or(50 * n * n);
    }

    std::uint64_t Scenario::effective_adversary_seed() const noexcept
    {
        if (adversary_seed)
        {
            return *adversary_seed;
        }
        if (const auto *r = std::get_if<policy::SeededRandom>(&scheduler))
        {
            return r->seed;
        }
        return 0;
    }

    void validate(const Scenario &s)
    {
        const auto &p = s.params;
        if (s.byzantine.size() > p.t())
        {
            throw ScenarioError("byzantine: " + std::to_string(s.byzantine.size()) + " processes exceed t=" +
                                std::to_string(p.t()));
        }
        std::set<ProcessId> seen;
        for (const auto &b : s.byzantine)
        {
            if (!seen.insert(b.id).second)
            {
                throw ScenarioError("byzantine: duplicate id " + std::to_string(b.id.index));
            }
            validate_strategy(b.strategy, b.id, p);
        }
        if (s.algorithm == Algorithm::Bracha && p.n() <= 3 * p.t())
        {
            throw ScenarioError("algorithm bracha requires n > 3t");
        }
        std::map<ProcessId, std::uint64_t> next_sn;
        for (const auto &bc : s.broadcasts)
        {
            if (bc.sender.index < 1 || bc.sender.index > p.n())
            {
                throw ScenarioError("broadcasts: sender " + std::to_string(bc.sender.index) + " out of range");
            }
            if (s.is_byzantine(bc.sender))
            {
                throw ScenarioError("broadcasts: sender " + std::to_string(bc.sender.index) + " is byzantine");
            }
            auto &expected = next_sn[bc.sender];
            if (bc.sn != expected)
            {
                throw ScenarioError("broadcasts: sender " + std::to_string(bc.sender.index) + " expects sn " +
                                    std::to_string(expected) + ", got " + std::to_string(bc.sn));
            }
            ++expected;
            if (bc.value.size() > s.max_payload_bytes)
            {
                throw ScenarioError("broadcasts: value exceeds max_payload_bytes");
            }
        }
        if (s.max_events && *s.max_events == 0)
        {
            throw ScenarioError("max_events must be positive");
        }
    }

    namespace
    {
        /// Read access to a JSON object that reports failures with the field path.
        class Reader
        {
        public:
            Reader(const json &j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                {
                    fail("expected an object");
                }
            }

            [[noreturn]] void fail(const std::string &msg) const
            {
                throw ScenarioError("field '" + (path_.empty() ? std::string("/") : path_) + "': " + msg);
            }

            bool has(const char *name) const { return j_.contains(name); }

            Reader object(const char *name) const { return Reader(at(name), sub(name)); }

            const json &at(const char *name) const
            {
                if (!j_.contains(name))
                {
                    fail(std::string("missing required field '") + name + "'");
                }
                return j_.at(name);
            }

            std::string sub(const char *name) const { return path_ + "/" + name; }

            std::uint64_t u64(const char *name) const
            {
                const auto &v = at(name);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                {
                    fail_at(sub(name), "expected a non-negative integer");
                }
                return v.get<std::uint64_t>();
            }

            std::uint64_t u64_or(const char *name, std::uint64_t dflt) const { return has(name) ? u64(name) : dflt; }

            std::uint32_t u32(const char *name) const
            {
                const auto v = u64(name);
                if (v > UINT32_MAX)
                {
                    fail_at(sub(name), "value too large");
                }
                return static_cast<std::uint32_t>(v);
            }

            std::string str(const char *name) const
            {
                const auto &v = at(name);
                if (!v.is_string())
                {
                    fail_at(sub(name), "expected a string");
                }
                return v.get<std::string>();
            }

            std::string str_or(const char *name, std::string dflt) const { return has(name) ? str(name) : dflt; }

            bool boolean_or(const char *name, bool dflt) const
            {
                if (!has(name))
                    return dflt;
                const auto &v = at(name);
                if (!v.is_boolean())
                {
                    fail_at(sub(name), "expected a boolean");
                }
                return v.get<bool>();
            }

            std::vector<ProcessId> ids_or_empty(const char *name) const
            {
                std::vector<ProcessId> out;
                if (!has(name))
                    return out;
                const auto &v = at(name);
                if (v.is_string() && v.get<std::string>() == "all")
                    return out;
                if (!v.is_array())
                {
                    fail_at(sub(name), "expected an array of process ids");
                }
                for (std::size_t i = 0; i < v.size(); ++i)
                {
                    if (!v[i].is_number_unsigned())
                    {
                        fail_at(sub(name) + "/" + std::to_string(i), "expected a process id");
                    }
                    out.push_back(ProcessId{v[i].get<std::uint32_t>()});
                }
                return out;
            }

            std::optional<ProcessId> opt_id(const char *name) const
            {
                if (!has(name))
                    return std::nullopt;
                return ProcessId{u32(name)};
            }

            std::optional<Payload> opt_str(const char *name) const
            {
                if (!has(name))
                    return std::nullopt;
                return str(name);
            }

            std::optional<MessageTag> opt_tag(const char *name) const
            {
                if (!has(name))
                    return std::nullopt;
                return tag(name);
            }

            MessageTag tag(const char *name) const
            {
                const auto s = str(name);
                try
                {
                    return parse_tag(s);
                }
                catch (const DecodeError &e)
                {
                    fail_at(sub(name), e.what());
                }
            }

            InstanceKey key(const char *name) const
            {
                const auto r = object(name);
                return InstanceKey{ProcessId{r.u32("sender")}, r.u64_or("sn", 0)};
            }

            template <typename Fn>
            void each(const char *name, Fn &&fn) const
            {
                if (!has(name))
                    return;
                const auto &v = at(name);
                if (!v.is_array())
                {
                    fail_at(sub(name), "expected an array");
                }
                for (std::size_t i = 0; i < v.size(); ++i)
                {
                    fn(Reader(v[i], sub(name) + "/" + std::to_string(i)));
                }
            }

            const std::string &path() const { return path_; }

        private:
            [[noreturn]] static void fail_at(const std::string &path, const std::string &msg)
            {
                throw ScenarioError("field '" + path + "': " + msg);
            }

            const json &j_;
            std::string path_;
        };

        json ids_json(const std::vector<ProcessId> &ids)
        {
            json out = json::array();
            for (ProcessId p : ids)
                out.push_back(p.index);
            return out;
        }

        AdversaryStrategy parse_strategy(const Reader &r)
        {
            const auto kind = r.str("strategy");
            if (kind == "silent")
            {
                return strategy::Silent{};
            }
            if (kind == "crash_mid_broadcast")
            {
                return strategy::CrashMidBroadcast{r.ids_or_empty("recipients"), r.str_or("value", "crash"),
                                                   r.u64_or("sn", 0)};
            }
            if (kind == "equivocate_init")
            {
                return strategy::EquivocateInit{r.str_or("value_a", "a"), r.str_or("value_b", "b"),
                                                r.ids_or_empty("partition"), r.boolean_or("with_witness", false),
                                                r.u64_or("sn", 0)};
            }
            if (kind == "fake_witness_flood")
            {
                return strategy::FakeWitnessFlood{r.key("target"), r.str_or("fake_value", "fake")};
            }
            if (kind == "two_faced_witness")
            {
                return strategy::TwoFacedWitness{r.key("target"), r.ids_or_empty("partition"), r.str_or("value_a", "a"),
                                                 r.str_or("value_b", "b")};
            }
            if (kind == "custom")
            {
                strategy::Custom c;
                r.each("script", [&](const Reader &jr) {
                    strategy::ScriptRule rule;
                    const auto on = jr.str_or("on", "start");
                    if (on == "receive")
                    {
                        strategy::ReceiveMatch m;
                        if (jr.has("match"))
                        {
                            const auto mr = jr.object("match");
                            m.tag = mr.opt_tag("tag");
                            m.from = mr.opt_id("from");
                            m.key_sender = mr.opt_id("key_sender");
                            m.value = mr.opt_str("value");
                        }
                        rule.on_receive = m;
                    }
                    else if (on != "start")
                    {
                        jr.fail("'on' must be start | receive");
                    }
                    rule.max_fires = static_cast<std::uint32_t>(jr.u64_or("max_fires", 1));
                    jr.each("send", [&](const Reader &sr) {
                        strategy::ScriptSend s;
                        s.from = sr.opt_id("from");
                        s.to = sr.ids_or_empty("to");
                        s.tag = sr.tag("tag");
                        s.key = sr.key("key");
                        s.value = sr.str_or("value", "");
                        s.echo_value = sr.boolean_or("echo_value", false);
                        rule.sends.push_back(std::move(s));
                    });
                    c.rules.push_back(std::move(rule));
                });
                return c;
            }
            r.fail("unknown strategy '" + kind + "'");
        }

        json strategy_json(const ByzantineSpec &b)
        {
            json j{{"id", b.id.index}, {"strategy", strategy_name(b.strategy)}};
            std::visit(
                [&](const auto &s) {
                    using T = std::decay_t<decltype(s)>;
                    if constexpr (std::is_same_v<T, strategy::CrashMidBroadcast>)
                    {
                        j["recipients"] = ids_json(s.recipients);
                        j["value"] = s.value;
                        j["sn"] = s.sn;
                    }
                    else if constexpr (std::is_same_v<T, strategy::EquivocateInit>)
                    {
                        j["value_a"] = s.value_a;
                        j["value_b"] = s.value_b;
                        j["partition"] = ids_json(s.partition_a);
                        j["with_witness"] = s.with_witness;
                        j["sn"] = s.sn;
                    }
                    else if constexpr (std::is_same_v<T, strategy::FakeWitnessFlood>)
                    {
                        j["target"] = detail::key_to_json(s.target);
                        j["fake_value"] = s.fake_value;
                    }
                    else if constexpr (std::is_same_v<T, strategy::TwoFacedWitness>)
                    {
                        j["target"] = detail::key_to_json(s.target);
                        j["partition"] = ids_json(s.partition_a);
                        j["value_a"] = s.value_a;
                        j["value_b"] = s.value_b;
                    }
                    else if constexpr (std::is_same_v<T, strategy::Custom>)
                    {
                        json script = json::array();
                        for (const auto &rule : s.rules)
                        {
                            json jr{{"on", rule.on_receive ? "receive" : "start"}, {"max_fires", rule.max_fires}};
                            if (rule.on_receive)
                            {
                                json m = json::object();
                                if (rule.on_receive->tag)
                                    m["tag"] = tag_name(*rule.on_receive->tag);
                                if (rule.on_receive->from)
                                    m["from"] = rule.on_receive->from->index;
                                if (rule.on_receive->key_sender)
                                    m["key_sender"] = rule.on_receive->key_sender->index;
                                if (rule.on_receive->value)
                                    m["value"] = *rule.on_receive->value;
                                jr["match"] = std::move(m);
                            }
                            json sends = json::array();
                            for (const auto &send : rule.sends)
                            {
                                json js{{"to", ids_json(send.to)},
                                        {"tag", tag_name(send.tag)},
                                        {"key", detail::key_to_json(send.key)},
                                        {"value", send.value},
                                        {"echo_value", send.echo_value}};
                                if (send.from)
                                    js["from"] = send.from->index;
                                sends.push_back(std::move(js));
                            }
                            jr["send"] = std::move(sends);
                            script.push_back(std::move(jr));
                        }
                        j["script"] = std::move(script);
                    }
                },
                b.strategy);
            return j;
        }

        SchedulerPolicy parse_scheduler(const Reader &r)
        {
            const auto kind = r.str("policy");
            if (kind == "fifo")
            {
                return policy::Fifo{};
            }
            if (kind == "seeded_random")
            {
                return policy::SeededRandom{r.u64_or("seed", 0)};
            }
            if (kind == "adversarial_script")
            {
                policy::AdversarialScript script;
                r.each("rules", [&](const Reader &rr) {
                    policy::OrderingRule rule;
                    const auto action = rr.str("action");
                    if (action == "starve")
                        rule.action = policy::OrderingRule::Action::Starve;
                    else if (action == "prefer")
                        rule.action = policy::OrderingRule::Action::Prefer;
                    else
                        rr.fail("'action' must be starve | prefer");
                    rule.tag = rr.opt_tag("tag");
                    rule.from = rr.opt_id("from");
                    rule.to = rr.opt_id("to");
                    rule.key_sender = rr.opt_id("key_sender");
                    rule.value = rr.opt_str("value");
                    rule.until_delivered_by = rr.opt_id("until_delivered_by");
                    script.rules.push_back(std::move(rule));
                });
                return script;
            }
            r.fail("unknown scheduler policy '" + kind + "'");
        }

        json scheduler_json(const SchedulerPolicy &p)
        {
            if (const auto *r = std::get_if<policy::SeededRandom>(&p))
            {
                return json{{"policy", "seeded_random"}, {"seed", r->seed}};
            }
            if (std::holds_alternative<policy::Fifo>(p))
            {
                return json{{"policy", "fifo"}};
            }
            json rules = json::array();
            for (const auto &rule : std::get<policy::AdversarialScript>(p).rules)
            {
                json jr{{"action", rule.action == policy::OrderingRule::Action::Starve ? "starve" : "prefer"}};
                if (rule.tag)
                    jr["tag"] = tag_name(*rule.tag);
                if (rule.from)
                    jr["from"] = rule.from->index;
                if (rule.to)
                    jr["to"] = rule.to->index;
                if (rule.key_sender)
                    jr["key_sender"] = rule.key_sender->index;
                if (rule.value)
                    jr["value"] = *rule.value;
                if (rule.until_delivered_by)
                    jr["until_delivered_by"] = rule.until_delivered_by->index;
                rules.push_back(std::move(jr));
            }
            return json{{"policy", "adversarial_script"}, {"rules", std::move(rules)}};
        }
    } // namespace

    namespace detail
    {
        json scenario_to_json_value(const Scenario &s)
        {
            json byz = json::array();
            for (const auto &b : s.byzantine)
            {
                byz.push_back(strategy_json(b));
            }
            json bcs = json::array();
            for (const auto &b : s.broadcasts)
            {
                bcs.push_back(json{{"sender", b.sender.index}, {"sn", b.sn}, {"value", b.value}});
            }
            json j{
                {"n", s.params.n()},
                {"t", s.params.t()},
                {"threshold_mode", mode_name(s.params.mode())},
                {"unsafe_allow", s.params.unsafe_allow()},
                {"algorithm", algorithm_name(s.algorithm)},
                {"byzantine", std::move(byz)},
                {"broadcasts", std::move(bcs)},
                {"scheduler", scheduler_json(s.scheduler)},
                {"max_payload_bytes", s.max_payload_bytes},
            };
            if (s.adversary_seed)
                j["adversary_seed"] = *s.adversary_seed;
            if (s.max_events)
                j["max_events"] = *s.max_events;
            return j;
        }

        Scenario scenario_from_json_value(const json &j)
        {
            const Reader r(j, "");
            Scenario s;
            ThresholdMode mode = ThresholdMode::Quorum;
            try
            {
                mode = parse_mode(r.str_or("threshold_mode", "quorum"));
            }
            catch (const ParamsError &e)
            {
                throw ScenarioError(std::string("field '/threshold_mode': ") + e.what());
            }
            try
            {
                s.params = SystemParams::make(r.u32("n"), r.u32("t"), mode, r.boolean_or("unsafe_allow", false));
            }
            catch (const ParamsError &e)
            {
                throw ScenarioError(std::string("fields '/n', '/t': ") + e.what());
            }
            const auto algo = r.str_or("algorithm", "brb");
            if (algo == "brb")
                s.algorithm = Algorithm::Brb;
            else if (algo == "bracha")
                s.algorithm = Algorithm::Bracha;
            else
                throw ScenarioError("field '/algorithm': expected brb | bracha");

            r.each("byzantine", [&](const Reader &br) {
                s.byzantine.push_back(ByzantineSpec{ProcessId{br.u32("id")}, parse_strategy(br)});
            });
            r.each("broadcasts", [&](const Reader &br) {
                s.broadcasts.push_back(BroadcastSpec{ProcessId{br.u32("sender")}, br.u64_or("sn", 0), br.str("value")});
            });
            if (r.has("scheduler"))
            {
                s.scheduler = parse_scheduler(r.object("scheduler"));
            }
            if (r.has("adversary_seed"))
                s.adversary_seed = r.u64("adversary_seed");
            if (r.has("max_events"))
                s.max_events = r.u64("max_events");
            s.max_payload_bytes = r.u64_or("max_payload_bytes", 4096);
            validate(s);
            return s;
        }
    } // namespace detail

    Scenario parse_scenario(std::string_view text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            // Map the byte offset to a 1-based line number.
            const auto upto = std::min<std::size_t>(e.byte, text.size());
            const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
            throw ScenarioError("line " + std::to_string(line) + ": JSON syntax error: " + e.what());
        }
        return detail::scenario_from_json_value(j);
    }

    Scenario load_scenario_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw ScenarioError("cannot open scenario file '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str());
    }

    std::string scenario_to_json(const Scenario &s)
    {
        return detail::scenario_to_json_value(s).dump(2);
    }

    Scenario all_correct_scenario(std::uint32_t n, std::uint32_t t, Algorithm algorithm, ThresholdMode mode)
    {
        Scenario s;
        s.params = SystemParams::make(n, t, mode);
        s.algorithm = algorithm;
        s.broadcasts.push_back(BroadcastSpec{ProcessId{1}, 0, "v"});
        s.scheduler = policy::Fifo{};
        return s;
    }
} // namespace brb
