#include "brb/adversary.hpp"

#include <algorithm>
#include <string>

namespace brb
{
    namespace
    {
        template <class... Ts>
        struct overloaded : Ts...
        {
            using Ts::operator()...;
        };
        template <class... Ts>
        overloaded(Ts...) -> overloaded<Ts...>;

        void check_id(ProcessId p, const SystemParams &params, std::string_view field)
        {
            if (p.index < 1 || p.index > params.n())
            {
                throw ScenarioError(std::string(field) + ": process id " + std::to_string(p.index) +
                                    " outside [1.." + std::to_string(params.n()) + "]");
            }
        }

        void check_ids(const std::vector<ProcessId> &ids, const SystemParams &params, std::string_view field)
        {
            for (ProcessId p : ids)
            {
                check_id(p, params, field);
            }
        }

        bool contains(const std::vector<ProcessId> &ids, ProcessId p)
        {
            return std::find(ids.begin(), ids.end(), p) != ids.end();
        }

        std::vector<ProcessId> random_subset(const AdversaryView &view, Rng &rng)
        {
            std::vector<ProcessId> out;
            for (std::uint32_t i = 1; i <= view.params.n(); ++i)
            {
                if (ProcessId{i} != view.self && rng.coin())
                {
                    out.push_back(ProcessId{i});
                }
            }
            return out;
        }

        /// Sends msg_a to `a` and msg_b to every process outside `a` except self.
        void split_send(Actions &out, const AdversaryView &view, const std::vector<ProcessId> &a,
                        const ProtocolMessage &msg_a, const ProtocolMessage &msg_b)
        {
            for (std::uint32_t i = 1; i <= view.params.n(); ++i)
            {
                const ProcessId p{i};
                if (contains(a, p))
                {
                    out.emplace_back(SendAction{p, msg_a});
                }
                else if (p != view.self)
                {
                    out.emplace_back(SendAction{p, msg_b});
                }
            }
        }

        bool matches(const strategy::ReceiveMatch &m, const ReceivedMessage &r)
        {
            return (!m.tag || *m.tag == r.msg.tag) && (!m.from || *m.from == r.from) &&
                   (!m.key_sender || *m.key_sender == r.msg.key.sender) && (!m.value || *m.value == r.msg.value);
        }

        void script_sends(Actions &out, const std::vector<strategy::ScriptSend> &sends, const AdversaryView &view)
        {
            for (const auto &s : sends)
            {
                ProtocolMessage msg{s.tag, s.key, s.value};
                if (s.echo_value && view.trigger)
                {
                    msg.value = view.trigger->msg.value;
                }
                if (s.to.empty())
                {
                    broadcast_to_all(out, view.params.n(), msg);
                }
                else
                {
                    for (ProcessId p : s.to)
                    {
                        out.emplace_back(SendAction{p, msg});
                    }
                }
            }
        }
    } // namespace

    std::string_view strategy_name(const AdversaryStrategy &s) noexcept
    {
        return std::visit(overloaded{
                              [](const strategy::Silent &) { return std::string_view("silent"); },
                              [](const strategy::CrashMidBroadcast &) { return std::string_view("crash_mid_broadcast"); },
                              [](const strategy::EquivocateInit &) { return std::string_view("equivocate_init"); },
                              [](const strategy::FakeWitnessFlood &) { return std::string_view("fake_witness_flood"); },
                              [](const strategy::TwoFacedWitness &) { return std::string_view("two_faced_witness"); },
                              [](const strategy::Custom &) { return std::string_view("custom"); },
                          },
                          s);
    }

    void validate_strategy(const AdversaryStrategy &s, ProcessId self, const SystemParams &params)
    {
        check_id(self, params, "byzantine id");
        std::visit(overloaded{
                       [](const strategy::Silent &) {},
                       [&](const strategy::CrashMidBroadcast &c) { check_ids(c.recipients, params, "recipients"); },
                       [&](const strategy::EquivocateInit &e) { check_ids(e.partition_a, params, "partition"); },
                       [&](const strategy::FakeWitnessFlood &f) { check_id(f.target.sender, params, "target.sender"); },
                       [&](const strategy::TwoFacedWitness &w) {
                           check_id(w.target.sender, params, "target.sender");
                           check_ids(w.partition_a, params, "partition");
                       },
                       [&](const strategy::Custom &c) {
                           for (const auto &rule : c.rules)
                           {
                               if (rule.on_receive && rule.on_receive->from)
                               {
                                   check_id(*rule.on_receive->from, params, "match.from");
                               }
                               for (const auto &send : rule.sends)
                               {
                                   if (send.from && *send.from != self)
                                   {
                                       throw ScenarioError("script of p" + std::to_string(self.index) +
                                                           " attempts to impersonate p" + std::to_string(send.from->index));
                                   }
                                   check_ids(send.to, params, "send.to");
                                   check_id(send.key.sender, params, "send.key.sender");
                               }
                           }
                       },
                   },
                   s);
    }

    Actions step_adversary(const AdversaryStrategy &s, const AdversaryView &view, Rng &rng,
                           std::vector<std::uint32_t> &fires)
    {
        Actions out;
        const bool at_start = !view.trigger.has_value();
        std::visit(overloaded{
                       [](const strategy::Silent &) {},
                       [&](const strategy::CrashMidBroadcast &c) {
                           if (!at_start)
                               return;
                           const auto recipients = c.recipients.empty() ? random_subset(view, rng) : c.recipients;
                           const ProtocolMessage init{MessageTag::Init, InstanceKey{view.self, c.sn}, c.value};
                           for (ProcessId p : recipients)
                           {
                               out.emplace_back(SendAction{p, init});
                           }
                       },
                       [&](const strategy::EquivocateInit &e) {
                           if (!at_start)
                               return;
                           const InstanceKey key{view.self, e.sn};
                           const auto a = e.partition_a.empty() ? random_subset(view, rng) : e.partition_a;
                           split_send(out, view, a, {MessageTag::Init, key, e.value_a}, {MessageTag::Init, key, e.value_b});
                           if (e.with_witness)
                           {
                               split_send(out, view, a, {MessageTag::Witness, key, e.value_a},
                                          {MessageTag::Witness, key, e.value_b});
                           }
                       },
                       [&](const strategy::FakeWitnessFlood &f) {
                           if (!at_start)
                               return;
                           broadcast_to_all(out, view.params.n(), {MessageTag::Witness, f.target, f.fake_value});
                       },
                       [&](const strategy::TwoFacedWitness &w) {
                           if (!at_start)
                               return;
                           const auto a = w.partition_a.empty() ? random_subset(view, rng) : w.partition_a;
                           split_send(out, view, a, {MessageTag::Witness, w.target, w.value_a},
                                      {MessageTag::Witness, w.target, w.value_b});
                       },
                       [&](const strategy::Custom &c) {
                           fires.resize(c.rules.size(), 0);
                           for (std::size_t i = 0; i < c.rules.size(); ++i)
                           {
                               const auto &rule = c.rules[i];
                               if (fires[i] >= rule.max_fires)
                                   continue;
                               const bool hit = at_start ? !rule.on_receive
                                                         : rule.on_receive && matches(*rule.on_receive, *view.trigger);
                               if (hit)
                               {
                                   ++fires[i];
                                   script_sends(out, rule.sends, view);
                               }
                           }
                       },
                   },
                   s);
        return out;
    }

    AdversaryProcess::AdversaryProcess(AdversaryStrategy strategy, ProcessId self, SystemParams params)
        : strategy_(std::move(strategy)), view_{self, params, {}, std::nullopt}
    {
        validate_strategy(strategy_, self, params);
    }

    Actions AdversaryProcess::start(Rng &rng)
    {
        view_.trigger.reset();
        return step_adversary(strategy_, view_, rng, fires_);
    }

    Actions AdversaryProcess::on_receive(ProcessId from, const ProtocolMessage &msg, Rng &rng)
    {
        ReceivedMessage r{from, msg};
        view_.received.push_back(r);
        view_.trigger = std::move(r);
        return step_adversary(strategy_, view_, rng, fires_);
    }
} // namespace brb
