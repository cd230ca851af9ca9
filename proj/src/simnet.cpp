#include "brb/simnet.hpp"

#include "brb/bracha.hpp"
#include "brb/core.hpp"
#include "brb/rng.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <variant>

namespace brb
{
    std::string_view record_kind_name(RecordKind k) noexcept
    {
        switch (k)
        {
        case RecordKind::Send:
            return "send";
        case RecordKind::Receive:
            return "receive";
        case RecordKind::Deliver:
            return "deliver";
        case RecordKind::Anomaly:
            return "anomaly";
        }
        return "?";
    }

    namespace
    {
        struct InFlight
        {
            std::uint64_t send_seq;
            ProcessId source;
            ProcessId dest;
            ProtocolMessage msg;
            std::uint32_t depth;
        };

        using Replica = std::variant<std::monostate, ProcessState, BrachaState, AdversaryProcess>;

        class Scheduler
        {
        public:
            Scheduler(const SchedulerPolicy &policy) : policy_(policy)
            {
                if (const auto *r = std::get_if<policy::SeededRandom>(&policy_))
                {
                    rng_.emplace(r->seed);
                }
            }

            /// Index into `pending` (kept in send order) of the next message to deliver.
            std::size_t pick(const std::vector<InFlight> &pending, const std::set<ProcessId> &delivered_any)
            {
                if (rng_)
                {
                    return static_cast<std::size_t>(rng_->below(pending.size()));
                }
                const auto *script = std::get_if<policy::AdversarialScript>(&policy_);
                if (script == nullptr)
                {
                    return 0;
                }
                std::optional<std::size_t> first_open;
                for (std::size_t i = 0; i < pending.size(); ++i)
                {
                    bool starved = false;
                    bool preferred = false;
                    for (const auto &rule : script->rules)
                    {
                        if (rule.until_delivered_by && delivered_any.contains(*rule.until_delivered_by))
                            continue;
                        if (!matches(rule, pending[i]))
                            continue;
                        if (rule.action == policy::OrderingRule::Action::Starve)
                            starved = true;
                        else
                            preferred = true;
                    }
                    if (starved)
                        continue;
                    if (preferred)
                        return i;
                    if (!first_open)
                        first_open = i;
                }
                return first_open.value_or(0);
            }

        private:
            static bool matches(const policy::OrderingRule &r, const InFlight &m)
            {
                return (!r.tag || *r.tag == m.msg.tag) && (!r.from || *r.from == m.source) &&
                       (!r.to || *r.to == m.dest) && (!r.key_sender || *r.key_sender == m.msg.key.sender) &&
                       (!r.value || *r.value == m.msg.value);
            }

            SchedulerPolicy policy_;
            std::optional<Rng> rng_;
        };

        class Simulation
        {
        public:
            explicit Simulation(const Scenario &scenario)
                : scenario_(scenario), scheduler_(scenario.scheduler), adversary_rng_(scenario.effective_adversary_seed())
            {
                validate(scenario_);
                trace_.scenario = scenario_;
                const auto n = scenario_.params.n();
                replicas_.resize(n + 1);
                for (std::uint32_t i = 1; i <= n; ++i)
                {
                    const ProcessId p{i};
                    if (scenario_.algorithm == Algorithm::Brb)
                        replicas_[i] = ProcessState(scenario_.params, p);
                    else
                        replicas_[i] = BrachaState(scenario_.params, p);
                }
                for (const auto &b : scenario_.byzantine)
                {
                    replicas_[b.id.index] = AdversaryProcess(b.strategy, b.id, scenario_.params);
                }
            }

            Trace execute(const std::vector<TraceRecord> *prefix)
            {
                std::deque<std::uint64_t> forced;
                if (prefix != nullptr)
                {
                    for (const auto &r : *prefix)
                    {
                        if (r.kind == RecordKind::Receive)
                            forced.push_back(r.cause);
                    }
                }

                inject();
                check_prefix(prefix);

                const auto cap = scenario_.effective_max_events();
                while (!pending_.empty())
                {
                    if (trace_.steps >= cap)
                    {
                        trace_.abort_reason = "max_events (" + std::to_string(cap) + ") reached with " +
                                              std::to_string(pending_.size()) + " messages in flight";
                        break;
                    }
                    std::size_t idx = scheduler_.pick(pending_, delivered_any_);
                    if (!forced.empty())
                    {
                        const auto want = forced.front();
                        forced.pop_front();
                        auto it = std::find_if(pending_.begin(), pending_.end(),
                                               [want](const InFlight &m) { return m.send_seq == want; });
                        if (it == pending_.end())
                        {
                            throw ReplayError("prefix receives message #" + std::to_string(want) +
                                              " which is not in flight");
                        }
                        idx = static_cast<std::size_t>(it - pending_.begin());
                    }
                    InFlight m = std::move(pending_[idx]);
                    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(idx));
                    ++trace_.steps;
                    step(m);
                    check_prefix(prefix);
                }
                if (prefix != nullptr && trace_.records.size() < prefix->size())
                {
                    throw ReplayError("run ended before the prefix was consumed");
                }

                trace_.quiescent = pending_.empty();
                const auto n = scenario_.params.n();
                trace_.final_snapshots.resize(n);
                for (std::uint32_t i = 1; i <= n; ++i)
                {
                    if (const auto *s = std::get_if<ProcessState>(&replicas_[i]))
                        trace_.final_snapshots[i - 1] = snapshot(*s);
                    else if (const auto *b = std::get_if<BrachaState>(&replicas_[i]))
                        trace_.final_snapshots[i - 1] = snapshot(*b);
                }
                return std::move(trace_);
            }

        private:
            void inject()
            {
                for (const auto &bc : scenario_.broadcasts)
                {
                    auto &replica = replicas_[bc.sender.index];
                    Actions actions = std::holds_alternative<ProcessState>(replica)
                                          ? rb_broadcast(std::get<ProcessState>(replica), bc.value)
                                          : bracha_broadcast(std::get<BrachaState>(replica), bc.value);
                    emit(bc.sender, actions, 0, 0);
                }
                for (const auto &b : scenario_.byzantine)
                {
                    auto &adv = std::get<AdversaryProcess>(replicas_[b.id.index]);
                    emit(b.id, adv.start(adversary_rng_), 0, 0);
                }
            }

            void step(const InFlight &m)
            {
                const auto recv_seq = append(TraceRecord{0, RecordKind::Receive, m.source, m.dest, m.msg, m.depth, m.send_seq, {}});
                auto &replica = replicas_[m.dest.index];

                if (auto *adv = std::get_if<AdversaryProcess>(&replica))
                {
                    emit(m.dest, adv->on_receive(m.source, m.msg, adversary_rng_), m.depth, recv_seq);
                    return;
                }

                Diagnostics before;
                Actions actions;
                if (auto *s = std::get_if<ProcessState>(&replica))
                {
                    before = s->diagnostics;
                    actions = handle_message(*s, m.source, m.msg);
                    note_anomaly(before, s->diagnostics, m, recv_seq);
                }
                else if (auto *b = std::get_if<BrachaState>(&replica))
                {
                    before = b->diagnostics;
                    actions = handle_bracha(*b, m.source, m.msg);
                    note_anomaly(before, b->diagnostics, m, recv_seq);
                }
                emit(m.dest, actions, m.depth, recv_seq);
            }

            void note_anomaly(const Diagnostics &before, const Diagnostics &after, const InFlight &m, std::uint64_t recv_seq)
            {
                std::string note;
                if (after.spoofed_inits != before.spoofed_inits)
                    note = "spoofed_init";
                else if (after.foreign_tags != before.foreign_tags)
                    note = "foreign_tag";
                else
                    return;
                append(TraceRecord{0, RecordKind::Anomaly, m.source, m.dest, m.msg, m.depth, recv_seq, std::move(note)});
            }

            void emit(ProcessId self, const Actions &actions, std::uint32_t trigger_depth, std::uint64_t cause)
            {
                for (const auto &action : actions)
                {
                    if (const auto *send = std::get_if<SendAction>(&action))
                    {
                        if (send->dest.index < 1 || send->dest.index > scenario_.params.n())
                        {
                            throw ScenarioError("p" + std::to_string(self.index) + " sends to nonexistent process " +
                                                std::to_string(send->dest.index));
                        }
                        const auto seq = append(TraceRecord{0, RecordKind::Send, self, send->dest, send->msg,
                                                            trigger_depth + 1, cause, {}});
                        pending_.push_back(InFlight{seq, self, send->dest, send->msg, trigger_depth + 1});
                    }
                    else
                    {
                        const auto &d = std::get<DeliverAction>(action);
                        delivered_any_.insert(self);
                        append(TraceRecord{0, RecordKind::Deliver, self, self, ProtocolMessage{MessageTag::Init, d.key, d.value},
                                           trigger_depth, cause, {}});
                    }
                }
            }

            std::uint64_t append(TraceRecord r)
            {
                r.seq = trace_.records.size() + 1;
                trace_.records.push_back(std::move(r));
                return trace_.records.back().seq;
            }

            void check_prefix(const std::vector<TraceRecord> *prefix)
            {
                if (prefix == nullptr)
                    return;
                const auto upto = std::min(prefix->size(), trace_.records.size());
                for (; checked_ < upto; ++checked_)
                {
                    if (trace_.records[checked_] != (*prefix)[checked_])
                    {
                        throw ReplayError("prefix record " + std::to_string(checked_ + 1) +
                                          " does not match the scenario's execution");
                    }
                }
            }

            const Scenario &scenario_;
            Scheduler scheduler_;
            Rng adversary_rng_;
            std::vector<Replica> replicas_;
            std::vector<InFlight> pending_;
            std::set<ProcessId> delivered_any_;
            Trace trace_;
            std::size_t checked_ = 0;
        };
    } // namespace

    Trace run(const Scenario &scenario)
    {
        return Simulation(scenario).execute(nullptr);
    }

    Trace replay(const std::vector<TraceRecord> &prefix, const Scenario &scenario)
    {
        return Simulation(scenario).execute(&prefix);
    }
} // namespace brb
