#include <doctest.h>

#include "brb/core.hpp"
#include "brb/rng.hpp"

#include <map>

using namespace brb;

namespace
{
    ProtocolMessage init(std::uint32_t sender, std::uint64_t sn, Payload v)
    {
        return {MessageTag::Init, InstanceKey{ProcessId{sender}, sn}, std::move(v)};
    }

    ProtocolMessage witness(std::uint32_t sender, std::uint64_t sn, Payload v)
    {
        return {MessageTag::Witness, InstanceKey{ProcessId{sender}, sn}, std::move(v)};
    }

    std::size_t count_sends(const Actions &actions, MessageTag tag)
    {
        std::size_t c = 0;
        for (const auto &a : actions)
        {
            if (const auto *s = std::get_if<SendAction>(&a); s && s->msg.tag == tag)
                ++c;
        }
        return c;
    }

    std::size_t count_delivers(const Actions &actions)
    {
        std::size_t c = 0;
        for (const auto &a : actions)
            c += std::holds_alternative<DeliverAction>(a) ? 1 : 0;
        return c;
    }

    struct Event
    {
        ProcessId from;
        ProtocolMessage msg;
    };

    std::vector<Event> random_events(Rng &rng, std::uint32_t n, std::size_t count)
    {
        static const std::vector<Payload> values = {"a", "b", "c"};
        std::vector<Event> out;
        for (std::size_t i = 0; i < count; ++i)
        {
            const ProcessId from{static_cast<std::uint32_t>(1 + rng.below(n))};
            const MessageTag tag = rng.below(4) == 0 ? MessageTag::Init : MessageTag::Witness;
            // INITs mostly come from their key's sender, sometimes spoofed.
            const ProcessId key_sender = tag == MessageTag::Init && rng.below(5) != 0
                                             ? from
                                             : ProcessId{static_cast<std::uint32_t>(1 + rng.below(n))};
            out.push_back(Event{from, {tag, InstanceKey{key_sender, rng.below(2)}, values[rng.below(values.size())]}});
        }
        return out;
    }
} // namespace

TEST_CASE("rb_broadcast sends INIT to every process and advances sn")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    const auto first = rb_broadcast(p1, "v");
    REQUIRE(first.size() == 4);
    for (std::uint32_t i = 0; i < 4; ++i)
    {
        const auto &s = std::get<SendAction>(first[i]);
        CHECK(s.dest == ProcessId{i + 1});
        CHECK(s.msg == init(1, 0, "v"));
    }
    CHECK(p1.instances.empty());

    const auto second = rb_broadcast(p1, "w");
    CHECK(std::get<SendAction>(second[0]).msg.key.sn == 1);
    CHECK(p1.next_sn == 2);

    ProcessState tiny(SystemParams::make(2, 0), ProcessId{1});
    CHECK(rb_broadcast(tiny, "v").size() == 2);
}

TEST_CASE("first INIT triggers one WITNESS broadcast, later INITs do nothing")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    const auto out = handle_init(p1, ProcessId{2}, init(2, 0, "v"));
    CHECK(count_sends(out, MessageTag::Witness) == 4);
    CHECK(std::get<SendAction>(out[0]).msg == witness(2, 0, "v"));

    CHECK(handle_init(p1, ProcessId{2}, init(2, 0, "v2")).empty());
    CHECK(handle_init(p1, ProcessId{2}, init(2, 0, "v")).empty());
    const auto &inst = p1.instances.at(InstanceKey{ProcessId{2}, 0});
    CHECK(inst.init_seen);
    CHECK(inst.witness_broadcast);
}

TEST_CASE("INIT after forwarding at t+1 witnesses is suppressed")
{
    // Schedule: WITNESS(v) from p3 and p4 reach p1 before p2's INIT.
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    CHECK(handle_witness(p1, ProcessId{3}, witness(2, 0, "v")).empty());
    const auto fwd = handle_witness(p1, ProcessId{4}, witness(2, 0, "v"));
    CHECK(count_sends(fwd, MessageTag::Witness) == 4);
    CHECK(handle_init(p1, ProcessId{2}, init(2, 0, "v")).empty());
    CHECK(p1.instances.at(InstanceKey{ProcessId{2}, 0}).init_seen);
}

TEST_CASE("spoofed INIT is dropped and counted")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    CHECK(handle_init(p1, ProcessId{4}, init(2, 0, "v")).empty());
    CHECK(p1.diagnostics.spoofed_inits == 1);
    CHECK(p1.instances.empty());
    // The genuine INIT still counts as the first reception.
    CHECK(count_sends(handle_init(p1, ProcessId{2}, init(2, 0, "v")), MessageTag::Witness) == 4);
}

TEST_CASE("witness tallies: forward at t+1, deliver at quorum")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    CHECK(handle_witness(p1, ProcessId{2}, witness(2, 0, "v")).empty());
    // Duplicate from the same sender is idempotent.
    CHECK(handle_witness(p1, ProcessId{2}, witness(2, 0, "v")).empty());
    const auto fwd = handle_witness(p1, ProcessId{3}, witness(2, 0, "v"));
    CHECK(count_sends(fwd, MessageTag::Witness) == 4);
    CHECK(count_delivers(fwd) == 0);

    const auto dlv = handle_witness(p1, ProcessId{1}, witness(2, 0, "v"));
    REQUIRE(count_delivers(dlv) == 1);
    CHECK(count_sends(dlv, MessageTag::Witness) == 0);
    CHECK(std::get<DeliverAction>(dlv[0]) == DeliverAction{InstanceKey{ProcessId{2}, 0}, "v"});

    const auto &inst = p1.instances.at(InstanceKey{ProcessId{2}, 0});
    CHECK(inst.delivered);
    CHECK(inst.delivered_value == Payload("v"));
    CHECK(handle_witness(p1, ProcessId{4}, witness(2, 0, "v")).empty());
}

TEST_CASE("a lone Byzantine witness for an unbroadcast value is never forwarded")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    CHECK(handle_witness(p1, ProcessId{4}, witness(2, 0, "w")).empty());
    CHECK(handle_witness(p1, ProcessId{4}, witness(2, 0, "w")).empty());
    const auto &inst = p1.instances.at(InstanceKey{ProcessId{2}, 0});
    CHECK_FALSE(inst.witness_broadcast);
    CHECK(inst.witness_tally.at("w").size() == 1);
}

TEST_CASE("tallies are kept per value")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    handle_witness(p1, ProcessId{4}, witness(2, 0, "a"));
    handle_witness(p1, ProcessId{4}, witness(2, 0, "b"));
    const auto &inst = p1.instances.at(InstanceKey{ProcessId{2}, 0});
    CHECK(inst.witness_tally.at("a").size() == 1);
    CHECK(inst.witness_tally.at("b").size() == 1);
    CHECK_FALSE(inst.witness_broadcast);
}

TEST_CASE("forward and deliver may fire on the same receipt")
{
    // n=3, t=1, n-t mode: forward at 2, deliver at 2.
    ProcessState p1(SystemParams::make(3, 1, ThresholdMode::NMinusT, true), ProcessId{1});
    handle_witness(p1, ProcessId{2}, witness(3, 0, "v"));
    const auto out = handle_witness(p1, ProcessId{3}, witness(3, 0, "v"));
    CHECK(count_sends(out, MessageTag::Witness) == 3);
    CHECK(count_delivers(out) == 1);
    // Send actions precede the Deliver.
    CHECK(std::holds_alternative<DeliverAction>(out.back()));
}

TEST_CASE("foreign tags are ignored")
{
    ProcessState p1(SystemParams::make(4, 1), ProcessId{1});
    CHECK(handle_message(p1, ProcessId{2}, {MessageTag::Echo, InstanceKey{ProcessId{2}, 0}, "v"}).empty());
    CHECK(p1.diagnostics.foreign_tags == 1);
}

TEST_CASE("random event sequences preserve the state-machine invariants")
{
    for (std::uint64_t seed = 1; seed <= 200; ++seed)
    {
        Rng rng(seed);
        const std::uint32_t n = rng.coin() ? 4 : 7;
        const std::uint32_t t = (n - 1) / 3;
        const auto mode = rng.coin() ? ThresholdMode::Quorum : ThresholdMode::NMinusT;
        const auto params = SystemParams::make(n, t, mode);
        const auto events = random_events(rng, n, 150);

        ProcessState a(params, ProcessId{1});
        ProcessState b(params, ProcessId{1});
        std::map<InstanceKey, int> witness_broadcasts;
        std::map<InstanceKey, int> deliveries;
        for (const auto &ev : events)
        {
            const auto out_a = handle_message(a, ev.from, ev.msg);
            const auto out_b = handle_message(b, ev.from, ev.msg);
            REQUIRE(out_a == out_b); // determinism

            for (const auto &action : out_a)
            {
                if (const auto *s = std::get_if<SendAction>(&action))
                {
                    if (s->msg.tag == MessageTag::Witness && s->dest == ProcessId{1})
                        ++witness_broadcasts[s->msg.key];
                }
                else
                {
                    const auto &d = std::get<DeliverAction>(action);
                    ++deliveries[d.key];
                    CHECK(a.instances.at(d.key).witness_tally.at(d.value).size() >= deliver_threshold(params));
                }
            }
        }
        for (const auto &[key, count] : witness_broadcasts)
            CHECK(count <= 1);
        for (const auto &[key, count] : deliveries)
            CHECK(count <= 1);
        for (const auto &[key, inst] : a.instances)
            CHECK(inst.delivered == inst.delivered_value.has_value());
        CHECK(a == b);
    }
}
