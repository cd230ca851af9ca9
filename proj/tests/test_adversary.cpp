#include <doctest.h>

#include "brb/adversary.hpp"
#include "brb/properties.hpp"
#include "brb/simnet.hpp"

#include <set>

using namespace brb;

namespace
{
    AdversaryView view_of(std::uint32_t self, std::uint32_t n, std::uint32_t t)
    {
        return AdversaryView{ProcessId{self}, SystemParams::make(n, t), {}, std::nullopt};
    }

    std::set<std::uint32_t> dests_with(const Actions &actions, MessageTag tag, const Payload &value)
    {
        std::set<std::uint32_t> out;
        for (const auto &a : actions)
        {
            const auto &s = std::get<SendAction>(a);
            if (s.msg.tag == tag && s.msg.value == value)
                out.insert(s.dest.index);
        }
        return out;
    }
} // namespace

TEST_CASE("silent adversary sends nothing")
{
    Rng rng(1);
    std::vector<std::uint32_t> fires;
    CHECK(step_adversary(strategy::Silent{}, view_of(4, 4, 1), rng, fires).empty());
}

TEST_CASE("fake witness flood broadcasts the fake value")
{
    Rng rng(1);
    std::vector<std::uint32_t> fires;
    const auto out = step_adversary(strategy::FakeWitnessFlood{InstanceKey{ProcessId{2}, 0}, "fake"}, view_of(4, 4, 1), rng, fires);
    REQUIRE(out.size() == 4);
    CHECK(dests_with(out, MessageTag::Witness, "fake") == std::set<std::uint32_t>{1, 2, 3, 4});
    for (const auto &a : out)
        CHECK(std::get<SendAction>(a).msg.key == InstanceKey{ProcessId{2}, 0});
}

TEST_CASE("equivocating INIT splits the recipients")
{
    Rng rng(1);
    std::vector<std::uint32_t> fires;
    const strategy::EquivocateInit eq{"va", "vb", {ProcessId{1}}, false, 0};
    const auto out = step_adversary(eq, view_of(4, 4, 1), rng, fires);
    CHECK(dests_with(out, MessageTag::Init, "va") == std::set<std::uint32_t>{1});
    CHECK(dests_with(out, MessageTag::Init, "vb") == std::set<std::uint32_t>{2, 3});
    CHECK(out.size() == 3);

    auto with_witness = eq;
    with_witness.with_witness = true;
    const auto out2 = step_adversary(with_witness, view_of(4, 4, 1), rng, fires);
    CHECK(dests_with(out2, MessageTag::Witness, "va") == std::set<std::uint32_t>{1});
    CHECK(dests_with(out2, MessageTag::Witness, "vb") == std::set<std::uint32_t>{2, 3});
}

TEST_CASE("random partitions depend only on the rng seed")
{
    const strategy::EquivocateInit eq{"va", "vb", {}, false, 0};
    std::vector<std::uint32_t> fires;
    Rng r1(42), r2(42);
    CHECK(step_adversary(eq, view_of(7, 7, 2), r1, fires) == step_adversary(eq, view_of(7, 7, 2), r2, fires));
}

TEST_CASE("crash mid-broadcast reaches only its recipients")
{
    Rng rng(1);
    std::vector<std::uint32_t> fires;
    const auto out = step_adversary(strategy::CrashMidBroadcast{{ProcessId{2}}, "x", 0}, view_of(4, 4, 1), rng, fires);
    REQUIRE(out.size() == 1);
    CHECK(std::get<SendAction>(out[0]).dest == ProcessId{2});
}

TEST_CASE("custom script reacts to receipts and respects max_fires")
{
    strategy::Custom c;
    strategy::ScriptRule rule;
    rule.on_receive = strategy::ReceiveMatch{MessageTag::Init, std::nullopt, std::nullopt, std::nullopt};
    rule.max_fires = 1;
    rule.sends.push_back(strategy::ScriptSend{std::nullopt, {ProcessId{1}}, MessageTag::Witness, InstanceKey{ProcessId{2}, 0}, "", true});
    c.rules.push_back(rule);

    AdversaryProcess adv(c, ProcessId{4}, SystemParams::make(4, 1));
    Rng rng(1);
    CHECK(adv.start(rng).empty());
    CHECK(adv.on_receive(ProcessId{2}, {MessageTag::Witness, InstanceKey{ProcessId{2}, 0}, "z"}, rng).empty());
    const auto out = adv.on_receive(ProcessId{2}, {MessageTag::Init, InstanceKey{ProcessId{2}, 0}, "echoed"}, rng);
    REQUIRE(out.size() == 1);
    CHECK(std::get<SendAction>(out[0]).msg.value == "echoed");
    CHECK(adv.on_receive(ProcessId{2}, {MessageTag::Init, InstanceKey{ProcessId{2}, 0}, "again"}, rng).empty());
}

TEST_CASE("impersonation in a script is a validation error")
{
    strategy::Custom c;
    strategy::ScriptRule rule;
    rule.sends.push_back(strategy::ScriptSend{ProcessId{1}, {}, MessageTag::Init, InstanceKey{ProcessId{1}, 0}, "x", false});
    c.rules.push_back(rule);
    CHECK_THROWS_AS(validate_strategy(c, ProcessId{4}, SystemParams::make(4, 1)), ScenarioError);
    CHECK_THROWS_AS(validate_strategy(strategy::CrashMidBroadcast{{ProcessId{9}}, "x", 0}, ProcessId{4},
                                      SystemParams::make(4, 1)),
                    ScenarioError);
}

TEST_CASE("flood by every Byzantine process is never forwarded by correct processes")
{
    // n=7, t=2: both Byzantine processes flood a key whose owner never broadcasts it.
    Scenario s;
    s.params = SystemParams::make(7, 2);
    s.broadcasts.push_back({ProcessId{1}, 0, "real"});
    const InstanceKey target{ProcessId{2}, 0};
    s.byzantine.push_back({ProcessId{6}, strategy::FakeWitnessFlood{target, "fake"}});
    s.byzantine.push_back({ProcessId{7}, strategy::FakeWitnessFlood{target, "fake"}});
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
        s.scheduler = policy::SeededRandom{seed};
        const auto trace = run(s);
        CHECK(count_correct_sends(trace, MessageTag::Witness, target, "fake") == 0);
        for (const auto &v : check_all(trace))
            CHECK_MESSAGE(v.passed(), v.property);
    }
}

TEST_CASE("equivocating sender never splits correct deliveries")
{
    Scenario s;
    s.params = SystemParams::make(4, 1);
    s.broadcasts.push_back({ProcessId{1}, 0, "real"});
    s.byzantine.push_back({ProcessId{4}, strategy::EquivocateInit{"va", "vb", {ProcessId{1}}, false, 0}});
    for (std::uint64_t seed = 0; seed < 100; ++seed)
    {
        s.scheduler = policy::SeededRandom{seed};
        const auto trace = run(s);
        CHECK(check_agreement(trace).passed());
        CHECK(check_termination2(trace).passed());
    }
}
