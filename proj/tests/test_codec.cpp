#include <doctest.h>

#include "brb/bracha.hpp"
#include "brb/core.hpp"
#include "brb/rng.hpp"

using namespace brb;

TEST_CASE("snapshot round-trips a fresh state")
{
    const ProcessState s(SystemParams::make(4, 1), ProcessId{2});
    CHECK(restore(snapshot(s)) == s);
}

TEST_CASE("snapshot round-trips after random events and is stable")
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        Rng rng(seed);
        ProcessState s(SystemParams::make(7, 2, seed % 2 ? ThresholdMode::Quorum : ThresholdMode::NMinusT), ProcessId{3});
        rb_broadcast(s, "mine");
        for (int i = 0; i < 100; ++i)
        {
            const ProcessId from{static_cast<std::uint32_t>(1 + rng.below(7))};
            // Include non-ASCII payload bytes.
            const Payload value = rng.coin() ? Payload("\x00\xff", 2) : Payload("v");
            const MessageTag tag = rng.below(3) == 0 ? MessageTag::Init : MessageTag::Witness;
            handle_message(s, from, {tag, InstanceKey{ProcessId{static_cast<std::uint32_t>(1 + rng.below(7))}, rng.below(2)}, value});
        }
        const auto encoded = snapshot(s);
        const auto back = restore(encoded);
        CHECK(back == s);
        CHECK(snapshot(back) == encoded);
    }
}

TEST_CASE("restore rejects malformed input")
{
    ProcessState s(SystemParams::make(4, 1), ProcessId{1});
    handle_witness(s, ProcessId{2}, {MessageTag::Witness, InstanceKey{ProcessId{2}, 0}, "v"});
    const auto encoded = snapshot(s);

    CHECK_THROWS_AS(restore(encoded.substr(0, encoded.size() / 2)), DecodeError);
    CHECK_THROWS_AS(restore(""), DecodeError);
    CHECK_THROWS_AS(restore(R"({"format":"brb-process-state","version":2})"), DecodeError);
    CHECK_THROWS_AS(restore(R"({"format":"other","version":1})"), DecodeError);
    CHECK_THROWS_AS(restore(encode_message({MessageTag::Init, {}, "x"})), DecodeError);
}

TEST_CASE("message encoding round-trips and rejects bad tags")
{
    const ProtocolMessage m{MessageTag::Witness, InstanceKey{ProcessId{5}, 9}, Payload("\x01\x02\x00", 3)};
    CHECK(decode_message(encode_message(m)) == m);
    auto bad = encode_message(m);
    bad.replace(bad.find("WITNESS"), 7, "WHATEVS");
    CHECK_THROWS_AS(decode_message(bad), DecodeError);
}

TEST_CASE("hex helpers")
{
    CHECK(to_hex(Payload("\x00\xab", 2)) == "00ab");
    CHECK(from_hex("00AB") == Payload("\x00\xab", 2));
    CHECK_THROWS_AS(from_hex("abc"), DecodeError);
    CHECK_THROWS_AS(from_hex("zz"), DecodeError);
}

TEST_CASE("bracha state round-trips")
{
    BrachaState s(SystemParams::make(4, 1), ProcessId{1});
    handle_bracha(s, ProcessId{2}, {MessageTag::Init, InstanceKey{ProcessId{2}, 0}, "v"});
    handle_bracha(s, ProcessId{3}, {MessageTag::Echo, InstanceKey{ProcessId{2}, 0}, "v"});
    handle_bracha(s, ProcessId{3}, {MessageTag::Ready, InstanceKey{ProcessId{2}, 0}, "v"});
    CHECK(restore_bracha(snapshot(s)) == s);
    CHECK_THROWS_AS(restore_bracha(snapshot(ProcessState(SystemParams::make(4, 1), ProcessId{1}))), DecodeError);
}
