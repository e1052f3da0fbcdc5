#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mobsim/comms.hpp"
#include "support/test_rng.hpp"

using namespace mobsim;
using testsupport::TestRng;

TEST_CASE("payload strings match the protocol") {
    CHECK(std::string(kCallPayload) == "must mob");
    CHECK(std::string(kAckPayload) == "ok");
    CHECK(std::string(payload_of(MessageKind::Call)) == "must mob");
    CHECK(std::string(payload_of(MessageKind::Ack)) == "ok");
}

TEST_CASE("RangePolicy parsing and printing") {
    CHECK(RangePolicy::parse("inf")->is_infinite());
    CHECK(RangePolicy::parse("-1")->is_infinite());
    CHECK(RangePolicy::parse("-1.0")->is_infinite());
    REQUIRE(RangePolicy::parse("0.5").has_value());
    CHECK(RangePolicy::parse("0.5")->range_m() == 0.5);
    CHECK_FALSE(RangePolicy::parse("0").has_value());
    CHECK_FALSE(RangePolicy::parse("-0.3").has_value());
    CHECK_FALSE(RangePolicy::parse("abc").has_value());
    CHECK_FALSE(RangePolicy::parse("0.5x").has_value());
    CHECK_FALSE(RangePolicy::parse("").has_value());

    CHECK(RangePolicy::infinite().str() == "inf");
    CHECK(RangePolicy::meters(0.5).str() == "0.5");
    CHECK(RangePolicy::meters(0.1).str() == "0.1");
    CHECK_THROWS_AS(RangePolicy::meters(0.0), std::invalid_argument);
}

TEST_CASE("broadcast keeps call order and validates the tick") {
    RadioBus bus;
    bus.broadcast({MessageKind::Call, 2, {0.1, 0.1}, 40}, 40);
    bus.broadcast({MessageKind::Call, 5, {0.9, 0.9}, 40}, 40);
    CHECK_THROWS_AS(bus.broadcast({MessageKind::Call, 7, {0.5, 0.5}, 39}, 40),
                    std::invalid_argument);

    const std::vector<Receiver> receivers{{1, {0.5, 0.5}}, {2, {0.1, 0.1}}, {5, {0.9, 0.9}}};
    const auto inboxes = bus.deliver(receivers, RangePolicy::infinite());
    REQUIRE(inboxes.size() == 3);
    REQUIRE(inboxes[0].size() == 2);
    CHECK(inboxes[0][0].sender_id == 2);  // emission order preserved
    CHECK(inboxes[0][1].sender_id == 5);
    // No self-delivery: each sender sees only the other message.
    REQUIRE(inboxes[1].size() == 1);
    CHECK(inboxes[1][0].sender_id == 5);
    REQUIRE(inboxes[2].size() == 1);
    CHECK(inboxes[2][0].sender_id == 2);
}

TEST_CASE("range test uses emission and delivery positions") {
    const RangePolicy half = RangePolicy::meters(0.5);

    RadioBus bus;
    bus.broadcast({MessageKind::Call, 1, {0.0, 0.0}, 0}, 0);
    auto inboxes = bus.deliver(std::vector<Receiver>{{2, {0.4, 0.0}}}, half);
    CHECK(inboxes[0].size() == 1);  // 0.4 <= 0.5

    bus.broadcast({MessageKind::Call, 1, {0.0, 0.0}, 1}, 1);
    inboxes = bus.deliver(std::vector<Receiver>{{2, {0.6, 0.0}}}, half);
    CHECK(inboxes[0].empty());  // 0.6 > 0.5

    // Boundary distance counts as in range.
    bus.broadcast({MessageKind::Call, 1, {0.0, 0.0}, 2}, 2);
    inboxes = bus.deliver(std::vector<Receiver>{{2, {0.5, 0.0}}}, half);
    CHECK(inboxes[0].size() == 1);
}

TEST_CASE("messages live exactly one delivery") {
    RadioBus bus;
    bus.broadcast({MessageKind::Ack, 3, {0.2, 0.2}, 7}, 7);
    const std::vector<Receiver> receivers{{1, {0.2, 0.25}}};
    CHECK(bus.deliver(receivers, RangePolicy::infinite())[0].size() == 1);
    CHECK(bus.deliver(receivers, RangePolicy::infinite())[0].empty());
}

TEST_CASE("infinite range reaches every non-sender") {
    RadioBus bus;
    bus.broadcast({MessageKind::Call, 4, {0.01, 0.01}, 0}, 0);
    std::vector<Receiver> receivers;
    for (int id = 1; id <= 10; ++id)
        receivers.push_back({id, {0.1 * id, 0.99}});
    const auto inboxes = bus.deliver(receivers, RangePolicy::infinite());
    int copies = 0;
    for (std::size_t i = 0; i < receivers.size(); ++i) {
        copies += static_cast<int>(inboxes[i].size());
        if (receivers[i].id == 4) CHECK(inboxes[i].empty());
    }
    CHECK(copies == 9);
}

TEST_CASE("wider range delivers a superset") {
    TestRng rng(606);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Receiver> receivers;
        for (int id = 1; id <= 8; ++id)
            receivers.push_back({id, {rng.uniform(0, 1), rng.uniform(0, 1)}});
        const Message msg{MessageKind::Call, 1, {rng.uniform(0, 1), rng.uniform(0, 1)}, 0};

        RadioBus wide, narrow;
        wide.broadcast(msg, 0);
        narrow.broadcast(msg, 0);
        const auto got_wide = wide.deliver(receivers, RangePolicy::meters(0.5));
        const auto got_narrow = narrow.deliver(receivers, RangePolicy::meters(0.1));
        for (std::size_t i = 0; i < receivers.size(); ++i)
            if (!got_narrow[i].empty()) CHECK_FALSE(got_wide[i].empty());
    }
}
