#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mobsim/geom.hpp"

namespace mobsim {

// Wire payloads of the two message kinds.
inline constexpr const char* kCallPayload = "must mob";
inline constexpr const char* kAckPayload = "ok";

enum class MessageKind { Call, Ack };

const char* payload_of(MessageKind kind);

struct Message {
    MessageKind kind = MessageKind::Call;
    int sender_id = 0;
    Vec2 emission_position;   // sender position when the message was emitted
    long emission_tick = 0;
};

// Broadcast range: Infinite, or a radius in meters. "-1" and "inf" parse to
// Infinite; any positive decimal parses to a metric range.
class RangePolicy {
public:
    static RangePolicy infinite() { return RangePolicy(true, 0.0); }
    static RangePolicy meters(double r);

    bool is_infinite() const { return infinite_; }
    double range_m() const { return range_m_; }  // meaningful only when finite

    bool in_range(const Vec2& from, const Vec2& to) const {
        return infinite_ || (to - from).norm() <= range_m_;
    }

    static std::optional<RangePolicy> parse(std::string_view text);
    std::string str() const;  // "inf" or the shortest round-trip decimal

    bool operator==(const RangePolicy&) const = default;

private:
    RangePolicy(bool inf, double r) : infinite_(inf), range_m_(r) {}
    bool infinite_ = true;
    double range_m_ = 0.0;
};

struct Receiver {
    int id = 0;
    Vec2 position;  // position at delivery time
};

// Single-tick broadcast channel. Messages emitted during tick t sit in
// `pending` and are delivered (or dropped) at the start of tick t+1; the
// range test uses the sender's emission position against the receiver's
// delivery position. Never delivers a message back to its sender.
class RadioBus {
public:
    // Appends in call order. Throws std::invalid_argument when the message's
    // emission_tick does not match current_tick.
    void broadcast(const Message& msg, long current_tick);

    // Inboxes aligned with `receivers`, each ordered by emission order.
    // Clears pending.
    std::vector<std::vector<Message>> deliver(std::span<const Receiver> receivers,
                                              const RangePolicy& policy);

    const std::vector<Message>& pending() const { return pending_; }

private:
    std::vector<Message> pending_;
};

}  // namespace mobsim
