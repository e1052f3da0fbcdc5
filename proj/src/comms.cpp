#include "mobsim/comms.hpp"

#include <charconv>
#include <stdexcept>

namespace mobsim {

const char* payload_of(MessageKind kind) {
    return kind == MessageKind::Call ? kCallPayload : kAckPayload;
}

RangePolicy RangePolicy::meters(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("RangePolicy::meters: range must be > 0");
    return RangePolicy(false, r);
}

std::optional<RangePolicy> RangePolicy::parse(std::string_view text) {
    if (text == "inf" || text == "-1") return infinite();
    double r = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), r);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    if (r == -1.0) return infinite();  // the sentinel, however spelled
    if (!(r > 0.0)) return std::nullopt;
    return meters(r);
}

std::string RangePolicy::str() const {
    if (infinite_) return "inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, range_m_);
    return std::string(buf, ptr);
}

void RadioBus::broadcast(const Message& msg, long current_tick) {
    if (msg.emission_tick != current_tick)
        throw std::invalid_argument("RadioBus::broadcast: emission_tick != current tick");
    pending_.push_back(msg);
}

std::vector<std::vector<Message>> RadioBus::deliver(std::span<const Receiver> receivers,
                                                    const RangePolicy& policy) {
    std::vector<std::vector<Message>> inboxes(receivers.size());
    for (const Message& msg : pending_) {
        for (size_t i = 0; i < receivers.size(); ++i) {
            if (receivers[i].id == msg.sender_id) continue;
            if (policy.in_range(msg.emission_position, receivers[i].position))
                inboxes[i].push_back(msg);
        }
    }
    pending_.clear();
    return inboxes;
}

}  // namespace mobsim
