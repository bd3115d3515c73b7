#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace osim {

// The three conversational actions an agent can take.
enum class ActionType : uint8_t {
    Initiate = 0,   // start a new conversation
    Contribute = 1, // reply/quote into an existing conversation
    Share = 2,      // re-broadcast an existing conversation
};

inline constexpr int kActionCount = 3;
inline constexpr std::array<ActionType, kActionCount> kAllActions = {
    ActionType::Initiate, ActionType::Contribute, ActionType::Share};

const std::string& to_string(ActionType a);

// Canonical names ("initiate", "contribute", "share") and the platform
// labels they abstract (tweet, reply, quote, retweet), case-insensitive.
// Unknown labels yield nullopt so callers can reject with the label echoed.
std::optional<ActionType> map_platform_action(const std::string& label);

} // namespace osim
