#include "osim/action.hpp"

#include <algorithm>
#include <cctype>

namespace osim {

const std::string& to_string(ActionType a) {
    static const std::string names[kActionCount] = {"initiate", "contribute", "share"};
    return names[static_cast<int>(a)];
}

std::optional<ActionType> map_platform_action(const std::string& label) {
    std::string low(label);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (low == "tweet" || low == "initiate") return ActionType::Initiate;
    if (low == "reply" || low == "quote" || low == "contribute") return ActionType::Contribute;
    if (low == "retweet" || low == "share") return ActionType::Share;
    return std::nullopt;
}

} // namespace osim
