#ifndef HIVENAV_IDS_HPP
#define HIVENAV_IDS_HPP

#include <compare>
#include <string>

namespace hivenav {

enum class Tier { Manager, Conductor, SubAgent };

inline const char* tier_name(Tier t) {
    switch (t) {
        case Tier::Manager: return "manager";
        case Tier::Conductor: return "conductor";
        case Tier::SubAgent: return "subagent";
    }
    return "?";
}

struct AgentId {
    Tier tier = Tier::SubAgent;
    int index = 0;

    auto operator<=>(const AgentId&) const = default;
};

inline std::string to_string(AgentId id) {
    return std::string(tier_name(id.tier)) + "#" + std::to_string(id.index);
}

}  // namespace hivenav

#endif
