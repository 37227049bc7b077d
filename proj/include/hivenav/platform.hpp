#ifndef HIVENAV_PLATFORM_HPP
#define HIVENAV_PLATFORM_HPP

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "hivenav/dynamic_map.hpp"
#include "hivenav/world.hpp"

namespace hivenav {

enum class GoalSource { HumanCli, ConfigFile };

struct GoalIntake {
    Goal goal;
    GoalSource submitted_by = GoalSource::ConfigFile;
    int submitted_at = 0;
};

struct StateRecord {
    int step = 0;
    std::string observation_text;
    Observation raw;
};

// Multi-modal information hub: goal intake, per-agent state buffers, and the
// single owner of the global dynamic map. All map writes funnel through here.
class Platform {
public:
    Platform(int world_width, int world_height, int buffer_capacity = 256)
        : width_(world_width), height_(world_height), capacity_(buffer_capacity) {}

    int submit_goal(const Goal& goal, const WorldState& world,
                    GoalSource source = GoalSource::ConfigFile) {
        if (active_goal_) throw std::runtime_error("run in progress");
        goal.validate();
        if (goal.kind == GoalKind::Audio) {
            const GoalEntity* src = find_entity(world, goal.payload.front());
            if (src == nullptr || !src->emits_audio)
                throw std::invalid_argument("invalid goal: unknown audio source " +
                                            goal.payload.front());
        }
        active_goal_ = GoalIntake{goal, source, world.clock};
        return ++run_counter_;
    }

    void finish_run() { active_goal_.reset(); }
    const std::optional<GoalIntake>& active_goal() const { return active_goal_; }

    void register_agent(AgentId id) { buffers_[id]; }
    bool agent_live(AgentId id) const { return buffers_.count(id) != 0; }

    void record_state(AgentId agent, const Observation& obs, const std::string& described_text) {
        auto it = buffers_.find(agent);
        if (it == buffers_.end())
            throw std::invalid_argument("unknown agent: " + to_string(agent));
        it->second.push_back(StateRecord{obs.step, described_text, obs});
        while (static_cast<int>(it->second.size()) > capacity_) it->second.pop_front();

        ReportEntry report;
        report.agent = agent;
        report.step = obs.step;
        report.cells = obs.vision;
        if (!report.cells.empty()) map_ = merge_report(std::move(map_), report, width_, height_);
    }

    const std::deque<StateRecord>& buffer(AgentId agent) const {
        auto it = buffers_.find(agent);
        if (it == buffers_.end())
            throw std::invalid_argument("unknown agent: " + to_string(agent));
        return it->second;
    }

    const DynamicMap& map() const { return map_; }
    int world_width() const { return width_; }
    int world_height() const { return height_; }

private:
    int width_;
    int height_;
    int capacity_;
    DynamicMap map_;
    std::map<AgentId, std::deque<StateRecord>> buffers_;
    std::optional<GoalIntake> active_goal_;
    int run_counter_ = 0;
};

}  // namespace hivenav

#endif
