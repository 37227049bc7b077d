#ifndef HIVENAV_BACKEND_HPP
#define HIVENAV_BACKEND_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivenav/directives.hpp"
#include "hivenav/memory.hpp"
#include "hivenav/world.hpp"

namespace hivenav {

// The manager's rendered view of the dynamic map.
struct MapImage {
    std::string text;  // render_for_manager output; empty under the no-DM ablation
    int width = 0;
    int height = 0;
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommandExhausted : std::runtime_error {
    CommandExhausted() : std::runtime_error("command exhausted") {}
};

class Describer {
public:
    virtual ~Describer() = default;
    virtual std::string describe_observation(const Observation& obs) = 0;
    virtual std::string describe_map(const MapImage& map) = 0;
    // Visual/audio descriptors enter retrieval as text tokens through here.
    virtual std::vector<std::string> describe_tokens(const std::vector<std::string>& visual) = 0;
    virtual std::string summarize(const std::string& text) = 0;
};

class Planner {
public:
    virtual ~Planner() = default;
    virtual Plan plan_subgoals(const Goal& goal, const MapImage& map, const std::string& status,
                               const std::string& memory_context) = 0;
};

class ManagerDeployer {
public:
    virtual ~ManagerDeployer() = default;
    virtual SubtaskDirective deploy_subtask(const std::string& multimodal_info,
                                            const MapImage& map, const SubGoal& subgoal,
                                            const std::string& strategy) = 0;
};

class ConductorDeployer {
public:
    virtual ~ConductorDeployer() = default;
    virtual SubCommand deploy_subcommand(const SubtaskDirective& task, Position position_info) = 0;
};

class Critic {
public:
    virtual ~Critic() = default;
    // outcome_reports is the recent history for this subject, most recent last.
    virtual Critique critique(const std::string& subject,
                              const std::vector<std::string>& outcome_reports) = 0;
};

class Actor {
public:
    virtual ~Actor() = default;
    // Returns the current unexecuted step; the caller advances the cursor once
    // the step has been applied. Throws CommandExhausted on a spent command.
    virtual ActionStep act(SubCommand& command, const Observation& obs,
                           const std::vector<SkillRecord>& skills) = 0;
};

class Curriculum {
public:
    virtual ~Curriculum() = default;
    virtual std::string propose_next_task(const CurriculumLog& log, const MapImage& map) = 0;
};

class SkillResolver {
public:
    virtual ~SkillResolver() = default;
    virtual std::vector<SkillRecord> lookup(const std::vector<std::string>& query, int k) = 0;
};

enum class BackendKind { Scripted, HttpLlm };

struct BackendBundle {
    BackendKind kind = BackendKind::Scripted;
    std::shared_ptr<Planner> planner;
    std::shared_ptr<Describer> describer;
    std::shared_ptr<ManagerDeployer> deployer;
    std::shared_ptr<Critic> critic_manager;
    std::shared_ptr<Actor> actor;
    std::shared_ptr<Curriculum> curriculum;
    std::shared_ptr<Critic> critic_conductor;
    std::shared_ptr<ConductorDeployer> deployer_conductor;
    std::shared_ptr<SkillResolver> skill_resolver;
};

// Pairwise-distinct P_k targets for one group, a pure function of the
// directive and the member count. Search groups put the first body on the
// sighting itself; Explore groups spread over a lattice in the region.
inline std::vector<Position> spread_targets(const SubtaskDirective& directive, int count,
                                            Rect world_bounds) {
    std::vector<Position> out;
    if (count <= 0) return out;
    const Rect region = directive.region;
    auto clamp_world = [&](Position p) {
        p.x = std::clamp(p.x, world_bounds.x0, world_bounds.x1);
        p.y = std::clamp(p.y, world_bounds.y0, world_bounds.y1);
        return p;
    };
    auto taken = [&](Position p) {
        return std::find(out.begin(), out.end(), p) != out.end();
    };
    // Deterministic outward spiral to resolve collisions.
    auto place_distinct = [&](Position p) {
        p = clamp_world(p);
        for (int radius = 0; radius <= std::max(world_bounds.width(), world_bounds.height());
             ++radius) {
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dy)) != radius) continue;
                    Position q = clamp_world({p.x + dx, p.y + dy});
                    if (!taken(q)) {
                        out.push_back(q);
                        return;
                    }
                }
            }
        }
    };

    int i = 0;
    if (directive.subgoal.kind == SubGoalKind::Search && directive.subgoal.target_pos) {
        place_distinct(*directive.subgoal.target_pos);
        i = 1;
    }
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    for (int slot = 0; i < count; ++i, ++slot) {
        const int gx = slot % cols;
        const int gy = slot / cols;
        Position p{region.x0 + ((2 * gx + 1) * region.width()) / (2 * cols),
                   region.y0 + ((2 * gy + 1) * region.height()) / (2 * std::max(rows, 1))};
        place_distinct(p);
    }
    return out;
}

}  // namespace hivenav

#endif
