#ifndef HIVENAV_HIERARCHY_HPP
#define HIVENAV_HIERARCHY_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hivenav/backend.hpp"
#include "hivenav/comms.hpp"
#include "hivenav/dynamic_map.hpp"
#include "hivenav/memory.hpp"
#include "hivenav/platform.hpp"
#include "hivenav/scripted_backend.hpp"
#include "hivenav/world.hpp"

namespace hivenav {

enum class GroupState { Forming, Executing, Done, Revising };

inline const char* group_state_name(GroupState s) {
    switch (s) {
        case GroupState::Forming: return "forming";
        case GroupState::Executing: return "executing";
        case GroupState::Done: return "done";
        case GroupState::Revising: return "revising";
    }
    return "?";
}

// Snapshot of the manager-side inputs a group's commands were derived from.
// Kept so a conductor action can be recomputed extensionally from the same
// inputs: actor(deploy_subcommand(deploy_subtask(info, map, g, s), P_k), s_i).
struct IssueSnapshot {
    SubGoal subgoal;
    std::string strategy;
    std::string multimodal_info;
    MapImage map_view;
    std::vector<AgentId> bodies;       // conductor body first, then members
    std::vector<Position> targets;     // P_k per body, same order
    int round = 0;
};

struct GroupSpec {
    AgentId conductor;                 // role id (Tier::Conductor)
    AgentId conductor_body;            // embodied world agent executing alongside members
    std::vector<AgentId> members;      // sub-agent bodies
    SubGoal subgoal;
    GroupState state = GroupState::Forming;
    SubtaskDirective directive;
    std::map<AgentId, SubCommand> commands;  // keyed by body (conductor body included)
    std::vector<std::string> outcome_history;
    IssueSnapshot snapshot;

    std::vector<AgentId> bodies() const {
        std::vector<AgentId> all{conductor_body};
        all.insert(all.end(), members.begin(), members.end());
        return all;
    }
};

struct DecisionRecord {
    int round = 0;
    AgentId conductor;
    IssueSnapshot snapshot;
    std::map<AgentId, int> cursors;          // command cursor at emission time
    std::map<AgentId, ActionStep> actions;   // what the actor emitted
};

struct TickActionRecord {
    AgentId body;
    ActionKind kind = ActionKind::Idle;
    Position target;
    Position position_after;
};

struct TickGroupRecord {
    AgentId conductor;
    SubGoalKind subgoal_kind = SubGoalKind::Explore;
    GroupState state = GroupState::Executing;
    int member_count = 0;
};

struct TickRecord {
    int round = 0;
    int area = 0;
    int area_delta = 0;
    int reached_targets = 0;   // cumulative distinct goal targets reached
    bool goal_satisfied = false;
    int map_version = 0;
    int backend_calls = 0;
    std::vector<TickActionRecord> actions;
    std::vector<TickGroupRecord> groups;
};

struct AblationFlags {
    bool no_dynamic_map = false;
    bool no_auto_organize = false;
};

enum class SpawnPlacement { Clustered, Spread };

struct SystemOptions {
    int n_agents = 8;
    int max_agents = 8;
    int goal_threshold = 3;
    SpawnPlacement spawn = SpawnPlacement::Clustered;
    AblationFlags ablation;
    bool record_decisions = false;
    int retrieval_k = 5;
};

struct SystemState {
    WorldState world;
    Platform platform{1, 1};
    Router router;
    MemoryStore memory;
    Goal goal;
    std::string goal_task_text;
    SystemOptions options;
    int round = 0;
    std::vector<GroupSpec> groups;
    std::vector<SubGoal> queued_subgoals;
    std::vector<AgentId> idle_bodies;
    std::set<Position> target_cells;       // cells satisfying the goal (static)
    std::set<Position> reached_targets;    // targets some body has come within threshold of
    std::set<Position> known_sightings;    // targets reported by any conductor so far
    int backend_calls = 0;
    std::vector<DecisionRecord> decisions;     // populated when record_decisions
    std::vector<TickRecord> trace;
    int next_group_index = 0;

    bool goal_satisfied() const {
        return static_cast<int>(reached_targets.size()) >= goal.count;
    }
};

namespace hierarchy_detail {

inline const AgentId kManager{Tier::Manager, 0};

inline std::set<Position> compute_target_cells(const WorldState& world, const Goal& goal) {
    std::set<Position> targets;
    for (const auto& e : world.entities)
        if (entity_matches_goal(world, e, goal)) targets.insert(e.position);
    if (goal.kind == GoalKind::Object && !goal.payload.empty()) {
        for (int y = 0; y < world.config.height; ++y) {
            for (int x = 0; x < world.config.width; ++x) {
                const auto& ann = world.at({x, y}).annotations;
                if (std::find(ann.begin(), ann.end(), goal.payload.front()) != ann.end())
                    targets.insert({x, y});
            }
        }
    }
    return targets;
}

inline std::string goal_task_text(const Goal& goal) {
    std::string text = std::string("find ") + goal_kind_name(goal.kind) + " goal";
    for (const auto& tok : goal.payload) text += " " + tok;
    text += " x" + std::to_string(goal.count);
    return text;
}

inline std::vector<Position> spawn_positions(const WorldConfig& config, int n,
                                             SpawnPlacement placement) {
    std::vector<Position> out;
    const Rect bounds{0, 0, config.width - 1, config.height - 1};
    SubtaskDirective placement_directive;
    placement_directive.subgoal.kind = SubGoalKind::Explore;
    if (placement == SpawnPlacement::Spread) {
        placement_directive.region = bounds;
    } else {
        const Position center = bounds.center();
        placement_directive.region =
            Rect{std::max(0, center.x - 2), std::max(0, center.y - 2),
                 std::min(bounds.x1, center.x + 2), std::min(bounds.y1, center.y + 2)};
    }
    out = spread_targets(placement_directive, n, bounds);
    return out;
}

inline MapImage manager_map_view(const SystemState& s) {
    MapImage view;
    view.width = s.world.config.width;
    view.height = s.world.config.height;
    if (!s.options.ablation.no_dynamic_map)
        view.text = render_for_manager(s.platform.map(), view.width, view.height);
    return view;
}

inline std::string manager_status_text(const SystemState& s) {
    std::ostringstream out;
    for (const auto& p : s.reached_targets) out << "visited " << to_string(p) << "\n";
    const std::string label = s.goal.payload.empty() ? "target" : s.goal.payload.front();
    for (const auto& p : s.known_sightings)
        out << "sighted " << label << " @ " << to_string(p) << "\n";
    return out.str();
}

}  // namespace hierarchy_detail

// Greedy allocation: one conductor per subgoal plus an equal share of the
// remaining budget, leftovers to subgoals in planner priority order. Subgoals
// beyond the budget are queued, never dropped.
inline std::pair<std::vector<GroupSpec>, std::vector<SubGoal>> auto_organize(
    const std::vector<SubGoal>& subgoals, std::vector<AgentId> bodies, int& next_group_index) {
    if (subgoals.empty()) throw std::invalid_argument("no subgoals to organize");
    std::sort(bodies.begin(), bodies.end());
    std::vector<GroupSpec> groups;
    std::vector<SubGoal> queued;
    const int budget = static_cast<int>(bodies.size());
    const int group_count = std::min<int>(budget, static_cast<int>(subgoals.size()));
    if (group_count == 0) return {groups, subgoals};

    const int remaining = budget - group_count;
    const int base = remaining / group_count;
    const int leftover = remaining % group_count;

    std::size_t cursor = 0;
    for (int g = 0; g < group_count; ++g) {
        GroupSpec group;
        group.conductor = AgentId{Tier::Conductor, next_group_index++};
        group.conductor_body = bodies[cursor++];
        const int share = base + (g < leftover ? 1 : 0);
        for (int m = 0; m < share; ++m) group.members.push_back(bodies[cursor++]);
        group.subgoal = subgoals[static_cast<std::size_t>(g)];
        group.state = GroupState::Forming;
        groups.push_back(std::move(group));
    }
    for (std::size_t g = group_count; g < subgoals.size(); ++g) queued.push_back(subgoals[g]);
    return {groups, queued};
}

namespace hierarchy_detail {

// Deploy T_k for the group and distribute per-body commands (C_s) with
// pairwise-distinct P_k. Records the snapshot the commands derive from.
inline void issue_group_commands(SystemState& s, GroupSpec& group, const BackendBundle& bundle,
                                 const MapImage& map_view) {
    const std::string info =
        bundle.describer->describe_map(map_view) + "; " + manager_status_text(s);
    s.backend_calls += 2;  // describe_map + deploy_subtask
    group.directive = bundle.deployer->deploy_subtask(info, map_view, group.subgoal,
                                                      group.subgoal.suggested_strategy);

    // Manager -> conductor handoff over the router.
    s.router.register_agent(group.conductor);
    Envelope env;
    env.from = kManager;
    env.to = group.conductor;
    env.kind = MsgKind::SubtaskDirective;
    env.payload = group.directive;
    env.round = s.round;
    s.router.route(env);

    const std::vector<AgentId> bodies = group.bodies();
    const Rect bounds{0, 0, s.world.config.width - 1, s.world.config.height - 1};
    const auto member_reports = s.router.drain_inbox(group.conductor);
    std::vector<Envelope> member_only;
    for (const auto& e : member_reports)
        if (e.kind == MsgKind::MemberReport) member_only.push_back(e);
    const auto sent = summarize_and_distribute(s.router, group.conductor, member_only,
                                               group.directive, bodies, bundle, bounds, s.round);
    s.backend_calls += 1 + static_cast<int>(bodies.size());  // summarize + per-body deploy

    group.commands.clear();
    IssueSnapshot snap;
    snap.subgoal = group.subgoal;
    snap.strategy = group.subgoal.suggested_strategy;
    snap.multimodal_info = info;
    snap.map_view = map_view;
    snap.round = s.round;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        const auto* cmd = std::get_if<SubCommand>(&sent[i].payload);
        group.commands[bodies[i]] = *cmd;
        snap.bodies.push_back(bodies[i]);
        snap.targets.push_back(cmd->assigned_target);
    }
    group.snapshot = std::move(snap);
    group.state = GroupState::Executing;

    // Members fetch their command from their inbox; the conductor keeps its own.
    for (const auto& member : group.members) s.router.drain_inbox(member);
}

inline void replan_and_form_groups(SystemState& s, const BackendBundle& bundle) {
    if (s.idle_bodies.empty()) return;
    const MapImage map_view = manager_map_view(s);

    std::vector<SubGoal> subgoals;
    if (!s.queued_subgoals.empty()) {
        subgoals = s.queued_subgoals;
        s.queued_subgoals.clear();
    } else {
        // Retrieval-augmented planning: top-k demonstrations condition the plan.
        std::vector<std::string> query = tokenize(s.goal_task_text);
        const auto map_tokens = bundle.describer->describe_tokens({map_view.text.empty()
                                                                       ? std::string("blind")
                                                                       : "explored map"});
        const auto retrieved = retrieve_topk(s.memory, query, map_tokens,
                                             s.options.retrieval_k);
        const std::string context = augment_plan_context(retrieved, s.goal_task_text);
        s.backend_calls += 1;
        Plan plan = bundle.planner->plan_subgoals(s.goal, map_view,
                                                  manager_status_text(s), context);
        subgoals = plan.subgoals;
    }
    if (subgoals.empty()) return;

    auto [new_groups, queued] = auto_organize(subgoals, s.idle_bodies, s.next_group_index);
    s.idle_bodies.clear();
    s.queued_subgoals = std::move(queued);
    for (auto& group : new_groups) {
        issue_group_commands(s, group, bundle, map_view);
        s.groups.push_back(std::move(group));
    }
}

}  // namespace hierarchy_detail

// System bring-up: record every body's first observation, plan
// the initial sub-goal list from M_0, and organize one group per subgoal.
inline SystemState bootstrap(const Goal& goal, WorldState world, const BackendBundle& bundle,
                             const SystemOptions& options) {
    using namespace hierarchy_detail;
    goal.validate();
    if (options.n_agents < 1 || options.n_agents > options.max_agents)
        throw std::invalid_argument("agent budget out of range");

    SystemState s;
    s.world = std::move(world);
    s.goal = goal;
    s.goal_task_text = goal_task_text(goal);
    s.options = options;
    s.platform = Platform(s.world.config.width, s.world.config.height);
    s.target_cells = compute_target_cells(s.world, goal);

    const auto spawns = spawn_positions(s.world.config, options.n_agents, options.spawn);
    for (int i = 0; i < options.n_agents; ++i) {
        const AgentId body{Tier::SubAgent, i};
        s.world.agents[body] = spawns[static_cast<std::size_t>(i)];
        s.platform.register_agent(body);
        s.router.register_agent(body);
        s.idle_bodies.push_back(body);
    }
    s.router.register_agent(kManager);

    // Initial observations build M_0 before the first plan.
    for (const auto& [body, pos] : s.world.agents) {
        const Observation obs = observe(s.world, body);
        s.platform.record_state(body, obs, bundle.describer->describe_observation(obs));
        s.backend_calls += 1;
        for (const auto& [cell, annotations] : obs.vision) {
            if (s.target_cells.count(cell) != 0) s.known_sightings.insert(cell);
            if (s.target_cells.count(cell) != 0 &&
                chebyshev(pos, cell) <= options.goal_threshold)
                s.reached_targets.insert(cell);
        }
    }

    replan_and_form_groups(s, bundle);
    return s;
}

namespace hierarchy_detail {

inline bool group_completed(const SystemState& s, const GroupSpec& group) {
    if (group.subgoal.kind == SubGoalKind::Search && group.subgoal.target_pos &&
        s.reached_targets.count(*group.subgoal.target_pos) != 0)
        return true;
    for (const auto& [body, cmd] : group.commands)
        if (!cmd.exhausted()) return false;
    // All commands spent: a Search group whose target is still unreached keeps
    // going (re-issue), an Explore group is finished.
    if (group.subgoal.kind == SubGoalKind::Search && group.subgoal.target_pos &&
        s.reached_targets.count(*group.subgoal.target_pos) == 0)
        return false;
    return true;
}

inline bool group_needs_reissue(const SystemState& s, const GroupSpec& group) {
    if (group_completed(s, group)) return false;
    for (const auto& [body, cmd] : group.commands)
        if (!cmd.exhausted()) return false;
    return true;
}

}  // namespace hierarchy_detail

// One full round of Eq.-style composition: observe/describe/report, merge,
// critique + re-plan, deploy, distribute, act, move, store successes.
inline SystemState tick(SystemState s, const BackendBundle& bundle) {
    using namespace hierarchy_detail;
    TickRecord record;
    record.round = s.round;
    const int area_before = explored_area(s.platform.map());
    const int reached_before = static_cast<int>(s.reached_targets.size());

    if (s.goal_satisfied()) {
        for (auto& group : s.groups) group.state = GroupState::Done;
        record.area = area_before;
        record.reached_targets = reached_before;
        record.goal_satisfied = true;
        record.map_version = s.platform.map().version;
        for (const auto& g : s.groups)
            record.groups.push_back({g.conductor, g.subgoal.kind, g.state,
                                     static_cast<int>(g.members.size())});
        s.round += 1;
        s.trace.push_back(std::move(record));
        return s;
    }

    // (1) observations, member reports, conductor status reports; (2) merges.
    std::map<AgentId, Observation> observations;
    for (auto& group : s.groups) {
        std::set<Position> group_sightings;
        for (const AgentId& body : group.bodies()) {
            Observation obs = observe(s.world, body);
            const std::string text = bundle.describer->describe_observation(obs);
            s.backend_calls += 1;
            s.platform.record_state(body, obs, text);
            for (const auto& [cell, annotations] : obs.vision)
                if (s.target_cells.count(cell) != 0) group_sightings.insert(cell);
            if (body != group.conductor_body) {
                Envelope env;
                env.from = body;
                env.to = group.conductor;
                env.kind = MsgKind::MemberReport;
                env.payload = text;
                env.round = s.round;
                s.router.route(env);
            }
            observations.emplace(body, std::move(obs));
        }
        s.known_sightings.insert(group_sightings.begin(), group_sightings.end());

        std::ostringstream status;
        status << "group " << to_string(group.conductor) << " round " << s.round;
        const std::string label = s.goal.payload.empty() ? "target" : s.goal.payload.front();
        for (const auto& p : group_sightings)
            status << "\nsighted " << label << " @ " << to_string(p);
        Envelope status_env;
        status_env.from = group.conductor;
        status_env.to = kManager;
        status_env.kind = MsgKind::StatusReport;
        status_env.payload = status.str();
        status_env.round = s.round;
        s.router.route(status_env);

        ReportEntry delta;
        delta.agent = group.conductor_body;
        delta.step = s.world.clock;
        delta.cells = observations.at(group.conductor_body).vision;
        Envelope delta_env;
        delta_env.from = group.conductor;
        delta_env.to = kManager;
        delta_env.kind = MsgKind::MapDelta;
        delta_env.payload = delta;
        delta_env.round = s.round;
        s.router.route(delta_env);
    }
    s.router.drain_inbox(kManager);

    // (3) manager critique; completed or stalled groups dissolve.
    const bool frozen_groups = s.options.ablation.no_auto_organize;
    std::vector<GroupSpec> surviving;
    for (auto& group : s.groups) {
        const int area_delta_global = explored_area(s.platform.map()) - area_before;
        const int progress = static_cast<int>(s.reached_targets.size()) - reached_before;
        group.outcome_history.push_back("area_delta=" + std::to_string(area_delta_global) +
                                        " goal_progress=" + std::to_string(progress));
        if (frozen_groups) {
            surviving.push_back(std::move(group));
            continue;
        }
        if (group_completed(s, group)) {
            group.state = GroupState::Done;
            for (const AgentId& body : group.bodies()) s.idle_bodies.push_back(body);
            record.groups.push_back({group.conductor, group.subgoal.kind, group.state,
                                     static_cast<int>(group.members.size())});
            continue;
        }
        s.backend_calls += 1;
        const Critique critique =
            bundle.critic_manager->critique(to_string(group.conductor), group.outcome_history);
        if (critique.verdict == Verdict::Revise) {
            Envelope env;
            env.from = kManager;
            env.to = group.conductor;
            env.kind = MsgKind::Critique;
            env.payload = critique;
            env.round = s.round;
            s.router.route(env);
            group.state = GroupState::Revising;
            for (const AgentId& body : group.bodies()) s.idle_bodies.push_back(body);
            if (critique.suggested_edits)
                for (const auto& sg : *critique.suggested_edits) s.queued_subgoals.push_back(sg);
            record.groups.push_back({group.conductor, group.subgoal.kind, group.state,
                                     static_cast<int>(group.members.size())});
            continue;
        }
        surviving.push_back(std::move(group));
    }
    s.groups = std::move(surviving);

    // (4)-(5) deployment: freed agents re-organize onto fresh subgoals; groups
    // with spent but unfinished commands get a fresh T_k against the live map.
    replan_and_form_groups(s, bundle);
    for (auto& group : s.groups) {
        if (group.state == GroupState::Executing && group_needs_reissue(s, group))
            issue_group_commands(s, group, bundle, manager_map_view(s));
    }
    if (frozen_groups) {
        for (auto& group : s.groups) {
            bool all_spent = true;
            for (const auto& [body, cmd] : group.commands)
                if (!cmd.exhausted()) all_spent = false;
            if (all_spent && !group.commands.empty())
                issue_group_commands(s, group, bundle, manager_map_view(s));
        }
    }

    // (6) act, (7) move.
    for (auto& group : s.groups) {
        if (group.state != GroupState::Executing) continue;
        DecisionRecord decision;
        decision.round = s.round;
        decision.conductor = group.conductor;
        if (s.options.record_decisions) decision.snapshot = group.snapshot;
        for (const AgentId& body : group.bodies()) {
            auto cmd_it = group.commands.find(body);
            if (cmd_it == group.commands.end() || cmd_it->second.exhausted()) continue;
            auto obs_it = observations.find(body);
            if (obs_it == observations.end()) {
                Observation obs = observe(s.world, body);
                obs_it = observations.emplace(body, std::move(obs)).first;
            }
            const int cursor_before = cmd_it->second.cursor;
            s.backend_calls += 1;
            const ActionStep step = bundle.actor->act(cmd_it->second, obs_it->second, {});
            if (s.options.record_decisions) {
                decision.cursors[body] = cursor_before;
                decision.actions[body] = step;
            }
            Position after = s.world.agents.at(body);
            if (step.kind == ActionKind::MoveTo) {
                const MoveResult mv = apply_move(s.world, body, step.target);
                after = mv.new_position;
            }
            cmd_it->second.cursor += 1;
            record.actions.push_back({body, step.kind, step.target, after});
        }
        if (s.options.record_decisions && !decision.actions.empty())
            s.decisions.push_back(std::move(decision));
    }

    // Goal-target accounting after movement.
    for (const auto& [body, pos] : s.world.agents) {
        for (const auto& target : s.target_cells) {
            if (chebyshev(pos, target) <= s.options.goal_threshold)
                s.reached_targets.insert(target);
        }
    }

    // (8) successes feed the multi-modal memory.
    for (auto& group : s.groups) {
        if (group.subgoal.kind != SubGoalKind::Search || !group.subgoal.target_pos) continue;
        if (s.reached_targets.count(*group.subgoal.target_pos) == 0) continue;
        if (group.state != GroupState::Executing) continue;
        group.state = GroupState::Done;
        Plan plan;
        plan.subgoals = {group.subgoal};
        plan.rationale = "executed search";
        const auto& buffer = s.platform.buffer(group.conductor_body);
        std::vector<std::string> descriptor =
            buffer.empty() ? std::vector<std::string>{} : tokenize(buffer.back().observation_text);
        s.memory.store_success(s.goal_task_text, descriptor, plan, s.round);
        if (!frozen_groups)
            for (const AgentId& body : group.bodies()) s.idle_bodies.push_back(body);
    }
    if (!frozen_groups) {
        s.groups.erase(std::remove_if(s.groups.begin(), s.groups.end(),
                                      [](const GroupSpec& g) {
                                          return g.state == GroupState::Done ||
                                                 g.state == GroupState::Revising;
                                      }),
                       s.groups.end());
    }

    s.world.clock += 1;
    s.round += 1;
    record.area = explored_area(s.platform.map());
    record.area_delta = record.area - area_before;
    record.reached_targets = static_cast<int>(s.reached_targets.size());
    record.goal_satisfied = s.goal_satisfied();
    record.map_version = s.platform.map().version;
    record.backend_calls = s.backend_calls;
    for (const auto& g : s.groups)
        record.groups.push_back({g.conductor, g.subgoal.kind, g.state,
                                 static_cast<int>(g.members.size())});
    s.trace.push_back(std::move(record));
    return s;
}

// Manual regroup entry point: returns a revised group's bodies to the idle
// pool so the next plan can reallocate them.
inline SystemState regroup(SystemState s, const Critique& critique, AgentId conductor) {
    if (critique.verdict != Verdict::Revise) return s;
    for (auto& group : s.groups) {
        if (group.conductor != conductor) continue;
        group.state = GroupState::Revising;
        for (const AgentId& body : group.bodies()) s.idle_bodies.push_back(body);
        if (critique.suggested_edits)
            for (const auto& sg : *critique.suggested_edits) s.queued_subgoals.push_back(sg);
    }
    s.groups.erase(std::remove_if(s.groups.begin(), s.groups.end(),
                                  [](const GroupSpec& g) {
                                      return g.state == GroupState::Revising;
                                  }),
                   s.groups.end());
    return s;
}

}  // namespace hivenav

#endif
