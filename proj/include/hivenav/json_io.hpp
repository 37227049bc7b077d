#ifndef HIVENAV_JSON_IO_HPP
#define HIVENAV_JSON_IO_HPP

#include <string>

#include <json.hpp>

#include "hivenav/directives.hpp"
#include "hivenav/dynamic_map.hpp"
#include "hivenav/memory.hpp"
#include "hivenav/world.hpp"

namespace hivenav {

using nlohmann::json;

inline void to_json(json& j, const Position& p) { j = json{{"x", p.x}, {"y", p.y}}; }
inline void from_json(const json& j, Position& p) {
    j.at("x").get_to(p.x);
    j.at("y").get_to(p.y);
}

inline void to_json(json& j, const Rect& r) {
    j = json{{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}
inline void from_json(const json& j, Rect& r) {
    j.at("x0").get_to(r.x0);
    j.at("y0").get_to(r.y0);
    j.at("x1").get_to(r.x1);
    j.at("y1").get_to(r.y1);
}

inline void to_json(json& j, const AgentId& id) {
    j = json{{"tier", tier_name(id.tier)}, {"index", id.index}};
}
inline void from_json(const json& j, AgentId& id) {
    const std::string t = j.at("tier").get<std::string>();
    if (t == "manager")
        id.tier = Tier::Manager;
    else if (t == "conductor")
        id.tier = Tier::Conductor;
    else
        id.tier = Tier::SubAgent;
    j.at("index").get_to(id.index);
}

NLOHMANN_JSON_SERIALIZE_ENUM(GoalKind, {{GoalKind::Image, "image"},
                                        {GoalKind::Object, "object"},
                                        {GoalKind::Audio, "audio"}})

NLOHMANN_JSON_SERIALIZE_ENUM(SubGoalKind, {{SubGoalKind::Image, "image"},
                                           {SubGoalKind::Object, "object"},
                                           {SubGoalKind::Audio, "audio"},
                                           {SubGoalKind::Explore, "explore"},
                                           {SubGoalKind::Search, "search"}})

NLOHMANN_JSON_SERIALIZE_ENUM(ActionKind, {{ActionKind::MoveTo, "move_to"},
                                          {ActionKind::Scan, "scan"},
                                          {ActionKind::ReportMap, "report_map"},
                                          {ActionKind::PickUp, "pick_up"},
                                          {ActionKind::Idle, "idle"}})

NLOHMANN_JSON_SERIALIZE_ENUM(Verdict, {{Verdict::Accept, "accept"}, {Verdict::Revise, "revise"}})

NLOHMANN_JSON_SERIALIZE_ENUM(PlanSource, {{PlanSource::Fresh, "fresh"},
                                          {PlanSource::MemoryAugmented, "memory_augmented"}})

NLOHMANN_JSON_SERIALIZE_ENUM(WorldLayout, {{WorldLayout::Freeform, "freeform"},
                                           {WorldLayout::DiamondGrid16, "diamond_grid_16"}})

inline void to_json(json& j, const Goal& g) {
    j = json{{"kind", g.kind}, {"payload", g.payload}, {"count", g.count}};
}
inline void from_json(const json& j, Goal& g) {
    j.at("kind").get_to(g.kind);
    j.at("payload").get_to(g.payload);
    g.count = j.value("count", 1);
}

inline void to_json(json& j, const GoalPlacement& g) {
    j = json{{"id", g.id},
             {"name", g.name},
             {"feature_tokens", g.feature_tokens},
             {"emits_audio", g.emits_audio}};
    if (g.position) j["position"] = *g.position;
}
inline void from_json(const json& j, GoalPlacement& g) {
    j.at("id").get_to(g.id);
    j.at("name").get_to(g.name);
    g.feature_tokens = j.value("feature_tokens", std::vector<std::string>{});
    g.emits_audio = j.value("emits_audio", false);
    if (j.contains("position")) g.position = j.at("position").get<Position>();
}

inline void to_json(json& j, const WorldConfig& c) {
    j = json{{"seed", c.seed},
             {"width", c.width},
             {"height", c.height},
             {"terrain_count", c.terrain_count},
             {"goal_spec", c.goal_spec},
             {"layout", c.layout},
             {"perceptible_radius_audio", c.perceptible_radius_audio},
             {"sensing_radius", c.sensing_radius},
             {"move_cap", c.move_cap},
             {"image_match_fraction", c.image_match_fraction}};
}
inline void from_json(const json& j, WorldConfig& c) {
    j.at("seed").get_to(c.seed);
    j.at("width").get_to(c.width);
    j.at("height").get_to(c.height);
    c.terrain_count = j.value("terrain_count", 6);
    c.goal_spec = j.value("goal_spec", std::vector<GoalPlacement>{});
    c.layout = j.value("layout", WorldLayout::Freeform);
    c.perceptible_radius_audio = j.value("perceptible_radius_audio", 32);
    c.sensing_radius = j.value("sensing_radius", 16);
    c.move_cap = j.value("move_cap", 50);
    c.image_match_fraction = j.value("image_match_fraction", 0.75);
}

inline void to_json(json& j, const SubGoal& g) {
    j = json{{"id", g.id},
             {"kind", g.kind},
             {"target", g.target},
             {"region", g.region},
             {"suggested_strategy", g.suggested_strategy},
             {"quantity", g.quantity}};
    if (g.target_pos) j["target_pos"] = *g.target_pos;
}
inline void from_json(const json& j, SubGoal& g) {
    j.at("id").get_to(g.id);
    j.at("kind").get_to(g.kind);
    g.target = j.value("target", std::vector<std::string>{});
    j.at("region").get_to(g.region);
    g.suggested_strategy = j.value("suggested_strategy", std::string{});
    g.quantity = j.value("quantity", 1);
    if (j.contains("target_pos")) g.target_pos = j.at("target_pos").get<Position>();
}

inline void to_json(json& j, const Plan& p) {
    j = json{{"subgoals", p.subgoals}, {"rationale", p.rationale}, {"source", p.source}};
}
inline void from_json(const json& j, Plan& p) {
    j.at("subgoals").get_to(p.subgoals);
    p.rationale = j.value("rationale", std::string{});
    p.source = j.value("source", PlanSource::Fresh);
}

inline void to_json(json& j, const ActionStep& s) {
    j = json{{"kind", s.kind}, {"target", s.target}, {"note", s.note}};
}
inline void from_json(const json& j, ActionStep& s) {
    j.at("kind").get_to(s.kind);
    s.target = j.value("target", Position{});
    s.note = j.value("note", std::string{});
}

inline void to_json(json& j, const SubtaskDirective& d) {
    j = json{{"subgoal", d.subgoal},
             {"strategy", d.strategy},
             {"map_excerpt", d.map_excerpt},
             {"region", d.region},
             {"quantity", d.quantity}};
}
inline void from_json(const json& j, SubtaskDirective& d) {
    j.at("subgoal").get_to(d.subgoal);
    d.strategy = j.value("strategy", std::string{});
    d.map_excerpt = j.value("map_excerpt", std::string{});
    d.region = j.value("region", Rect{});
    d.quantity = j.value("quantity", 1);
}

inline void to_json(json& j, const SubCommand& c) {
    j = json{{"steps", c.steps},
             {"cursor", c.cursor},
             {"skill_applied", c.skill_applied},
             {"assigned_target", c.assigned_target}};
}
inline void from_json(const json& j, SubCommand& c) {
    j.at("steps").get_to(c.steps);
    c.cursor = j.value("cursor", 0);
    c.skill_applied = j.value("skill_applied", false);
    c.assigned_target = j.value("assigned_target", Position{});
}

inline void to_json(json& j, const Critique& c) {
    j = json{{"verdict", c.verdict}, {"reasons", c.reasons}};
    if (c.suggested_edits) j["suggested_edits"] = *c.suggested_edits;
}
inline void from_json(const json& j, Critique& c) {
    j.at("verdict").get_to(c.verdict);
    c.reasons = j.value("reasons", std::string{});
    if (j.contains("suggested_edits"))
        c.suggested_edits = j.at("suggested_edits").get<std::vector<SubGoal>>();
}

inline void to_json(json& j, const MemoryEntry& e) {
    j = json{{"id", e.id},
             {"task_text", e.task_text},
             {"obs_descriptor", e.obs_descriptor},
             {"plan", e.plan},
             {"created_step", e.created_step}};
}
inline void from_json(const json& j, MemoryEntry& e) {
    j.at("id").get_to(e.id);
    j.at("task_text").get_to(e.task_text);
    j.at("obs_descriptor").get_to(e.obs_descriptor);
    j.at("plan").get_to(e.plan);
    e.created_step = j.value("created_step", 0);
}

inline void to_json(json& j, const SkillRecord& s) {
    j = json{{"name", s.name},
             {"parameters", s.parameters},
             {"body", s.body},
             {"description", s.description},
             {"trigger_tokens", s.trigger_tokens}};
}
inline void from_json(const json& j, SkillRecord& s) {
    j.at("name").get_to(s.name);
    s.parameters = j.value("parameters", std::vector<std::string>{});
    j.at("body").get_to(s.body);
    s.description = j.value("description", std::vector<std::string>{});
    s.trigger_tokens = j.value("trigger_tokens", std::vector<std::string>{});
}

inline void to_json(json& j, const ReportEntry& r) {
    json cells = json::array();
    for (const auto& [pos, annotations] : r.cells)
        cells.push_back(json{{"pos", pos}, {"annotations", annotations}});
    j = json{{"agent", r.agent}, {"step", r.step}, {"cells", cells}};
}
inline void from_json(const json& j, ReportEntry& r) {
    j.at("agent").get_to(r.agent);
    j.at("step").get_to(r.step);
    r.cells.clear();
    for (const auto& c : j.at("cells"))
        r.cells.emplace_back(c.at("pos").get<Position>(),
                             c.at("annotations").get<std::vector<std::string>>());
}

// Map snapshot, cells sorted by (y, x) for byte-stable goldens.
inline json map_snapshot_json(const DynamicMap& map) {
    json cells = json::array();
    std::vector<std::pair<Position, CellRecord>> sorted(map.explored.begin(), map.explored.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.y, a.first.x) < std::tie(b.first.y, b.first.x);
    });
    for (const auto& [pos, rec] : sorted) {
        cells.push_back(json{{"x", pos.x},
                             {"y", pos.y},
                             {"annotations", rec.annotations},
                             {"last_agent", rec.last_agent},
                             {"last_step", rec.last_step}});
    }
    return json{{"version", map.version}, {"cells", cells}};
}

}  // namespace hivenav

#endif
