#ifndef HIVENAV_DIRECTIVES_HPP
#define HIVENAV_DIRECTIVES_HPP

#include <optional>
#include <string>
#include <vector>

#include "hivenav/geometry.hpp"
#include "hivenav/ids.hpp"

namespace hivenav {

enum class SubGoalKind { Image, Object, Audio, Explore, Search };

inline const char* subgoal_kind_name(SubGoalKind k) {
    switch (k) {
        case SubGoalKind::Image: return "image";
        case SubGoalKind::Object: return "object";
        case SubGoalKind::Audio: return "audio";
        case SubGoalKind::Explore: return "explore";
        case SubGoalKind::Search: return "search";
    }
    return "?";
}

struct SubGoal {
    int id = 0;
    SubGoalKind kind = SubGoalKind::Explore;
    std::vector<std::string> target;       // goal payload tokens
    Rect region;                           // Explore region / Search neighborhood
    std::optional<Position> target_pos;    // Search: sighting position
    std::string suggested_strategy;        // the manager's S_m
    int quantity = 1;

    bool operator==(const SubGoal&) const = default;
};

enum class PlanSource { Fresh, MemoryAugmented };

struct Plan {
    std::vector<SubGoal> subgoals;
    std::string rationale;
    PlanSource source = PlanSource::Fresh;

    bool operator==(const Plan&) const = default;
};

enum class Verdict { Accept, Revise };

struct Critique {
    Verdict verdict = Verdict::Accept;
    std::string reasons;
    std::optional<std::vector<SubGoal>> suggested_edits;

    bool operator==(const Critique&) const = default;
};

enum class ActionKind { MoveTo, Scan, ReportMap, PickUp, Idle };

inline const char* action_kind_name(ActionKind k) {
    switch (k) {
        case ActionKind::MoveTo: return "move_to";
        case ActionKind::Scan: return "scan";
        case ActionKind::ReportMap: return "report_map";
        case ActionKind::PickUp: return "pick_up";
        case ActionKind::Idle: return "idle";
    }
    return "?";
}

struct ActionStep {
    ActionKind kind = ActionKind::Idle;
    Position target;        // MoveTo / PickUp
    std::string note;

    bool operator==(const ActionStep&) const = default;
};

// Manager -> conductor task package (T_k).
struct SubtaskDirective {
    SubGoal subgoal;
    std::string strategy;
    std::string map_excerpt;   // raster covering the subgoal region
    Rect region;               // effective deployment region (subgoal region, widened for tiny clusters)
    int quantity = 1;

    bool operator==(const SubtaskDirective&) const = default;
};

// Conductor -> sub-agent flat command list (C_s), parameterized by P_k.
struct SubCommand {
    std::vector<ActionStep> steps;
    int cursor = 0;
    bool skill_applied = false;
    Position assigned_target;  // the P_k that differentiates sub-agents

    bool exhausted() const { return cursor >= static_cast<int>(steps.size()); }

    bool operator==(const SubCommand&) const = default;
};

}  // namespace hivenav

#endif
