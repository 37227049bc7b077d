#ifndef HIVENAV_SCRIPTED_BACKEND_HPP
#define HIVENAV_SCRIPTED_BACKEND_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hivenav/backend.hpp"
#include "hivenav/dynamic_map.hpp"
#include "hivenav/tokens.hpp"

namespace hivenav {

struct ScriptedConfig {
    std::uint64_t seed = 0;
    int max_subgoals = 8;
    int area_quota = 64;        // frontier cells per Explore cluster
    int stall_window = 3;       // consecutive zero-progress rounds before revise
    double image_match_fraction = 0.75;
    int search_region_radius = 8;
    int min_region_cells = 64;  // deploy widens tighter clusters to this
    int summary_token_cap = 32;
};

namespace scripted_detail {

struct ParsedMap {
    std::set<Position> explored;
    std::map<Position, std::set<std::string>> annotations;
    int width = 0;
    int height = 0;
};

inline ParsedMap parse_map(const MapImage& map) {
    ParsedMap parsed;
    parsed.width = map.width;
    parsed.height = map.height;
    std::istringstream in(map.text);
    std::string line;
    int y = 0;
    bool in_legend = false;
    while (std::getline(in, line)) {
        if (line == "legend:") {
            in_legend = true;
            continue;
        }
        if (!in_legend) {
            for (int x = 0; x < static_cast<int>(line.size()); ++x)
                if (line[static_cast<std::size_t>(x)] != '?') parsed.explored.insert({x, y});
            ++y;
            continue;
        }
        // "token @ (x,y)"
        const auto at = line.find(" @ (");
        if (at == std::string::npos) continue;
        const std::string token = line.substr(0, at);
        int px = 0, py = 0;
        if (std::sscanf(line.c_str() + at, " @ (%d,%d)", &px, &py) == 2)
            parsed.annotations[{px, py}].insert(token);
    }
    return parsed;
}

inline bool tokens_match_goal(const Goal& goal, const std::set<std::string>& tokens,
                              double image_fraction) {
    if (goal.payload.empty()) return false;
    switch (goal.kind) {
        case GoalKind::Object:
            return tokens.count(goal.payload.front()) != 0;
        case GoalKind::Audio:
            return tokens.count("entity_" + goal.payload.front()) != 0;
        case GoalKind::Image: {
            int overlap = 0;
            for (const auto& tok : goal.payload) overlap += tokens.count(tok) != 0 ? 1 : 0;
            return static_cast<double>(overlap) / static_cast<double>(goal.payload.size()) >=
                   image_fraction;
        }
    }
    return false;
}

inline Position centroid_or_origin(const std::set<Position>& cells) {
    if (cells.empty()) return {0, 0};
    long long sx = 0, sy = 0;
    for (const auto& p : cells) {
        sx += p.x;
        sy += p.y;
    }
    return {static_cast<int>(sx / static_cast<long long>(cells.size())),
            static_cast<int>(sy / static_cast<long long>(cells.size()))};
}

// Status lines the hierarchy emits and the scripted planner understands:
//   "visited (x,y)"            target already reached, do not re-plan it
//   "sighted <token> @ (x,y)"  goal seen at a position (textual fallback path)
struct ParsedStatus {
    std::set<Position> visited;
    std::vector<std::pair<std::string, Position>> sightings;
};

inline ParsedStatus parse_status(const std::string& status) {
    ParsedStatus parsed;
    std::istringstream in(status);
    std::string line;
    while (std::getline(in, line)) {
        int x = 0, y = 0;
        if (std::sscanf(line.c_str(), "visited (%d,%d)", &x, &y) == 2) {
            parsed.visited.insert({x, y});
            continue;
        }
        const auto pos = line.rfind(" @ (");
        if (line.rfind("sighted ", 0) == 0 && pos != std::string::npos &&
            std::sscanf(line.c_str() + pos, " @ (%d,%d)", &x, &y) == 2) {
            parsed.sightings.emplace_back(line.substr(8, pos - 8), Position{x, y});
        }
    }
    return parsed;
}

inline Rect clamped_box(Position center, int radius, int width, int height) {
    return Rect{std::max(0, center.x - radius), std::max(0, center.y - radius),
                std::min(width - 1, center.x + radius), std::min(height - 1, center.y + radius)};
}

}  // namespace scripted_detail

class ScriptedDescriber final : public Describer {
public:
    explicit ScriptedDescriber(ScriptedConfig config) : config_(config) {}

    std::string describe_observation(const Observation& obs) override {
        std::set<std::string> seen;
        for (const auto& [pos, annotations] : obs.vision)
            seen.insert(annotations.begin(), annotations.end());
        std::ostringstream out;
        out << "at " << to_string(obs.position) << "; sees:";
        if (seen.empty()) {
            out << " none";
        } else {
            for (const auto& tok : seen) out << " " << tok;
        }
        out << "; hears:";
        if (obs.audio.empty()) {
            out << " none";
        } else {
            bool first = true;
            std::vector<std::pair<std::string, double>> sorted = obs.audio;
            std::sort(sorted.begin(), sorted.end());
            for (const auto& [src, intensity] : sorted) {
                out << (first ? " " : ",") << src << ":" << intensity_band(intensity);
                first = false;
            }
        }
        return out.str();
    }

    std::string describe_map(const MapImage& map) override {
        const auto parsed = scripted_detail::parse_map(map);
        return "map explored=" + std::to_string(parsed.explored.size()) + " of " +
               std::to_string(map.width) + "x" + std::to_string(map.height);
    }

    std::vector<std::string> describe_tokens(const std::vector<std::string>& visual) override {
        std::vector<std::string> out;
        for (const auto& v : visual) {
            auto toks = tokenize(v);
            out.insert(out.end(), toks.begin(), toks.end());
        }
        return out;
    }

    std::string summarize(const std::string& text) override {
        const auto toks = tokenize(text);
        std::ostringstream out;
        const int n = std::min<int>(config_.summary_token_cap, static_cast<int>(toks.size()));
        for (int i = 0; i < n; ++i) out << (i ? " " : "") << toks[static_cast<std::size_t>(i)];
        return out.str();
    }

    static const char* intensity_band(double intensity) {
        if (intensity < 0.33) return "faint";
        if (intensity < 0.66) return "clear";
        return "loud";
    }

private:
    ScriptedConfig config_;
};

// Frontier-clustering heuristic planner: sighted goals become Search subgoals,
// otherwise the frontier is split into angular clusters and each gets an
// Explore subgoal, nearest cluster first.
class ScriptedPlanner final : public Planner {
public:
    explicit ScriptedPlanner(ScriptedConfig config) : config_(config) {}

    Plan plan_subgoals(const Goal& goal, const MapImage& map, const std::string& status,
                       const std::string& memory_context) override {
        using namespace scripted_detail;
        const ParsedMap parsed = parse_map(map);
        const ParsedStatus st = parse_status(status);
        const Position centroid = centroid_or_origin(parsed.explored);

        Plan plan;
        plan.source = memory_context.find("demonstration") != std::string::npos
                          ? PlanSource::MemoryAugmented
                          : PlanSource::Fresh;

        // Sightings from the map legend plus the textual status path.
        std::set<Position> sightings;
        for (const auto& [pos, tokens] : parsed.annotations)
            if (tokens_match_goal(goal, tokens, config_.image_match_fraction)) sightings.insert(pos);
        for (const auto& [token, pos] : st.sightings) {
            std::set<std::string> single{token};
            if (goal.kind != GoalKind::Image &&
                tokens_match_goal(goal, single, config_.image_match_fraction))
                sightings.insert(pos);
            else if (goal.kind == GoalKind::Image && !goal.payload.empty() &&
                     token == goal.payload.front())
                sightings.insert(pos);
        }
        for (const auto& v : st.visited) sightings.erase(v);

        if (!sightings.empty()) {
            std::vector<Position> ordered(sightings.begin(), sightings.end());
            std::sort(ordered.begin(), ordered.end(), [&](Position a, Position b) {
                const double da = euclidean(a, centroid), db = euclidean(b, centroid);
                if (da != db) return da < db;
                return std::tie(a.y, a.x) < std::tie(b.y, b.x);
            });
            const int n = std::min<int>(
                {config_.max_subgoals, static_cast<int>(ordered.size()), std::max(1, goal.count)});
            for (int i = 0; i < n; ++i) {
                SubGoal sg;
                sg.id = i;
                sg.kind = SubGoalKind::Search;
                sg.target = goal.payload;
                sg.target_pos = ordered[static_cast<std::size_t>(i)];
                sg.region = clamped_box(*sg.target_pos, config_.search_region_radius, map.width,
                                        map.height);
                sg.suggested_strategy = "approach sighting and confirm target";
                sg.quantity = 1;
                plan.subgoals.push_back(std::move(sg));
            }
            plan.rationale = "goal sighted; dispatching search groups";
            return plan;
        }

        const std::set<Position> frontier =
            compute_frontier(parsed.explored, map.width, map.height);
        if (frontier.empty()) {
            SubGoal sg;
            sg.id = 0;
            sg.kind = SubGoalKind::Explore;
            sg.region = Rect{0, 0, std::max(0, map.width - 1), std::max(0, map.height - 1)};
            sg.target_pos = sg.region.center();
            sg.suggested_strategy = "survey unexplored terrain";
            sg.quantity = 1;
            plan.subgoals.push_back(std::move(sg));
            plan.rationale = "no frontier available; fallback sweep";
            return plan;
        }

        const int k = std::clamp(
            static_cast<int>((static_cast<long long>(frontier.size()) + config_.area_quota - 1) /
                             config_.area_quota),
            1, config_.max_subgoals);

        // Angular sectors around the explored centroid keep clusters spatially
        // coherent without any iterative fitting.
        std::vector<Position> cells(frontier.begin(), frontier.end());
        std::sort(cells.begin(), cells.end(), [&](Position a, Position b) {
            const double aa = std::atan2(a.y - centroid.y, a.x - centroid.x);
            const double ab = std::atan2(b.y - centroid.y, b.x - centroid.x);
            if (aa != ab) return aa < ab;
            return std::tie(a.y, a.x) < std::tie(b.y, b.x);
        });

        struct Cluster {
            Rect bbox;
            Position target;
        };
        std::vector<Cluster> clusters;
        const std::size_t chunk = (cells.size() + static_cast<std::size_t>(k) - 1) /
                                  static_cast<std::size_t>(k);
        for (std::size_t start = 0; start < cells.size(); start += chunk) {
            const std::size_t end = std::min(start + chunk, cells.size());
            Rect bbox{cells[start].x, cells[start].y, cells[start].x, cells[start].y};
            for (std::size_t i = start; i < end; ++i) {
                bbox.x0 = std::min(bbox.x0, cells[i].x);
                bbox.y0 = std::min(bbox.y0, cells[i].y);
                bbox.x1 = std::max(bbox.x1, cells[i].x);
                bbox.y1 = std::max(bbox.y1, cells[i].y);
            }
            const Position center = bbox.center();
            Position target = cells[start];
            double best = euclidean(target, center);
            for (std::size_t i = start; i < end; ++i) {
                const double d = euclidean(cells[i], center);
                if (d < best ||
                    (d == best && std::tie(cells[i].y, cells[i].x) < std::tie(target.y, target.x))) {
                    best = d;
                    target = cells[i];
                }
            }
            clusters.push_back({bbox, target});
        }
        std::sort(clusters.begin(), clusters.end(), [&](const Cluster& a, const Cluster& b) {
            const double da = euclidean(a.target, centroid), db = euclidean(b.target, centroid);
            if (da != db) return da < db;
            return std::tie(a.target.y, a.target.x) < std::tie(b.target.y, b.target.x);
        });

        int id = 0;
        for (const auto& cluster : clusters) {
            SubGoal sg;
            sg.id = id++;
            sg.kind = SubGoalKind::Explore;
            sg.region = cluster.bbox;
            sg.target_pos = cluster.target;
            sg.suggested_strategy = "expand the frontier in this sector";
            sg.quantity = 1;
            plan.subgoals.push_back(std::move(sg));
        }
        plan.rationale = "no sighting; exploring " + std::to_string(clusters.size()) +
                         " frontier sectors";
        return plan;
    }

private:
    static std::set<Position> compute_frontier(const std::set<Position>& explored, int width,
                                               int height) {
        std::set<Position> frontier;
        static constexpr int kDx[4] = {1, -1, 0, 0};
        static constexpr int kDy[4] = {0, 0, 1, -1};
        for (const auto& pos : explored) {
            for (int d = 0; d < 4; ++d) {
                Position nb{pos.x + kDx[d], pos.y + kDy[d]};
                if (nb.x < 0 || nb.x >= width || nb.y < 0 || nb.y >= height) continue;
                if (explored.find(nb) == explored.end()) frontier.insert(nb);
            }
        }
        return frontier;
    }

    ScriptedConfig config_;
};

class ScriptedManagerDeployer final : public ManagerDeployer {
public:
    explicit ScriptedManagerDeployer(ScriptedConfig config) : config_(config) {}

    SubtaskDirective deploy_subtask(const std::string& multimodal_info, const MapImage& map,
                                    const SubGoal& subgoal, const std::string& strategy) override {
        (void)multimodal_info;
        SubtaskDirective directive;
        directive.subgoal = subgoal;
        directive.strategy = strategy;
        directive.quantity = subgoal.quantity;
        directive.region = widen(subgoal.region, map.width, map.height);
        directive.map_excerpt = excerpt(map, directive.region);
        return directive;
    }

private:
    Rect widen(Rect r, int width, int height) const {
        while (static_cast<long long>(r.width()) * r.height() < config_.min_region_cells &&
               (r.x0 > 0 || r.y0 > 0 || r.x1 < width - 1 || r.y1 < height - 1)) {
            r.x0 = std::max(0, r.x0 - 1);
            r.y0 = std::max(0, r.y0 - 1);
            r.x1 = std::min(width - 1, r.x1 + 1);
            r.y1 = std::min(height - 1, r.y1 + 1);
        }
        return r;
    }

    static std::string excerpt(const MapImage& map, Rect region) {
        std::istringstream in(map.text);
        std::string line, out;
        int y = 0;
        while (std::getline(in, line) && line != "legend:") {
            if (y >= region.y0 && y <= region.y1 &&
                region.x0 < static_cast<int>(line.size())) {
                const int len = std::min(region.x1, static_cast<int>(line.size()) - 1) -
                                region.x0 + 1;
                if (len > 0) {
                    out += line.substr(static_cast<std::size_t>(region.x0),
                                       static_cast<std::size_t>(len));
                    out += '\n';
                }
            }
            ++y;
        }
        return out;
    }

    ScriptedConfig config_;
};

class ScriptedConductorDeployer final : public ConductorDeployer {
public:
    SubCommand deploy_subcommand(const SubtaskDirective& task, Position position_info) override {
        SubCommand cmd;
        cmd.assigned_target = position_info;
        cmd.steps = {ActionStep{ActionKind::MoveTo, position_info, ""},
                     ActionStep{ActionKind::Scan, position_info, ""},
                     ActionStep{ActionKind::ReportMap, position_info, ""}};
        if (task.subgoal.kind == SubGoalKind::Search)
            cmd.steps.front().note = "approach";
        return cmd;
    }
};

// Revise iff the last stall_window reports all show zero map growth and zero
// goal progress. Reports carry "area_delta=N" and "goal_progress=N".
class ScriptedCritic final : public Critic {
public:
    explicit ScriptedCritic(ScriptedConfig config) : config_(config) {}

    Critique critique(const std::string& subject,
                      const std::vector<std::string>& outcome_reports) override {
        (void)subject;
        if (static_cast<int>(outcome_reports.size()) < config_.stall_window)
            return Critique{Verdict::Accept, "window not filled", std::nullopt};
        for (std::size_t i = outcome_reports.size() - config_.stall_window;
             i < outcome_reports.size(); ++i) {
            int area = 0, progress = 0;
            parse_report(outcome_reports[i], area, progress);
            if (area != 0 || progress != 0)
                return Critique{Verdict::Accept, "progress observed", std::nullopt};
        }
        return Critique{Verdict::Revise, "stalled", std::nullopt};
    }

private:
    static void parse_report(const std::string& report, int& area, int& progress) {
        const auto a = report.find("area_delta=");
        if (a != std::string::npos) area = std::atoi(report.c_str() + a + 11);
        const auto p = report.find("goal_progress=");
        if (p != std::string::npos) progress = std::atoi(report.c_str() + p + 14);
    }

    ScriptedConfig config_;
};

class ScriptedActor final : public Actor {
public:
    ActionStep act(SubCommand& command, const Observation& obs,
                   const std::vector<SkillRecord>& skills) override {
        if (command.exhausted()) throw CommandExhausted{};
        if (!command.skill_applied) {
            std::set<std::string> seen;
            for (const auto& [pos, annotations] : obs.vision)
                seen.insert(annotations.begin(), annotations.end());
            for (const auto& skill : skills) {
                if (skill.trigger_tokens.empty() || skill.body.empty()) continue;
                const bool triggered =
                    std::all_of(skill.trigger_tokens.begin(), skill.trigger_tokens.end(),
                                [&](const std::string& t) { return seen.count(t) != 0; });
                if (triggered) {
                    // Skill-first rule: the macro replaces the remaining steps.
                    command.steps.erase(command.steps.begin() + command.cursor,
                                        command.steps.end());
                    command.steps.insert(command.steps.end(), skill.body.begin(),
                                         skill.body.end());
                    command.skill_applied = true;
                    break;
                }
            }
        }
        return command.steps[static_cast<std::size_t>(command.cursor)];
    }
};

class ScriptedCurriculum final : public Curriculum {
public:
    std::string propose_next_task(const CurriculumLog& log, const MapImage& map) override {
        (void)map;
        for (const auto& task : ladder()) {
            bool succeeded = false;
            for (const auto& ep : log.episodes)
                if (ep.proposed_task == task && ep.succeeded) succeeded = true;
            if (!succeeded) return task;
        }
        return "free explore";
    }

    static const std::vector<std::string>& ladder() {
        static const std::vector<std::string> tasks = {
            "explore 100 cells", "find any object goal", "find 3 blocks", "composite search"};
        return tasks;
    }
};

class ScriptedSkillResolver final : public SkillResolver {
public:
    explicit ScriptedSkillResolver(std::shared_ptr<SkillLibrary> library)
        : library_(std::move(library)) {}

    std::vector<SkillRecord> lookup(const std::vector<std::string>& query, int k) override {
        std::vector<SkillRecord> out;
        if (!library_) return out;
        for (auto& [skill, score] : library_->lookup(query, k)) out.push_back(skill);
        return out;
    }

private:
    std::shared_ptr<SkillLibrary> library_;
};

inline BackendBundle make_scripted_bundle(const ScriptedConfig& config = {},
                                          std::shared_ptr<SkillLibrary> skills = nullptr) {
    BackendBundle bundle;
    bundle.kind = BackendKind::Scripted;
    bundle.planner = std::make_shared<ScriptedPlanner>(config);
    bundle.describer = std::make_shared<ScriptedDescriber>(config);
    bundle.deployer = std::make_shared<ScriptedManagerDeployer>(config);
    bundle.critic_manager = std::make_shared<ScriptedCritic>(config);
    bundle.actor = std::make_shared<ScriptedActor>();
    bundle.curriculum = std::make_shared<ScriptedCurriculum>();
    bundle.critic_conductor = std::make_shared<ScriptedCritic>(config);
    bundle.deployer_conductor = std::make_shared<ScriptedConductorDeployer>();
    bundle.skill_resolver = std::make_shared<ScriptedSkillResolver>(std::move(skills));
    return bundle;
}

}  // namespace hivenav

#endif
