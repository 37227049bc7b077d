#ifndef HIVENAV_HARNESS_HPP
#define HIVENAV_HARNESS_HPP

#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hivenav/hierarchy.hpp"
#include "hivenav/json_io.hpp"

namespace hivenav {

enum class TaskFamily { GoalSearch, BlockSearch, MapExploration };

inline const char* task_family_name(TaskFamily f) {
    switch (f) {
        case TaskFamily::GoalSearch: return "goal-search";
        case TaskFamily::BlockSearch: return "block-search";
        case TaskFamily::MapExploration: return "map-exploration";
    }
    return "?";
}

struct TaskSpec {
    TaskFamily family = TaskFamily::GoalSearch;
    Goal goal;                       // GoalSearch only; BlockSearch/MapExploration synthesize one
    WorldConfig world;               // per-trial seed overrides world.seed
    int n_agents = 8;
    int max_iters = 100;
    std::vector<std::uint64_t> seeds;
    int trials_per_seed = 1;
    AblationFlags ablation;
    SpawnPlacement spawn = SpawnPlacement::Clustered;
    int goal_threshold = 3;
    int explore_window_iters = 5;    // area-after-N-iterations reporting window
    int explore_area_target = 100;   // iters-to-area metric threshold

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        if (n_agents < 1 || n_agents > 8) throw std::invalid_argument("agent budget in [1,8]");
        if (seeds.empty()) throw std::invalid_argument("no seeds");
        if (family == TaskFamily::BlockSearch && world.layout != WorldLayout::DiamondGrid16)
            throw std::invalid_argument("block search requires the diamond_grid_16 layout");
    }
};

// Merges ablation switches from a task spec into the system options.
inline SystemOptions apply_ablation(SystemOptions options, const AblationFlags& flags) {
    options.ablation.no_dynamic_map = options.ablation.no_dynamic_map || flags.no_dynamic_map;
    options.ablation.no_auto_organize =
        options.ablation.no_auto_organize || flags.no_auto_organize;
    return options;
}

struct TrialMetrics {
    std::uint64_t seed = 0;
    int trial = 0;
    bool success = false;
    std::optional<int> iters_to_success;
    std::vector<int> blocks_found_per_iter;  // cumulative distinct targets
    std::vector<int> area_per_iter;
    int initial_area = 0;
    int initial_blocks = 0;
    std::optional<int> iters_to_area_target;
    int area_at_window = 0;
    int backend_calls = 0;
    int completed_iters = 0;
};

// One line per simulation event; everything the summary needs is in here so
// the summary can be regenerated from the trace alone.
inline json trace_start_row(std::uint64_t seed, int trial, const TaskSpec& spec,
                            const SystemState& state) {
    return json{{"type", "trial_start"},
                {"seed", seed},
                {"trial", trial},
                {"task", task_family_name(spec.family)},
                {"n_agents", spec.n_agents},
                {"area", explored_area(state.platform.map())},
                {"reached", static_cast<int>(state.reached_targets.size())},
                {"map_version", state.platform.map().version}};
}

inline json trace_tick_row(std::uint64_t seed, int trial, const TickRecord& rec) {
    json groups = json::array();
    for (const auto& g : rec.groups)
        groups.push_back(json{{"conductor", g.conductor},
                              {"subgoal_kind", subgoal_kind_name(g.subgoal_kind)},
                              {"state", group_state_name(g.state)},
                              {"members", g.member_count}});
    json actions = json::array();
    for (const auto& a : rec.actions)
        actions.push_back(json{{"body", a.body},
                               {"kind", action_kind_name(a.kind)},
                               {"target", a.target},
                               {"position_after", a.position_after}});
    return json{{"type", "tick"},
                {"seed", seed},
                {"trial", trial},
                {"round", rec.round},
                {"groups", groups},
                {"actions", actions},
                {"map_version", rec.map_version},
                {"metrics_delta",
                 json{{"area", rec.area},
                      {"area_delta", rec.area_delta},
                      {"reached", rec.reached_targets},
                      {"goal_satisfied", rec.goal_satisfied},
                      {"backend_calls", rec.backend_calls}}}};
}

namespace harness_detail {

inline Goal trial_goal(const TaskSpec& spec) {
    switch (spec.family) {
        case TaskFamily::GoalSearch:
            return spec.goal;
        case TaskFamily::BlockSearch: {
            Goal g;
            g.kind = GoalKind::Object;
            g.payload = {"diamond_block"};
            g.count = 10;
            return g;
        }
        case TaskFamily::MapExploration: {
            // A target no world cell carries: the system explores indefinitely.
            Goal g;
            g.kind = GoalKind::Object;
            g.payload = {"uncharted_horizon"};
            g.count = 1;
            return g;
        }
    }
    return spec.goal;
}

// Metric extraction shared by the live path and trace replay: both reduce the
// same rows, so the two computations cannot drift apart.
inline TrialMetrics metrics_from_rows(const TaskSpec& spec, const json& start_row,
                                      const std::vector<json>& tick_rows) {
    TrialMetrics m;
    m.seed = start_row.at("seed").get<std::uint64_t>();
    m.trial = start_row.at("trial").get<int>();
    m.initial_area = start_row.at("area").get<int>();
    m.initial_blocks = start_row.at("reached").get<int>();
    m.completed_iters = static_cast<int>(tick_rows.size());

    int iter = 0;
    for (const auto& row : tick_rows) {
        ++iter;
        const auto& delta = row.at("metrics_delta");
        const int area = delta.at("area").get<int>();
        const int reached = delta.at("reached").get<int>();
        m.area_per_iter.push_back(area);
        m.blocks_found_per_iter.push_back(reached);
        m.backend_calls = delta.at("backend_calls").get<int>();
        if (!m.success && delta.at("goal_satisfied").get<bool>()) {
            m.success = true;
            m.iters_to_success = iter;
        }
        if (!m.iters_to_area_target && area >= spec.explore_area_target)
            m.iters_to_area_target = iter;
    }
    if (m.initial_area >= spec.explore_area_target) m.iters_to_area_target = 0;
    const int window = spec.explore_window_iters;
    if (!m.area_per_iter.empty())
        m.area_at_window = m.area_per_iter[static_cast<std::size_t>(
            std::min<int>(window, static_cast<int>(m.area_per_iter.size())) - 1)];
    else
        m.area_at_window = m.initial_area;
    return m;
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace harness_detail

inline json summarize_trials(const TaskSpec& spec, const std::vector<TrialMetrics>& trials) {
    using harness_detail::mean;
    std::vector<double> iters_success, blocks_final, area_window, iters_area;
    int successes = 0;
    json per_trial = json::array();
    for (const auto& t : trials) {
        if (t.success) {
            ++successes;
            iters_success.push_back(static_cast<double>(*t.iters_to_success));
        }
        blocks_final.push_back(static_cast<double>(
            t.blocks_found_per_iter.empty() ? t.initial_blocks : t.blocks_found_per_iter.back()));
        area_window.push_back(static_cast<double>(t.area_at_window));
        if (t.iters_to_area_target)
            iters_area.push_back(static_cast<double>(*t.iters_to_area_target));
        json row{{"seed", t.seed},
                 {"trial", t.trial},
                 {"success", t.success},
                 {"completed_iters", t.completed_iters},
                 {"initial_area", t.initial_area},
                 {"area_at_window", t.area_at_window},
                 {"blocks_found",
                  t.blocks_found_per_iter.empty() ? t.initial_blocks
                                                  : t.blocks_found_per_iter.back()}};
        if (t.iters_to_success) row["iters_to_success"] = *t.iters_to_success;
        if (t.iters_to_area_target) row["iters_to_area_target"] = *t.iters_to_area_target;
        per_trial.push_back(std::move(row));
    }
    json summary{{"task", task_family_name(spec.family)},
                 {"n_agents", spec.n_agents},
                 {"max_iters", spec.max_iters},
                 {"trials", static_cast<int>(trials.size())},
                 {"success_rate",
                  trials.empty() ? 0.0
                                 : static_cast<double>(successes) /
                                       static_cast<double>(trials.size())},
                 {"mean_iters_to_success", mean(iters_success)},
                 {"mean_blocks_found", mean(blocks_final)},
                 {"mean_area_at_window", mean(area_window)},
                 {"mean_iters_to_area_target", mean(iters_area)},
                 {"per_trial", per_trial}};
    return summary;
}

inline std::string summary_table_md(const json& summary) {
    std::ostringstream out;
    out << "| task | # agents | # iters | success rate | # blocks | area |\n";
    out << "|------|----------|---------|--------------|----------|------|\n";
    out << std::fixed << std::setprecision(2);
    out << "| " << summary.at("task").get<std::string>() << " | "
        << summary.at("n_agents").get<int>() << " | "
        << summary.at("mean_iters_to_success").get<double>() << " | "
        << summary.at("success_rate").get<double>() << " | "
        << summary.at("mean_blocks_found").get<double>() << " | "
        << summary.at("mean_area_at_window").get<double>() << " |\n";
    return out.str();
}

struct RunResult {
    std::vector<TrialMetrics> trials;
    json summary;
    std::string table_md;
    bool all_trials_completed = true;
};

// Runs one trial to its task-specific stopping point and returns its rows.
inline std::pair<json, std::vector<json>> run_trial(const TaskSpec& spec, std::uint64_t seed,
                                                    int trial, const BackendBundle& bundle,
                                                    std::ostream* messages_out = nullptr) {
    WorldConfig config = spec.world;
    config.seed = seed + static_cast<std::uint64_t>(trial) * 0x9e3779b97f4a7c15ULL;
    WorldState world = generate_world(config);

    SystemOptions options;
    options.n_agents = spec.n_agents;
    options.goal_threshold = spec.goal_threshold;
    options.spawn = spec.spawn;
    options = apply_ablation(options, spec.ablation);

    const Goal goal = harness_detail::trial_goal(spec);
    SystemState state = bootstrap(goal, std::move(world), bundle, options);
    const json start = trace_start_row(seed, trial, spec, state);

    std::vector<json> rows;
    for (int iter = 0; iter < spec.max_iters; ++iter) {
        state = tick(state, bundle);
        rows.push_back(trace_tick_row(seed, trial, state.trace.back()));
        const bool satisfied = state.goal_satisfied();
        if (spec.family == TaskFamily::MapExploration) {
            const int area = explored_area(state.platform.map());
            if (iter + 1 >= spec.explore_window_iters && area >= spec.explore_area_target) break;
        } else if (satisfied) {
            break;
        }
    }
    if (messages_out)
        for (const auto& env : state.router.delivered_log())
            *messages_out << envelope_to_json(env).dump() << "\n";
    return {start, rows};
}

inline RunResult run_task(const TaskSpec& spec, const BackendBundle& bundle,
                          std::ostream* trace_out = nullptr,
                          std::ostream* messages_out = nullptr) {
    spec.validate();
    RunResult result;
    for (const std::uint64_t seed : spec.seeds) {
        for (int trial = 0; trial < spec.trials_per_seed; ++trial) {
            auto [start, rows] = run_trial(spec, seed, trial, bundle, messages_out);
            if (trace_out) {
                *trace_out << start.dump() << "\n";
                for (const auto& row : rows) *trace_out << row.dump() << "\n";
            }
            result.trials.push_back(harness_detail::metrics_from_rows(spec, start, rows));
        }
    }
    result.summary = summarize_trials(spec, result.trials);
    result.table_md = summary_table_md(result.summary);
    return result;
}

inline RunResult run_goal_search(const TaskSpec& spec, const BackendBundle& bundle,
                                 std::ostream* trace_out = nullptr) {
    TaskSpec s = spec;
    s.family = TaskFamily::GoalSearch;
    return run_task(s, bundle, trace_out);
}

inline RunResult run_block_search(const TaskSpec& spec, const BackendBundle& bundle,
                                  std::ostream* trace_out = nullptr) {
    TaskSpec s = spec;
    s.family = TaskFamily::BlockSearch;
    return run_task(s, bundle, trace_out);
}

inline RunResult run_map_exploration(const TaskSpec& spec, const BackendBundle& bundle,
                                     std::ostream* trace_out = nullptr) {
    TaskSpec s = spec;
    s.family = TaskFamily::MapExploration;
    return run_task(s, bundle, trace_out);
}

// Rebuilds the summary from a trace stream alone; must match the live summary
// field for field.
inline json replay_summary(const TaskSpec& spec, std::istream& trace_in) {
    std::vector<TrialMetrics> trials;
    std::optional<json> start;
    std::vector<json> rows;
    auto flush = [&]() {
        if (start) trials.push_back(harness_detail::metrics_from_rows(spec, *start, rows));
        start.reset();
        rows.clear();
    };
    std::string line;
    while (std::getline(trace_in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        const std::string type = row.value("type", "");
        if (type == "trial_start") {
            flush();
            start = row;
        } else if (type == "tick") {
            rows.push_back(std::move(row));
        }
    }
    flush();
    return summarize_trials(spec, trials);
}

}  // namespace hivenav

#endif
