#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hivenav/harness.hpp"
#include "hivenav/hierarchy.hpp"
#include "hivenav/scripted_backend.hpp"

using namespace hivenav;

namespace {

std::vector<AgentId> bodies(int n) {
    std::vector<AgentId> out;
    for (int i = 0; i < n; ++i) out.push_back({Tier::SubAgent, i});
    return out;
}

std::vector<SubGoal> explore_subgoals(int n) {
    std::vector<SubGoal> out;
    for (int i = 0; i < n; ++i) {
        SubGoal sg;
        sg.id = i;
        sg.kind = SubGoalKind::Explore;
        sg.region = Rect{0, 0, 31, 31};
        out.push_back(sg);
    }
    return out;
}

WorldConfig run_config(std::uint64_t seed = 7) {
    WorldConfig c;
    c.seed = seed;
    c.width = 64;
    c.height = 64;
    c.terrain_count = 4;
    GoalPlacement lamp;
    lamp.id = "lamp0";
    lamp.name = "lamp";
    lamp.position = Position{48, 48};
    c.goal_spec = {lamp};
    return c;
}

Goal lamp_goal() {
    Goal g;
    g.kind = GoalKind::Object;
    g.payload = {"lamp"};
    g.count = 1;
    return g;
}

// Audits the budget and single-membership invariants on a live state.
void audit_state(const SystemState& s) {
    std::set<AgentId> seen;
    int conductors = 0, members = 0;
    for (const auto& group : s.groups) {
        ++conductors;
        for (const AgentId& body : group.bodies()) {
            INFO("body " << to_string(body) << " in two groups");
            REQUIRE(seen.insert(body).second);
        }
        members += static_cast<int>(group.members.size());
    }
    // Conductors are embodied, so live world agents bound the total.
    REQUIRE(static_cast<int>(s.world.agents.size()) <= s.options.max_agents);
    REQUIRE(conductors + members <= s.options.max_agents);
}

}  // namespace

TEST_CASE("auto_organize splits the budget evenly with priority leftovers") {
    int next_index = 0;
    auto [two, queued2] = auto_organize(explore_subgoals(2), bodies(8), next_index);
    REQUIRE(two.size() == 2);
    CHECK(queued2.empty());
    CHECK(two[0].members.size() == 3);  // 1 conductor + 3 members each
    CHECK(two[1].members.size() == 3);
    CHECK(two[0].conductor == AgentId{Tier::Conductor, 0});
    CHECK(two[1].conductor == AgentId{Tier::Conductor, 1});

    next_index = 0;
    auto [one, queued1] = auto_organize(explore_subgoals(1), bodies(8), next_index);
    REQUIRE(one.size() == 1);
    CHECK(one[0].members.size() == 7);

    next_index = 0;
    auto [nine, queued9] = auto_organize(explore_subgoals(9), bodies(8), next_index);
    REQUIRE(nine.size() == 8);
    for (const auto& g : nine) CHECK(g.members.empty());
    REQUIRE(queued9.size() == 1);
    CHECK(queued9.front().id == 8);

    next_index = 0;
    auto [three, queued3] = auto_organize(explore_subgoals(3), bodies(8), next_index);
    REQUIRE(three.size() == 3);
    // remaining 5 split 1,1,1 with leftovers 2 to the first two groups.
    CHECK(three[0].members.size() == 2);
    CHECK(three[1].members.size() == 2);
    CHECK(three[2].members.size() == 1);

    CHECK_THROWS_AS(auto_organize({}, bodies(4), next_index), std::invalid_argument);
}

TEST_CASE("auto_organize never reuses a body across groups") {
    int next_index = 0;
    for (int n_subgoals = 1; n_subgoals <= 9; ++n_subgoals) {
        for (int n_bodies = 1; n_bodies <= 8; ++n_bodies) {
            auto [groups, queued] = auto_organize(explore_subgoals(n_subgoals),
                                                  bodies(n_bodies), next_index);
            std::set<AgentId> seen;
            int placed = 0;
            for (const auto& g : groups) {
                for (const AgentId& body : g.bodies()) {
                    REQUIRE(seen.insert(body).second);
                    ++placed;
                }
            }
            CHECK(placed == n_bodies);  // every body allocated exactly once
            CHECK(groups.size() + queued.size() == static_cast<std::size_t>(n_subgoals));
        }
    }
}

TEST_CASE("bootstrap spawns the budgeted hierarchy and an initial plan") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 8;

    SystemState s = bootstrap(lamp_goal(), generate_world(run_config()), bundle, options);
    CHECK(s.world.agents.size() == 8);
    CHECK(!s.groups.empty());
    CHECK(s.groups.size() <= 8);
    audit_state(s);
    for (const auto& g : s.groups) {
        CHECK(g.state == GroupState::Executing);
        CHECK(!g.commands.empty());
    }
    CHECK(explored_area(s.platform.map()) > 0);  // M_0 built before the first plan

    SystemOptions solo;
    solo.n_agents = 1;
    SystemState s1 = bootstrap(lamp_goal(), generate_world(run_config()), bundle, solo);
    REQUIRE(s1.groups.size() == 1);
    CHECK(s1.groups.front().members.empty());  // conductor is itself embodied

    SystemOptions over;
    over.n_agents = 9;
    CHECK_THROWS_AS(bootstrap(lamp_goal(), generate_world(run_config()), bundle, over),
                    std::invalid_argument);
}

TEST_CASE("tick is deterministic for identical seeded inputs") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 4;

    SystemState a = bootstrap(lamp_goal(), generate_world(run_config(5)), bundle, options);
    SystemState b = bootstrap(lamp_goal(), generate_world(run_config(5)), bundle, options);
    for (int i = 0; i < 10; ++i) {
        a = tick(a, bundle);
        b = tick(b, bundle);
    }
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(trace_tick_row(0, 0, a.trace[i]) == trace_tick_row(0, 0, b.trace[i]));
    }
    CHECK(a.world.agents == b.world.agents);
    CHECK(a.backend_calls == b.backend_calls);
}

TEST_CASE("budget and single membership hold at every round") {
    const BackendBundle bundle = make_scripted_bundle();
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        SystemOptions options;
        options.n_agents = 8;
        SystemState s = bootstrap(lamp_goal(), generate_world(run_config(seed)), bundle, options);
        audit_state(s);
        for (int i = 0; i < 20; ++i) {
            s = tick(s, bundle);
            audit_state(s);
        }
    }
}

TEST_CASE("a satisfied goal is a terminal fixpoint") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 2;
    SystemState s = bootstrap(lamp_goal(), generate_world(run_config()), bundle, options);
    // Force satisfaction.
    for (const auto& target : s.target_cells) s.reached_targets.insert(target);
    REQUIRE(s.goal_satisfied());

    const auto agents_before = s.world.agents;
    s = tick(s, bundle);
    CHECK(s.world.agents == agents_before);  // no moves
    CHECK(s.trace.back().actions.empty());
    CHECK(s.trace.back().goal_satisfied);
    for (const auto& g : s.groups) CHECK(g.state == GroupState::Done);
}

TEST_CASE("goal-search terminates on all test seeds within the cap") {
    const BackendBundle bundle = make_scripted_bundle();
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
        SystemOptions options;
        options.n_agents = 8;
        SystemState s = bootstrap(lamp_goal(), generate_world(run_config(seed)), bundle, options);
        int iters = 0;
        while (!s.goal_satisfied() && iters < 100) {
            s = tick(s, bundle);
            ++iters;
        }
        CHECK(s.goal_satisfied());
        CHECK(iters < 100);
    }
}

TEST_CASE("explored area grows monotonically while exploring") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 4;
    Goal never;
    never.kind = GoalKind::Object;
    never.payload = {"uncharted_horizon"};
    WorldConfig c = run_config();
    c.goal_spec.clear();
    SystemState s = bootstrap(never, generate_world(c), bundle, options);
    int prev = explored_area(s.platform.map());
    for (int i = 0; i < 10; ++i) {
        s = tick(s, bundle);
        const int area = explored_area(s.platform.map());
        CHECK(area >= prev);
        prev = area;
    }
    CHECK(prev > 0);
}

TEST_CASE("regroup returns a revised group's bodies to the idle pool") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 4;
    SystemState s = bootstrap(lamp_goal(), generate_world(run_config()), bundle, options);
    REQUIRE(!s.groups.empty());
    const AgentId conductor = s.groups.front().conductor;
    const std::size_t groups_before = s.groups.size();
    const std::size_t bodies_in_group = s.groups.front().bodies().size();

    // Accept verdicts are a no-op.
    SystemState same = regroup(s, Critique{Verdict::Accept, "", std::nullopt}, conductor);
    CHECK(same.groups.size() == groups_before);
    CHECK(same.idle_bodies.empty());

    SubGoal replacement;
    replacement.kind = SubGoalKind::Explore;
    replacement.region = Rect{0, 0, 63, 63};
    Critique revise{Verdict::Revise, "stalled",
                    std::vector<SubGoal>{replacement, replacement}};
    SystemState revised = regroup(s, revise, conductor);
    CHECK(revised.groups.size() == groups_before - 1);
    CHECK(revised.idle_bodies.size() == bodies_in_group);
    CHECK(revised.queued_subgoals.size() == 2);  // replacements queued, not dropped
}

TEST_CASE("no_dynamic_map blinds the manager but not the metric layer") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 4;
    options.ablation.no_dynamic_map = true;
    SystemState s = bootstrap(lamp_goal(), generate_world(run_config()), bundle, options);
    for (int i = 0; i < 5; ++i) s = tick(s, bundle);

    CHECK(hierarchy_detail::manager_map_view(s).text.empty());
    CHECK(explored_area(s.platform.map()) > 0);  // platform map still records
    CHECK(s.platform.map().version > 0);
}

TEST_CASE("no_auto_organize freezes the bootstrap groups") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 8;
    options.ablation.no_auto_organize = true;
    Goal never;
    never.kind = GoalKind::Object;
    never.payload = {"uncharted_horizon"};
    WorldConfig c = run_config();
    c.goal_spec.clear();
    SystemState s = bootstrap(never, generate_world(c), bundle, options);
    REQUIRE(!s.groups.empty());

    std::vector<AgentId> conductors_before;
    for (const auto& g : s.groups) conductors_before.push_back(g.conductor);
    for (int i = 0; i < 10; ++i) {
        s = tick(s, bundle);
        std::vector<AgentId> conductors_now;
        for (const auto& g : s.groups) conductors_now.push_back(g.conductor);
        CHECK(conductors_now == conductors_before);  // never regrouped
    }
}

TEST_CASE("decision records capture recomputable snapshots") {
    const BackendBundle bundle = make_scripted_bundle();
    SystemOptions options;
    options.n_agents = 4;
    options.record_decisions = true;
    SystemState s = bootstrap(lamp_goal(), generate_world(run_config()), bundle, options);
    for (int i = 0; i < 6 && !s.goal_satisfied(); ++i) s = tick(s, bundle);
    REQUIRE(!s.decisions.empty());

    const Rect bounds{0, 0, s.world.config.width - 1, s.world.config.height - 1};
    for (const auto& decision : s.decisions) {
        // Re-derive the directive, targets, command, and step from the snapshot.
        const SubtaskDirective directive = bundle.deployer->deploy_subtask(
            decision.snapshot.multimodal_info, decision.snapshot.map_view,
            decision.snapshot.subgoal, decision.snapshot.strategy);
        const auto targets = spread_targets(
            directive, static_cast<int>(decision.snapshot.bodies.size()), bounds);
        REQUIRE(targets == decision.snapshot.targets);
        for (const auto& [body, recorded] : decision.actions) {
            const auto it = std::find(decision.snapshot.bodies.begin(),
                                      decision.snapshot.bodies.end(), body);
            REQUIRE(it != decision.snapshot.bodies.end());
            const std::size_t slot =
                static_cast<std::size_t>(it - decision.snapshot.bodies.begin());
            SubCommand cmd = bundle.deployer_conductor->deploy_subcommand(directive,
                                                                          targets[slot]);
            cmd.cursor = decision.cursors.at(body);
            Observation dummy;
            const ActionStep recomputed = bundle.actor->act(cmd, dummy, {});
            CHECK(recomputed == recorded);
        }
    }
}
