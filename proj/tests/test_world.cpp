#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "hivenav/prng.hpp"
#include "hivenav/world.hpp"

using namespace hivenav;

namespace {

WorldConfig small_config(std::uint64_t seed = 7) {
    WorldConfig c;
    c.seed = seed;
    c.width = 32;
    c.height = 32;
    c.terrain_count = 4;
    return c;
}

// Independent flood-fill region counter over the generated terrain ids.
int count_terrain_regions(const WorldState& world) {
    const int w = world.config.width, h = world.config.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    int regions = 0;
    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t start = static_cast<std::size_t>(sy) * w + sx;
            if (label[start] != -1) continue;
            const int terrain = world.at({sx, sy}).terrain_id;
            ++regions;
            std::vector<Position> stack{{sx, sy}};
            label[start] = regions;
            while (!stack.empty()) {
                const Position p = stack.back();
                stack.pop_back();
                const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const Position nb{p.x + dx[d], p.y + dy[d]};
                    if (nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h) continue;
                    const std::size_t idx = static_cast<std::size_t>(nb.y) * w + nb.x;
                    if (label[idx] != -1 || world.at(nb).terrain_id != terrain) continue;
                    label[idx] = regions;
                    stack.push_back(nb);
                }
            }
        }
    }
    return regions;
}

}  // namespace

TEST_CASE("splitmix64 matches the published test vector") {
    SplitMix64 rng(1234567);
    CHECK(rng.next() == 6457827717110365317ULL);
    CHECK(rng.next() == 3203168211198807973ULL);
    CHECK(rng.next() == 9817491932198370423ULL);
    CHECK(rng.next() == 4593380528125082431ULL);
    CHECK(rng.next() == 16408922859458223821ULL);
}

TEST_CASE("generate_world is a deterministic function of config") {
    const WorldConfig c = small_config();
    const WorldState a = generate_world(c);
    const WorldState b = generate_world(c);
    CHECK(a == b);
}

TEST_CASE("terrain partition has exactly terrain_count contiguous regions") {
    WorldConfig c;
    c.seed = 42;
    c.width = 256;
    c.height = 256;
    c.terrain_count = 6;
    const WorldState world = generate_world(c);
    CHECK(count_terrain_regions(world) == 6);

    for (std::uint64_t seed : {1ULL, 9ULL, 77ULL}) {
        WorldConfig c2 = small_config(seed);
        c2.terrain_count = 5;
        CHECK(count_terrain_regions(generate_world(c2)) == 5);
    }
}

TEST_CASE("diamond_grid_16 places blocks exactly at 16-multiples") {
    WorldConfig c = small_config();
    c.width = 64;
    c.height = 64;
    c.layout = WorldLayout::DiamondGrid16;
    const WorldState world = generate_world(c);

    std::set<Position> expected;
    for (int y = 0; y < 64; y += 16)
        for (int x = 0; x < 64; x += 16) expected.insert({x, y});
    CHECK(expected.size() == 16);

    std::set<Position> actual;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (world.at({x, y}).block == BlockKind::Diamond) actual.insert({x, y});
    CHECK(actual == expected);
    for (const auto& p : actual) {
        const auto& ann = world.at(p).annotations;
        CHECK(std::find(ann.begin(), ann.end(), "diamond_block") != ann.end());
    }
}

TEST_CASE("empty goal_spec yields zero goal entities") {
    const WorldState world = generate_world(small_config());
    CHECK(world.entities.empty());
}

TEST_CASE("config validation rejects degenerate inputs") {
    WorldConfig c = small_config();
    c.width = 0;
    CHECK_THROWS_AS(generate_world(c), std::invalid_argument);
    c = small_config();
    c.terrain_count = c.width * c.height + 1;
    CHECK_THROWS_AS(generate_world(c), std::invalid_argument);
    c = small_config();
    c.move_cap = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("observe returns the Chebyshev sensing window") {
    WorldConfig c = small_config();
    c.sensing_radius = 2;
    WorldState world = generate_world(c);
    const AgentId agent{Tier::SubAgent, 0};

    world.agents[agent] = {10, 10};
    Observation center = observe(world, agent);
    CHECK(center.vision.size() == 25);
    for (const auto& [pos, ann] : center.vision) CHECK(chebyshev(pos, {10, 10}) <= 2);

    world.agents[agent] = {0, 0};
    Observation corner = observe(world, agent);
    CHECK(corner.vision.size() == 9);

    Observation again = observe(world, agent);
    CHECK(again.vision == corner.vision);
    CHECK(again.position == corner.position);

    CHECK_THROWS_AS(observe(world, AgentId{Tier::SubAgent, 99}), std::invalid_argument);
}

TEST_CASE("audio entries appear only within the perceptible radius") {
    WorldConfig c = small_config();
    c.perceptible_radius_audio = 8;
    GoalPlacement siren;
    siren.id = "siren0";
    siren.name = "siren";
    siren.emits_audio = true;
    siren.position = Position{0, 0};
    c.goal_spec = {siren};
    WorldState world = generate_world(c);
    const AgentId agent{Tier::SubAgent, 0};

    world.agents[agent] = {20, 20};
    CHECK(observe(world, agent).audio.empty());

    world.agents[agent] = {3, 0};
    const auto audio = observe(world, agent).audio;
    REQUIRE(audio.size() == 1);
    CHECK(audio.front().first == "siren0");
    CHECK(audio.front().second > 0.0);
    CHECK(audio.front().second <= 1.0);
}

TEST_CASE("audio intensity follows the linear falloff") {
    WorldConfig c = small_config();
    c.perceptible_radius_audio = 16;
    GoalPlacement src;
    src.id = "s";
    src.name = "bell";
    src.emits_audio = true;
    src.position = Position{0, 0};
    c.goal_spec = {src};
    const WorldState world = generate_world(c);

    CHECK(audio_intensity(world, {0, 0}, "s") == 1.0);
    CHECK(audio_intensity(world, {16, 0}, "s") == 0.0);
    CHECK(audio_intensity(world, {20, 0}, "s") == 0.0);

    const double r = 16.0;
    const double i1 = audio_intensity(world, {4, 0}, "s");   // d = R/4
    const double i2 = audio_intensity(world, {8, 0}, "s");   // d = R/2
    const double i3 = audio_intensity(world, {12, 0}, "s");  // d = 3R/4
    CHECK(i1 == Catch::Approx(1.0 - 4.0 / r));
    CHECK(i2 == Catch::Approx(1.0 - 8.0 / r));
    CHECK(i3 == Catch::Approx(1.0 - 12.0 / r));
    CHECK(i1 > i2);
    CHECK(i2 > i3);

    CHECK_THROWS_AS(audio_intensity(world, {0, 0}, "nope"), std::invalid_argument);
}

TEST_CASE("apply_move respects the movement cap") {
    WorldConfig c = small_config();
    c.width = 128;
    c.height = 128;
    c.move_cap = 50;
    WorldState world = generate_world(c);
    const AgentId agent{Tier::SubAgent, 0};

    world.agents[agent] = {0, 0};
    MoveResult r1 = apply_move(world, agent, {0, 30});
    CHECK(r1.new_position == Position{0, 30});
    CHECK_FALSE(r1.truncated);

    world.agents[agent] = {0, 0};
    MoveResult r2 = apply_move(world, agent, {0, 80});
    CHECK(r2.new_position == Position{0, 50});
    CHECK(r2.truncated);

    MoveResult r3 = apply_move(world, agent, r2.new_position);
    CHECK(r3.new_position == r2.new_position);
    CHECK_FALSE(r3.truncated);

    CHECK_THROWS_AS(apply_move(world, agent, {-1, 0}), std::out_of_range);

    SplitMix64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const Position start{static_cast<int>(rng.next_below(128)),
                             static_cast<int>(rng.next_below(128))};
        const Position target{static_cast<int>(rng.next_below(128)),
                              static_cast<int>(rng.next_below(128))};
        world.agents[agent] = start;
        const MoveResult mv = apply_move(world, agent, target);
        CHECK(euclidean(start, mv.new_position) <= 50.0 + 1e-9);
        CHECK(world.in_bounds(mv.new_position));
        if (!mv.truncated) CHECK(mv.new_position == target);
    }
}

TEST_CASE("check_goal_reached uses the Chebyshev threshold") {
    WorldConfig c = small_config();
    GoalPlacement lamp;
    lamp.id = "lamp0";
    lamp.name = "lamp";
    lamp.position = Position{10, 10};
    c.goal_spec = {lamp};
    WorldState world = generate_world(c);
    const AgentId agent{Tier::SubAgent, 0};
    Goal goal;
    goal.kind = GoalKind::Object;
    goal.payload = {"lamp"};

    world.agents[agent] = {10, 10};
    CHECK(check_goal_reached(world, agent, goal, 3));
    world.agents[agent] = {14, 10};
    CHECK_FALSE(check_goal_reached(world, agent, goal, 3));
    world.agents[agent] = {13, 13};
    CHECK(check_goal_reached(world, agent, goal, 3));
}

TEST_CASE("image goals match on feature-token overlap fraction") {
    WorldConfig c = small_config();
    c.image_match_fraction = 0.75;
    GoalPlacement statue;
    statue.id = "st0";
    statue.name = "statue";
    statue.feature_tokens = {"a", "b", "c"};
    statue.position = Position{5, 5};
    c.goal_spec = {statue};
    WorldState world = generate_world(c);
    const AgentId agent{Tier::SubAgent, 0};
    world.agents[agent] = {5, 5};

    Goal goal;
    goal.kind = GoalKind::Image;
    goal.payload = {"a", "b", "c", "d"};  // overlap 3/4 = 0.75
    CHECK(check_goal_reached(world, agent, goal, 3));

    goal.payload = {"a", "b", "d", "e"};  // overlap 2/4 < 0.75
    CHECK_FALSE(check_goal_reached(world, agent, goal, 3));
}

TEST_CASE("world dump marks diamonds, entities, and terrain") {
    WorldConfig c = small_config();
    c.layout = WorldLayout::DiamondGrid16;
    GoalPlacement lamp;
    lamp.id = "lamp0";
    lamp.name = "lamp";
    lamp.position = Position{5, 5};
    c.goal_spec = {lamp};
    const WorldState world = generate_world(c);
    const std::string dump = dump_world(world);

    std::vector<std::string> lines;
    std::istringstream in(dump);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(static_cast<int>(lines.size()) == c.height);
    for (const auto& l : lines) CHECK(static_cast<int>(l.size()) == c.width);
    CHECK(lines[0][0] == 'D');
    CHECK(lines[16][16] == 'D');
    CHECK(lines[5][5] == 'G');
}
