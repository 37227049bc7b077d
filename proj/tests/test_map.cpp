#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "hivenav/dynamic_map.hpp"
#include "hivenav/json_io.hpp"
#include "hivenav/prng.hpp"

using namespace hivenav;

namespace {

ReportEntry make_report(AgentId agent, int step, const std::vector<Position>& cells,
                        const std::vector<std::string>& annotations = {}) {
    ReportEntry r;
    r.agent = agent;
    r.step = step;
    for (const auto& p : cells) r.cells.emplace_back(p, annotations);
    return r;
}

ReportEntry random_report(SplitMix64& rng, int width, int height) {
    ReportEntry r;
    r.agent = AgentId{Tier::SubAgent, static_cast<int>(rng.next_below(8))};
    r.step = static_cast<int>(rng.next_below(50));
    const int n = 1 + static_cast<int>(rng.next_below(12));
    std::set<Position> seen;
    for (int i = 0; i < n; ++i) {
        Position p{static_cast<int>(rng.next_below(static_cast<std::uint64_t>(width))),
                   static_cast<int>(rng.next_below(static_cast<std::uint64_t>(height)))};
        if (!seen.insert(p).second) continue;
        std::vector<std::string> ann;
        if (rng.next_below(3) == 0) ann.push_back("tok" + std::to_string(rng.next_below(5)));
        r.cells.emplace_back(p, ann);
    }
    return r;
}

}  // namespace

TEST_CASE("merge with an empty map adds exactly the reported cells") {
    DynamicMap m;
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{1, 1}, {2, 2}, {3, 3}}), 8, 8);
    CHECK(explored_area(m) == 3);
    CHECK(m.version == 1);
}

TEST_CASE("merge is idempotent") {
    const ReportEntry r = make_report({Tier::SubAgent, 0}, 1, {{1, 1}, {2, 2}}, {"tree"});
    DynamicMap once = merge_report(DynamicMap{}, r, 8, 8);
    DynamicMap twice = merge_report(once, r, 8, 8);
    CHECK(once.explored == twice.explored);
}

TEST_CASE("disjoint merges commute") {
    const ReportEntry a = make_report({Tier::SubAgent, 0}, 1,
                                      {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0},
                                       {0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
    const ReportEntry b = make_report({Tier::SubAgent, 1}, 2,
                                      {{0, 5}, {1, 5}, {2, 5}, {3, 5}, {4, 5}, {5, 5}, {6, 5}});
    DynamicMap ab = merge_report(merge_report(DynamicMap{}, a, 8, 8), b, 8, 8);
    DynamicMap ba = merge_report(merge_report(DynamicMap{}, b, 8, 8), a, 8, 8);
    CHECK(explored_area(ab) == 17);
    CHECK(ab.explored == ba.explored);
}

TEST_CASE("merge rejects empty and out-of-bounds reports") {
    DynamicMap m;
    ReportEntry empty;
    empty.agent = {Tier::SubAgent, 0};
    CHECK_THROWS_AS(merge_report(m, empty, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{9, 0}}), 8, 8),
                    std::out_of_range);
}

TEST_CASE("annotation conflicts resolve latest-step-wins with agent tie-break") {
    DynamicMap m;
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 5, {{1, 1}}, {"old"}), 8, 8);
    m = merge_report(m, make_report({Tier::SubAgent, 1}, 7, {{1, 1}}, {"new"}), 8, 8);
    CHECK(m.explored.at({1, 1}).annotations == std::vector<std::string>{"new"});
    CHECK(m.explored.at({1, 1}).last_step == 7);

    // A stale report must not overwrite.
    m = merge_report(m, make_report({Tier::SubAgent, 2}, 3, {{1, 1}}, {"stale"}), 8, 8);
    CHECK(m.explored.at({1, 1}).annotations == std::vector<std::string>{"new"});

    // Equal step: the higher agent id wins the lexicographic (step, agent) order.
    DynamicMap t;
    t = merge_report(t, make_report({Tier::SubAgent, 1}, 4, {{2, 2}}, {"one"}), 8, 8);
    t = merge_report(t, make_report({Tier::SubAgent, 0}, 4, {{2, 2}}, {"zero"}), 8, 8);
    CHECK(t.explored.at({2, 2}).annotations == std::vector<std::string>{"one"});
}

TEST_CASE("explored_area equals the reference set-union cardinality") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        DynamicMap m;
        std::set<Position> oracle;
        const int merges = 1 + static_cast<int>(rng.next_below(20));
        for (int i = 0; i < merges; ++i) {
            const ReportEntry r = random_report(rng, 16, 16);
            if (r.cells.empty()) continue;
            m = merge_report(m, r, 16, 16);
            for (const auto& [p, ann] : r.cells) oracle.insert(p);
        }
        CHECK(explored_area(m) == static_cast<int>(oracle.size()));
    }
}

TEST_CASE("map algebra properties hold on 1000+ random cases") {
    SplitMix64 rng(2024);
    int cases = 0;
    while (cases < 1000) {
        const int width = 4 + static_cast<int>(rng.next_below(29));   // up to 32
        const int height = 4 + static_cast<int>(rng.next_below(29));
        DynamicMap m;
        const int merges = 1 + static_cast<int>(rng.next_below(6));
        int prev_area = 0;
        for (int i = 0; i < merges; ++i, ++cases) {
            const ReportEntry r = random_report(rng, width, height);
            if (r.cells.empty()) continue;
            m = merge_report(m, r, width, height);

            // Monotonicity.
            REQUIRE(explored_area(m) >= prev_area);
            prev_area = explored_area(m);

            // Idempotence.
            const DynamicMap again = merge_report(m, r, width, height);
            REQUIRE(again.explored == m.explored);
        }

        // Disjoint order-independence: split the explored set into two
        // disjoint reports and merge in both orders.
        std::vector<Position> cells;
        for (const auto& [p, rec] : m.explored) cells.push_back(p);
        if (cells.size() >= 2) {
            const std::size_t half = cells.size() / 2;
            ReportEntry a = make_report({Tier::SubAgent, 0}, 1,
                                        {cells.begin(), cells.begin() + half});
            ReportEntry b = make_report({Tier::SubAgent, 1}, 2,
                                        {cells.begin() + half, cells.end()});
            DynamicMap ab = merge_report(merge_report(DynamicMap{}, a, width, height), b,
                                         width, height);
            DynamicMap ba = merge_report(merge_report(DynamicMap{}, b, width, height), a,
                                         width, height);
            REQUIRE(ab.explored == ba.explored);
        }
    }
}

TEST_CASE("empty map renders as all-unknown raster") {
    const std::string rendered = render_for_manager(DynamicMap{}, 3, 3);
    CHECK(rendered.substr(0, 12) == "???\n???\n???\n");
}

TEST_CASE("explored and annotated cells use distinct glyphs") {
    DynamicMap m;
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{1, 1}}), 3, 3);
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{2, 0}}, {"village"}), 3, 3);
    const std::string rendered = render_for_manager(m, 3, 3);
    std::istringstream in(rendered);
    std::string row0, row1;
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(row0[2] == '*');
    CHECK(row1[1] == '.');
    CHECK(rendered.find("village @ (2,0)") != std::string::npos);
}

TEST_CASE("render/parse round-trip recovers the explored set exactly") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int width = 2 + static_cast<int>(rng.next_below(31));
        const int height = 2 + static_cast<int>(rng.next_below(31));
        DynamicMap m;
        const int merges = static_cast<int>(rng.next_below(6));
        for (int i = 0; i < merges; ++i) {
            const ReportEntry r = random_report(rng, width, height);
            if (!r.cells.empty()) m = merge_report(m, r, width, height);
        }
        std::set<Position> expected;
        for (const auto& [p, rec] : m.explored) expected.insert(p);
        const std::string rendered = render_for_manager(m, width, height);
        CHECK(parse_rendered_map(rendered) == expected);
        // Byte-exactness of the rendering itself.
        CHECK(render_for_manager(m, width, height) == rendered);
    }
}

TEST_CASE("frontier matches the brute-force definition on small instances") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int width = 1 + static_cast<int>(rng.next_below(32));
        const int height = 1 + static_cast<int>(rng.next_below(32));
        DynamicMap m;
        const int merges = static_cast<int>(rng.next_below(5));
        for (int i = 0; i < merges; ++i) {
            const ReportEntry r = random_report(rng, width, height);
            if (!r.cells.empty()) m = merge_report(m, r, width, height);
        }
        // Brute force: scan every cell of the bounds.
        std::set<Position> oracle;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (m.explored.count({x, y}) != 0) continue;
                const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const Position nb{x + dx[d], y + dy[d]};
                    if (nb.x < 0 || nb.x >= width || nb.y < 0 || nb.y >= height) continue;
                    if (m.explored.count(nb) != 0) {
                        oracle.insert({x, y});
                        break;
                    }
                }
            }
        }
        CHECK(frontier_cells(m, width, height) == oracle);
    }
}

TEST_CASE("frontier of empty and fully explored maps is empty") {
    CHECK(frontier_cells(DynamicMap{}, 8, 8).empty());

    DynamicMap full;
    std::vector<Position> all;
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) all.push_back({x, y});
    full = merge_report(full, make_report({Tier::SubAgent, 0}, 1, all), 4, 4);
    CHECK(frontier_cells(full, 4, 4).empty());
}

TEST_CASE("single interior cell has exactly its 4-neighborhood as frontier") {
    DynamicMap m;
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{5, 5}}), 16, 16);
    const std::set<Position> expected{{4, 5}, {6, 5}, {5, 4}, {5, 6}};
    CHECK(frontier_cells(m, 16, 16) == expected);
}

TEST_CASE("map snapshot JSON lists cells sorted by (y,x)") {
    DynamicMap m;
    m = merge_report(m, make_report({Tier::SubAgent, 0}, 1, {{3, 1}, {0, 2}, {1, 1}}, {"t"}),
                     8, 8);
    const json snap = map_snapshot_json(m);
    CHECK(snap.at("version") == 1);
    const auto& cells = snap.at("cells");
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].at("x") == 1);
    CHECK(cells[0].at("y") == 1);
    CHECK(cells[1].at("x") == 3);
    CHECK(cells[1].at("y") == 1);
    CHECK(cells[2].at("x") == 0);
    CHECK(cells[2].at("y") == 2);
    // Byte-stable golden behavior.
    CHECK(map_snapshot_json(m).dump() == snap.dump());
}

TEST_CASE("version strictly increases across merges") {
    DynamicMap m;
    for (int i = 0; i < 5; ++i) {
        const int before = m.version;
        m = merge_report(m, make_report({Tier::SubAgent, 0}, i, {{i, i}}), 8, 8);
        CHECK(m.version == before + 1);
    }
}
