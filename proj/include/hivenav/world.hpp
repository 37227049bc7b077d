#ifndef HIVENAV_WORLD_HPP
#define HIVENAV_WORLD_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivenav/geometry.hpp"
#include "hivenav/ids.hpp"
#include "hivenav/prng.hpp"

namespace hivenav {

enum class GoalKind { Image, Object, Audio };

inline const char* goal_kind_name(GoalKind k) {
    switch (k) {
        case GoalKind::Image: return "image";
        case GoalKind::Object: return "object";
        case GoalKind::Audio: return "audio";
    }
    return "?";
}

struct Goal {
    GoalKind kind = GoalKind::Object;
    // Image: symbolic feature tokens; Object: {object name}; Audio: {source id}.
    std::vector<std::string> payload;
    int count = 1;

    void validate() const {
        if (payload.empty()) throw std::invalid_argument("goal payload empty");
        if (count < 1) throw std::invalid_argument("goal count < 1");
    }
};

struct GoalPlacement {
    std::string id;
    std::string name;                        // object-name token, e.g. "village"
    std::vector<std::string> feature_tokens; // symbolic visual descriptor
    bool emits_audio = false;
    std::optional<Position> position;        // absent: seeded random placement
};

enum class WorldLayout { Freeform, DiamondGrid16 };

struct WorldConfig {
    std::uint64_t seed = 0;
    int width = 64;
    int height = 64;
    int terrain_count = 6;
    std::vector<GoalPlacement> goal_spec;
    WorldLayout layout = WorldLayout::Freeform;
    int perceptible_radius_audio = 32;
    int sensing_radius = 16;
    int move_cap = 50;
    double image_match_fraction = 0.75;

    void validate() const {
        if (width <= 0 || height <= 0) throw std::invalid_argument("world dimensions must be positive");
        if (terrain_count < 1) throw std::invalid_argument("terrain_count must be >= 1");
        if (static_cast<long long>(terrain_count) > static_cast<long long>(width) * height)
            throw std::invalid_argument("terrain_count exceeds cell count");
        if (move_cap < 1) throw std::invalid_argument("move_cap must be >= 1");
        if (sensing_radius < 0 || perceptible_radius_audio < 0)
            throw std::invalid_argument("radii must be non-negative");
        for (const auto& g : goal_spec) {
            if (g.position && !(g.position->x >= 0 && g.position->x < width &&
                                g.position->y >= 0 && g.position->y < height))
                throw std::invalid_argument("goal placement out of bounds");
        }
    }
};

enum class BlockKind { Diamond };

struct Cell {
    int terrain_id = 0;
    std::vector<std::string> annotations;  // sorted, unique
    std::optional<BlockKind> block;
};

struct GoalEntity {
    std::string id;
    std::string name;
    Position position;
    std::vector<std::string> feature_tokens;
    bool emits_audio = false;
};

struct WorldState {
    WorldConfig config;
    std::vector<Cell> cells;  // row-major, width*height
    std::vector<GoalEntity> entities;
    std::map<AgentId, Position> agents;
    int clock = 0;

    bool in_bounds(Position p) const {
        return p.x >= 0 && p.x < config.width && p.y >= 0 && p.y < config.height;
    }
    Cell& at(Position p) { return cells[static_cast<std::size_t>(p.y) * config.width + p.x]; }
    const Cell& at(Position p) const {
        return cells[static_cast<std::size_t>(p.y) * config.width + p.x];
    }

    bool operator==(const WorldState& other) const {
        auto key = [](const WorldState& w) {
            return std::tie(w.clock);
        };
        if (key(*this) != key(other) || agents != other.agents) return false;
        if (cells.size() != other.cells.size() || entities.size() != other.entities.size())
            return false;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].terrain_id != other.cells[i].terrain_id ||
                cells[i].annotations != other.cells[i].annotations ||
                cells[i].block != other.cells[i].block)
                return false;
        }
        for (std::size_t i = 0; i < entities.size(); ++i) {
            const auto& a = entities[i];
            const auto& b = other.entities[i];
            if (a.id != b.id || a.name != b.name || a.position != b.position ||
                a.feature_tokens != b.feature_tokens || a.emits_audio != b.emits_audio)
                return false;
        }
        return true;
    }
};

struct Observation {
    AgentId agent;
    // (cell position, annotation tokens) within sensing_radius.
    std::vector<std::pair<Position, std::vector<std::string>>> vision;
    std::vector<std::pair<std::string, double>> audio;  // (source id, intensity)
    Position position;
    std::vector<std::string> inventory;
    int group_id = -1;
    int step = 0;
};

struct MoveResult {
    Position new_position;
    bool truncated = false;
};

namespace detail {

inline const std::vector<std::string>& terrain_palette() {
    static const std::vector<std::string> names = {
        "plains", "desert", "forest", "tundra", "swamp",
        "mesa",   "jungle", "savanna", "taiga", "beach"};
    return names;
}

inline std::string terrain_token(int id) {
    const auto& palette = terrain_palette();
    if (id >= 0 && static_cast<std::size_t>(id) < palette.size())
        return palette[static_cast<std::size_t>(id)];
    return "terrain" + std::to_string(id);
}

inline void add_annotation(Cell& cell, const std::string& token) {
    auto it = std::lower_bound(cell.annotations.begin(), cell.annotations.end(), token);
    if (it == cell.annotations.end() || *it != token) cell.annotations.insert(it, token);
}

}  // namespace detail

inline std::string terrain_name(int terrain_id) { return detail::terrain_token(terrain_id); }

// Deterministic function of config. Terrain is a seeded partition into exactly
// terrain_count contiguous regions, grown breadth-first from distinct seed
// sites so contiguity holds on any grid.
inline WorldState generate_world(const WorldConfig& config) {
    config.validate();
    WorldState world;
    world.config = config;
    const int w = config.width, h = config.height;
    world.cells.assign(static_cast<std::size_t>(w) * h, Cell{});

    SplitMix64 rng(config.seed);

    // Terrain sites, pairwise distinct.
    std::set<Position> sites;
    while (static_cast<int>(sites.size()) < config.terrain_count) {
        Position p{static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w))),
                   static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)))};
        sites.insert(p);
    }

    // Multi-source BFS: each cell joins the first region to reach it.
    std::vector<int> region(world.cells.size(), -1);
    std::deque<std::pair<Position, int>> frontier;
    int site_id = 0;
    for (const auto& site : sites) {
        region[static_cast<std::size_t>(site.y) * w + site.x] = site_id;
        frontier.emplace_back(site, site_id);
        ++site_id;
    }
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    while (!frontier.empty()) {
        auto [pos, id] = frontier.front();
        frontier.pop_front();
        for (int d = 0; d < 4; ++d) {
            Position nb{pos.x + kDx[d], pos.y + kDy[d]};
            if (nb.x < 0 || nb.x >= w || nb.y < 0 || nb.y >= h) continue;
            auto& slot = region[static_cast<std::size_t>(nb.y) * w + nb.x];
            if (slot == -1) {
                slot = id;
                frontier.emplace_back(nb, id);
            }
        }
    }
    for (std::size_t i = 0; i < world.cells.size(); ++i) {
        world.cells[i].terrain_id = region[i];
        world.cells[i].annotations.push_back(detail::terrain_token(region[i]));
    }

    if (config.layout == WorldLayout::DiamondGrid16) {
        for (int y = 0; y < h; y += 16) {
            for (int x = 0; x < w; x += 16) {
                Cell& c = world.at({x, y});
                c.block = BlockKind::Diamond;
                detail::add_annotation(c, "diamond_block");
            }
        }
    }

    for (const auto& placement : config.goal_spec) {
        Position pos = placement.position
                           ? *placement.position
                           : Position{static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w))),
                                      static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)))};
        GoalEntity entity{placement.id, placement.name, pos, placement.feature_tokens,
                          placement.emits_audio};
        Cell& c = world.at(pos);
        detail::add_annotation(c, placement.name);
        detail::add_annotation(c, "entity_" + placement.id);
        for (const auto& tok : placement.feature_tokens) detail::add_annotation(c, tok);
        world.entities.push_back(std::move(entity));
    }
    return world;
}

inline const GoalEntity* find_entity(const WorldState& world, const std::string& id) {
    for (const auto& e : world.entities)
        if (e.id == id) return &e;
    return nullptr;
}

// Linear falloff max(0, 1 - d/R) with Euclidean d. Monotone in distance and
// invertible, which is all the intensity protocol requires.
inline double audio_intensity(const WorldState& world, Position listener,
                              const std::string& source_id) {
    const GoalEntity* src = find_entity(world, source_id);
    if (src == nullptr || !src->emits_audio)
        throw std::invalid_argument("unknown audio source: " + source_id);
    const double radius = static_cast<double>(world.config.perceptible_radius_audio);
    if (radius <= 0.0) return 0.0;
    const double d = euclidean(listener, src->position);
    return std::max(0.0, 1.0 - d / radius);
}

inline Observation observe(const WorldState& world, AgentId agent) {
    auto it = world.agents.find(agent);
    if (it == world.agents.end())
        throw std::invalid_argument("unknown agent: " + to_string(agent));
    Observation obs;
    obs.agent = agent;
    obs.position = it->second;
    obs.step = world.clock;
    const int r = world.config.sensing_radius;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            Position p{obs.position.x + dx, obs.position.y + dy};
            if (!world.in_bounds(p)) continue;
            obs.vision.emplace_back(p, world.at(p).annotations);
        }
    }
    for (const auto& e : world.entities) {
        if (!e.emits_audio) continue;
        if (euclidean(obs.position, e.position) >= world.config.perceptible_radius_audio)
            continue;
        obs.audio.emplace_back(e.id, audio_intensity(world, obs.position, e.id));
    }
    return obs;
}

// Straight-line move, truncated to the farthest integer cell within move_cap.
inline MoveResult apply_move(WorldState& world, AgentId agent, Position target) {
    auto it = world.agents.find(agent);
    if (it == world.agents.end())
        throw std::invalid_argument("unknown agent: " + to_string(agent));
    if (!world.in_bounds(target)) throw std::out_of_range("move target out of bounds");
    const Position start = it->second;
    const double dist = euclidean(start, target);
    const double cap = static_cast<double>(world.config.move_cap);
    if (dist <= cap) {
        it->second = target;
        return {target, false};
    }
    // Walk the segment from the far end back until within the cap.
    const int steps = static_cast<int>(std::ceil(dist)) * 2;
    Position best = start;
    for (int k = steps; k >= 0; --k) {
        const double t = static_cast<double>(k) / steps;
        Position p{static_cast<int>(std::lround(start.x + t * (target.x - start.x))),
                   static_cast<int>(std::lround(start.y + t * (target.y - start.y)))};
        if (euclidean(start, p) <= cap) {
            best = p;
            break;
        }
    }
    it->second = best;
    return {best, true};
}

inline bool entity_matches_goal(const WorldState& world, const GoalEntity& entity,
                                const Goal& goal) {
    switch (goal.kind) {
        case GoalKind::Object:
            return !goal.payload.empty() && entity.name == goal.payload.front();
        case GoalKind::Audio:
            return !goal.payload.empty() && entity.id == goal.payload.front();
        case GoalKind::Image: {
            if (goal.payload.empty()) return false;
            int overlap = 0;
            for (const auto& tok : goal.payload) {
                if (std::find(entity.feature_tokens.begin(), entity.feature_tokens.end(), tok) !=
                    entity.feature_tokens.end())
                    ++overlap;
            }
            const double fraction =
                static_cast<double>(overlap) / static_cast<double>(goal.payload.size());
            return fraction >= world.config.image_match_fraction;
        }
    }
    return false;
}

inline bool check_goal_reached(const WorldState& world, AgentId agent, const Goal& goal,
                               int threshold) {
    auto it = world.agents.find(agent);
    if (it == world.agents.end())
        throw std::invalid_argument("unknown agent: " + to_string(agent));
    for (const auto& e : world.entities) {
        if (chebyshev(it->second, e.position) > threshold) continue;
        if (entity_matches_goal(world, e, goal)) return true;
    }
    return false;
}

// Line-oriented grid dump, one character per cell class. 'D' diamond block,
// 'G' goal entity, otherwise a terrain letter.
inline std::string dump_world(const WorldState& world) {
    std::string out;
    out.reserve(static_cast<std::size_t>(world.config.height) * (world.config.width + 1));
    std::set<Position> entity_cells;
    for (const auto& e : world.entities) entity_cells.insert(e.position);
    for (int y = 0; y < world.config.height; ++y) {
        for (int x = 0; x < world.config.width; ++x) {
            const Cell& c = world.at({x, y});
            char glyph;
            if (c.block == BlockKind::Diamond)
                glyph = 'D';
            else if (entity_cells.count({x, y}) != 0)
                glyph = 'G';
            else
                glyph = static_cast<char>('a' + c.terrain_id % 26);
            out.push_back(glyph);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace hivenav

#endif
