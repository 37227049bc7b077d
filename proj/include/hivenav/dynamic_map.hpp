#ifndef HIVENAV_DYNAMIC_MAP_HPP
#define HIVENAV_DYNAMIC_MAP_HPP

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivenav/geometry.hpp"
#include "hivenav/ids.hpp"

namespace hivenav {

struct ReportEntry {
    AgentId agent;
    int step = 0;
    // Explored cells with their annotation tokens (place names, materials, ...).
    std::vector<std::pair<Position, std::vector<std::string>>> cells;
};

struct CellRecord {
    std::vector<std::string> annotations;
    AgentId last_agent;
    int last_step = 0;

    bool operator==(const CellRecord&) const = default;
};

// The shared exploration map: a monotone union of per-agent reports.
struct DynamicMap {
    std::map<Position, CellRecord> explored;
    int version = 0;

    bool operator==(const DynamicMap&) const = default;
};

// Union merge. Annotation conflicts resolve latest-step-wins with (step,
// agent) lexicographic tie-break, so disjoint merges commute.
inline DynamicMap merge_report(DynamicMap map, const ReportEntry& report, int world_width,
                               int world_height) {
    if (report.cells.empty()) throw std::invalid_argument("empty report");
    for (const auto& [pos, annotations] : report.cells) {
        if (pos.x < 0 || pos.x >= world_width || pos.y < 0 || pos.y >= world_height)
            throw std::out_of_range("report cell out of bounds: " + to_string(pos));
        auto it = map.explored.find(pos);
        if (it == map.explored.end()) {
            map.explored.emplace(pos, CellRecord{annotations, report.agent, report.step});
            continue;
        }
        CellRecord& rec = it->second;
        auto incoming = std::make_pair(report.step, report.agent);
        auto held = std::make_pair(rec.last_step, rec.last_agent);
        if (incoming >= held) {
            rec.annotations = annotations;
            rec.last_agent = report.agent;
            rec.last_step = report.step;
        }
    }
    ++map.version;
    return map;
}

inline int explored_area(const DynamicMap& map) {
    return static_cast<int>(map.explored.size());
}

// Unexplored cells 4-adjacent to at least one explored cell.
inline std::set<Position> frontier_cells(const DynamicMap& map, int world_width,
                                         int world_height) {
    std::set<Position> frontier;
    static constexpr int kDx[4] = {1, -1, 0, 0};
    static constexpr int kDy[4] = {0, 0, 1, -1};
    for (const auto& [pos, rec] : map.explored) {
        for (int d = 0; d < 4; ++d) {
            Position nb{pos.x + kDx[d], pos.y + kDy[d]};
            if (nb.x < 0 || nb.x >= world_width || nb.y < 0 || nb.y >= world_height) continue;
            if (map.explored.find(nb) == map.explored.end()) frontier.insert(nb);
        }
    }
    return frontier;
}

// Text raster consumed by the manager: '?' unexplored, '.' explored, '*'
// explored with annotations, followed by a legend of annotation tokens.
inline std::string render_for_manager(const DynamicMap& map, int world_width, int world_height) {
    std::ostringstream out;
    for (int y = 0; y < world_height; ++y) {
        for (int x = 0; x < world_width; ++x) {
            auto it = map.explored.find({x, y});
            if (it == map.explored.end())
                out << '?';
            else
                out << (it->second.annotations.empty() ? '.' : '*');
        }
        out << '\n';
    }
    out << "legend:\n";
    for (const auto& [pos, rec] : map.explored) {
        for (const auto& token : rec.annotations)
            out << token << " @ " << to_string(pos) << "\n";
    }
    return out.str();
}

// Inverse of the raster part of render_for_manager; recovers the explored set.
inline std::set<Position> parse_rendered_map(const std::string& rendered) {
    std::set<Position> explored;
    std::istringstream in(rendered);
    std::string line;
    int y = 0;
    while (std::getline(in, line)) {
        if (line == "legend:") break;
        for (int x = 0; x < static_cast<int>(line.size()); ++x)
            if (line[static_cast<std::size_t>(x)] != '?') explored.insert({x, y});
        ++y;
    }
    return explored;
}

}  // namespace hivenav

#endif
