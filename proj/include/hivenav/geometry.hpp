#ifndef HIVENAV_GEOMETRY_HPP
#define HIVENAV_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace hivenav {

struct Position {
    int x = 0;
    int y = 0;

    auto operator<=>(const Position&) const = default;
};

inline double euclidean(Position a, Position b) {
    const double dx = static_cast<double>(a.x) - b.x;
    const double dy = static_cast<double>(a.y) - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline int chebyshev(Position a, Position b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

struct Rect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive

    bool operator==(const Rect&) const = default;

    bool contains(Position p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    Position center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

inline std::string to_string(Position p) {
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

}  // namespace hivenav

#endif
