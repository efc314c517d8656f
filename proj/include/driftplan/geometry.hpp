#pragma once

#include <cmath>
#include <compare>

namespace driftplan {

/// World-frame position or velocity, meters / (m/s). x east, y north.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double norm() const { return std::hypot(x, y); }
};

/// Grid cell index. Row 0 is the southernmost row (at the grid origin);
/// rows increase northward, columns eastward.
struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(Cell a, Cell b) = default;
    friend auto operator<=>(Cell a, Cell b) = default;
};

/// Chebyshev (king-move) distance between two cells.
inline int chebyshev(Cell a, Cell b) {
    return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}

}  // namespace driftplan
