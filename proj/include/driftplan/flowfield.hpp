#pragma once

#include <cstdint>
#include <filesystem>

#include "driftplan/field2d.hpp"
#include "driftplan/geometry.hpp"

namespace driftplan {

/// Survey region discretization: m x n square cells of side cell_size meters.
struct GridSpec {
    int rows = 0;              // m
    int cols = 0;              // n
    double cell_size = 0.0;    // r, meters per cell side
    Vec2 origin{0.0, 0.0};     // world coordinate of the (0,0) cell corner

    /// Throws ConfigInvalid unless m >= 2, n >= 2, cell_size > 0.
    void validate() const;

    double width() const { return cols * cell_size; }    // east extent
    double height() const { return rows * cell_size; }   // north extent

    /// p inside the closed survey rectangle S.
    bool contains(Vec2 p) const {
        return p.x >= origin.x && p.x <= origin.x + width() &&
               p.y >= origin.y && p.y <= origin.y + height();
    }

    Vec2 cell_center(int row, int col) const {
        return {origin.x + (col + 0.5) * cell_size, origin.y + (row + 0.5) * cell_size};
    }
    Vec2 cell_center(Cell c) const { return cell_center(c.row, c.col); }

    /// Containing cell of an in-bounds position (boundary positions map to the
    /// nearest valid cell).
    Cell cell_of(Vec2 p) const;

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.rows == b.rows && a.cols == b.cols && a.cell_size == b.cell_size &&
               a.origin == b.origin;
    }
};

/// Time-frozen 2-D velocity field over the survey region.
/// u is the east component, v the north component, both m/s per cell.
struct FlowField {
    GridSpec grid;
    Field2d u;
    Field2d v;

    /// Bilinear interpolation of (u, v) from the four surrounding cell
    /// centers; positions within half a cell of the boundary clamp to the
    /// cell-center lattice edge. Throws OutOfBounds for p outside S.
    Vec2 velocity_at(Vec2 p) const;

    double max_speed() const;
};

/// Parse a field file (see write_flowfield for the format).
/// Throws MalformedFile on header/row-count violations, NonFiniteValue on
/// NaN/inf cells.
FlowField load_flowfield(const std::filesystem::path& path);

/// Text format: header line `m n cell_size`, then exactly m*n lines
/// `i j u v` in row-major order. `#` starts a comment line. Values are
/// written with enough digits to round-trip doubles bit-exactly.
void write_flowfield(const FlowField& field, const std::filesystem::path& path);

/// Divergence-free random field: a smooth stream function (sum of random
/// low-frequency sinusoids) sampled on a padded cell-center lattice, then
/// differenced so that the central-difference divergence of the interior
/// vanishes; rescaled so the max cell speed equals max_speed.
/// Deterministic in seed.
FlowField generate_synthetic_field(std::uint64_t seed, const GridSpec& grid, double max_speed);

struct RmseResult {
    Field2d per_cell;     // sqrt((u_hat-u)^2 + (v_hat-v)^2) per cell, m/s
    double aggregate;     // sqrt(mean squared vector error), m/s
};

/// Throws GridMismatch unless the two fields share a grid.
RmseResult rmse_field(const FlowField& estimate, const FlowField& truth);

}  // namespace driftplan
