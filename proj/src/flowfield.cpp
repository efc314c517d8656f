#include "driftplan/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "driftplan/errors.hpp"
#include "driftplan/rng.hpp"
#include "driftplan/textio.hpp"

namespace driftplan {

void GridSpec::validate() const {
    if (rows < 2 || cols < 2)
        throw ConfigInvalid("grid must be at least 2x2, got " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    if (!(cell_size > 0.0)) throw ConfigInvalid("cell_size must be > 0");
}

Cell GridSpec::cell_of(Vec2 p) const {
    int col = static_cast<int>(std::floor((p.x - origin.x) / cell_size));
    int row = static_cast<int>(std::floor((p.y - origin.y) / cell_size));
    row = std::clamp(row, 0, rows - 1);
    col = std::clamp(col, 0, cols - 1);
    return {row, col};
}

Vec2 FlowField::velocity_at(Vec2 p) const {
    if (!grid.contains(p))
        throw OutOfBounds("position (" + fmt_double(p.x) + ", " + fmt_double(p.y) +
                          ") outside survey region");
    // Fractional position on the cell-center lattice; the outer half-cell ring
    // clamps onto the lattice edge.
    double fc = (p.x - grid.origin.x) / grid.cell_size - 0.5;
    double fr = (p.y - grid.origin.y) / grid.cell_size - 0.5;
    fc = std::clamp(fc, 0.0, static_cast<double>(grid.cols - 1));
    fr = std::clamp(fr, 0.0, static_cast<double>(grid.rows - 1));

    int c0 = std::min(static_cast<int>(fc), grid.cols - 2);
    int r0 = std::min(static_cast<int>(fr), grid.rows - 2);
    double tx = fc - c0;
    double ty = fr - r0;

    auto lerp2 = [&](const Field2d& f) {
        double bottom = (1.0 - tx) * f(r0, c0) + tx * f(r0, c0 + 1);
        double top = (1.0 - tx) * f(r0 + 1, c0) + tx * f(r0 + 1, c0 + 1);
        return (1.0 - ty) * bottom + ty * top;
    };
    return {lerp2(u), lerp2(v)};
}

double FlowField::max_speed() const {
    double best = 0.0;
    for (int i = 0; i < grid.rows; ++i)
        for (int j = 0; j < grid.cols; ++j)
            best = std::max(best, std::hypot(u(i, j), v(i, j)));
    return best;
}

FlowField load_flowfield(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedFile("cannot open field file: " + path.string());

    auto next_content_line = [&](std::string& line) -> bool {
        while (std::getline(in, line)) {
            size_t pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;   // blank
            if (line[pos] == '#') continue;           // comment
            return true;
        }
        return false;
    };

    std::string line;
    if (!next_content_line(line)) throw MalformedFile(path.string() + ": missing header line");

    GridSpec grid;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> grid.rows >> grid.cols >> grid.cell_size) || (hs >> extra))
            throw MalformedFile(path.string() + ": bad header, expected `m n cell_size`");
    }
    try {
        grid.validate();
    } catch (const ConfigInvalid& e) {
        throw MalformedFile(path.string() + ": bad header: " + e.what());
    }

    FlowField field{grid, Field2d(grid.rows, grid.cols), Field2d(grid.rows, grid.cols)};
    const long total = static_cast<long>(grid.rows) * grid.cols;
    for (long k = 0; k < total; ++k) {
        if (!next_content_line(line))
            throw MalformedFile(path.string() + ": expected " + std::to_string(total) +
                                " data rows, found " + std::to_string(k));
        std::istringstream ls(line);
        int i, j;
        double uu, vv;
        std::string extra;
        if (!(ls >> i >> j >> uu >> vv) || (ls >> extra))
            throw MalformedFile(path.string() + ": bad data row " + std::to_string(k));
        if (i != k / grid.cols || j != k % grid.cols)
            throw MalformedFile(path.string() + ": row " + std::to_string(k) +
                                " out of row-major order");
        if (!std::isfinite(uu) || !std::isfinite(vv))
            throw NonFiniteValue(path.string() + ": non-finite velocity at cell (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
        field.u(i, j) = uu;
        field.v(i, j) = vv;
    }
    if (next_content_line(line))
        throw MalformedFile(path.string() + ": extra data rows beyond " + std::to_string(total));
    return field;
}

void write_flowfield(const FlowField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MalformedFile("cannot open for write: " + path.string());
    out << field.grid.rows << ' ' << field.grid.cols << ' ' << fmt_double(field.grid.cell_size)
        << '\n';
    for (int i = 0; i < field.grid.rows; ++i)
        for (int j = 0; j < field.grid.cols; ++j)
            out << i << ' ' << j << ' ' << fmt_double(field.u(i, j)) << ' '
                << fmt_double(field.v(i, j)) << '\n';
    if (!out) throw MalformedFile("write failed: " + path.string());
}

FlowField generate_synthetic_field(std::uint64_t seed, const GridSpec& grid, double max_speed) {
    grid.validate();
    if (!(max_speed > 0.0)) throw ConfigInvalid("max_speed must be > 0");

    const int m = grid.rows, n = grid.cols;
    const double r = grid.cell_size;

    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng rng(derive_seed(seed, /*tag=*/0x5f1e1d, attempt));

        // Stream function on a one-ring padded cell-center lattice.
        struct Mode {
            double amp, fr, fc, phase;
        };
        constexpr int kModes = 6;
        Mode modes[kModes];
        for (Mode& mode : modes) {
            mode.amp = rng.uniform(0.5, 1.5);
            // Integer wavenumbers 1..3 per axis; (0,0) excluded by construction.
            mode.fr = static_cast<double>(1 + rng.uniform_index(3));
            mode.fc = static_cast<double>(1 + rng.uniform_index(3));
            if (rng.uniform() < 0.5) mode.fr = -mode.fr;
            mode.phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        }

        Field2d psi(m + 2, n + 2);
        for (int i = 0; i < m + 2; ++i) {
            for (int j = 0; j < n + 2; ++j) {
                // Normalized coordinates of the padded lattice point.
                double yn = (i - 0.5) / m;
                double xn = (j - 0.5) / n;
                double s = 0.0;
                for (const Mode& mode : modes)
                    s += mode.amp * std::sin(2.0 * 3.14159265358979323846 *
                                                 (mode.fr * yn + mode.fc * xn) +
                                             mode.phase);
                psi(i, j) = s;
            }
        }

        // u = dpsi/dy, v = -dpsi/dx by central differences: the discrete
        // central-difference divergence then cancels exactly.
        FlowField field{grid, Field2d(m, n), Field2d(m, n)};
        double peak = 0.0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                double uu = (psi(i + 2, j + 1) - psi(i, j + 1)) / (2.0 * r);
                double vv = -(psi(i + 1, j + 2) - psi(i + 1, j)) / (2.0 * r);
                field.u(i, j) = uu;
                field.v(i, j) = vv;
                peak = std::max(peak, std::hypot(uu, vv));
            }
        }
        if (peak < 1e-12) continue;  // degenerate draw; retry with next substream

        double scale = max_speed / peak;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                field.u(i, j) *= scale;
                field.v(i, j) *= scale;
            }
        return field;
    }
    throw Error("synthetic field generation degenerate for seed " + std::to_string(seed));
}

RmseResult rmse_field(const FlowField& estimate, const FlowField& truth) {
    if (!(estimate.grid == truth.grid)) throw GridMismatch("rmse_field: grids differ");
    const int m = truth.grid.rows, n = truth.grid.cols;
    RmseResult res{Field2d(m, n), 0.0};
    double sum_sq = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double du = estimate.u(i, j) - truth.u(i, j);
            double dv = estimate.v(i, j) - truth.v(i, j);
            double sq = du * du + dv * dv;
            res.per_cell(i, j) = std::sqrt(sq);
            sum_sq += sq;
        }
    }
    res.aggregate = std::sqrt(sum_sq / (static_cast<double>(m) * n));
    return res;
}

}  // namespace driftplan
