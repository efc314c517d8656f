#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "driftplan/flowfield.hpp"
#include "driftplan/geometry.hpp"

namespace driftplan {

enum class TerminalReason { Exited, Expired };

struct TrajectoryPoint {
    double t = 0.0;  // seconds since trajectory start
    Vec2 pos;
};

/// Time-stamped particle track. Every point lies inside S; a trajectory that
/// leaves S is truncated at the last in-bounds point with terminal = Exited.
struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::optional<double> exit_time;
    TerminalReason terminal = TerminalReason::Expired;
};

/// Passive drifter hardware envelope.
struct DrifterSpec {
    double battery_duration = 14400.0;  // seconds
    double sample_period = 5.0;         // seconds
    double seed_radius = 2.0;           // meters, ensemble seeding disc
    int ensemble_size = 5;              // n_f

    void validate() const;
};

/// One classical RK4 step of dx/dt = V(x). Returns nullopt if any
/// sub-evaluation (or the end point) leaves S.
std::optional<Vec2> rk4_step(const FlowField& field, Vec2 pos, double dt);

/// Fixed-step RK4 integration from `start` for `duration` seconds.
/// Throws OutOfBounds if start is outside S.
Trajectory simulate_trajectory(const FlowField& field, Vec2 start, double duration, double dt);

/// n_f points uniform over the disc of seed_radius around center, clipped
/// into S. Deterministic in rng_seed. Throws OutOfBounds if center outside S.
std::vector<Vec2> seed_ensemble(const GridSpec& grid, Vec2 center, const DrifterSpec& spec,
                                std::uint64_t rng_seed);

/// One trajectory per ensemble seed point.
std::vector<Trajectory> ensemble_trajectories(const FlowField& field, Vec2 center,
                                              const DrifterSpec& spec, double duration, double dt,
                                              std::uint64_t rng_seed);

}  // namespace driftplan
