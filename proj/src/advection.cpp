#include "driftplan/advection.hpp"

#include <algorithm>
#include <cmath>

#include "driftplan/errors.hpp"
#include "driftplan/rng.hpp"

namespace driftplan {

void DrifterSpec::validate() const {
    if (!(battery_duration > 0.0) || !(sample_period > 0.0) || !(seed_radius >= 0.0) ||
        ensemble_size < 1)
        throw ConfigInvalid("drifter spec fields must be positive");
    if (sample_period > battery_duration)
        throw ConfigInvalid("drifter sample_period exceeds battery_duration");
}

std::optional<Vec2> rk4_step(const FlowField& field, Vec2 pos, double dt) {
    const GridSpec& g = field.grid;
    auto eval = [&](Vec2 p) -> std::optional<Vec2> {
        if (!g.contains(p)) return std::nullopt;
        return field.velocity_at(p);
    };
    auto k1 = eval(pos);
    if (!k1) return std::nullopt;
    auto k2 = eval(pos + 0.5 * dt * *k1);
    if (!k2) return std::nullopt;
    auto k3 = eval(pos + 0.5 * dt * *k2);
    if (!k3) return std::nullopt;
    auto k4 = eval(pos + dt * *k3);
    if (!k4) return std::nullopt;
    Vec2 next = pos + (dt / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (!g.contains(next)) return std::nullopt;
    return next;
}

Trajectory simulate_trajectory(const FlowField& field, Vec2 start, double duration, double dt) {
    if (!field.grid.contains(start)) throw OutOfBounds("trajectory start outside survey region");
    if (!(dt > 0.0) || duration < dt)
        throw ConfigInvalid("simulate_trajectory requires dt > 0 and duration >= dt");

    Trajectory traj;
    traj.points.push_back({0.0, start});
    double t = 0.0;
    Vec2 pos = start;
    // Final partial step lands exactly on `duration`.
    while (t < duration - 1e-12) {
        double step = std::min(dt, duration - t);
        auto next = rk4_step(field, pos, step);
        if (!next) {
            traj.exit_time = t;
            traj.terminal = TerminalReason::Exited;
            return traj;
        }
        t += step;
        pos = *next;
        traj.points.push_back({t, pos});
    }
    traj.terminal = TerminalReason::Expired;
    return traj;
}

std::vector<Vec2> seed_ensemble(const GridSpec& grid, Vec2 center, const DrifterSpec& spec,
                                std::uint64_t rng_seed) {
    if (!grid.contains(center)) throw OutOfBounds("ensemble center outside survey region");
    Rng rng(rng_seed);
    std::vector<Vec2> points;
    points.reserve(spec.ensemble_size);
    for (int k = 0; k < spec.ensemble_size; ++k) {
        double radius = spec.seed_radius * std::sqrt(rng.uniform());
        double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        Vec2 p{center.x + radius * std::cos(theta), center.y + radius * std::sin(theta)};
        p.x = std::clamp(p.x, grid.origin.x, grid.origin.x + grid.width());
        p.y = std::clamp(p.y, grid.origin.y, grid.origin.y + grid.height());
        points.push_back(p);
    }
    return points;
}

std::vector<Trajectory> ensemble_trajectories(const FlowField& field, Vec2 center,
                                              const DrifterSpec& spec, double duration, double dt,
                                              std::uint64_t rng_seed) {
    std::vector<Trajectory> out;
    out.reserve(spec.ensemble_size);
    for (Vec2 p : seed_ensemble(field.grid, center, spec, rng_seed))
        out.push_back(simulate_trajectory(field, p, duration, dt));
    return out;
}

}  // namespace driftplan
