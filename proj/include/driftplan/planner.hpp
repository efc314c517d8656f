#pragma once

#include <array>
#include <vector>

#include "driftplan/assimilation.hpp"
#include "driftplan/field2d.hpp"
#include "driftplan/geometry.hpp"

namespace driftplan {

/// The 8 king-move actions in fixed tie-break order: N, NE, E, SE, S, SW, W,
/// NW (rows increase northward). Moves that leave the grid are invalid in the
/// corresponding states.
inline constexpr std::array<Cell, 8> kActions = {{
    {+1, 0}, {+1, +1}, {0, +1}, {-1, +1}, {-1, 0}, {-1, -1}, {0, -1}, {+1, -1},
}};

/// Deterministic grid MDP over the reward map: moving into cell s' collects
/// R(s'). Accepts any grid with at least two cells (the reward map carries
/// the shape), which is looser than the flow-field grid invariant.
struct GridMdp {
    RewardMap reward;
    double gamma = 0.95;

    int rows() const { return reward.values.rows(); }
    int cols() const { return reward.values.cols(); }
    bool in_grid(Cell c) const {
        return c.row >= 0 && c.row < rows() && c.col >= 0 && c.col < cols();
    }
    void validate() const;
};

struct ValueFunction {
    Field2d values;
    double residual = 0.0;  // achieved sup-norm Bellman residual
    int iterations = 0;
};

/// Jacobi value iteration until the sup-norm Bellman residual drops to tol.
/// Throws Unconverged after max_iter sweeps.
ValueFunction value_iteration(const GridMdp& mdp, double tol, int max_iter);

/// How a planned visit consumes reward on the working copy.
enum class RewardConsumption {
    Zero,    // visited cell's reward set to 0 (default)
    Negate,  // visited cell's reward sign-flipped (comparison switch)
};

struct GreedyPath {
    std::vector<Cell> cells;     // exactly `steps` cells after start
    double planned_score = 0.0;  // sum of pre-consumption rewards collected
};

/// Walk `steps` greedy actions from `start` against the fixed value function,
/// consuming reward on a working copy at each visited cell. Ties break in
/// kActions order.
GreedyPath greedy_path(const GridMdp& mdp, const ValueFunction& value, Cell start, int steps,
                       RewardConsumption mode = RewardConsumption::Zero);

}  // namespace driftplan
