#include "driftplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftplan/errors.hpp"

namespace driftplan {

void GridMdp::validate() const {
    if (rows() < 1 || cols() < 1 || rows() * cols() < 2)
        throw ConfigInvalid("MDP grid needs at least two cells");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigInvalid("gamma must lie in (0, 1)");
}

ValueFunction value_iteration(const GridMdp& mdp, double tol, int max_iter) {
    mdp.validate();
    if (!(tol > 0.0)) throw ConfigInvalid("value_iteration tol must be > 0");
    const int m = mdp.rows(), n = mdp.cols();
    const Field2d& reward = mdp.reward.values;

    Field2d value(m, n, 0.0);
    Field2d next(m, n, 0.0);
    for (int iter = 1; iter <= max_iter; ++iter) {
        double residual = 0.0;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                double best = -std::numeric_limits<double>::infinity();
                for (Cell a : kActions) {
                    Cell s{i + a.row, j + a.col};
                    if (!mdp.in_grid(s)) continue;
                    double q = reward(s.row, s.col) + mdp.gamma * value(s.row, s.col);
                    best = std::max(best, q);
                }
                next(i, j) = best;
                residual = std::max(residual, std::abs(best - value(i, j)));
            }
        }
        std::swap(value, next);
        if (residual <= tol) return {std::move(value), residual, iter};
    }
    throw Unconverged("value iteration residual above " + std::to_string(tol) + " after " +
                      std::to_string(max_iter) + " sweeps");
}

GreedyPath greedy_path(const GridMdp& mdp, const ValueFunction& value, Cell start, int steps,
                       RewardConsumption mode) {
    mdp.validate();
    if (!mdp.in_grid(start)) throw OutOfBounds("greedy_path start outside grid");
    if (steps < 1) throw ConfigInvalid("greedy_path needs steps >= 1");

    Field2d working = mdp.reward.values;
    auto consume = [&](Cell c) {
        double collected = working(c.row, c.col);
        working(c.row, c.col) = mode == RewardConsumption::Zero ? 0.0 : -collected;
        return collected;
    };

    GreedyPath path;
    path.cells.reserve(steps);
    Cell cur = start;
    for (int step = 0; step < steps; ++step) {
        double best = -std::numeric_limits<double>::infinity();
        Cell chosen = cur;
        bool found = false;
        for (Cell a : kActions) {
            Cell s{cur.row + a.row, cur.col + a.col};
            if (!mdp.in_grid(s)) continue;
            double q = working(s.row, s.col) + mdp.gamma * value.values(s.row, s.col);
            if (q > best) {  // strict: earlier action order wins ties
                best = q;
                chosen = s;
                found = true;
            }
        }
        if (!found) break;  // unreachable on any >= 2-cell grid
        path.planned_score += consume(chosen);
        path.cells.push_back(chosen);
        cur = chosen;
    }
    return path;
}

}  // namespace driftplan
