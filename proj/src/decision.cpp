#include "driftplan/decision.hpp"

#include <algorithm>
#include <limits>

#include "driftplan/errors.hpp"

namespace driftplan {

void DecisionInput::validate() const {
    if (!(b_n >= f_n && f_n >= 1)) throw ConfigInvalid("decision requires B_n >= F_n >= 1");
    if (drifters_remaining < 0) throw ConfigInvalid("drifters_remaining must be >= 0");
}

namespace {

GridMdp make_mdp(const DecisionInput& input) { return {input.reward, input.gamma}; }

}  // namespace

PathPlan comparison_path(const DecisionInput& input) {
    input.validate();
    GreedyPath g = greedy_path(make_mdp(input), input.value, input.asv_cell, input.b_n,
                               input.consumption);
    return {std::move(g.cells), g.planned_score};
}

PathPlan proposal_path(const DecisionInput& input, const ProposalPoint& proposal) {
    input.validate();
    GridMdp mdp = make_mdp(input);
    mdp.validate();
    if (!mdp.in_grid(input.asv_cell) || !mdp.in_grid(proposal.position))
        throw OutOfBounds("proposal_path cells outside grid");
    if (chebyshev(input.asv_cell, proposal.position) > input.b_n)
        throw PathInfeasible("proposal farther than B_n steps");

    Field2d working = input.reward.values;
    auto consume = [&](Cell c) {
        double collected = working(c.row, c.col);
        working(c.row, c.col) =
            input.consumption == RewardConsumption::Zero ? 0.0 : -collected;
        return collected;
    };

    PathPlan plan;
    Cell cur = input.asv_cell;
    for (int steps_left = input.b_n; cur != proposal.position; --steps_left) {
        double best = -std::numeric_limits<double>::infinity();
        Cell chosen = cur;
        for (Cell a : kActions) {
            Cell s{cur.row + a.row, cur.col + a.col};
            if (!mdp.in_grid(s)) continue;
            if (chebyshev(s, proposal.position) > steps_left - 1) continue;  // must stay reachable
            double q = working(s.row, s.col) + input.gamma * input.value.values(s.row, s.col);
            if (q > best) {
                best = q;
                chosen = s;
            }
        }
        plan.score += consume(chosen);
        plan.cells.push_back(chosen);
        cur = chosen;
    }
    plan.score += proposal.score;
    return plan;
}

bool deploy_preferred(double comparison_score, double best_proposal_score,
                      int drifters_remaining) {
    return drifters_remaining > 0 && best_proposal_score > comparison_score;
}

Decision decide(const DecisionInput& input) {
    input.validate();
    PathPlan comparison = comparison_path(input);

    Decision decision;
    decision.comparison_score = comparison.score;

    std::optional<size_t> best_idx;
    PathPlan best_plan;
    for (size_t k = 0; k < input.proposals.size(); ++k) {
        const ProposalPoint& proposal = input.proposals[k];
        if (chebyshev(input.asv_cell, proposal.position) > input.b_n) continue;  // discard
        PathPlan plan = proposal_path(input, proposal);
        if (!best_idx || plan.score > best_plan.score) {
            best_idx = k;
            best_plan = std::move(plan);
        }
    }
    if (best_idx) decision.best_proposal_score = best_plan.score;

    if (best_idx &&
        deploy_preferred(comparison.score, best_plan.score, input.drifters_remaining)) {
        decision.kind = DecisionKind::Deploy;
        decision.path = std::move(best_plan.cells);
        decision.proposal = input.proposals[*best_idx];
    } else {
        decision.kind = DecisionKind::Sample;
        comparison.cells.resize(std::min<size_t>(comparison.cells.size(), input.f_n));
        decision.path = std::move(comparison.cells);
    }
    return decision;
}

}  // namespace driftplan
