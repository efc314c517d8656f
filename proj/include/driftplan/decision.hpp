#pragma once

#include <optional>
#include <vector>

#include "driftplan/geometry.hpp"
#include "driftplan/planner.hpp"
#include "driftplan/proposals.hpp"

namespace driftplan {

/// Everything one update-point decision needs.
struct DecisionInput {
    RewardMap reward;
    ValueFunction value;
    Cell asv_cell;
    std::vector<ProposalPoint> proposals;
    int drifters_remaining = 0;
    int b_n = 90;  // comparison-path length, steps
    int f_n = 15;  // executed steps between updates
    double gamma = 0.95;
    RewardConsumption consumption = RewardConsumption::Zero;

    void validate() const;
};

struct PathPlan {
    std::vector<Cell> cells;
    double score = 0.0;
};

/// Greedy B_n-step consumption path from the ASV cell (delegates to
/// greedy_path).
PathPlan comparison_path(const DecisionInput& input);

/// Greedy consumption path of at most B_n steps constrained to end at the
/// proposal cell: each step keeps Chebyshev(cell, proposal) <= steps left,
/// falling onto the shortest 8-connected path when the constraint binds.
/// Score = consumed rewards along the path + proposal.score.
/// Throws PathInfeasible when the proposal is farther than B_n steps.
PathPlan proposal_path(const DecisionInput& input, const ProposalPoint& proposal);

enum class DecisionKind { Sample, Deploy };

struct Decision {
    DecisionKind kind = DecisionKind::Sample;
    std::vector<Cell> path;  // F_n cells (Sample) or path to the proposal (Deploy)
    std::optional<ProposalPoint> proposal;  // set iff kind == Deploy
    double comparison_score = 0.0;
    double best_proposal_score = 0.0;  // 0 when no feasible proposal exists
};

/// Deploy requires a drifter on board and a strictly better proposal path.
bool deploy_preferred(double comparison_score, double best_proposal_score,
                      int drifters_remaining);

/// Compare the comparison path against every feasible proposal path; Deploy
/// on strict improvement (argmax proposal, ties by list order), otherwise
/// Sample the first F_n cells of the comparison path.
Decision decide(const DecisionInput& input);

}  // namespace driftplan
