#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "driftplan/advection.hpp"
#include "driftplan/assimilation.hpp"
#include "driftplan/field2d.hpp"
#include "driftplan/geometry.hpp"

namespace driftplan {

/// Candidate drifter launch point with its expected track under the current
/// field estimate and the expected reward harvested along it.
struct ProposalPoint {
    Cell position;
    Trajectory expected_trajectory;
    double score = 0.0;
};

struct ProposalConfig {
    int n_samples = 1000;              // rejection-sampled unique cells
    int nms_keep = 20;                 // candidates surviving NMS
    int top_k = 10;                    // proposals passed to the decision
    double suppression_radius = 10.0;  // cells, Euclidean
    int buffer_width = 5;              // cells, zeroed safety ring
    double noise_sigma = 0.1;          // fraction of max R
    double battery = 14400.0;          // seconds of simulated trajectory
    double trajectory_dt = 60.0;       // coarse integration step, seconds

    void validate() const;
};

/// Normalized combination of R, i.i.d. Gaussian noise scaled by
/// noise_sigma * max(R), and a zeroed safety ring of buffer_width cells.
/// Entries sum to 1. Throws DegenerateMap if everything is zero after
/// buffering.
Field2d likelihood_matrix(const RewardMap& reward, const ProposalConfig& cfg,
                          std::uint64_t rng_seed);

/// Accept-reject draws from the matrix until min(n_samples, #positive cells)
/// unique cells are collected. Zero-probability cells are never selected.
std::vector<Cell> rejection_sample(const Field2d& matrix, int n_samples, std::uint64_t rng_seed);

struct Candidate {
    Cell cell;
    double value = 0.0;
};

/// Greedy non-maximum suppression: keep by descending value (ties by
/// (row, col)), discarding candidates within suppression_radius of a kept
/// cell. Kept cells are pairwise separated by more than the radius.
std::vector<Cell> nms(std::vector<Candidate> candidates, int keep, double suppression_radius);

/// Simulate each point's trajectory under the estimated field for the
/// battery duration; score = sum of R over the distinct cells visited.
/// Returns the top_k proposals sorted by descending score.
std::vector<ProposalPoint> score_proposals(std::span<const Cell> points, const FlowField& estimate,
                                           const RewardMap& reward, const ProposalConfig& cfg,
                                           std::uint64_t rng_seed);

/// Full pipeline: likelihood -> rejection sampling -> NMS -> scoring.
/// Deterministic in (reward, cfg, rng_seed). Returns an empty list when the
/// likelihood matrix is degenerate (fully covered region).
std::vector<ProposalPoint> generate_proposals(const RewardMap& reward, const FlowField& estimate,
                                              const ProposalConfig& cfg, std::uint64_t rng_seed);

}  // namespace driftplan
