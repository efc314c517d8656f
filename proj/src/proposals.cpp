#include "driftplan/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "driftplan/errors.hpp"
#include "driftplan/rng.hpp"

namespace driftplan {

void ProposalConfig::validate() const {
    if (n_samples < 1 || nms_keep < 1 || top_k < 1)
        throw ConfigInvalid("proposal counts must be >= 1");
    if (!(top_k <= nms_keep && nms_keep <= n_samples))
        throw ConfigInvalid("proposal counts must satisfy top_k <= nms_keep <= n_samples");
    if (buffer_width < 1) throw ConfigInvalid("buffer_width must be >= 1");
    if (suppression_radius < 0.0 || noise_sigma < 0.0)
        throw ConfigInvalid("suppression_radius and noise_sigma must be >= 0");
    if (!(battery > 0.0) || !(trajectory_dt > 0.0) || trajectory_dt > battery)
        throw ConfigInvalid("battery and trajectory_dt must be positive with dt <= battery");
}

Field2d likelihood_matrix(const RewardMap& reward, const ProposalConfig& cfg,
                          std::uint64_t rng_seed) {
    cfg.validate();
    const int m = reward.values.rows(), n = reward.values.cols();

    double max_r = 0.0;
    for (double v : reward.values.data()) {
        if (v < 0.0) throw ConfigInvalid("reward map must be nonnegative");
        max_r = std::max(max_r, v);
    }

    Rng rng(rng_seed);
    const double noise_std = cfg.noise_sigma * max_r;
    Field2d like(m, n);
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double eps = noise_std > 0.0 ? rng.normal(0.0, noise_std) : 0.0;
            bool buffered = i < cfg.buffer_width || i >= m - cfg.buffer_width ||
                            j < cfg.buffer_width || j >= n - cfg.buffer_width;
            double v = buffered ? 0.0 : std::max(0.0, reward.values(i, j) + eps);
            like(i, j) = v;
            total += v;
        }
    }
    if (total <= 0.0) throw DegenerateMap("likelihood matrix all zero after buffering");
    for (double& v : like.data()) v /= total;
    return like;
}

std::vector<Cell> rejection_sample(const Field2d& matrix, int n_samples, std::uint64_t rng_seed) {
    const int m = matrix.rows(), n = matrix.cols();
    double max_p = 0.0;
    std::vector<Cell> positive;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (matrix(i, j) > 0.0) {
                positive.push_back({i, j});
                max_p = std::max(max_p, matrix(i, j));
            }

    // Fewer positive cells than requested: the unique-sample set is the whole
    // support, so skip the coupon-collector tail.
    if (static_cast<int>(positive.size()) <= n_samples) return positive;

    Rng rng(rng_seed);
    std::set<std::pair<int, int>> seen;
    std::vector<Cell> out;
    out.reserve(n_samples);
    const long max_draws = 2000L * n_samples;
    for (long draw = 0; draw < max_draws && static_cast<int>(out.size()) < n_samples; ++draw) {
        int i = static_cast<int>(rng.uniform_index(m));
        int j = static_cast<int>(rng.uniform_index(n));
        if (matrix(i, j) <= 0.0) continue;
        if (rng.uniform() * max_p >= matrix(i, j)) continue;
        if (seen.insert({i, j}).second) out.push_back({i, j});
    }
    // Deterministic top-up if the draw cap was hit on a pathologically peaked
    // matrix: take the highest-likelihood unsampled cells.
    if (static_cast<int>(out.size()) < n_samples) {
        std::stable_sort(positive.begin(), positive.end(), [&](Cell a, Cell b) {
            return matrix(a.row, a.col) > matrix(b.row, b.col);
        });
        for (Cell c : positive) {
            if (static_cast<int>(out.size()) >= n_samples) break;
            if (seen.insert({c.row, c.col}).second) out.push_back(c);
        }
    }
    return out;
}

std::vector<Cell> nms(std::vector<Candidate> candidates, int keep, double suppression_radius) {
    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                              const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.cell < b.cell;
    });
    const double radius_sq = suppression_radius * suppression_radius;
    std::vector<Cell> kept;
    for (const Candidate& c : candidates) {
        if (static_cast<int>(kept.size()) >= keep) break;
        bool suppressed = false;
        for (Cell k : kept) {
            double dr = c.cell.row - k.row;
            double dc = c.cell.col - k.col;
            if (dr * dr + dc * dc <= radius_sq) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(c.cell);
    }
    return kept;
}

std::vector<ProposalPoint> score_proposals(std::span<const Cell> points, const FlowField& estimate,
                                           const RewardMap& reward, const ProposalConfig& cfg,
                                           std::uint64_t /*rng_seed*/) {
    cfg.validate();
    const GridSpec& grid = estimate.grid;
    std::vector<ProposalPoint> scored;
    scored.reserve(points.size());
    for (Cell point : points) {
        ProposalPoint proposal;
        proposal.position = point;
        proposal.expected_trajectory = simulate_trajectory(estimate, grid.cell_center(point),
                                                           cfg.battery, cfg.trajectory_dt);
        std::set<std::pair<int, int>> visited;
        for (const TrajectoryPoint& pt : proposal.expected_trajectory.points) {
            Cell c = grid.cell_of(pt.pos);
            visited.insert({c.row, c.col});
        }
        for (auto [row, col] : visited) proposal.score += reward.values(row, col);
        scored.push_back(std::move(proposal));
    }
    std::stable_sort(scored.begin(), scored.end(), [](const ProposalPoint& a,
                                                      const ProposalPoint& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.position < b.position;
    });
    if (static_cast<int>(scored.size()) > cfg.top_k) scored.resize(cfg.top_k);
    return scored;
}

std::vector<ProposalPoint> generate_proposals(const RewardMap& reward, const FlowField& estimate,
                                              const ProposalConfig& cfg, std::uint64_t rng_seed) {
    Field2d like;
    try {
        like = likelihood_matrix(reward, cfg, derive_seed(rng_seed, 1));
    } catch (const DegenerateMap&) {
        return {};
    }
    std::vector<Cell> sampled = rejection_sample(like, cfg.n_samples, derive_seed(rng_seed, 2));
    std::vector<Candidate> candidates;
    candidates.reserve(sampled.size());
    for (Cell c : sampled) candidates.push_back({c, reward.values(c.row, c.col)});
    std::vector<Cell> kept = nms(std::move(candidates), cfg.nms_keep, cfg.suppression_radius);
    return score_proposals(kept, estimate, reward, cfg, derive_seed(rng_seed, 3));
}

}  // namespace driftplan
