#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftplan/advection.hpp"
#include "driftplan/assimilation.hpp"
#include "driftplan/decision.hpp"
#include "driftplan/flowfield.hpp"
#include "driftplan/planner.hpp"
#include "driftplan/proposals.hpp"

namespace driftplan {

enum class SurveyMode { Adaptive, Lawnmower };

/// All tunables of one closed-loop run. Defaults follow the experiment
/// protocol: F_n=15, B_n=90, 5 drifters, gamma 0.95, 1 m/s ASV with a 2 h
/// budget, 4 h / 5 s drifters, D_p=10 s, 75% initial diagonal leg.
struct ExperimentConfig {
    SurveyMode mode = SurveyMode::Adaptive;
    int f_n = 15;
    int b_n = 90;
    int n_drifters = 5;
    double gamma = 0.95;
    GpParams gp;
    double asv_speed = 1.0;        // m/s
    double asv_budget = 7200.0;    // seconds
    DrifterSpec drifter;
    double deploy_duration = 10.0;  // D_p, seconds of ASV clock per deployment
    ProposalConfig proposal;
    std::uint64_t rng_seed = 0;
    double initial_leg_fraction = 0.75;
    double sensor_noise_std = 0.01;  // m/s, ASV flow sensor
    double vi_tol = 1e-6;
    int vi_max_iter = 20000;
    bool assimilate_after_budget = true;  // keep late drifter data in the final fit
    RewardConsumption consumption = RewardConsumption::Zero;
    bool log_proposals = false;
    std::string cfg_id = "default";

    void validate() const;
};

struct UpdateRecord {
    int idx = 0;
    double t = 0.0;
    double rmse = 0.0;
    int asv_row = 0;
    int asv_col = 0;
};

struct DecisionRecord {
    int update_idx = 0;
    DecisionKind kind = DecisionKind::Sample;
    double comparison_score = 0.0;
    double best_proposal_score = 0.0;
    int chosen_row = -1;  // proposal cell for Deploy, (-1,-1) for Sample
    int chosen_col = -1;
};

struct DeployRecord {
    double t = 0.0;
    int drifter_id = 0;
    int row = 0;
    int col = 0;
};

/// Complete record of one run: resolved config header, typed record lines in
/// emission order, structured mirrors of the records, and the final
/// mean/variance/RMSE grids.
struct RunLog {
    std::vector<std::pair<std::string, std::string>> header;
    std::vector<std::string> records;  // formatted lines, chronological
    std::vector<UpdateRecord> updates;
    std::vector<DecisionRecord> decisions;
    std::vector<DeployRecord> deploys;
    long long asv_samples = 0;
    long long drifter_samples = 0;
    FlowField mean_field;
    Field2d variance;
    Field2d rmse_map;

    double final_rmse() const { return updates.empty() ? 0.0 : updates.back().rmse; }
};

/// Finite-difference flow observation from two consecutive track points,
/// stamped at the segment midpoint.
Sample drifter_observation(const TrajectoryPoint& prev, const TrajectoryPoint& next,
                           int drifter_id);

/// Closed-loop adaptive run against a frozen ground-truth field.
/// Deterministic for fixed (truth, cfg).
RunLog run_experiment(const FlowField& truth, const ExperimentConfig& cfg);

/// Boustrophedon coverage baseline: serpentine rows one cell apart, same
/// clock accounting and update cadence, no drifters.
RunLog run_lawnmower(const FlowField& truth, const ExperimentConfig& cfg);

struct BatchField {
    std::string id;
    FlowField field;
};

struct BatchRun {
    std::string field_id;
    std::string cfg_id;
    std::uint64_t seed = 0;
    RunLog log;
};

/// Independent runs over the cross product fields x cfgs. jobs <= 0 selects
/// hardware concurrency; assembly order is (field, cfg) regardless of jobs.
std::vector<BatchRun> batch_run(const std::vector<BatchField>& fields,
                                const std::vector<ExperimentConfig>& cfgs, int jobs = 0);

struct TrendBandPoint {
    double t = 0.0;
    double fit = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// First-order least-squares trend with bootstrap (resampling points with
/// replacement) percentile confidence bands. The band is evaluated at the
/// sorted distinct input ts and always contains the point-estimate line.
struct TrendFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_lo = 0.0;
    double slope_hi = 0.0;
    int resamples = 0;  // bootstrap draws performed
    int valid = 0;      // draws with >= 2 distinct ts
    std::vector<TrendBandPoint> band;
};

TrendFit bootstrap_trend(std::span<const std::pair<double, double>> points, int n_boot,
                         std::uint64_t seed);

}  // namespace driftplan
