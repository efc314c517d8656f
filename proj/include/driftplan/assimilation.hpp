#pragma once

#include <span>
#include <vector>

#include "driftplan/advection.hpp"
#include "driftplan/field2d.hpp"
#include "driftplan/flowfield.hpp"
#include "driftplan/geometry.hpp"

namespace driftplan {

/// One georeferenced flow observation. drifter_id < 0 marks the ASV sensor.
struct Sample {
    Vec2 position;       // world meters, inside S
    Vec2 value;          // (u, v) m/s
    int drifter_id = -1;
    double time = 0.0;   // seconds since experiment start

    bool from_asv() const { return drifter_id < 0; }
};

struct GpParams {
    double sigma = 1.0;            // kernel amplitude (dimensionless)
    double length_scale = 4.0;     // l, in cells
    double noise_variance = 1e-4;  // (m/s)^2 jitter

    void validate() const;
};

/// Aggregated observation at a cell center, in cell units (integer lattice).
struct GpObservation {
    double row = 0.0;
    double col = 0.0;
    double u = 0.0;
    double v = 0.0;
};

/// Fitted model: per-cell aggregated observations plus kernel parameters.
/// Immutable once built; safe to query concurrently.
struct GpModel {
    GpParams params;
    GridSpec grid;
    std::vector<GpObservation> observations;
};

/// Squared-exponential covariance between two cell-unit positions:
/// sigma^2 * exp(-|a-b|^2 / (2 l^2)).
double kernel(Vec2 a, Vec2 b, double sigma, double length_scale);

/// Aggregate samples into at most one observation per grid cell (per-cell
/// mean of u and v, placed at the cell center). Empty sample lists allowed.
GpModel fit(std::span<const Sample> samples, const GridSpec& grid, const GpParams& params);

struct GpPrediction {
    FlowField mean;     // posterior mean field (prior mean (0,0) with no data)
    Field2d variance;   // shared posterior variance per cell, in [0, sigma^2]
};

/// Exact GP posterior at every cell center. u and v are independent GPs
/// sharing one kernel matrix, so a single factorization serves both.
/// Throws SingularKernel when the (jittered) kernel system is not positive
/// definite.
GpPrediction predict(const GpModel& model);

/// Per-cell nonnegative sampling value.
struct RewardMap {
    Field2d values;
};

/// Start from the posterior variance; subtract 1/ensemble_size once per
/// (drifter, ensemble member, distinct visited cell); clamp at zero.
RewardMap reward_map(const Field2d& variance, const GridSpec& grid,
                     const std::vector<std::vector<Trajectory>>& deployed_ensembles,
                     int ensemble_size);

}  // namespace driftplan
