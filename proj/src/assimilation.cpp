#include "driftplan/assimilation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "driftplan/errors.hpp"

namespace driftplan {

void GpParams::validate() const {
    if (!(sigma > 0.0) || !(length_scale > 0.0) || noise_variance < 0.0)
        throw ConfigInvalid("GP params require sigma > 0, length_scale > 0, noise_variance >= 0");
}

double kernel(Vec2 a, Vec2 b, double sigma, double length_scale) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return sigma * sigma * std::exp(-(dx * dx + dy * dy) / (2.0 * length_scale * length_scale));
}

GpModel fit(std::span<const Sample> samples, const GridSpec& grid, const GpParams& params) {
    params.validate();
    struct Acc {
        double u = 0.0, v = 0.0;
        int count = 0;
    };
    std::map<std::pair<int, int>, Acc> cells;
    for (const Sample& s : samples) {
        Cell c = grid.cell_of(s.position);
        Acc& acc = cells[{c.row, c.col}];
        acc.u += s.value.x;
        acc.v += s.value.y;
        ++acc.count;
    }
    GpModel model{params, grid, {}};
    model.observations.reserve(cells.size());
    for (const auto& [key, acc] : cells)
        model.observations.push_back({static_cast<double>(key.first),
                                      static_cast<double>(key.second), acc.u / acc.count,
                                      acc.v / acc.count});
    return model;
}

namespace {

// Aggregated observations sit on the integer cell lattice, so every kernel
// value between an observation and a prediction cell is a product of two
// one-dimensional factors exp(-d^2 / (2 l^2)) with integer d. Tabulating the
// factors turns the k x N cross-covariance build into lookups.
struct KernelTable {
    std::vector<double> g;  // g[|d|]
    double sigma_sq;

    KernelTable(int max_d, const GpParams& p) : g(max_d + 1), sigma_sq(p.sigma * p.sigma) {
        for (int d = 0; d <= max_d; ++d)
            g[d] = std::exp(-(static_cast<double>(d) * d) / (2.0 * p.length_scale * p.length_scale));
    }
};

bool integral_lattice(const std::vector<GpObservation>& obs) {
    for (const GpObservation& o : obs)
        if (o.row != std::floor(o.row) || o.col != std::floor(o.col)) return false;
    return true;
}

}  // namespace

GpPrediction predict(const GpModel& model) {
    const GridSpec& grid = model.grid;
    const GpParams& p = model.params;
    const int m = grid.rows, n = grid.cols;
    const auto k = static_cast<Eigen::Index>(model.observations.size());

    GpPrediction out{FlowField{grid, Field2d(m, n), Field2d(m, n)},
                     Field2d(m, n, p.sigma * p.sigma)};
    if (k == 0) return out;  // prior everywhere

    Eigen::MatrixXd K(k, k);
    Eigen::MatrixXd y(k, 2);
    for (Eigen::Index a = 0; a < k; ++a) {
        const GpObservation& oa = model.observations[a];
        y(a, 0) = oa.u;
        y(a, 1) = oa.v;
        for (Eigen::Index b = 0; b <= a; ++b) {
            const GpObservation& ob = model.observations[b];
            double cov = kernel({oa.row, oa.col}, {ob.row, ob.col}, p.sigma, p.length_scale);
            K(a, b) = cov;
            K(b, a) = cov;
        }
        K(a, a) += p.noise_variance;
    }

    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw SingularKernel("kernel matrix not positive definite; increase noise_variance");
    Eigen::MatrixXd alpha = llt.solve(y);  // K^{-1} [y_u y_v]

    const bool fast = integral_lattice(model.observations);
    KernelTable table(std::max(m, n), p);

    // Cross-covariance built in column chunks to bound memory at large grids;
    // one triangular solve per chunk yields both mean and variance.
    const int kChunk = 2048;
    Eigen::MatrixXd kstar;
    const auto& L = llt.matrixL();
    for (int chunk_start = 0; chunk_start < m * n; chunk_start += kChunk) {
        int chunk = std::min(kChunk, m * n - chunk_start);
        kstar.resize(k, chunk);
        for (int c = 0; c < chunk; ++c) {
            int cell = chunk_start + c;
            int row = cell / n, col = cell % n;
            if (fast) {
                for (Eigen::Index a = 0; a < k; ++a) {
                    const GpObservation& oa = model.observations[a];
                    int dr = std::abs(row - static_cast<int>(oa.row));
                    int dc = std::abs(col - static_cast<int>(oa.col));
                    kstar(a, c) = table.sigma_sq * table.g[dr] * table.g[dc];
                }
            } else {
                for (Eigen::Index a = 0; a < k; ++a) {
                    const GpObservation& oa = model.observations[a];
                    kstar(a, c) = kernel({static_cast<double>(row), static_cast<double>(col)},
                                         {oa.row, oa.col}, p.sigma, p.length_scale);
                }
            }
        }
        Eigen::MatrixXd mean = kstar.transpose() * alpha;              // chunk x 2
        L.solveInPlace(kstar);                                         // W = L^{-1} K*
        Eigen::VectorXd reduction = kstar.colwise().squaredNorm();     // k*^T K^{-1} k*
        for (int c = 0; c < chunk; ++c) {
            int cell = chunk_start + c;
            int row = cell / n, col = cell % n;
            out.mean.u(row, col) = mean(c, 0);
            out.mean.v(row, col) = mean(c, 1);
            double var = p.sigma * p.sigma - reduction(c);
            out.variance(row, col) = std::clamp(var, 0.0, p.sigma * p.sigma);
        }
    }
    return out;
}

RewardMap reward_map(const Field2d& variance, const GridSpec& grid,
                     const std::vector<std::vector<Trajectory>>& deployed_ensembles,
                     int ensemble_size) {
    if (ensemble_size < 1) throw ConfigInvalid("ensemble_size must be >= 1");
    RewardMap reward{variance};
    const double discount = 1.0 / ensemble_size;
    for (const auto& ensemble : deployed_ensembles) {
        for (const Trajectory& member : ensemble) {
            std::set<std::pair<int, int>> visited;
            for (const TrajectoryPoint& pt : member.points) {
                Cell c = grid.cell_of(pt.pos);
                visited.insert({c.row, c.col});
            }
            for (auto [row, col] : visited)
                reward.values(row, col) = std::max(0.0, reward.values(row, col) - discount);
        }
    }
    return reward;
}

}  // namespace driftplan
