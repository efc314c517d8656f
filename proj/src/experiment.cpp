#include "driftplan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "driftplan/config_io.hpp"
#include "driftplan/errors.hpp"
#include "driftplan/rng.hpp"
#include "driftplan/textio.hpp"

namespace driftplan {

void ExperimentConfig::validate() const {
    if (f_n < 1 || b_n < f_n) throw ConfigInvalid("config requires B_n >= F_n >= 1");
    if (n_drifters < 0) throw ConfigInvalid("n_drifters must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigInvalid("gamma must lie in (0, 1)");
    gp.validate();
    drifter.validate();
    proposal.validate();
    if (!(asv_speed > 0.0) || !(asv_budget > 0.0))
        throw ConfigInvalid("asv_speed and asv_budget must be > 0");
    if (deploy_duration < 0.0) throw ConfigInvalid("deploy_duration must be >= 0");
    if (!(initial_leg_fraction > 0.0 && initial_leg_fraction <= 1.0))
        throw ConfigInvalid("initial_leg_fraction must lie in (0, 1]");
    if (sensor_noise_std < 0.0) throw ConfigInvalid("sensor_noise_std must be >= 0");
    if (!(vi_tol > 0.0) || vi_max_iter < 1)
        throw ConfigInvalid("vi_tol must be > 0 and vi_max_iter >= 1");
}

Sample drifter_observation(const TrajectoryPoint& prev, const TrajectoryPoint& next,
                           int drifter_id) {
    double dt = next.t - prev.t;
    if (!(dt > 0.0)) throw ConfigInvalid("drifter_observation requires increasing timestamps");
    Vec2 vel{(next.pos.x - prev.pos.x) / dt, (next.pos.y - prev.pos.y) / dt};
    if (!std::isfinite(vel.x) || !std::isfinite(vel.y))
        throw NonFiniteValue("drifter observation velocity not finite");
    Vec2 mid = 0.5 * (prev.pos + next.pos);
    return {mid, vel, drifter_id, 0.5 * (prev.t + next.t)};
}

namespace {

constexpr std::uint64_t kSensorStream = 1;
constexpr std::uint64_t kEnsembleStream = 2;
constexpr std::uint64_t kProposalStream = 3;

struct DrifterState {
    int id = 0;
    Vec2 pos;
    double deploy_time = 0.0;
    long ticks = 0;
    bool alive = true;
};

class Runner {
public:
    Runner(const FlowField& truth, const ExperimentConfig& cfg)
        : truth_(truth),
          cfg_(cfg),
          grid_(truth.grid),
          sensor_rng_(derive_seed(cfg.rng_seed, kSensorStream)) {
        cfg.validate();
        grid_.validate();
        log_.header = serialize_config(cfg);
        drifters_remaining_ = cfg.n_drifters;
    }

    RunLog run_adaptive();
    RunLog run_lawnmower();

private:
    void emit(std::string line) { log_.records.push_back(std::move(line)); }

    void sample_current_cell() {
        Vec2 center = grid_.cell_center(asv_cell_);
        Vec2 v = truth_.velocity_at(center);
        v.x += sensor_rng_.normal(0.0, cfg_.sensor_noise_std);
        v.y += sensor_rng_.normal(0.0, cfg_.sensor_noise_std);
        samples_.push_back({center, v, -1, asv_clock_});
        ++log_.asv_samples;
    }

    void step_to(Cell next) {
        int dr = next.row - asv_cell_.row;
        int dc = next.col - asv_cell_.col;
        assert(std::abs(dr) <= 1 && std::abs(dc) <= 1 && (dr != 0 || dc != 0));
        bool diagonal = dr != 0 && dc != 0;
        asv_clock_ += grid_.cell_size * (diagonal ? std::sqrt(2.0) : 1.0) / cfg_.asv_speed;
        asv_cell_ = next;
        sample_current_cell();
        advance_drifters(asv_clock_);
    }

    // Advance every live drifter through its 5-second ticks up to t_limit.
    // Each completed tick logs a track point and yields one flow sample.
    void advance_drifters(double t_limit) {
        for (DrifterState& d : drifters_) {
            while (d.alive) {
                double offset = (d.ticks + 1) * cfg_.drifter.sample_period;
                if (offset > cfg_.drifter.battery_duration + 1e-9) {
                    d.alive = false;  // expired
                    break;
                }
                double next_t = d.deploy_time + offset;
                if (next_t > t_limit + 1e-9) break;  // resumes on a later call
                auto next_pos = rk4_step(truth_, d.pos, cfg_.drifter.sample_period);
                if (!next_pos) {
                    d.alive = false;  // exited S; no sample for the partial tick
                    break;
                }
                TrajectoryPoint prev{next_t - cfg_.drifter.sample_period, d.pos};
                TrajectoryPoint cur{next_t, *next_pos};
                samples_.push_back(drifter_observation(prev, cur, d.id));
                ++log_.drifter_samples;
                emit("TRACK " + std::to_string(d.id) + ' ' + fmt_double(cur.t) + ' ' +
                     fmt_double(cur.pos.x) + ' ' + fmt_double(cur.pos.y));
                d.pos = *next_pos;
                ++d.ticks;
            }
        }
    }

    void deploy_drifter() {
        asv_clock_ += cfg_.deploy_duration;
        DrifterState d{next_drifter_id_++, grid_.cell_center(asv_cell_), asv_clock_};
        emit("DEPLOY " + fmt_double(asv_clock_) + ' ' + std::to_string(d.id) + ' ' +
             std::to_string(asv_cell_.row) + ' ' + std::to_string(asv_cell_.col));
        emit("TRACK " + std::to_string(d.id) + ' ' + fmt_double(d.deploy_time) + ' ' +
             fmt_double(d.pos.x) + ' ' + fmt_double(d.pos.y));
        log_.deploys.push_back({asv_clock_, d.id, asv_cell_.row, asv_cell_.col});
        drifters_.push_back(d);
        --drifters_remaining_;
        advance_drifters(asv_clock_);
    }

    void assimilation_update(int idx, double t_now) {
        const std::vector<Sample>* used = &samples_;
        std::vector<Sample> filtered;
        if (!cfg_.assimilate_after_budget) {
            for (const Sample& s : samples_)
                if (s.from_asv() || s.time <= cfg_.asv_budget) filtered.push_back(s);
            used = &filtered;
        }
        GpModel model = fit(*used, grid_, cfg_.gp);
        pred_ = predict(model);

        std::vector<std::vector<Trajectory>> ensembles;
        for (const DrifterState& d : drifters_) {
            if (!d.alive) continue;
            double remaining = cfg_.drifter.battery_duration - (t_now - d.deploy_time);
            if (remaining < cfg_.proposal.trajectory_dt) continue;
            ensembles.push_back(ensemble_trajectories(
                pred_.mean, d.pos, cfg_.drifter, remaining, cfg_.proposal.trajectory_dt,
                derive_seed(cfg_.rng_seed, kEnsembleStream,
                            static_cast<std::uint64_t>(idx) * 4096 + d.id)));
        }
        reward_ = reward_map(pred_.variance, grid_, ensembles, cfg_.drifter.ensemble_size);

        RmseResult rm = rmse_field(pred_.mean, truth_);
        rmse_map_ = std::move(rm.per_cell);
        emit("UPDATE " + std::to_string(idx) + ' ' + fmt_double(t_now) + ' ' +
             fmt_double(rm.aggregate) + ' ' + std::to_string(asv_cell_.row) + ' ' +
             std::to_string(asv_cell_.col));
        emit("RMSE " + fmt_double(t_now) + ' ' + fmt_double(rm.aggregate));
        log_.updates.push_back({idx, t_now, rm.aggregate, asv_cell_.row, asv_cell_.col});
    }

    void finalize() {
        emit("SAMPLE_SUMMARY asv " + std::to_string(log_.asv_samples) + " drifter " +
             std::to_string(log_.drifter_samples) + " total " +
             std::to_string(log_.asv_samples + log_.drifter_samples));
        log_.mean_field = std::move(pred_.mean);
        log_.variance = std::move(pred_.variance);
        log_.rmse_map = std::move(rmse_map_);
    }

    const FlowField& truth_;
    const ExperimentConfig& cfg_;
    GridSpec grid_;
    Rng sensor_rng_;

    double asv_clock_ = 0.0;
    Cell asv_cell_{0, 0};
    std::vector<Sample> samples_;
    std::vector<DrifterState> drifters_;
    int drifters_remaining_ = 0;
    int next_drifter_id_ = 0;

    GpPrediction pred_;
    RewardMap reward_;
    Field2d rmse_map_;
    RunLog log_;
};

RunLog Runner::run_adaptive() {
    sample_current_cell();  // the ASV starts on, and measures, cell (0,0)

    Cell target{static_cast<int>(std::llround(cfg_.initial_leg_fraction * (grid_.rows - 1))),
                static_cast<int>(std::llround(cfg_.initial_leg_fraction * (grid_.cols - 1)))};
    while (asv_cell_ != target && asv_clock_ < cfg_.asv_budget) {
        auto sgn = [](int d) { return (d > 0) - (d < 0); };
        step_to({asv_cell_.row + sgn(target.row - asv_cell_.row),
                 asv_cell_.col + sgn(target.col - asv_cell_.col)});
    }

    std::vector<Cell> pending;
    size_t pending_pos = 0;
    std::optional<ProposalPoint> pending_deploy;
    int update_idx = 0;

    for (;;) {
        const int u = update_idx++;
        assimilation_update(u, asv_clock_);
        if (asv_clock_ >= cfg_.asv_budget) break;

        if (pending_pos >= pending.size()) {
            // Decision point: plan fresh against the new reward map.
            ValueFunction value =
                value_iteration({reward_, cfg_.gamma}, cfg_.vi_tol, cfg_.vi_max_iter);
            std::vector<ProposalPoint> proposals;
            if (drifters_remaining_ > 0)
                proposals = generate_proposals(reward_, pred_.mean, cfg_.proposal,
                                               derive_seed(cfg_.rng_seed, kProposalStream, u));
            if (cfg_.log_proposals)
                for (const ProposalPoint& p : proposals)
                    emit("PROPOSAL " + std::to_string(u) + ' ' + std::to_string(p.position.row) +
                         ' ' + std::to_string(p.position.col) + ' ' + fmt_double(p.score));

            DecisionInput input{reward_,   std::move(value), asv_cell_,
                                proposals, drifters_remaining_, cfg_.b_n,
                                cfg_.f_n,  cfg_.gamma,        cfg_.consumption};
            Decision d = decide(input);
            int chosen_row = -1, chosen_col = -1;
            if (d.kind == DecisionKind::Deploy) {
                chosen_row = d.proposal->position.row;
                chosen_col = d.proposal->position.col;
            }
            emit("DECISION " + std::to_string(u) + ' ' +
                 (d.kind == DecisionKind::Deploy ? "DEPLOY" : "SAMPLE") + ' ' +
                 fmt_double(d.comparison_score) + ' ' + fmt_double(d.best_proposal_score) + ' ' +
                 std::to_string(chosen_row) + ' ' + std::to_string(chosen_col));
            log_.decisions.push_back({u, d.kind, d.comparison_score, d.best_proposal_score,
                                      chosen_row, chosen_col});

            pending = std::move(d.path);
            pending_pos = 0;
            pending_deploy = d.kind == DecisionKind::Deploy ? d.proposal : std::nullopt;
            if (pending.empty()) {  // proposal under the ASV: deploy without moving
                if (pending_deploy) {
                    deploy_drifter();
                    pending_deploy.reset();
                }
                continue;
            }
        }

        int walked = 0;
        while (walked < cfg_.f_n && pending_pos < pending.size() &&
               asv_clock_ < cfg_.asv_budget) {
            step_to(pending[pending_pos]);
            ++pending_pos;
            ++walked;
        }
        if (pending_pos >= pending.size() && pending_deploy) {
            deploy_drifter();
            pending_deploy.reset();
        }
    }

    // After the ASV budget the deployed drifters keep sampling until they
    // exit or expire; their data folds into one final update.
    long long drifter_samples_before = log_.drifter_samples;
    advance_drifters(std::numeric_limits<double>::infinity());
    if (log_.drifter_samples > drifter_samples_before) {
        double t_end = asv_clock_;
        for (const DrifterState& d : drifters_)
            t_end = std::max(t_end, d.deploy_time + d.ticks * cfg_.drifter.sample_period);
        assimilation_update(update_idx++, t_end);
    }

    finalize();
    return std::move(log_);
}

RunLog Runner::run_lawnmower() {
    sample_current_cell();

    int steps_since_update = 0;
    int update_idx = 0;
    bool out_of_budget = false;
    for (int row = 0; row < grid_.rows && !out_of_budget; ++row) {
        // Serpentine: even rows sweep east, odd rows sweep west; the first
        // cell of each row is entered by the northward step from the row
        // below (except the starting cell).
        std::vector<Cell> row_cells;
        if (row % 2 == 0)
            for (int col = 0; col < grid_.cols; ++col) row_cells.push_back({row, col});
        else
            for (int col = grid_.cols - 1; col >= 0; --col) row_cells.push_back({row, col});
        for (Cell c : row_cells) {
            if (c == asv_cell_ && row == 0 && c.col == 0) continue;  // starting cell
            if (asv_clock_ >= cfg_.asv_budget) {
                out_of_budget = true;
                break;
            }
            step_to(c);
            if (++steps_since_update == cfg_.f_n) {
                assimilation_update(update_idx++, asv_clock_);
                steps_since_update = 0;
            }
        }
    }
    if (steps_since_update > 0 || update_idx == 0) assimilation_update(update_idx++, asv_clock_);

    finalize();
    return std::move(log_);
}

}  // namespace

RunLog run_experiment(const FlowField& truth, const ExperimentConfig& cfg) {
    return Runner(truth, cfg).run_adaptive();
}

RunLog run_lawnmower(const FlowField& truth, const ExperimentConfig& cfg) {
    return Runner(truth, cfg).run_lawnmower();
}

std::vector<BatchRun> batch_run(const std::vector<BatchField>& fields,
                                const std::vector<ExperimentConfig>& cfgs, int jobs) {
    std::vector<BatchRun> out(fields.size() * cfgs.size());
    if (out.empty()) return out;

    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            size_t k = cursor.fetch_add(1);
            if (k >= out.size()) return;
            try {
                size_t fi = k / cfgs.size();
                size_t ci = k % cfgs.size();
                const ExperimentConfig& cfg = cfgs[ci];
                RunLog log = cfg.mode == SurveyMode::Lawnmower
                                 ? run_lawnmower(fields[fi].field, cfg)
                                 : run_experiment(fields[fi].field, cfg);
                log.header.insert(log.header.begin(), {"field_id", fields[fi].id});
                out[k] = {fields[fi].id, cfg.cfg_id, cfg.rng_seed, std::move(log)};
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    unsigned hw = std::thread::hardware_concurrency();
    size_t n_threads = jobs > 0 ? static_cast<size_t>(jobs) : std::max(1u, hw);
    n_threads = std::min(n_threads, out.size());
    std::vector<std::thread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

TrendFit bootstrap_trend(std::span<const std::pair<double, double>> points, int n_boot,
                         std::uint64_t seed) {
    if (points.size() < 2) throw ConfigInvalid("bootstrap_trend needs at least 2 points");
    if (n_boot < 1) throw ConfigInvalid("bootstrap_trend needs n_boot >= 1");

    auto fit_line = [](std::span<const std::pair<double, double>> pts,
                       double& slope, double& intercept) -> bool {
        double n = static_cast<double>(pts.size());
        double st = 0, sy = 0;
        for (auto [t, y] : pts) {
            st += t;
            sy += y;
        }
        double mt = st / n, my = sy / n;
        double sxx = 0, sxy = 0;
        for (auto [t, y] : pts) {
            sxx += (t - mt) * (t - mt);
            sxy += (t - mt) * (y - my);
        }
        if (sxx <= 0.0) return false;  // fewer than 2 distinct ts
        slope = sxy / sxx;
        intercept = my - slope * mt;
        return true;
    };

    TrendFit trend;
    if (!fit_line(points, trend.slope, trend.intercept))
        throw ConfigInvalid("bootstrap_trend needs at least 2 distinct ts");
    trend.resamples = n_boot;

    Rng rng(seed);
    std::vector<std::pair<double, double>> resample(points.size());
    std::vector<double> slopes, intercepts;
    slopes.reserve(n_boot);
    intercepts.reserve(n_boot);
    for (int b = 0; b < n_boot; ++b) {
        for (auto& p : resample) p = points[rng.uniform_index(points.size())];
        double s, c;
        if (fit_line(resample, s, c)) {
            slopes.push_back(s);
            intercepts.push_back(c);
        }
    }
    trend.valid = static_cast<int>(slopes.size());

    auto quantile = [](std::vector<double> v, double q) {
        std::sort(v.begin(), v.end());
        double pos = q * (v.size() - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, v.size() - 1);
        double frac = pos - lo;
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };

    if (trend.valid > 0) {
        trend.slope_lo = std::min(quantile(slopes, 0.025), trend.slope);
        trend.slope_hi = std::max(quantile(slopes, 0.975), trend.slope);
    } else {
        trend.slope_lo = trend.slope_hi = trend.slope;
    }

    std::vector<double> ts;
    for (auto [t, y] : points) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    std::vector<double> line_vals(slopes.size());
    for (double t : ts) {
        double fit_t = trend.slope * t + trend.intercept;
        double lo = fit_t, hi = fit_t;
        if (!slopes.empty()) {
            for (size_t b = 0; b < slopes.size(); ++b) line_vals[b] = slopes[b] * t + intercepts[b];
            lo = std::min(quantile(line_vals, 0.025), fit_t);
            hi = std::max(quantile(line_vals, 0.975), fit_t);
        }
        trend.band.push_back({t, fit_t, lo, hi});
    }
    return trend;
}

}  // namespace driftplan
