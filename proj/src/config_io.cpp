#include "driftplan/config_io.hpp"

#include <fstream>
#include <sstream>

#include "driftplan/errors.hpp"
#include "driftplan/textio.hpp"

namespace driftplan {

namespace {

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("config key " + key + ": not an integer: '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("config key " + key + ": not a number: '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("config key " + key + ": not an unsigned integer: '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigInvalid("config key " + key + ": expected 0/1/true/false, got '" + value + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> serialize_config(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto add = [&](const char* key, std::string value) { kv.emplace_back(key, std::move(value)); };
    add("cfg_id", cfg.cfg_id);
    add("mode", cfg.mode == SurveyMode::Lawnmower ? "lawnmower" : "adaptive");
    add("f_n", std::to_string(cfg.f_n));
    add("b_n", std::to_string(cfg.b_n));
    add("n_drifters", std::to_string(cfg.n_drifters));
    add("gamma", fmt_double(cfg.gamma));
    add("kernel_sigma", fmt_double(cfg.gp.sigma));
    add("length_scale", fmt_double(cfg.gp.length_scale));
    add("noise_variance", fmt_double(cfg.gp.noise_variance));
    add("asv_speed", fmt_double(cfg.asv_speed));
    add("asv_budget", fmt_double(cfg.asv_budget));
    add("drifter_battery", fmt_double(cfg.drifter.battery_duration));
    add("drifter_sample_period", fmt_double(cfg.drifter.sample_period));
    add("drifter_seed_radius", fmt_double(cfg.drifter.seed_radius));
    add("drifter_ensemble", std::to_string(cfg.drifter.ensemble_size));
    add("deploy_duration", fmt_double(cfg.deploy_duration));
    add("proposal_samples", std::to_string(cfg.proposal.n_samples));
    add("proposal_nms_keep", std::to_string(cfg.proposal.nms_keep));
    add("proposal_top_k", std::to_string(cfg.proposal.top_k));
    add("proposal_suppression_radius", fmt_double(cfg.proposal.suppression_radius));
    add("proposal_buffer_width", std::to_string(cfg.proposal.buffer_width));
    add("proposal_noise_sigma", fmt_double(cfg.proposal.noise_sigma));
    add("proposal_battery", fmt_double(cfg.proposal.battery));
    add("proposal_dt", fmt_double(cfg.proposal.trajectory_dt));
    add("rng_seed", std::to_string(cfg.rng_seed));
    add("initial_leg_fraction", fmt_double(cfg.initial_leg_fraction));
    add("sensor_noise_std", fmt_double(cfg.sensor_noise_std));
    add("vi_tol", fmt_double(cfg.vi_tol));
    add("vi_max_iter", std::to_string(cfg.vi_max_iter));
    add("assimilate_after_budget", cfg.assimilate_after_budget ? "1" : "0");
    add("consumption", cfg.consumption == RewardConsumption::Negate ? "negate" : "zero");
    add("log_proposals", cfg.log_proposals ? "1" : "0");
    return kv;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "cfg_id") cfg.cfg_id = value;
    else if (key == "mode") {
        if (value == "adaptive") cfg.mode = SurveyMode::Adaptive;
        else if (value == "lawnmower") cfg.mode = SurveyMode::Lawnmower;
        else throw ConfigInvalid("config key mode: expected adaptive|lawnmower, got '" + value + "'");
    }
    else if (key == "f_n") cfg.f_n = parse_int(key, value);
    else if (key == "b_n") cfg.b_n = parse_int(key, value);
    else if (key == "n_drifters") cfg.n_drifters = parse_int(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "kernel_sigma") cfg.gp.sigma = parse_double(key, value);
    else if (key == "length_scale") cfg.gp.length_scale = parse_double(key, value);
    else if (key == "noise_variance") cfg.gp.noise_variance = parse_double(key, value);
    else if (key == "asv_speed") cfg.asv_speed = parse_double(key, value);
    else if (key == "asv_budget") cfg.asv_budget = parse_double(key, value);
    else if (key == "drifter_battery") cfg.drifter.battery_duration = parse_double(key, value);
    else if (key == "drifter_sample_period") cfg.drifter.sample_period = parse_double(key, value);
    else if (key == "drifter_seed_radius") cfg.drifter.seed_radius = parse_double(key, value);
    else if (key == "drifter_ensemble") cfg.drifter.ensemble_size = parse_int(key, value);
    else if (key == "deploy_duration") cfg.deploy_duration = parse_double(key, value);
    else if (key == "proposal_samples") cfg.proposal.n_samples = parse_int(key, value);
    else if (key == "proposal_nms_keep") cfg.proposal.nms_keep = parse_int(key, value);
    else if (key == "proposal_top_k") cfg.proposal.top_k = parse_int(key, value);
    else if (key == "proposal_suppression_radius")
        cfg.proposal.suppression_radius = parse_double(key, value);
    else if (key == "proposal_buffer_width") cfg.proposal.buffer_width = parse_int(key, value);
    else if (key == "proposal_noise_sigma") cfg.proposal.noise_sigma = parse_double(key, value);
    else if (key == "proposal_battery") cfg.proposal.battery = parse_double(key, value);
    else if (key == "proposal_dt") cfg.proposal.trajectory_dt = parse_double(key, value);
    else if (key == "rng_seed") cfg.rng_seed = parse_u64(key, value);
    else if (key == "initial_leg_fraction") cfg.initial_leg_fraction = parse_double(key, value);
    else if (key == "sensor_noise_std") cfg.sensor_noise_std = parse_double(key, value);
    else if (key == "vi_tol") cfg.vi_tol = parse_double(key, value);
    else if (key == "vi_max_iter") cfg.vi_max_iter = parse_int(key, value);
    else if (key == "assimilate_after_budget") cfg.assimilate_after_budget = parse_bool(key, value);
    else if (key == "consumption") {
        if (value == "zero") cfg.consumption = RewardConsumption::Zero;
        else if (value == "negate") cfg.consumption = RewardConsumption::Negate;
        else throw ConfigInvalid("config key consumption: expected zero|negate, got '" + value + "'");
    }
    else if (key == "log_proposals") cfg.log_proposals = parse_bool(key, value);
    else if (key == "field_id") { /* informational header key, not a tunable */ }
    else throw ConfigInvalid("unknown config key: '" + key + "'");
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file: " + path.string());
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            throw ConfigInvalid(path.string() + ":" + std::to_string(line_no) +
                                ": expected key=value");
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(start, eq - start));
        std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const ConfigInvalid& e) {
            throw ConfigInvalid(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

}  // namespace driftplan
