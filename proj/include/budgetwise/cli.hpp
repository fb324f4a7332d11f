#pragma once

#include "budgetwise/campaign.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace budgetwise {

// A raw setting and where it came from ("--budget" or "run.conf:3").
struct SettingValue {
    std::string value;
    std::string origin;
};

using SettingMap = std::map<std::string, SettingValue>;

// Flat `key = value` file; '#' starts a comment. Keys use the flag spelling
// without dashes ("alpha-s", "alpha_s" is accepted too).
SettingMap read_config_file(const std::string& path);

struct SimulateSettings {
    std::string surface = "preset:log-default";
    std::vector<double> budgets{5000.0};
    std::vector<int> steps{8};
    double alpha_c = 1.0;
    std::vector<double> alpha_s{12.0};
    std::vector<std::uint64_t> seeds{0};
    std::vector<MethodSpec> methods;  // adaptive first, then baselines
    int m_count = 20;
    double noise_std = 0.005;
    Strides strides;
    bool spend_remainder = false;
    int jobs = 1;
    std::string out = "results.csv";
    std::string trajectories_dir;
    std::optional<Strategy> initial;  // preset default when unset
    double gp_learning_rate = 0.1;
    int gp_iterations = 200;
    GPOptimizer gp_optimizer = GPOptimizer::adam;
    SamplingMode sampling = SamplingMode::uniform;
};

// Throws InvalidArgument naming the setting and its origin.
SimulateSettings parse_simulate_settings(const SettingMap& settings);

// The sweep a simulate invocation runs: surface x alpha_s x budget x steps,
// each expanded over the methods.
std::vector<SweepJob> build_sweep_jobs(const SimulateSettings& settings);

std::string summary_path(const std::string& out);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace budgetwise
