/*
 * Copyright 2026 The cdma-jic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// cdma-jic: Monte Carlo experiments for joint adaptive interference
// cancellation receivers.

#include "cdma/config.hpp"
#include "cdma/harness.hpp"
#include "cdma/output.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv)
{
    CLI::App app{"DS-CDMA joint interference cancellation simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one experiment and write CSV + manifest");
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::string out_dir = "results";
    std::optional<std::string> experiment;
    bool full_scale = false;
    run->add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "master seed (overrides config)");
    run->add_option("--trials", trials, "evaluation trials per point (overrides config)")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--experiment", experiment, "convergence | channel-mse | sweep-ebn0 | sweep-users")
        ->check(CLI::IsMember({"convergence", "channel-mse", "sweep-ebn0", "sweep-users"}));
    run->add_option("--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    run->add_flag("--full-scale", full_scale, "use full_scale_trials (100 by default) instead of trials");

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = cdma::load_config(config_path);
        if (seed) {
            config.master_seed = *seed;
        }
        if (full_scale) {
            config.trials = config.full_scale_trials;
        }
        if (trials) {
            config.trials = *trials;
        }
        if (threads) {
            config.threads = *threads;
        }
        if (experiment) {
            config.experiment = *cdma::parse_experiment(*experiment);
        }
        config.validate();

        const auto t0 = std::chrono::steady_clock::now();
        const auto result = cdma::run_experiment(config);
        const auto paths = cdma::write_outputs(result, out_dir);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& p : paths) {
            std::cout << "wrote " << p.string() << '\n';
        }
        std::cout << "done in " << secs << " s\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
