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

#pragma once

#include "cdma/receiver.hpp"
#include "cdma/signal_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cdma {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentKind { convergence, channel_mse, sweep_ebn0, sweep_users };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

/// Candidate step sizes searched per receiver; each list is kept sorted.
struct StepGrid {
    std::vector<double> mu_w;
    std::vector<double> mu_lambda;
    std::vector<double> mu_h;
};

struct ExperimentConfig {
    int n = 16;
    int lp = 9;
    int k_users = 8;
    std::vector<double> ebn0_db{12.0};
    std::vector<int> users_sweep{2, 4, 6, 8, 10};
    long packet_len = 1500;
    long training_len = 150;
    int trials = 20;
    int full_scale_trials = 100;
    std::vector<ReceiverKind> receivers{ReceiverKind::linear, ReceiverKind::sic, ReceiverKind::pic,
                                        ReceiverKind::jo_sic, ReceiverKind::jo_pic};
    int pic_stages = 3;
    std::map<ReceiverKind, StepGrid> grids = default_grids();
    std::uint64_t master_seed = 1;
    ExperimentKind experiment = ExperimentKind::convergence;
    int pilot_trials = 5;
    double power_std_db = 3.0;
    int nonzero_paths = 3;
    int max_spacing = 3;
    FirstPath first_path = FirstPath::pinned;
    bool fixed_codes = false;
    bool adapt_ic_in_dd = true;
    double amplitude_smoothing = 0.05;
    /// Trailing window (symbols) over which the final channel MSE is averaged.
    long mse_window = 100;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;

    static std::map<ReceiverKind, StepGrid> default_grids();

    /// Throws ConfigError on any inconsistency.
    void validate() const;
};

/// Parses the flat `key = value` format. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

}  // namespace cdma
