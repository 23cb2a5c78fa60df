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

// Monte Carlo driver: packet generation from split seeds, per-receiver runs
// on identical data, pilot-based step-size selection and aggregation.

#include "cdma/config.hpp"
#include "cdma/receiver.hpp"
#include "cdma/signal_model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdma {

/// Raised when a trial throws; carries the offending trial seed.
class TrialError : public std::runtime_error {
public:
    TrialError(std::uint64_t seed, const std::string& what)
        : std::runtime_error("trial with seed " + std::to_string(seed) + " failed: " + what), seed_(seed)
    {
    }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// One operating point of an experiment.
struct Scenario {
    int k_users = 8;
    double ebn0_db = 12.0;
};

/// One packet: users, their symbols and the received windows.
struct TrialData {
    std::vector<UserConfig> users;
    std::vector<SymbolStream> symbols;
    std::vector<CVector> received;
    double noise_var = 0.0;
};

TrialData generate_trial(const ExperimentConfig& config, const Scenario& scenario, std::uint64_t trial_seed);

/// min over complex c of ||c h_hat - h||^2 / ||h||^2.
double channel_mse(const CVector& h_hat, const CVector& h);

struct ReceiverRun {
    std::vector<double> bit_errors;   ///< per symbol: fraction of erroneous bits over users
    std::vector<double> channel_mse;  ///< per symbol: mean over users
    double ber_final = 0.0;           ///< over the decision-directed segment
    double mse_final = 0.0;           ///< mean over the trailing mse_window symbols
};

ReceiverRun run_receiver(const ExperimentConfig& config,
                         const TrialData& data,
                         ReceiverKind kind,
                         const StepSizes& steps);

using StepMap = std::map<ReceiverKind, StepSizes>;

std::map<ReceiverKind, ReceiverRun> run_trial(const ExperimentConfig& config,
                                              const Scenario& scenario,
                                              std::uint64_t trial_seed,
                                              const StepMap& steps);

std::uint64_t evaluation_seed(const ExperimentConfig& config, int trial);
std::uint64_t pilot_seed(const ExperimentConfig& config, int trial);

struct StepChoice {
    StepSizes steps;
    double pilot_ber = 0.0;
    double pilot_mse = 0.0;
};

/// Grid search on pilot trials (seeds disjoint from evaluation trials).
/// Minimises mean pilot BER; exact ties go to the lower channel MSE, then to
/// the lexicographically smallest (mu_w, mu_lambda, mu_h). Step sizes that a
/// receiver ignores are pinned to the smallest grid value.
StepChoice optimize_step_sizes(const ExperimentConfig& config, const Scenario& scenario, ReceiverKind kind);

/// Runs fn(0..count-1) on `threads` workers (0 = hardware concurrency).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

struct Cell {
    double mean = 0.0;
    double stderr_ = 0.0;
    int trials = 0;
};

Cell summarize(const std::vector<double>& values);

struct ScenarioResult {
    Scenario scenario;
    std::map<ReceiverKind, StepChoice> chosen;
    /// Per receiver, per evaluation trial.
    std::map<ReceiverKind, std::vector<ReceiverRun>> runs;
};

ScenarioResult run_scenario(const ExperimentConfig& config, const Scenario& scenario);

/// Scenarios swept by the configured experiment kind.
std::vector<Scenario> scenarios(const ExperimentConfig& config);

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ScenarioResult> results;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace cdma
