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

#include "cdma/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

namespace cdma {

namespace {

constexpr std::uint64_t kEvaluationLabel = 0x6576616c;  // "eval"
constexpr std::uint64_t kPilotLabel = 0x70696c6f;       // "pilo"
constexpr std::uint64_t kFixedCodeLabel = 0x636f6465;   // "code"

}  // namespace

std::uint64_t evaluation_seed(const ExperimentConfig& config, int trial)
{
    return derive_seed(derive_seed(config.master_seed, kEvaluationLabel), static_cast<std::uint64_t>(trial));
}

std::uint64_t pilot_seed(const ExperimentConfig& config, int trial)
{
    return derive_seed(derive_seed(config.master_seed, kPilotLabel), static_cast<std::uint64_t>(trial));
}

TrialData generate_trial(const ExperimentConfig& config, const Scenario& scenario, std::uint64_t trial_seed)
{
    const int k = scenario.k_users;
    Rng codes_rng = config.fixed_codes ? Rng(derive_seed(config.master_seed, kFixedCodeLabel))
                                       : make_stream(trial_seed, Stream::codes);
    Rng channel_rng = make_stream(trial_seed, Stream::channels);
    Rng power_rng = make_stream(trial_seed, Stream::powers);
    Rng symbol_rng = make_stream(trial_seed, Stream::symbols);
    Rng noise_rng = make_stream(trial_seed, Stream::noise);

    const ChannelOptions ch_opts{config.lp, config.nonzero_paths, config.max_spacing, config.first_path};
    const auto amps = generate_amplitudes(power_rng, k, config.power_std_db);

    TrialData data;
    data.noise_var = noise_variance(scenario.ebn0_db);
    for (int u = 0; u < k; ++u) {
        auto code = SpreadingCode::random(codes_rng, config.n);
        auto channel = generate_channel(channel_rng, ch_opts);
        data.users.emplace_back(amps[static_cast<std::size_t>(u)], std::move(code), std::move(channel));
        data.symbols.push_back(generate_symbols(symbol_rng, static_cast<std::size_t>(config.packet_len)));
    }
    data.received = synthesize_packet(data.users, data.symbols, config.packet_len, data.noise_var, noise_rng);
    return data;
}

double channel_mse(const CVector& h_hat, const CVector& h)
{
    const double hh = h_hat.squaredNorm();
    const double h2 = h.squaredNorm();
    if (h2 == 0.0) {
        throw std::invalid_argument("reference channel is zero");
    }
    if (hh == 0.0) {
        return 1.0;
    }
    // Optimal c = (h_hat^H h) / ||h_hat||^2 leaves the orthogonal residual.
    const double proj = std::norm(h_hat.dot(h)) / (hh * h2);
    return std::max(0.0, 1.0 - proj);
}

ReceiverRun run_receiver(const ExperimentConfig& config,
                         const TrialData& data,
                         ReceiverKind kind,
                         const StepSizes& steps)
{
    const int k = static_cast<int>(data.users.size());
    const long len = static_cast<long>(data.received.size());
    PacketSetup setup;
    setup.training_len = config.training_len;
    setup.packet_len = len;
    for (int u = 0; u < k; ++u) {
        const auto& user = data.users[static_cast<std::size_t>(u)];
        setup.codes.push_back(build_constraint_matrices(user.code, user.channel.lp()));
        const auto& sym = data.symbols[static_cast<std::size_t>(u)];
        setup.training.emplace_back(sym.begin(), sym.begin() + config.training_len);
        setup.training_powers.push_back(user.amplitude * user.amplitude);
    }
    ReceiverOptions opts;
    opts.kind = kind;
    opts.steps = steps;
    opts.pic_stages = config.pic_stages;
    opts.amplitude_smoothing = config.amplitude_smoothing;
    opts.adapt_ic_in_dd = config.adapt_ic_in_dd;
    Receiver rx(opts, std::move(setup));

    ReceiverRun run;
    run.bit_errors.resize(static_cast<std::size_t>(len));
    run.channel_mse.resize(static_cast<std::size_t>(len));
    double dd_errors = 0.0;
    for (long i = 0; i < len; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        rx.step(i, data.received[ui], i + 1 < len ? &data.received[ui + 1] : nullptr);
        int errors = 0;
        double mse = 0.0;
        for (int u = 0; u < k; ++u) {
            const auto uu = static_cast<std::size_t>(u);
            const Complex d = rx.decision(u, i);
            const Complex b = data.symbols[uu][ui];
            errors += (d.real() != b.real()) + (d.imag() != b.imag());
            mse += channel_mse(rx.channel_estimate(u), data.users[uu].channel.taps);
        }
        run.bit_errors[ui] = errors / (2.0 * k);
        run.channel_mse[ui] = mse / k;
        if (i >= config.training_len) {
            dd_errors += errors;
        }
    }
    run.ber_final = dd_errors / (2.0 * k * static_cast<double>(len - config.training_len));
    const long window = std::min(config.mse_window, len);
    double tail = 0.0;
    for (long i = len - window; i < len; ++i) {
        tail += run.channel_mse[static_cast<std::size_t>(i)];
    }
    run.mse_final = tail / static_cast<double>(window);
    return run;
}

std::map<ReceiverKind, ReceiverRun> run_trial(const ExperimentConfig& config,
                                              const Scenario& scenario,
                                              std::uint64_t trial_seed,
                                              const StepMap& steps)
{
    const auto data = generate_trial(config, scenario, trial_seed);
    std::map<ReceiverKind, ReceiverRun> out;
    for (auto kind : config.receivers) {
        out[kind] = run_receiver(config, data, kind, steps.at(kind));
    }
    return out;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn)
{
    if (count <= 0) {
        return;
    }
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    int failed_index = count;
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(mu);
                        // Report the lowest failing index regardless of timing.
                        if (i < failed_index) {
                            failed_index = i;
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

StepChoice optimize_step_sizes(const ExperimentConfig& config, const Scenario& scenario, ReceiverKind kind)
{
    const auto& grid = config.grids.at(kind);
    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto mu_w = sorted(grid.mu_w);
    const auto mu_h = sorted(grid.mu_h);
    auto mu_lambda = sorted(grid.mu_lambda);
    if (!is_joint(kind)) {
        mu_lambda.resize(1);
    }
    std::vector<StepSizes> candidates;
    for (double w : mu_w) {
        for (double l : mu_lambda) {
            for (double h : mu_h) {
                candidates.push_back({w, l, h});
            }
        }
    }
    if (candidates.size() == 1) {
        return {candidates.front(), std::nan(""), std::nan("")};
    }

    std::vector<TrialData> pilots(static_cast<std::size_t>(config.pilot_trials));
    parallel_for(config.pilot_trials, config.threads, [&](int t) {
        const auto seed = pilot_seed(config, t);
        try {
            pilots[static_cast<std::size_t>(t)] = generate_trial(config, scenario, seed);
        } catch (const std::exception& e) {
            throw TrialError(seed, e.what());
        }
    });

    std::vector<StepChoice> scored(candidates.size());
    parallel_for(static_cast<int>(candidates.size()), config.threads, [&](int c) {
        const auto uc = static_cast<std::size_t>(c);
        double ber = 0.0;
        double mse = 0.0;
        for (int t = 0; t < config.pilot_trials; ++t) {
            try {
                const auto run = run_receiver(config, pilots[static_cast<std::size_t>(t)], kind, candidates[uc]);
                ber += run.ber_final;
                mse += run.mse_final;
            } catch (const std::exception& e) {
                throw TrialError(pilot_seed(config, t), e.what());
            }
        }
        scored[uc] = {candidates[uc], ber / config.pilot_trials, mse / config.pilot_trials};
    });

    // Candidates are enumerated in lexicographic order, so the first minimum
    // of (ber, mse) is also the smallest step-size triple among ties.
    std::size_t best = 0;
    for (std::size_t c = 1; c < scored.size(); ++c) {
        const auto key = [&](std::size_t i) {
            const double ber = std::isfinite(scored[i].pilot_ber) ? scored[i].pilot_ber : 1.0;
            const double mse = std::isfinite(scored[i].pilot_mse) ? scored[i].pilot_mse : 1e300;
            return std::make_tuple(ber, mse);
        };
        if (key(c) < key(best)) {
            best = c;
        }
    }
    return scored[best];
}

Cell summarize(const std::vector<double>& values)
{
    Cell c;
    c.trials = static_cast<int>(values.size());
    if (values.empty()) {
        return c;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    c.mean = sum / c.trials;
    if (c.trials > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - c.mean) * (v - c.mean);
        }
        c.stderr_ = std::sqrt(ss / (c.trials - 1) / c.trials);
    }
    return c;
}

ScenarioResult run_scenario(const ExperimentConfig& config, const Scenario& scenario)
{
    config.validate();
    ScenarioResult out;
    out.scenario = scenario;
    StepMap steps;
    for (auto kind : config.receivers) {
        out.chosen[kind] = optimize_step_sizes(config, scenario, kind);
        steps[kind] = out.chosen[kind].steps;
    }
    std::vector<std::map<ReceiverKind, ReceiverRun>> per_trial(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, config.threads, [&](int t) {
        const auto seed = evaluation_seed(config, t);
        try {
            per_trial[static_cast<std::size_t>(t)] = run_trial(config, scenario, seed, steps);
        } catch (const std::exception& e) {
            throw TrialError(seed, e.what());
        }
    });
    for (auto kind : config.receivers) {
        auto& runs = out.runs[kind];
        for (auto& trial : per_trial) {
            runs.push_back(std::move(trial.at(kind)));
        }
    }
    return out;
}

std::vector<Scenario> scenarios(const ExperimentConfig& config)
{
    std::vector<Scenario> out;
    switch (config.experiment) {
    case ExperimentKind::convergence:
    case ExperimentKind::channel_mse:
        out.push_back({config.k_users, config.ebn0_db.front()});
        break;
    case ExperimentKind::sweep_ebn0:
        for (double e : config.ebn0_db) {
            out.push_back({config.k_users, e});
        }
        break;
    case ExperimentKind::sweep_users:
        for (int k : config.users_sweep) {
            out.push_back({k, config.ebn0_db.front()});
        }
        break;
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    config.validate();
    ExperimentResult out;
    out.config = config;
    for (const auto& s : scenarios(config)) {
        out.results.push_back(run_scenario(config, s));
    }
    return out;
}

}  // namespace cdma
