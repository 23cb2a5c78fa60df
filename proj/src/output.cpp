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

#include "cdma/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cdma {

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

using Series = std::vector<double> ReceiverRun::*;

std::string per_symbol_csv(const ExperimentResult& result, const char* value_col, Series series)
{
    std::ostringstream o;
    o << "symbol_index,receiver," << value_col << ",stderr\n";
    const auto& sr = result.results.front();
    const long len = result.config.packet_len;
    for (auto kind : result.config.receivers) {
        const auto& runs = sr.runs.at(kind);
        std::vector<double> values(runs.size());
        for (long i = 0; i < len; ++i) {
            for (std::size_t t = 0; t < runs.size(); ++t) {
                values[t] = (runs[t].*series)[static_cast<std::size_t>(i)];
            }
            const auto cell = summarize(values);
            o << (i + 1) << ',' << to_string(kind) << ',' << format_number(cell.mean) << ','
              << format_number(cell.stderr_) << '\n';
        }
    }
    return o.str();
}

}  // namespace

std::string convergence_csv(const ExperimentResult& result)
{
    return per_symbol_csv(result, "ber", &ReceiverRun::bit_errors);
}

std::string channel_mse_csv(const ExperimentResult& result)
{
    return per_symbol_csv(result, "mse", &ReceiverRun::channel_mse);
}

std::string sweep_csv(const ExperimentResult& result)
{
    std::ostringstream o;
    o << "x_value,receiver,ber,stderr,trials\n";
    const bool users = result.config.experiment == ExperimentKind::sweep_users;
    for (const auto& sr : result.results) {
        const double x = users ? sr.scenario.k_users : sr.scenario.ebn0_db;
        for (auto kind : result.config.receivers) {
            std::vector<double> values;
            for (const auto& run : sr.runs.at(kind)) {
                values.push_back(run.ber_final);
            }
            const auto cell = summarize(values);
            o << format_number(x) << ',' << to_string(kind) << ',' << format_number(cell.mean) << ','
              << format_number(cell.stderr_) << ',' << cell.trials << '\n';
        }
    }
    return o.str();
}

std::string manifest_text(const ExperimentResult& result)
{
    std::ostringstream o;
    o << "# cdma-jic run manifest\n"
      << "seed = " << result.config.master_seed << "\n\n"
      << "## config\n"
      << to_text(result.config) << "\n"
      << "## chosen step sizes\n"
      << "# k_users, ebn0_db, receiver: mu_w, mu_lambda, mu_h (pilot ber, pilot mse)\n";
    for (const auto& sr : result.results) {
        for (auto kind : result.config.receivers) {
            const auto& c = sr.chosen.at(kind);
            o << sr.scenario.k_users << ", " << format_number(sr.scenario.ebn0_db) << ", " << to_string(kind)
              << ": " << format_number(c.steps.mu_w) << ", " << format_number(c.steps.mu_lambda) << ", "
              << format_number(c.steps.mu_h) << " (" << format_number(c.pilot_ber) << ", "
              << format_number(c.pilot_mse) << ")\n";
        }
    }
    return o.str();
}

std::string csv_name(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::convergence:
        return "convergence.csv";
    case ExperimentKind::channel_mse:
        return "channel_mse.csv";
    case ExperimentKind::sweep_ebn0:
        return "sweep_ebn0.csv";
    case ExperimentKind::sweep_users:
        return "sweep_users.csv";
    }
    return "result.csv";
}

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);
    std::string csv;
    switch (result.config.experiment) {
    case ExperimentKind::convergence:
        csv = convergence_csv(result);
        break;
    case ExperimentKind::channel_mse:
        csv = channel_mse_csv(result);
        break;
    case ExperimentKind::sweep_ebn0:
    case ExperimentKind::sweep_users:
        csv = sweep_csv(result);
        break;
    }
    const auto csv_path = out_dir / csv_name(result.config.experiment);
    const auto manifest_path = out_dir / "manifest.txt";
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write " + p.string());
        }
        f << text;
    };
    write(csv_path, csv);
    write(manifest_path, manifest_text(result));
    return {csv_path, manifest_path};
}

}  // namespace cdma
