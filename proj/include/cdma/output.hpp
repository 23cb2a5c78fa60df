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

#include "cdma/harness.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cdma {

/// Decimal with 9 significant digits.
std::string format_number(double v);

/// symbol_index,receiver,ber,stderr
std::string convergence_csv(const ExperimentResult& result);
/// symbol_index,receiver,mse,stderr
std::string channel_mse_csv(const ExperimentResult& result);
/// x_value,receiver,ber,stderr,trials
std::string sweep_csv(const ExperimentResult& result);

std::string manifest_text(const ExperimentResult& result);

/// CSV file name for the experiment kind.
std::string csv_name(ExperimentKind kind);

/// Writes the experiment CSV and manifest.txt into out_dir; returns the paths.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& out_dir);

}  // namespace cdma
