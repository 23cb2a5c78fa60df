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

#include <cstdint>
#include <random>

namespace cdma {

using Rng = std::mt19937_64;

/// Named sub-streams of one trial seed. Each stream gets an independent engine
/// so that, e.g., changing the noise draw leaves codes and channels untouched.
enum class Stream : std::uint64_t {
    codes = 1,
    channels = 2,
    powers = 3,
    symbols = 4,
    noise = 5,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic child seed from a parent seed and a label.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label);

Rng make_stream(std::uint64_t trial_seed, Stream stream);

}  // namespace cdma
