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

// Transmit side and discrete chip-rate channel of a symbol-synchronous QPSK
// DS-CDMA uplink. Everything here produces immutable values; randomness is
// always drawn from an explicit engine.

#include "cdma/rng.hpp"
#include "cdma/types.hpp"

#include <span>
#include <vector>

namespace cdma {

/// Real spreading sequence with chips at +/-1/sqrt(N) (unit energy).
class SpreadingCode {
public:
    /// Validates that every chip has magnitude 1/sqrt(N).
    explicit SpreadingCode(RVector chips);

    static SpreadingCode random(Rng& rng, int n);

    const RVector& chips() const { return chips_; }
    int n() const { return static_cast<int>(chips_.size()); }

private:
    RVector chips_;
};

/// Code matrices mapping a channel vector to the contribution of the
/// current (c), previous (c_prev) and next (c_next) symbol in one
/// M = N + Lp - 1 chip observation window.
struct ConstraintMatrices {
    RMatrix c;
    RMatrix c_prev;
    RMatrix c_next;
    int n = 0;
    int lp = 0;
    int m_dim = 0;
};

ConstraintMatrices build_constraint_matrices(const SpreadingCode& code, int lp);

struct ChannelVector {
    CVector taps;
    int lp() const { return static_cast<int>(taps.size()); }
};

enum class FirstPath {
    pinned,  ///< strongest-path synchronisation: first nonzero tap at delay 0
    random,  ///< first tap uniformly placed so that all paths fit the window
};

struct ChannelOptions {
    int lp = 9;
    int nonzero_paths = 3;
    int max_spacing = 3;
    FirstPath first_path = FirstPath::pinned;
};

/// Sparse tapped-delay-line channel: nonzero_paths complex gains with real and
/// imaginary parts uniform on [-1, 1], spaced 1..max_spacing chips apart,
/// normalised to unit energy.
ChannelVector generate_channel(Rng& rng, const ChannelOptions& opts = {});

/// Log-normal user amplitudes: 10 log10(A_k^2) ~ N(0, std_db^2).
std::vector<double> generate_amplitudes(Rng& rng, int k_users, double std_db = 3.0);

struct UserConfig {
    double amplitude;
    SpreadingCode code;
    ChannelVector channel;

    UserConfig(double amplitude, SpreadingCode code, ChannelVector channel);
};

/// QPSK symbols b in {+-1 +- j}.
using SymbolStream = std::vector<Complex>;

SymbolStream generate_symbols(Rng& rng, std::size_t count);

bool is_qpsk(Complex b);

/// Symbol at index i, or 0 outside [0, size).
Complex symbol_at(const SymbolStream& symbols, long i);

/// Noise variance per complex chip for a given average Eb/N0, assuming unit
/// mean user power: sigma^2 = 10^(-EbN0/10).
double noise_variance(double ebn0_db);

/// Circularly-symmetric complex Gaussian vector with covariance var * I.
CVector complex_noise(Rng& rng, int m_dim, double var);

/// One received window r[i] = sum_k A_k (b[i-1] Cp + b[i] C + b[i+1] Cs) h_k + n[i].
/// With no users the window length cannot be inferred and `empty_m_dim` is
/// used (pure noise).
CVector synthesize_received(std::span<const UserConfig> users,
                            std::span<const SymbolStream> symbols,
                            long i,
                            double noise_var,
                            Rng& rng,
                            int empty_m_dim = 0);

/// All windows of a packet of `packet_len` symbols. Identical to calling
/// synthesize_received for i = 0 .. packet_len-1 with the same engine.
std::vector<CVector> synthesize_packet(std::span<const UserConfig> users,
                                       std::span<const SymbolStream> symbols,
                                       long packet_len,
                                       double noise_var,
                                       Rng& rng);

}  // namespace cdma
