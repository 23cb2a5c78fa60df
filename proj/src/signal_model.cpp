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

#include "cdma/signal_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cdma {

SpreadingCode::SpreadingCode(RVector chips) : chips_(std::move(chips))
{
    if (chips_.size() == 0) {
        throw std::invalid_argument("spreading code must have at least one chip");
    }
    const double mag = 1.0 / std::sqrt(static_cast<double>(chips_.size()));
    for (Eigen::Index i = 0; i < chips_.size(); ++i) {
        if (std::abs(std::abs(chips_[i]) - mag) > 1e-12) {
            throw std::invalid_argument("chip " + std::to_string(i) + " is not +-1/sqrt(N)");
        }
    }
}

SpreadingCode SpreadingCode::random(Rng& rng, int n)
{
    if (n < 1) {
        throw std::invalid_argument("processing gain must be positive");
    }
    std::bernoulli_distribution coin(0.5);
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    RVector chips(n);
    for (int i = 0; i < n; ++i) {
        chips[i] = coin(rng) ? mag : -mag;
    }
    return SpreadingCode(std::move(chips));
}

ConstraintMatrices build_constraint_matrices(const SpreadingCode& code, int lp)
{
    const int n = code.n();
    if (lp < 1 || lp > n) {
        throw std::invalid_argument("path count must satisfy 1 <= Lp <= N (got Lp=" +
                                    std::to_string(lp) + ", N=" + std::to_string(n) + ")");
    }
    const int m = n + lp - 1;
    ConstraintMatrices cm;
    cm.n = n;
    cm.lp = lp;
    cm.m_dim = m;
    cm.c = RMatrix::Zero(m, lp);
    for (int l = 0; l < lp; ++l) {
        cm.c.col(l).segment(l, n) = code.chips();
    }
    // Tail of the previous symbol lands in the first Lp-1 chips of the window;
    // the head of the next symbol lands in the last Lp-1 chips.
    cm.c_prev = RMatrix::Zero(m, lp);
    cm.c_next = RMatrix::Zero(m, lp);
    if (lp > 1) {
        cm.c_prev.topRows(lp - 1) = cm.c.bottomRows(lp - 1);
        cm.c_next.bottomRows(lp - 1) = cm.c.topRows(lp - 1);
    }
    return cm;
}

ChannelVector generate_channel(Rng& rng, const ChannelOptions& opts)
{
    if (opts.lp < 1 || opts.nonzero_paths < 1 || opts.max_spacing < 1 ||
        (opts.nonzero_paths - 1) * opts.max_spacing + 1 > opts.lp) {
        throw std::invalid_argument("channel options: paths and spacing do not fit in Lp taps");
    }
    std::uniform_int_distribution<int> spacing(1, opts.max_spacing);
    std::uniform_real_distribution<double> gain(-1.0, 1.0);

    std::vector<int> positions(opts.nonzero_paths, 0);
    for (int p = 1; p < opts.nonzero_paths; ++p) {
        positions[p] = positions[p - 1] + spacing(rng);
    }
    if (opts.first_path == FirstPath::random) {
        std::uniform_int_distribution<int> offset(0, opts.lp - 1 - positions.back());
        const int shift = offset(rng);
        for (auto& p : positions) {
            p += shift;
        }
    }

    ChannelVector ch{CVector::Zero(opts.lp)};
    for (int pos : positions) {
        const double re = gain(rng);
        const double im = gain(rng);
        ch.taps[pos] = Complex(re, im);
    }
    ch.taps /= ch.taps.norm();
    return ch;
}

std::vector<double> generate_amplitudes(Rng& rng, int k_users, double std_db)
{
    if (k_users < 1) {
        throw std::invalid_argument("need at least one user");
    }
    if (std_db < 0.0) {
        throw std::invalid_argument("power spread must be non-negative");
    }
    std::vector<double> amps(k_users, 1.0);
    if (std_db == 0.0) {
        return amps;
    }
    std::normal_distribution<double> db(0.0, std_db);
    for (auto& a : amps) {
        a = std::sqrt(std::pow(10.0, db(rng) / 10.0));
    }
    return amps;
}

UserConfig::UserConfig(double amplitude_, SpreadingCode code_, ChannelVector channel_)
    : amplitude(amplitude_), code(std::move(code_)), channel(std::move(channel_))
{
    if (!(amplitude > 0.0)) {
        throw std::invalid_argument("user amplitude must be positive");
    }
}

SymbolStream generate_symbols(Rng& rng, std::size_t count)
{
    std::bernoulli_distribution coin(0.5);
    SymbolStream out(count);
    for (auto& b : out) {
        const double re = coin(rng) ? 1.0 : -1.0;
        const double im = coin(rng) ? 1.0 : -1.0;
        b = Complex(re, im);
    }
    return out;
}

bool is_qpsk(Complex b)
{
    return std::abs(b.real()) == 1.0 && std::abs(b.imag()) == 1.0;
}

Complex symbol_at(const SymbolStream& symbols, long i)
{
    if (i < 0 || i >= static_cast<long>(symbols.size())) {
        return Complex(0.0, 0.0);
    }
    return symbols[static_cast<std::size_t>(i)];
}

double noise_variance(double ebn0_db)
{
    return std::pow(10.0, -ebn0_db / 10.0);
}

CVector complex_noise(Rng& rng, int m_dim, double var)
{
    CVector n = CVector::Zero(m_dim);
    if (var <= 0.0) {
        return n;
    }
    std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
    for (int i = 0; i < m_dim; ++i) {
        const double re = g(rng);
        const double im = g(rng);
        n[i] = Complex(re, im);
    }
    return n;
}

namespace {

// Per-user received signatures A_k C^x h_k, one per symbol slot.
struct Signatures {
    CVector prev, cur, next;
};

std::vector<Signatures> precompute(std::span<const UserConfig> users,
                                   std::span<const SymbolStream> symbols,
                                   int& m_dim)
{
    if (users.size() != symbols.size()) {
        throw DimensionError("one symbol stream per user is required");
    }
    m_dim = -1;
    int n = -1;
    int lp = -1;
    std::vector<Signatures> sigs;
    sigs.reserve(users.size());
    for (const auto& u : users) {
        if (n < 0) {
            n = u.code.n();
            lp = u.channel.lp();
        } else if (u.code.n() != n || u.channel.lp() != lp) {
            throw DimensionError("all users must share N and Lp");
        }
        const auto cm = build_constraint_matrices(u.code, u.channel.lp());
        m_dim = cm.m_dim;
        const CVector h = u.amplitude * u.channel.taps;
        sigs.push_back({cm.c_prev.cast<Complex>() * h, cm.c.cast<Complex>() * h,
                        cm.c_next.cast<Complex>() * h});
    }
    return sigs;
}

CVector window(const std::vector<Signatures>& sigs,
               std::span<const SymbolStream> symbols,
               long i,
               int m_dim)
{
    CVector r = CVector::Zero(m_dim);
    for (std::size_t k = 0; k < sigs.size(); ++k) {
        r += symbol_at(symbols[k], i - 1) * sigs[k].prev + symbol_at(symbols[k], i) * sigs[k].cur +
             symbol_at(symbols[k], i + 1) * sigs[k].next;
    }
    return r;
}

}  // namespace

CVector synthesize_received(std::span<const UserConfig> users,
                            std::span<const SymbolStream> symbols,
                            long i,
                            double noise_var,
                            Rng& rng,
                            int empty_m_dim)
{
    if (users.empty()) {
        if (empty_m_dim < 1 || !symbols.empty()) {
            throw DimensionError("received-vector dimension is undefined without users");
        }
        return complex_noise(rng, empty_m_dim, noise_var);
    }
    int m_dim = 0;
    const auto sigs = precompute(users, symbols, m_dim);
    return window(sigs, symbols, i, m_dim) + complex_noise(rng, m_dim, noise_var);
}

std::vector<CVector> synthesize_packet(std::span<const UserConfig> users,
                                       std::span<const SymbolStream> symbols,
                                       long packet_len,
                                       double noise_var,
                                       Rng& rng)
{
    if (users.empty()) {
        throw DimensionError("received-vector dimension is undefined without users");
    }
    int m_dim = 0;
    const auto sigs = precompute(users, symbols, m_dim);
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(packet_len));
    for (long i = 0; i < packet_len; ++i) {
        out.push_back(window(sigs, symbols, i, m_dim) + complex_noise(rng, m_dim, noise_var));
    }
    return out;
}

}  // namespace cdma
