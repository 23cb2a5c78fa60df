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


// Helpers shared by the unit tests and the acceptance binary.

#pragma once

#include "cdma/adaptive.hpp"
#include "cdma/ic_framework.hpp"
#include "cdma/mmse.hpp"
#include "cdma/rng.hpp"
#include "cdma/signal_model.hpp"

#include <cstdint>
#include <vector>

namespace cdma::testing {

/// Stationary flat-fading scenario trained with known symbols. Every user runs
/// the joint SG recursion against the all-but-k group, regenerating the
/// interferers with their own current channel estimates.
struct StationaryScenario {
    int n = 8;
    int k_users = 2;
    std::vector<double> amplitudes{1.0, 0.8};
    double ebn0_db = 15.0;
    long symbols = 20000;
    StepSizes steps{0.005, 0.002, 0.002};
    std::uint64_t seed = 1;
};

struct StationaryRun {
    std::vector<UserConfig> users;
    std::vector<SymbolStream> symbols;
    std::vector<CVector> received;
    std::vector<ConstraintMatrices> cms;
    std::vector<EstimatorState> states;
    /// |e_scalar|^2 per user and symbol.
    std::vector<std::vector<double>> sq_error;
};

inline CMatrix true_regen(const StationaryRun& run, int u, long i)
{
    const auto& s = run.symbols[static_cast<std::size_t>(u)];
    return build_regen_matrix(run.cms[static_cast<std::size_t>(u)], symbol_at(s, i - 1), symbol_at(s, i),
                              symbol_at(s, i + 1));
}

inline ReconstructionMatrix group_matrix(const StationaryRun& run, int k, long i,
                                         const std::vector<CVector>& h_hat)
{
    const auto group = pic_group(k, static_cast<int>(run.users.size()));
    std::vector<CMatrix> regen;
    std::vector<CVector> h;
    for (int p = 0; p < group.p(); ++p) {
        regen.push_back(true_regen(run, group[p], i));
        h.push_back(h_hat[static_cast<std::size_t>(group[p])]);
    }
    return build_reconstruction_matrix(group, regen, h);
}

inline StationaryRun run_stationary(const StationaryScenario& sc)
{
    StationaryRun run;
    auto code_rng = make_stream(sc.seed, Stream::codes);
    auto chan_rng = make_stream(sc.seed, Stream::channels);
    auto sym_rng = make_stream(sc.seed, Stream::symbols);
    auto noise_rng = make_stream(sc.seed, Stream::noise);
    ChannelOptions flat;
    flat.lp = 1;
    flat.nonzero_paths = 1;
    flat.max_spacing = 1;
    for (int k = 0; k < sc.k_users; ++k) {
        run.users.emplace_back(sc.amplitudes[static_cast<std::size_t>(k)], SpreadingCode::random(code_rng, sc.n),
                               generate_channel(chan_rng, flat));
        run.symbols.push_back(generate_symbols(sym_rng, static_cast<std::size_t>(sc.symbols)));
        run.cms.push_back(build_constraint_matrices(run.users.back().code, 1));
    }
    run.received = synthesize_packet(run.users, run.symbols, sc.symbols, noise_variance(sc.ebn0_db), noise_rng);

    const int p = sc.k_users - 1;
    for (int k = 0; k < sc.k_users; ++k) {
        EstimatorState st;
        st.h_hat = CVector::Ones(1);
        st.w = run.cms[static_cast<std::size_t>(k)].c.col(0).cast<Complex>();
        st.lambda = CVector::Ones(p);
        run.states.push_back(st);
    }
    run.sq_error.assign(static_cast<std::size_t>(sc.k_users), {});

    for (long i = 0; i < sc.symbols; ++i) {
        const auto& r = run.received[static_cast<std::size_t>(i)];
        std::vector<CVector> h_snapshot;
        for (const auto& st : run.states) h_snapshot.push_back(st.h_hat);
        for (int k = 0; k < sc.k_users; ++k) {
            auto& st = run.states[static_cast<std::size_t>(k)];
            const auto d = group_matrix(run, k, i, h_snapshot);
            const CVector rc = cancel(r, d, st.lambda);
            const CMatrix f = true_regen(run, k, i);
            const Complex b = run.symbols[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            const auto e = compute_errors(st, r, rc, f, d, b);
            run.sq_error[static_cast<std::size_t>(k)].push_back(std::norm(e.e_scalar));
            const CVector w = update_w(st, e.e_scalar, rc, sc.steps.mu_w);
            const CVector lambda = update_lambda(st, d, e.e_vector, sc.steps.mu_lambda);
            const CVector h = update_h(st, f, e.e_vector, sc.steps.mu_h);
            st.w = w;
            st.lambda = lambda;
            st.h_hat = h;
        }
    }
    return run;
}

/// Batch for user k with the interferers regenerated from fixed channel
/// estimates and the true symbols.
inline std::vector<BatchSample> user_batch(const StationaryRun& run, int k, const std::vector<CVector>& h_fixed)
{
    std::vector<BatchSample> batch;
    batch.reserve(run.received.size());
    for (std::size_t i = 0; i < run.received.size(); ++i) {
        const long t = static_cast<long>(i);
        batch.push_back({run.received[i], run.symbols[static_cast<std::size_t>(k)][i],
                         group_matrix(run, k, t, h_fixed).d, true_regen(run, k, t)});
    }
    return batch;
}

inline double relative_distance(const CVector& a, const CVector& b)
{
    return (a - b).norm() / b.norm();
}

/// Worst relative error between the analytic J2 gradients and central finite
/// differences of the instantaneous cost over one random instance.
inline double gradient_check(Rng& rng, int m, int p, int lp)
{
    auto rand_c = [&](int rows, int cols) {
        std::normal_distribution<double> g(0.0, 1.0);
        CMatrix x(rows, cols);
        for (int a = 0; a < rows; ++a)
            for (int b = 0; b < cols; ++b) x(a, b) = Complex(g(rng), g(rng));
        return x;
    };
    const CMatrix f = rand_c(m, lp);
    const CMatrix d = rand_c(m, p);
    const CVector r = rand_c(m, 1);
    const CVector h = rand_c(lp, 1);
    const CVector lambda = rand_c(p, 1);

    const CVector e = f * h - r + d * lambda;
    // Wirtinger gradients; the real/imaginary partials are 2 Re and 2 Im.
    const CVector g_lambda = d.adjoint() * e;
    const CVector g_h = f.adjoint() * e;

    const double delta = 1e-6;
    double worst = 0.0;
    auto check = [&](const CVector& base, const CVector& grad, bool is_lambda) {
        const double scale = 2.0 * grad.cwiseAbs().maxCoeff();
        for (int c = 0; c < base.size(); ++c) {
            for (Complex dir : {Complex(1, 0), Complex(0, 1)}) {
                CVector plus = base, minus = base;
                plus(c) += delta * dir;
                minus(c) -= delta * dir;
                const double jp = is_lambda ? instantaneous_j2(r, f, h, d, plus) : instantaneous_j2(r, f, plus, d, lambda);
                const double jm = is_lambda ? instantaneous_j2(r, f, h, d, minus) : instantaneous_j2(r, f, minus, d, lambda);
                const double fd = (jp - jm) / (2.0 * delta);
                const double an = dir.real() != 0.0 ? 2.0 * grad(c).real() : 2.0 * grad(c).imag();
                worst = std::max(worst, std::abs(fd - an) / scale);
            }
        }
    };
    check(lambda, g_lambda, true);
    check(h, g_h, false);
    return worst;
}

}  // namespace cdma::testing
