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

// Batch MMSE solutions for the receiver filter, the IC parameter vector and
// the channel estimate, with expectations replaced by sample averages over a
// fixed batch. Used as the convergence target for the stochastic-gradient
// estimators.

#include "cdma/types.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace cdma {

class SingularStatistics : public std::runtime_error {
public:
    explicit SingularStatistics(const std::string& what) : std::runtime_error(what) {}
};

struct SampleStatistics {
    CMatrix r_cov;  ///< E[r_c r_c^H]                 (M x M)
    CVector p_b;    ///< E[b* r_c]                    (M)
    CMatrix d_cov;  ///< E[D^H D]                     (P x P)
    CVector p_f;    ///< E[D^H (r - F h)]             (P)
    CMatrix f_cov;  ///< E[F^H F]                     (Lp x Lp)
    CVector p_d;    ///< E[F^H (r - D lambda)]        (Lp)
    long n_samples = 0;

    static SampleStatistics zeros(int m_dim, int p, int lp);
};

/// Folds one sample into the running means. r_cancelled = r - D lambda.
void accumulate(SampleStatistics& stats,
                const CVector& r_cancelled,
                Complex b_ref,
                const CMatrix& d,
                const CMatrix& f,
                const CVector& h_hat,
                const CVector& lambda);

/// Ridge: nullopt selects 1e-8 * trace(R)/dim; 0 disables regularisation.
using Ridge = std::optional<double>;

CVector solve_w(const SampleStatistics& stats, Ridge ridge = std::nullopt);
CVector solve_lambda(const SampleStatistics& stats, Ridge ridge = std::nullopt);
CVector solve_h(const SampleStatistics& stats, Ridge ridge = std::nullopt);

/// Regularised Hermitian solve (R + eps I) x = p.
CVector hermitian_solve(const CMatrix& r, const CVector& p, Ridge ridge);

/// One observation of the desired user: received vector, reference symbol,
/// reconstruction matrix of the cancellation group and own regeneration matrix.
struct BatchSample {
    CVector r;
    Complex b_ref;
    CMatrix d;
    CMatrix f;
};

SampleStatistics batch_statistics(std::span<const BatchSample> batch,
                                  const CVector& h_hat,
                                  const CVector& lambda);

/// Sample-averaged |b - w^H (r - D lambda)|^2.
double batch_j1(std::span<const BatchSample> batch, const CVector& w, const CVector& lambda);
/// Sample-averaged ||F h - r + D lambda||^2.
double batch_j2(std::span<const BatchSample> batch, const CVector& lambda, const CVector& h_hat);

struct AlternatingResult {
    CVector w;
    CVector lambda;
    CVector h_hat;
    std::vector<double> j1;  ///< after each round
    std::vector<double> j2;  ///< initial value followed by one entry per round
};

/// Block-coordinate MMSE: each round refreshes the statistics and solves for
/// h_hat, then lambda, then w.
AlternatingResult alternate(std::span<const BatchSample> batch,
                            int iters,
                            const CVector& lambda0,
                            const CVector& h0,
                            Ridge ridge = std::nullopt);

}  // namespace cdma
