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

#include "cdma/mmse.hpp"

#include <algorithm>

#include <Eigen/Cholesky>

#include <cmath>

namespace cdma {

SampleStatistics SampleStatistics::zeros(int m_dim, int p, int lp)
{
    SampleStatistics s;
    s.r_cov = CMatrix::Zero(m_dim, m_dim);
    s.p_b = CVector::Zero(m_dim);
    s.d_cov = CMatrix::Zero(p, p);
    s.p_f = CVector::Zero(p);
    s.f_cov = CMatrix::Zero(lp, lp);
    s.p_d = CVector::Zero(lp);
    return s;
}

void accumulate(SampleStatistics& stats,
                const CVector& r_cancelled,
                Complex b_ref,
                const CMatrix& d,
                const CMatrix& f,
                const CVector& h_hat,
                const CVector& lambda)
{
    const auto m = r_cancelled.size();
    const auto p = lambda.size();
    if (stats.r_cov.rows() != m || stats.d_cov.rows() != p || stats.f_cov.rows() != h_hat.size() ||
        f.rows() != m || f.cols() != h_hat.size() || (p > 0 && (d.rows() != m || d.cols() != p))) {
        throw DimensionError("sample dimensions disagree with the statistics");
    }
    stats.n_samples += 1;
    const double a = 1.0 / static_cast<double>(stats.n_samples);

    // Running mean: s += (x - s) / n.
    stats.r_cov += a * (r_cancelled * r_cancelled.adjoint() - stats.r_cov);
    stats.p_b += a * (std::conj(b_ref) * r_cancelled - stats.p_b);
    stats.f_cov += a * (f.adjoint() * f - stats.f_cov);
    stats.p_d += a * (f.adjoint() * r_cancelled - stats.p_d);
    if (p > 0) {
        const CVector r = r_cancelled + d * lambda;
        stats.d_cov += a * (d.adjoint() * d - stats.d_cov);
        stats.p_f += a * (d.adjoint() * (r - f * h_hat) - stats.p_f);
    }
}

CVector hermitian_solve(const CMatrix& r, const CVector& p, Ridge ridge)
{
    const auto n = r.rows();
    if (r.cols() != n || p.size() != n) {
        throw DimensionError("covariance and cross-correlation sizes disagree");
    }
    if (n == 0) {
        return CVector(0);
    }
    const double eps = ridge.value_or(1e-8 * r.trace().real() / static_cast<double>(n));
    // Hermitian part only; the accumulated covariances are Hermitian to rounding.
    CMatrix a = 0.5 * (r + r.adjoint());
    a.diagonal().array() += eps;
    Eigen::LDLT<CMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularStatistics("covariance is not positive definite");
    }
    // Zero pivots pass isPositive(), so check the pivot spread as well.
    const RVector pivots = ldlt.vectorD().real();
    const double rcond = std::min(ldlt.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    if (!(rcond > 1e-14)) {
        throw SingularStatistics("covariance is numerically singular");
    }
    return ldlt.solve(p);
}

CVector solve_w(const SampleStatistics& stats, Ridge ridge)
{
    return hermitian_solve(stats.r_cov, stats.p_b, ridge);
}

CVector solve_lambda(const SampleStatistics& stats, Ridge ridge)
{
    return hermitian_solve(stats.d_cov, stats.p_f, ridge);
}

CVector solve_h(const SampleStatistics& stats, Ridge ridge)
{
    return hermitian_solve(stats.f_cov, stats.p_d, ridge);
}

namespace {

void check_batch(std::span<const BatchSample> batch)
{
    if (batch.empty()) {
        throw std::invalid_argument("empty batch");
    }
}

CVector cancelled(const BatchSample& s, const CVector& lambda)
{
    if (lambda.size() == 0) {
        return s.r;
    }
    return s.r - s.d * lambda;
}

}  // namespace

SampleStatistics batch_statistics(std::span<const BatchSample> batch,
                                  const CVector& h_hat,
                                  const CVector& lambda)
{
    check_batch(batch);
    auto stats = SampleStatistics::zeros(static_cast<int>(batch[0].r.size()), static_cast<int>(lambda.size()),
                                         static_cast<int>(h_hat.size()));
    for (const auto& s : batch) {
        accumulate(stats, cancelled(s, lambda), s.b_ref, s.d, s.f, h_hat, lambda);
    }
    return stats;
}

double batch_j1(std::span<const BatchSample> batch, const CVector& w, const CVector& lambda)
{
    check_batch(batch);
    double acc = 0.0;
    for (const auto& s : batch) {
        acc += std::norm(s.b_ref - w.dot(cancelled(s, lambda)));
    }
    return acc / static_cast<double>(batch.size());
}

double batch_j2(std::span<const BatchSample> batch, const CVector& lambda, const CVector& h_hat)
{
    check_batch(batch);
    double acc = 0.0;
    for (const auto& s : batch) {
        acc += (s.f * h_hat - cancelled(s, lambda)).squaredNorm();
    }
    return acc / static_cast<double>(batch.size());
}

AlternatingResult alternate(std::span<const BatchSample> batch,
                            int iters,
                            const CVector& lambda0,
                            const CVector& h0,
                            Ridge ridge)
{
    if (iters < 1) {
        throw std::invalid_argument("alternate() needs at least one iteration");
    }
    check_batch(batch);
    AlternatingResult out;
    out.lambda = lambda0;
    out.h_hat = h0;
    out.j2.push_back(batch_j2(batch, out.lambda, out.h_hat));
    for (int it = 0; it < iters; ++it) {
        out.h_hat = solve_h(batch_statistics(batch, out.h_hat, out.lambda), ridge);
        if (out.lambda.size() > 0) {
            out.lambda = solve_lambda(batch_statistics(batch, out.h_hat, out.lambda), ridge);
        }
        out.w = solve_w(batch_statistics(batch, out.h_hat, out.lambda), ridge);
        out.j1.push_back(batch_j1(batch, out.w, out.lambda));
        out.j2.push_back(batch_j2(batch, out.lambda, out.h_hat));
    }
    return out;
}

}  // namespace cdma
