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


#include <doctest.h>

#include "support.hpp"

#include "cdma/mmse.hpp"

#include <cmath>
#include <vector>

using namespace cdma;

namespace {

CVector unit(int m, int idx)
{
    CVector s = CVector::Zero(m);
    s(idx) = 1.0;
    return s;
}

std::vector<BatchSample> random_batch(Rng& rng, int len, int m, int p, int lp)
{
    std::normal_distribution<double> g;
    auto rc = [&](int rows, int cols) {
        CMatrix x(rows, cols);
        for (int a = 0; a < rows; ++a)
            for (int b = 0; b < cols; ++b) x(a, b) = Complex(g(rng), g(rng));
        return x;
    };
    std::vector<BatchSample> batch;
    for (int t = 0; t < len; ++t) {
        batch.push_back({rc(m, 1), Complex(g(rng) > 0 ? 1 : -1, g(rng) > 0 ? 1 : -1), rc(m, p), rc(m, lp)});
    }
    return batch;
}

}  // namespace

TEST_CASE("single-sample statistics")
{
    auto stats = SampleStatistics::zeros(3, 0, 1);
    const CVector s = unit(3, 1);
    accumulate(stats, s, 1.0, CMatrix(3, 0), CMatrix::Zero(3, 1), CVector::Zero(1), CVector(0));
    CHECK(stats.n_samples == 1);
    CHECK((stats.r_cov - s * s.adjoint()).norm() == 0.0);
    CHECK((stats.p_b - s).norm() == 0.0);

    auto twice = stats;
    accumulate(twice, s, 1.0, CMatrix(3, 0), CMatrix::Zero(3, 1), CVector::Zero(1), CVector(0));
    CHECK((twice.r_cov - stats.r_cov).norm() == 0.0);
    CHECK((twice.p_b - stats.p_b).norm() == 0.0);

    CHECK_THROWS_AS(accumulate(stats, CVector::Zero(4), 1.0, CMatrix(4, 0), CMatrix::Zero(4, 1), CVector::Zero(1),
                               CVector(0)),
                    DimensionError);
}

TEST_CASE("noise-only covariance")
{
    Rng rng(6);
    const double var = 0.5;
    auto stats = SampleStatistics::zeros(4, 0, 1);
    for (int t = 0; t < 100000; ++t) {
        accumulate(stats, complex_noise(rng, 4, var), 1.0, CMatrix(4, 0), CMatrix::Zero(4, 1), CVector::Zero(1),
                   CVector(0));
    }
    CHECK((stats.r_cov - var * CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 0.02 * var);
}

TEST_CASE("covariances are Hermitian")
{
    Rng rng(12);
    const auto batch = random_batch(rng, 500, 6, 2, 3);
    const auto stats = batch_statistics(batch, CVector::Ones(3), CVector::Ones(2));
    CHECK((stats.r_cov - stats.r_cov.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((stats.d_cov - stats.d_cov.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((stats.f_cov - stats.f_cov.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("filter solve")
{
    auto stats = SampleStatistics::zeros(3, 0, 1);
    stats.r_cov = CMatrix::Identity(3, 3);
    CVector s(3);
    s << Complex(0.6, 0), Complex(0, 0.8), 0.0;
    stats.p_b = s;
    const double eps = 1e-8 * 3.0 / 3.0;
    CHECK((solve_w(stats) - s / (1.0 + eps)).norm() <= 1e-15);

    stats.p_b.setZero();
    CHECK(solve_w(stats).norm() == 0.0);

    // Rank-one plus identity: w = 2A s / (2A^2 + sigma^2).
    const double a = 0.7, sigma2 = 0.05;
    stats.r_cov = 2 * a * a * s * s.adjoint() + sigma2 * CMatrix::Identity(3, 3);
    stats.p_b = 2 * a * s;
    const CVector w = solve_w(stats, 0.0);
    CHECK((w - (2 * a / (2 * a * a + sigma2)) * s).norm() <= 1e-13);
}

TEST_CASE("filter solve against Monte Carlo statistics")
{
    Rng rng(21);
    const int m = 4;
    const double a = 0.9, sigma2 = 0.1;
    const CVector s = unit(m, 0) * std::sqrt(0.5) + unit(m, 2) * Complex(0, std::sqrt(0.5));
    auto stats = SampleStatistics::zeros(m, 0, 1);
    const auto b = generate_symbols(rng, 100000);
    for (const auto& bi : b) {
        const CVector r = a * bi * s + complex_noise(rng, m, sigma2);
        accumulate(stats, r, bi, CMatrix(m, 0), CMatrix::Zero(m, 1), CVector::Zero(1), CVector(0));
    }
    const CVector w = solve_w(stats);
    const CVector want = (2 * a / (2 * a * a + sigma2)) * s;
    CHECK(testing::relative_distance(w, want) <= 0.02);
}

TEST_CASE("IC parameter solve")
{
    auto stats = SampleStatistics::zeros(2, 1, 1);
    stats.d_cov(0, 0) = 4.0;
    stats.p_f(0) = Complex(2, -1);
    CHECK(std::abs(solve_lambda(stats, 0.0)(0) - Complex(0.5, -0.25)) <= 1e-15);
    stats.p_f.setZero();
    CHECK(solve_lambda(stats).norm() == 0.0);

    // Projection argument: r = A d + terms orthogonal to d, F h orthogonal to d.
    Rng rng(4);
    const double amp = 0.8;
    std::vector<BatchSample> batch;
    for (const auto& b : generate_symbols(rng, 50)) {
        CMatrix d = CMatrix::Zero(4, 1);
        d(0, 0) = b * std::sqrt(0.5);
        CMatrix f = CMatrix::Zero(4, 1);
        f(2, 0) = 1.0;
        CVector r = amp * d.col(0);
        r(1) = Complex(std::normal_distribution<double>()(rng), 0.0);
        r(2) = 0.3;
        batch.push_back({r, b, d, f});
    }
    const auto st = batch_statistics(batch, CVector::Constant(1, 0.3), CVector::Zero(1));
    CHECK(std::abs(solve_lambda(st, 0.0)(0) - amp) <= 1e-13);

    // Brute-force least squares on the stacked samples.
    CMatrix a(4 * 50, 1);
    CVector y(4 * 50);
    for (int t = 0; t < 50; ++t) {
        a.block(4 * t, 0, 4, 1) = batch[t].d;
        y.segment(4 * t, 4) = batch[t].r - batch[t].f * CVector::Constant(1, 0.3);
    }
    const CVector ls = a.colPivHouseholderQr().solve(y);
    CHECK(std::abs(ls(0) - amp) <= 1e-13);
}

TEST_CASE("channel solve")
{
    const CVector s = unit(3, 1);
    const Complex h(0.4, -0.3);
    Rng rng(3);
    std::vector<BatchSample> batch;
    for (const auto& b : generate_symbols(rng, 20)) {
        const CMatrix f = b * s;
        batch.push_back({b * h * s, b, CMatrix(3, 0), f});
    }
    const auto st = batch_statistics(batch, CVector::Zero(1), CVector(0));
    CHECK(std::abs(st.f_cov(0, 0) - 2.0) <= 1e-15);
    CHECK(std::abs(solve_h(st, 0.0)(0) - h) <= 1e-15);

    auto z = st;
    z.p_d.setZero();
    CHECK(solve_h(z).norm() == 0.0);
}

TEST_CASE("channel solve is the least-squares optimum")
{
    Rng rng(8);
    const auto batch = random_batch(rng, 40, 6, 2, 3);
    const CVector lambda = CVector::Random(2);
    const auto st = batch_statistics(batch, CVector::Zero(3), lambda);
    const CVector h = solve_h(st, 0.0);

    CMatrix a(6 * 40, 3);
    CVector y(6 * 40);
    for (int t = 0; t < 40; ++t) {
        a.block(6 * t, 0, 6, 3) = batch[t].f;
        y.segment(6 * t, 6) = batch[t].r - batch[t].d * lambda;
    }
    const CVector ne = (a.adjoint() * a).ldlt().solve(a.adjoint() * y);
    CHECK((h - ne).norm() <= 1e-10);
}

TEST_CASE("singular statistics")
{
    auto stats = SampleStatistics::zeros(3, 0, 1);
    const CVector s = unit(3, 0);
    accumulate(stats, s, 1.0, CMatrix(3, 0), CMatrix::Zero(3, 1), CVector::Zero(1), CVector(0));
    CHECK_THROWS_AS(solve_w(stats, 0.0), SingularStatistics);
    CHECK_NOTHROW(solve_w(stats));
    CHECK(hermitian_solve(CMatrix(0, 0), CVector(0), std::nullopt).size() == 0);
}

TEST_CASE("one round equals a manual pass")
{
    Rng rng(13);
    const auto batch = random_batch(rng, 200, 6, 2, 2);
    const CVector l0 = CVector::Ones(2);
    const CVector h0 = CVector::Ones(2);
    const auto res = alternate(batch, 1, l0, h0);

    const CVector h = solve_h(batch_statistics(batch, h0, l0));
    const CVector l = solve_lambda(batch_statistics(batch, h, l0));
    const CVector w = solve_w(batch_statistics(batch, h, l));
    CHECK(res.h_hat == h);
    CHECK(res.lambda == l);
    CHECK(res.w == w);
    CHECK(res.j2.size() == 2);
    CHECK(res.j1.size() == 1);
    CHECK_THROWS_AS(alternate(batch, 0, l0, h0), std::invalid_argument);
}

TEST_CASE("alternating descent never increases J2")
{
    Rng rng(101);
    for (int t = 0; t < 20; ++t) {
        const auto batch = random_batch(rng, 100, 6, 2, 2);
        const auto res = alternate(batch, 8, CVector::Ones(2), CVector::Ones(2));
        for (std::size_t i = 1; i < res.j2.size(); ++i) {
            CHECK(res.j2[i] <= res.j2[i - 1] + 1e-10);
        }
    }
}

TEST_CASE("block solves are local minima")
{
    Rng rng(55);
    std::normal_distribution<double> g;
    auto direction = [&](int n) {
        CVector v(n);
        for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
        return CVector(1e-3 * v / v.norm());
    };
    for (int t = 0; t < 10; ++t) {
        const auto batch = random_batch(rng, 150, 6, 2, 2);
        const auto res = alternate(batch, 2, CVector::Ones(2), CVector::Ones(2));
        const double j1 = batch_j1(batch, res.w, res.lambda);
        const double j2 = batch_j2(batch, res.lambda, res.h_hat);
        const CVector h_star = solve_h(batch_statistics(batch, res.h_hat, res.lambda));
        const double j2h = batch_j2(batch, res.lambda, h_star);
        for (int p = 0; p < 20; ++p) {
            CHECK(batch_j1(batch, res.w + direction(6), res.lambda) >= j1 - 1e-6);
            CHECK(batch_j2(batch, res.lambda + direction(2), res.h_hat) >= j2 - 1e-6);
            CHECK(batch_j2(batch, res.lambda, h_star + direction(2)) >= j2h - 1e-6);
        }
    }
}

TEST_CASE("dimension contract")
{
    Rng rng(2);
    const auto batch = random_batch(rng, 50, 5, 3, 2);
    const auto res = alternate(batch, 2, CVector::Ones(3), CVector::Ones(2));
    CHECK(res.w.size() == 5);
    CHECK(res.lambda.size() == 3);
    CHECK(res.h_hat.size() == 2);
}
