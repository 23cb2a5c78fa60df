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

#include "cdma/ic_framework.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cdma {

ICGroup::ICGroup(std::vector<int> members) : members_(std::move(members))
{
    std::set<int> seen;
    for (int m : members_) {
        if (m < 0) {
            throw std::invalid_argument("negative user index in IC group");
        }
        if (!seen.insert(m).second) {
            throw std::invalid_argument("duplicate user in IC group");
        }
    }
}

CMatrix build_regen_matrix(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next)
{
    return b_prev * cm.c_prev.cast<Complex>() + b_cur * cm.c.cast<Complex>() +
           b_next * cm.c_next.cast<Complex>();
}

CVector regenerate(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next,
                   const CVector& h)
{
    // C h is the code convolved with h; C_p h and C_s h are pieces of it.
    const CVector conv = cm.c.cast<Complex>() * h;
    CVector out = b_cur * conv;
    const int tail = cm.lp - 1;
    if (tail > 0) {
        out.head(tail) += b_prev * conv.tail(tail);
        out.tail(tail) += b_next * conv.head(tail);
    }
    return out;
}

CVector regen_adjoint(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next,
                      const CVector& e)
{
    const int tail = cm.lp - 1;
    CVector folded = std::conj(b_cur) * e;
    if (tail > 0) {
        folded.tail(tail) += std::conj(b_prev) * e.head(tail);
        folded.head(tail) += std::conj(b_next) * e.tail(tail);
    }
    return cm.c.transpose().cast<Complex>() * folded;
}

ReconstructionMatrix build_reconstruction_matrix(const ICGroup& group,
                                                 std::span<const CMatrix> regen,
                                                 std::span<const CVector> h_hat)
{
    const auto p = static_cast<std::size_t>(group.p());
    if (regen.size() != p || h_hat.size() != p) {
        throw DimensionError("one regeneration matrix and channel estimate per group member");
    }
    if (p == 0) {
        return {CMatrix(0, 0), group};
    }
    const auto m = regen[0].rows();
    CMatrix d(m, static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        if (regen[j].rows() != m || regen[j].cols() != h_hat[j].size()) {
            throw DimensionError("group members disagree on M or Lp");
        }
        d.col(static_cast<Eigen::Index>(j)) = regen[j] * h_hat[j];
    }
    return {std::move(d), group};
}

ReconstructionMatrix build_reconstruction_matrix_block(const ICGroup& group,
                                                       std::span<const ConstraintMatrices> cms,
                                                       std::span<const CVector> h_hat,
                                                       std::span<const SymbolTriple> decisions)
{
    const int p = group.p();
    const auto up = static_cast<std::size_t>(p);
    if (cms.size() != up || h_hat.size() != up || decisions.size() != up) {
        throw DimensionError("block reconstruction needs per-member code, channel and decisions");
    }
    if (p == 0) {
        return {CMatrix(0, 0), group};
    }
    const int m = cms[0].m_dim;
    const int lp = cms[0].lp;
    CMatrix ct(m, p * lp), ct_prev(m, p * lp), ct_next(m, p * lp);
    CMatrix h_blk = CMatrix::Zero(p * lp, p);
    CMatrix b_prev = CMatrix::Zero(p, p), b_cur = CMatrix::Zero(p, p), b_next = CMatrix::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        const auto& cm = cms[static_cast<std::size_t>(j)];
        if (cm.m_dim != m || cm.lp != lp || h_hat[static_cast<std::size_t>(j)].size() != lp) {
            throw DimensionError("group members disagree on M or Lp");
        }
        ct.middleCols(j * lp, lp) = cm.c.cast<Complex>();
        ct_prev.middleCols(j * lp, lp) = cm.c_prev.cast<Complex>();
        ct_next.middleCols(j * lp, lp) = cm.c_next.cast<Complex>();
        h_blk.block(j * lp, j, lp, 1) = h_hat[static_cast<std::size_t>(j)];
        b_prev(j, j) = decisions[static_cast<std::size_t>(j)].prev;
        b_cur(j, j) = decisions[static_cast<std::size_t>(j)].cur;
        b_next(j, j) = decisions[static_cast<std::size_t>(j)].next;
    }
    CMatrix d = ct_prev * h_blk * b_prev + ct * h_blk * b_cur + ct_next * h_blk * b_next;
    return {std::move(d), group};
}

CVector cancel(const CVector& r, const ReconstructionMatrix& d, const CVector& lambda)
{
    if (lambda.size() != d.group.p()) {
        throw DimensionError("IC parameter vector length must equal group size");
    }
    if (d.group.empty()) {
        return r;
    }
    if (d.d.rows() != r.size()) {
        throw DimensionError("reconstruction matrix and received vector disagree on M");
    }
    return r - d.d * lambda;
}

CVector conventional_cancel(const CVector& r,
                            const ICGroup& group,
                            std::span<const CMatrix> regen,
                            std::span<const CVector> h_hat,
                            std::span<const double> a_hat)
{
    if (a_hat.size() != static_cast<std::size_t>(group.p())) {
        throw DimensionError("one amplitude estimate per group member");
    }
    const auto d = build_reconstruction_matrix(group, regen, h_hat);
    CVector lambda(group.p());
    for (int j = 0; j < group.p(); ++j) {
        lambda[j] = a_hat[static_cast<std::size_t>(j)];
    }
    return cancel(r, d, lambda);
}

std::vector<int> sic_schedule(std::span<const double> powers)
{
    std::vector<int> order(powers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return powers[static_cast<std::size_t>(a)] > powers[static_cast<std::size_t>(b)]; });
    return order;
}

ICGroup sic_group(std::span<const int> order, int position)
{
    if (position < 0 || position >= static_cast<int>(order.size())) {
        throw std::out_of_range("SIC position outside the schedule");
    }
    return ICGroup(std::vector<int>(order.begin(), order.begin() + position));
}

ICGroup pic_group(int k, int k_users)
{
    if (k < 0 || k >= k_users) {
        throw std::out_of_range("desired user outside [0, K)");
    }
    std::vector<int> members;
    members.reserve(static_cast<std::size_t>(k_users - 1));
    for (int j = 0; j < k_users; ++j) {
        if (j != k) {
            members.push_back(j);
        }
    }
    return ICGroup(std::move(members));
}

}  // namespace cdma
