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

// Interference regeneration and cancellation. A cancellation group G of P
// users is regenerated into the M x P matrix D whose columns are F_j h_j, and
// the desired user's observation becomes r - D lambda. Conventional
// amplitude-based cancellation is the special case lambda_j = A_j.

#include "cdma/signal_model.hpp"
#include "cdma/types.hpp"

#include <span>
#include <vector>

namespace cdma {

/// Ordered, duplicate-free list of users to regenerate and subtract. May be
/// empty (first SIC user, single-user PIC), in which case cancellation is the
/// identity.
class ICGroup {
public:
    ICGroup() = default;
    explicit ICGroup(std::vector<int> members);

    const std::vector<int>& members() const { return members_; }
    int p() const { return static_cast<int>(members_.size()); }
    bool empty() const { return members_.empty(); }
    int operator[](int j) const { return members_[static_cast<std::size_t>(j)]; }

private:
    std::vector<int> members_;
};

/// F = b_prev C_p + b_cur C + b_next C_s (M x Lp).
CMatrix build_regen_matrix(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next);

/// F h without materialising F.
CVector regenerate(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next,
                   const CVector& h);

/// F^H e without materialising F.
CVector regen_adjoint(const ConstraintMatrices& cm, Complex b_prev, Complex b_cur, Complex b_next,
                      const CVector& e);

struct ReconstructionMatrix {
    CMatrix d;
    ICGroup group;
};

/// Column j of D is F_{G_j} h_{G_j}.
ReconstructionMatrix build_reconstruction_matrix(const ICGroup& group,
                                                 std::span<const CMatrix> regen,
                                                 std::span<const CVector> h_hat);

/// Symbol decisions of one user for the previous, current and next slot.
struct SymbolTriple {
    Complex prev;
    Complex cur;
    Complex next;
};

/// Block form D = C_T^p H B[i-1] + C_T H B[i] + C_T^s H B[i+1], built from
/// the stacked code matrices, the block-diagonal channel matrix and the
/// diagonal symbol matrices. Numerically equal to build_reconstruction_matrix.
ReconstructionMatrix build_reconstruction_matrix_block(const ICGroup& group,
                                                       std::span<const ConstraintMatrices> cms,
                                                       std::span<const CVector> h_hat,
                                                       std::span<const SymbolTriple> decisions);

/// r - D lambda.
CVector cancel(const CVector& r, const ReconstructionMatrix& d, const CVector& lambda);

/// r - sum_j a_hat_j F_j h_j.
CVector conventional_cancel(const CVector& r,
                            const ICGroup& group,
                            std::span<const CMatrix> regen,
                            std::span<const CVector> h_hat,
                            std::span<const double> a_hat);

/// Detection order by decreasing power; ties go to the lower user index.
std::vector<int> sic_schedule(std::span<const double> powers);

/// Users detected before position `position` in a SIC order.
ICGroup sic_group(std::span<const int> order, int position);

/// All users except k, ascending.
ICGroup pic_group(int k, int k_users);

}  // namespace cdma
