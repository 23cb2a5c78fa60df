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

// Stochastic-gradient estimators for the linear front-end filter w, the IC
// parameter vector lambda and the channel estimate h_hat.
//
// Costs (per symbol, instantaneous):
//   J1(w)           = |b - w^H r_c|^2,              r_c = r - D lambda
//   J2(lambda, h)   = || F h - r + D lambda ||^2
// Gradients w.r.t. the conjugate parameters:
//   dJ1/dw*       = -r_c e*,   e = b - w^H r_c
//   dJ2/dlambda*  =  D^H e_v,  e_v = F h - r + D lambda
//   dJ2/dh*       =  F^H e_v

#include "cdma/ic_framework.hpp"
#include "cdma/types.hpp"

namespace cdma {

/// Hard QPSK decision sgn(Re x) + j sgn(Im x) with sgn(0) = +1.
Complex detect(Complex x);

struct StepSizes {
    double mu_w = 0.0;
    double mu_lambda = 0.0;
    double mu_h = 0.0;

    /// Throws unless every step is finite and non-negative.
    void validate() const;

    friend bool operator==(const StepSizes&, const StepSizes&) = default;
};

struct EstimatorState {
    CVector w;
    CVector lambda;
    CVector h_hat;
    int stage = 1;
};

struct ErrorSignals {
    Complex e_scalar;
    CVector e_vector;
};

/// e = b_ref - w^H r_c and e_v = F h - r + D lambda.
ErrorSignals compute_errors(const EstimatorState& state,
                            const CVector& r,
                            const CVector& r_cancelled,
                            const CMatrix& f,
                            const ReconstructionMatrix& d,
                            Complex b_ref);

/// w + mu e* r_c
CVector update_w(const EstimatorState& state, Complex e_scalar, const CVector& r_cancelled, double mu_w);

/// lambda - mu D^H e_v
CVector update_lambda(const EstimatorState& state,
                      const ReconstructionMatrix& d,
                      const CVector& e_vector,
                      double mu_lambda);

/// h - mu F^H e_v
CVector update_h(const EstimatorState& state, const CMatrix& f, const CVector& e_vector, double mu_h);

/// Instantaneous J2 at (lambda, h); used by gradient checks and diagnostics.
double instantaneous_j2(const CVector& r,
                        const CMatrix& f,
                        const CVector& h_hat,
                        const CMatrix& d,
                        const CVector& lambda);

}  // namespace cdma
