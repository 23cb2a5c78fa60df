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

#include "cdma/adaptive.hpp"

#include <cmath>
#include <stdexcept>

namespace cdma {

Complex detect(Complex x)
{
    return {x.real() >= 0.0 ? 1.0 : -1.0, x.imag() >= 0.0 ? 1.0 : -1.0};
}

void StepSizes::validate() const
{
    for (double mu : {mu_w, mu_lambda, mu_h}) {
        if (!std::isfinite(mu) || mu < 0.0) {
            throw std::invalid_argument("step sizes must be finite and non-negative");
        }
    }
}

ErrorSignals compute_errors(const EstimatorState& state,
                            const CVector& r,
                            const CVector& r_cancelled,
                            const CMatrix& f,
                            const ReconstructionMatrix& d,
                            Complex b_ref)
{
    ErrorSignals out;
    out.e_scalar = b_ref - state.w.dot(r_cancelled);
    out.e_vector = f * state.h_hat - r;
    if (!d.group.empty()) {
        out.e_vector += d.d * state.lambda;
    }
    return out;
}

CVector update_w(const EstimatorState& state, Complex e_scalar, const CVector& r_cancelled, double mu_w)
{
    return state.w + (mu_w * std::conj(e_scalar)) * r_cancelled;
}

CVector update_lambda(const EstimatorState& state,
                      const ReconstructionMatrix& d,
                      const CVector& e_vector,
                      double mu_lambda)
{
    if (d.group.empty()) {
        return state.lambda;
    }
    return state.lambda - mu_lambda * (d.d.adjoint() * e_vector);
}

CVector update_h(const EstimatorState& state, const CMatrix& f, const CVector& e_vector, double mu_h)
{
    return state.h_hat - mu_h * (f.adjoint() * e_vector);
}

double instantaneous_j2(const CVector& r,
                        const CMatrix& f,
                        const CVector& h_hat,
                        const CMatrix& d,
                        const CVector& lambda)
{
    CVector e = f * h_hat - r;
    if (lambda.size() > 0) {
        e += d * lambda;
    }
    return e.squaredNorm();
}

}  // namespace cdma
