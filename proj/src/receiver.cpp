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

#include "cdma/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdma {

std::string_view to_string(ReceiverKind kind)
{
    switch (kind) {
    case ReceiverKind::linear:
        return "linear";
    case ReceiverKind::sic:
        return "sic";
    case ReceiverKind::pic:
        return "pic";
    case ReceiverKind::jo_sic:
        return "jo-sic";
    case ReceiverKind::jo_pic:
        return "jo-pic";
    }
    return "unknown";
}

std::optional<ReceiverKind> parse_receiver(std::string_view name)
{
    for (auto k : {ReceiverKind::linear, ReceiverKind::sic, ReceiverKind::pic, ReceiverKind::jo_sic,
                   ReceiverKind::jo_pic}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

Receiver::Receiver(ReceiverOptions options, PacketSetup setup)
    : opt_(options), setup_(std::move(setup))
{
    opt_.steps.validate();
    k_ = static_cast<int>(setup_.codes.size());
    if (k_ < 1) {
        throw std::invalid_argument("receiver needs at least one user");
    }
    if (setup_.training.size() != setup_.codes.size() ||
        setup_.training_powers.size() != setup_.codes.size()) {
        throw DimensionError("training symbols and powers must be given for every user");
    }
    if (setup_.packet_len < 1 || setup_.training_len < 0 || setup_.training_len > setup_.packet_len) {
        throw std::invalid_argument("invalid packet or training length");
    }
    if (is_parallel(opt_.kind) && opt_.pic_stages < 1) {
        throw std::invalid_argument("PIC needs at least one stage");
    }
    lp_ = setup_.codes[0].lp;
    m_dim_ = setup_.codes[0].m_dim;
    for (int k = 0; k < k_; ++k) {
        const auto& cm = setup_.codes[static_cast<std::size_t>(k)];
        if (cm.lp != lp_ || cm.m_dim != m_dim_) {
            throw DimensionError("all users must share N and Lp");
        }
        if (static_cast<long>(setup_.training[static_cast<std::size_t>(k)].size()) < setup_.training_len) {
            throw DimensionError("training sequence shorter than the training length");
        }
    }

    const auto len = static_cast<std::size_t>(setup_.packet_len);
    const auto uk = static_cast<std::size_t>(k_);
    CVector h_init = CVector::Zero(lp_);
    h_init[0] = 1.0;

    w0_.resize(uk);
    h0_.assign(uk, h_init);
    x0_.assign(uk, std::vector<Complex>(len));
    b0_.assign(uk, std::vector<Complex>(len));
    amp_.assign(uk, 1.0);
    out_energy_.assign(uk, 2.0);
    final_.assign(uk, std::vector<Complex>(len));

    std::vector<UserStage> bank(uk);
    for (int k = 0; k < k_; ++k) {
        // Matched filter to the code convolved with the initial channel guess.
        const CVector mf = setup_.codes[static_cast<std::size_t>(k)].c.cast<Complex>() * h_init;
        w0_[static_cast<std::size_t>(k)] = mf / mf.norm();
        bank[static_cast<std::size_t>(k)] = {w0_[static_cast<std::size_t>(k)], CVector::Ones(k_), h_init};
    }
    stages_.assign(static_cast<std::size_t>(stages()), bank);
    order_ = sic_schedule(setup_.training_powers);
}

int Receiver::stages() const
{
    if (opt_.kind == ReceiverKind::linear) {
        return 0;
    }
    return is_parallel(opt_.kind) ? opt_.pic_stages : 1;
}

Complex Receiver::known_or(int k, long t, Complex fallback) const
{
    if (t < 0 || t >= setup_.packet_len) {
        return {0.0, 0.0};
    }
    if (training(t)) {
        return setup_.training[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
    }
    return fallback;
}

Complex Receiver::previous_ref(int k, long i) const
{
    if (i < 1) {
        return {0.0, 0.0};
    }
    const auto& src = opt_.kind == ReceiverKind::linear ? b0_ : final_;
    return known_or(k, i - 1, src[static_cast<std::size_t>(k)][static_cast<std::size_t>(i - 1)]);
}

Complex Receiver::next_tentative(int k, long i) const
{
    if (i + 1 >= setup_.packet_len) {
        return {0.0, 0.0};
    }
    return known_or(k, i + 1, b0_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i + 1)]);
}

Complex Receiver::decision(int k, long i) const
{
    return final_.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(i));
}

const CVector& Receiver::channel_estimate(int k) const
{
    const auto uk = static_cast<std::size_t>(k);
    if (opt_.kind == ReceiverKind::linear) {
        return h0_.at(uk);
    }
    return stages_.back().at(uk).h_hat;
}

EstimatorState Receiver::state(int k, int stage) const
{
    const auto uk = static_cast<std::size_t>(k);
    if (stage == 0) {
        return {w0_.at(uk), CVector(0), h0_.at(uk), 0};
    }
    const auto& us = stages_.at(static_cast<std::size_t>(stage - 1)).at(uk);
    return {us.w, us.lambda, us.h_hat, stage};
}

void Receiver::front_end(long t, const CVector& r)
{
    const auto ut = static_cast<std::size_t>(t);
    for (int k = 0; k < k_; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const Complex x = w0_[uk].dot(r);
        const Complex b = detect(x);
        x0_[uk][ut] = x;
        b0_[uk][ut] = b;
        const Complex ref = known_or(k, t, b);
        const EstimatorState st{w0_[uk], CVector(0), CVector(0), 0};
        w0_[uk] = update_w(st, ref - x, r, opt_.steps.mu_w);
    }
}

void Receiver::front_end_channel(long i, const CVector& r)
{
    const auto ui = static_cast<std::size_t>(i);
    const double rho = opt_.amplitude_smoothing;
    for (int k = 0; k < k_; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const auto& cm = setup_.codes[uk];
        const Complex cur = known_or(k, i, b0_[uk][ui]);
        const CMatrix f = build_regen_matrix(cm, previous_ref(k, i), cur, next_tentative(k, i));
        const EstimatorState st{w0_[uk], CVector(0), h0_[uk], 0};
        const CVector e_vec = f * h0_[uk] - r;
        h0_[uk] = update_h(st, f, e_vec, opt_.steps.mu_h);

        const Complex x = x0_[uk][ui];
        out_energy_[uk] = (1.0 - rho) * out_energy_[uk] + rho * std::norm(x);

    }
}

void Receiver::step(long i, const CVector& r_cur, const CVector* r_next)
{
    if (i < 0 || i >= setup_.packet_len) {
        throw std::out_of_range("symbol index outside the packet");
    }
    if (r_cur.size() != m_dim_ || (r_next != nullptr && r_next->size() != m_dim_)) {
        throw DimensionError("received vector length differs from M");
    }
    if (i == 0) {
        front_end(0, r_cur);
    }
    if (r_next != nullptr && i + 1 < setup_.packet_len) {
        front_end(i + 1, *r_next);
    }
    front_end_channel(i, r_cur);

    if (opt_.kind == ReceiverKind::linear) {
        for (int k = 0; k < k_; ++k) {
            final_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                b0_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        }
        return;
    }
    if (is_successive(opt_.kind)) {
        run_sic(i, r_cur);
    } else {
        run_pic(i, r_cur);
    }
}

CVector Receiver::interferer_column(int j, int stage, Complex cur, long i) const
{
    const auto uj = static_cast<std::size_t>(j);
    CVector h = stages_[static_cast<std::size_t>(stage - 1)][uj].h_hat;
    if (!is_joint(opt_.kind)) {
        // Conventional cancellation scales a unit-energy channel by A_hat.
        const double n = h.norm();
        if (n > 0.0) {
            h /= n;
        }
    }
    return regenerate(setup_.codes[uj], previous_ref(j, i), cur, next_tentative(j, i), h);
}

Complex Receiver::process_user(int k, int stage, const ICGroup& group, const CMatrix& columns, long i,
                               const CVector& r)
{
    const auto uk = static_cast<std::size_t>(k);
    auto& us = stages_[static_cast<std::size_t>(stage - 1)][uk];
    const bool joint = is_joint(opt_.kind);

    CVector lambda(group.p());
    for (int j = 0; j < group.p(); ++j) {
        const int member = group[j];
        lambda[j] = joint ? us.lambda[member] : Complex(amp_[static_cast<std::size_t>(member)], 0.0);
    }
    const ReconstructionMatrix d{columns, group};
    const EstimatorState work{us.w, std::move(lambda), us.h_hat, stage};

    const CVector r_c = cancel(r, d, work.lambda);
    const Complex x = work.w.dot(r_c);
    const Complex b_hat = detect(x);
    const Complex ref = known_or(k, i, b_hat);

    const CMatrix f = build_regen_matrix(setup_.codes[uk], previous_ref(k, i), ref, next_tentative(k, i));
    const ErrorSignals err = compute_errors(work, r, r_c, f, d, ref);

    us.w = update_w(work, err.e_scalar, r_c, opt_.steps.mu_w);
    const bool adapt_ic = !joint || training(i) || opt_.adapt_ic_in_dd;
    if (adapt_ic) {
        if (joint && !group.empty()) {
            const CVector updated = update_lambda(work, d, err.e_vector, opt_.steps.mu_lambda);
            for (int j = 0; j < group.p(); ++j) {
                us.lambda[group[j]] = updated[j];
            }
        }
        us.h_hat = update_h(work, f, err.e_vector, opt_.steps.mu_h);
    }
    if (!joint && stage == stages()) {
        track_amplitude(k, work.w, x, us.h_hat);
    }
    return b_hat;
}

void Receiver::track_amplitude(int k, const CVector& w, Complex x, const CVector& h_hat)
{
    // Filter output magnitude divided by the filter's gain on the unit-energy
    // signature estimate and by the QPSK symbol magnitude.
    const auto uk = static_cast<std::size_t>(k);
    const double hn = h_hat.norm();
    if (hn == 0.0) {
        return;
    }
    const CVector g = setup_.codes[uk].c.cast<Complex>() * (h_hat / hn);
    const double gain = std::abs(w.dot(g)) * std::sqrt(2.0);
    if (gain < 1e-9) {
        return;
    }
    const double rho = opt_.amplitude_smoothing;
    amp_[uk] = (1.0 - rho) * amp_[uk] + rho * std::abs(x) / gain;
}

void Receiver::run_sic(long i, const CVector& r)
{
    const auto ui = static_cast<std::size_t>(i);
    if (training(i)) {
        order_ = sic_schedule(setup_.training_powers);
    } else {
        std::vector<double> est(static_cast<std::size_t>(k_));
        for (int k = 0; k < k_; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            est[uk] = stages_[0][uk].h_hat.squaredNorm() * out_energy_[uk];
        }
        order_ = sic_schedule(est);
    }

    CMatrix columns(m_dim_, k_);
    for (int pos = 0; pos < k_; ++pos) {
        const int k = order_[static_cast<std::size_t>(pos)];
        const ICGroup group = sic_group(order_, pos);
        const Complex b_hat = process_user(k, 1, group, columns.leftCols(pos), i, r);
        final_[static_cast<std::size_t>(k)][ui] = b_hat;
        columns.col(pos) = interferer_column(k, 1, known_or(k, i, b_hat), i);
    }
}

void Receiver::run_pic(long i, const CVector& r)
{
    const auto ui = static_cast<std::size_t>(i);
    std::vector<Complex> prev(static_cast<std::size_t>(k_));
    for (int k = 0; k < k_; ++k) {
        prev[static_cast<std::size_t>(k)] = known_or(k, i, b0_[static_cast<std::size_t>(k)][ui]);
    }
    std::vector<Complex> next(prev.size());
    CMatrix all(m_dim_, k_);
    CMatrix columns(m_dim_, std::max(k_ - 1, 0));
    for (int m = 1; m <= stages(); ++m) {
        // Every user of a stage sees the same snapshot of the previous stage.
        for (int j = 0; j < k_; ++j) {
            all.col(j) = interferer_column(j, m, prev[static_cast<std::size_t>(j)], i);
        }
        for (int k = 0; k < k_; ++k) {
            const ICGroup group = pic_group(k, k_);
            for (int j = 0; j < group.p(); ++j) {
                columns.col(j) = all.col(group[j]);
            }
            const Complex b_hat = process_user(k, m, group, columns, i, r);
            next[static_cast<std::size_t>(k)] = b_hat;
            if (m == stages()) {
                final_[static_cast<std::size_t>(k)][ui] = b_hat;
            }
        }
        for (int k = 0; k < k_; ++k) {
            prev[static_cast<std::size_t>(k)] = known_or(k, i, next[static_cast<std::size_t>(k)]);
        }
    }
}

}  // namespace cdma
