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

// Per-symbol detection pipelines. Every pipeline owns a bank of adaptive
// linear front-end filters (one per user) operating on the uncancelled
// observation one symbol ahead, which supplies the tentative next-symbol
// decisions needed to regenerate intersymbol interference.
//
//   linear  front-end only
//   sic     power-ordered single pass, conventional amplitude cancellation
//   pic     multistage all-but-one, conventional amplitude cancellation
//   jo-sic  power-ordered single pass, adaptive IC parameter vectors
//   jo-pic  multistage all-but-one, adaptive IC parameter vectors

#include "cdma/adaptive.hpp"
#include "cdma/ic_framework.hpp"
#include "cdma/signal_model.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdma {

enum class ReceiverKind { linear, sic, pic, jo_sic, jo_pic };

std::string_view to_string(ReceiverKind kind);
std::optional<ReceiverKind> parse_receiver(std::string_view name);

inline bool is_joint(ReceiverKind k) { return k == ReceiverKind::jo_sic || k == ReceiverKind::jo_pic; }
inline bool is_successive(ReceiverKind k) { return k == ReceiverKind::sic || k == ReceiverKind::jo_sic; }
inline bool is_parallel(ReceiverKind k) { return k == ReceiverKind::pic || k == ReceiverKind::jo_pic; }

struct ReceiverOptions {
    ReceiverKind kind = ReceiverKind::linear;
    StepSizes steps;
    int pic_stages = 3;
    /// Forgetting factor of the baseline amplitude and output-energy trackers.
    double amplitude_smoothing = 0.05;
    /// Keep adapting lambda and h_hat of the joint receivers after training.
    bool adapt_ic_in_dd = true;
};

/// What a base-station receiver knows about a packet before it arrives.
struct PacketSetup {
    std::vector<ConstraintMatrices> codes;
    /// Known training symbols (the first training_len symbols) of every user.
    std::vector<SymbolStream> training;
    long training_len = 0;
    long packet_len = 0;
    /// Powers used for SIC ordering while training symbols are available.
    std::vector<double> training_powers;
};

class Receiver {
public:
    Receiver(ReceiverOptions options, PacketSetup setup);

    /// Detects symbol i of every user from r[i]; r_next is r[i+1] or null at
    /// the last symbol. Symbols must be fed in order starting at 0.
    void step(long i, const CVector& r_cur, const CVector* r_next);

    /// Detector output for symbol i of user k (valid once step(i) ran).
    Complex decision(int k, long i) const;

    /// Channel estimate reported for user k (final stage for PIC variants).
    const CVector& channel_estimate(int k) const;

    /// Adaptive state of user k at stage m (m = 0 is the front-end).
    EstimatorState state(int k, int stage) const;

    const std::vector<int>& sic_order() const { return order_; }
    const std::vector<double>& amplitude_estimates() const { return amp_; }
    int users() const { return k_; }
    int stages() const;
    const ReceiverOptions& options() const { return opt_; }

private:
    struct UserStage {
        CVector w;
        CVector lambda;  // indexed by user id; entries of the current group are used
        CVector h_hat;
    };

    bool training(long t) const { return t < setup_.training_len; }
    Complex known_or(int k, long t, Complex fallback) const;
    Complex previous_ref(int k, long i) const;
    Complex next_tentative(int k, long i) const;

    void front_end(long t, const CVector& r);
    void front_end_channel(long i, const CVector& r);
    void run_sic(long i, const CVector& r);
    void run_pic(long i, const CVector& r);

    void track_amplitude(int k, const CVector& w, Complex x, const CVector& h_hat);
    /// Regenerated column for interferer j at stage m.
    CVector interferer_column(int j, int stage, Complex cur, long i) const;
    /// Cancel, filter, detect and adapt user k at stage m. Returns the decision.
    Complex process_user(int k, int stage, const ICGroup& group, const CMatrix& columns, long i,
                         const CVector& r);

    ReceiverOptions opt_;
    PacketSetup setup_;
    int k_ = 0;
    int lp_ = 0;
    int m_dim_ = 0;

    // Front-end.
    std::vector<CVector> w0_;
    std::vector<CVector> h0_;
    std::vector<std::vector<Complex>> x0_;
    std::vector<std::vector<Complex>> b0_;
    std::vector<double> amp_;
    std::vector<double> out_energy_;

    // IC stages; stages_[m-1][k].
    std::vector<std::vector<UserStage>> stages_;
    std::vector<std::vector<Complex>> final_;
    std::vector<int> order_;
};

}  // namespace cdma
