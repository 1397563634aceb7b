// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations of the training-side objectives used when the
// benchmark feeds an RL loop: the PPO clipped surrogate, lambda-discounted
// generalized advantage estimation, and the value-function TD objective.
//
// These are scalar formulas, not a training framework. They exist so the
// reward wiring can be unit-tested against closed forms.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cqa/errors.hpp"

namespace cqa {

/// One timestep of a trajectory: reward on entering, value estimate at the
/// state, and the value estimate at the successor (0 for terminal).
struct TrajectoryStep {
    double reward = 0.0;
    double value = 0.0;
    double next_value = 0.0;
};

struct RatioSample {
    double ratio = 1.0;      // pi_theta(a|s) / pi_theta_old(a|s), must be > 0
    double advantage = 0.0;  // estimated advantage for the sampled action
};

struct GaeParams {
    double lambda = 1.0;  // GAE decay, in [0, 1]
    double gamma = 1.0;   // reward discount, in (0, 1]; 1.0 matches the lambda-only form
    int horizon = 0;      // T; 0 means use the trajectory length
};

/// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A) for one sample.
inline double ppo_clipped_term(const RatioSample& s, double epsilon) {
    if (s.ratio <= 0.0) throw InvalidRatio(s.ratio);
    if (epsilon <= 0.0 || epsilon >= 1.0) throw InvalidRatio("clip epsilon must be in (0, 1)");
    double clipped = std::clamp(s.ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(s.ratio * s.advantage, clipped * s.advantage);
}

inline double ppo_clipped_term(double ratio, double advantage, double epsilon) {
    return ppo_clipped_term(RatioSample{ratio, advantage}, epsilon);
}

/// Mean clipped term over a batch (the maximized surrogate objective).
inline double ppo_objective(const std::vector<RatioSample>& batch, double epsilon) {
    if (batch.empty()) throw NoData("ppo objective over empty batch");
    double sum = 0.0;
    for (const auto& s : batch) sum += ppo_clipped_term(s, epsilon);
    return sum / static_cast<double>(batch.size());
}

/// TD residual at one step: delta_u = R_u + gamma * V(s_{u+1}) - V(s_u).
inline double td_residual(const TrajectoryStep& step, double gamma) {
    return step.reward + gamma * step.next_value - step.value;
}

namespace detail {
inline void check_chain(const std::vector<TrajectoryStep>& traj) {
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        if (traj[i].next_value != traj[i + 1].value) throw InconsistentValues(i);
    }
}
}  // namespace detail

/// GAE advantages for a full trajectory, computed by the backward recursion
///   A_t = delta_t + gamma * lambda * A_{t+1},   A_{T-1} = delta_{T-1}.
/// Equal (to rounding) to the explicit sum A_t = sum_l (gamma*lambda)^l delta_{t+l}.
/// Interior steps must satisfy next_value[t] == value[t+1].
inline std::vector<double> gae_advantages(const std::vector<TrajectoryStep>& traj,
                                          const GaeParams& params = {}) {
    if (traj.empty()) throw NoData("gae over empty trajectory");
    detail::check_chain(traj);
    std::size_t horizon = params.horizon > 0
                              ? std::min<std::size_t>(traj.size(), static_cast<std::size_t>(params.horizon))
                              : traj.size();
    std::vector<double> adv(horizon, 0.0);
    double carry = 0.0;
    for (std::size_t i = horizon; i-- > 0;) {
        double delta = td_residual(traj[i], params.gamma);
        carry = delta + params.gamma * params.lambda * carry;
        adv[i] = carry;
    }
    return adv;
}

/// Value objective at one step, linear form: 1/2 (R + gamma V' - V). Kept
/// because the published objective is written this way; the squared form
/// below is what a regression loop actually minimizes and is the default.
inline double value_td_linear(double reward, double gamma, double next_value, double value) {
    return 0.5 * td_residual({reward, value, next_value}, gamma);
}

/// Squared TD error: 1/2 (R + gamma V' - V)^2.
inline double value_td_squared(double reward, double gamma, double next_value, double value) {
    double delta = td_residual({reward, value, next_value}, gamma);
    return 0.5 * delta * delta;
}

inline double value_td_loss(double reward, double gamma, double next_value, double value,
                            bool squared = true) {
    return squared ? value_td_squared(reward, gamma, next_value, value)
                   : value_td_linear(reward, gamma, next_value, value);
}

/// Per-slot terminal reward for a compound episode: mean of slot indicators.
/// A k-question compound scored this way gives each question 1/k of the
/// return, which is what links the accuracy metric to the RL reward.
inline double compound_reward(const std::vector<int>& indicators) {
    if (indicators.empty()) throw NoData("reward over empty indicator set");
    double sum = 0.0;
    for (int ind : indicators) sum += ind;
    return sum / static_cast<double>(indicators.size());
}

}  // namespace cqa
