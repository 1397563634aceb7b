// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Shows the training-side primitives on a toy trajectory: clipped policy
// term, GAE advantages, TD value loss, and the compound reward.

#include <cstdio>
#include <vector>

#include "cqa/rl.hpp"

int main() {
    std::printf("clipped term, advantage +1: ratio 2.0 -> %.2f (clipped at 1+eps)\n",
                cqa::ppo_clipped_term(2.0, 1.0, 0.2));
    std::printf("clipped term, advantage -1: ratio 0.5 -> %.2f (clipped at 1-eps)\n\n",
                cqa::ppo_clipped_term(0.5, -1.0, 0.2));

    std::vector<cqa::TrajectoryStep> traj{
        {0.0, 0.30, 0.55},
        {0.0, 0.55, 0.70},
        {1.0, 0.70, 0.00},
    };
    std::vector<double> adv = cqa::gae_advantages(traj, {0.95, 0.99, 0});
    for (std::size_t t = 0; t < adv.size(); ++t) {
        std::printf("gae step %zu: advantage %+.4f\n", t, adv[t]);
    }

    std::printf("\nvalue TD loss at the terminal step: %.4f\n",
                cqa::value_td_loss(1.0, 0.99, 0.0, 0.70));
    std::printf("compound reward for indicators {1,0,1,1}: %.2f\n",
                cqa::compound_reward({1, 0, 1, 1}));
    return 0;
}
