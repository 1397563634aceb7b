// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "cqa/rl.hpp"

namespace {

// Explicit double-sum form of GAE, independent of the backward recursion:
// A_t = sum_{l=0}^{H-1-t} (gamma*lambda)^l * delta_{t+l}.
std::vector<double> gae_oracle(const std::vector<cqa::TrajectoryStep>& traj,
                               const cqa::GaeParams& p) {
    std::size_t horizon = p.horizon > 0 ? std::min<std::size_t>(traj.size(),
                                                                static_cast<std::size_t>(p.horizon))
                                        : traj.size();
    std::vector<double> adv(horizon, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        double factor = 1.0;
        for (std::size_t l = 0; t + l < horizon; ++l) {
            adv[t] += factor * cqa::td_residual(traj[t + l], p.gamma);
            factor *= p.gamma * p.lambda;
        }
    }
    return adv;
}

std::vector<cqa::TrajectoryStep> random_trajectory(std::mt19937_64& rng, std::size_t len) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> values(len + 1);
    for (auto& v : values) v = dist(rng);
    std::vector<cqa::TrajectoryStep> traj(len);
    for (std::size_t i = 0; i < len; ++i) {
        traj[i] = {dist(rng), values[i], values[i + 1]};
    }
    return traj;
}

}  // namespace

TEST_CASE("ppo clipped term hand cases") {
    CHECK(cqa::ppo_clipped_term(2.0, 1.0, 0.2) == 1.2);
    CHECK(cqa::ppo_clipped_term(0.5, -1.0, 0.2) == -0.8);
    // inside the clip window the raw term survives
    CHECK(cqa::ppo_clipped_term(1.1, 1.0, 0.2) == Catch::Approx(1.1));
    CHECK(cqa::ppo_clipped_term(0.9, -1.0, 0.2) == Catch::Approx(-0.9));
    // zero advantage kills the term
    CHECK(cqa::ppo_clipped_term(3.7, 0.0, 0.2) == 0.0);
}

TEST_CASE("ppo clipped term input validation") {
    CHECK_THROWS_AS(cqa::ppo_clipped_term(0.0, 1.0, 0.2), cqa::InvalidRatio);
    CHECK_THROWS_AS(cqa::ppo_clipped_term(-0.5, 1.0, 0.2), cqa::InvalidRatio);
    CHECK_THROWS_AS(cqa::ppo_clipped_term(1.0, 1.0, 0.0), cqa::InvalidRatio);
    CHECK_THROWS_AS(cqa::ppo_clipped_term(1.0, 1.0, 1.0), cqa::InvalidRatio);
    CHECK_THROWS_AS(cqa::ppo_clipped_term(1.0, 1.0, -0.2), cqa::InvalidRatio);
    CHECK_NOTHROW(cqa::ppo_clipped_term(1.0, 1.0, 0.999));
}

TEST_CASE("ppo objective is the batch mean and rejects empty batches") {
    std::vector<cqa::RatioSample> batch{{2.0, 1.0}, {0.5, -1.0}};
    CHECK(cqa::ppo_objective(batch, 0.2) == Catch::Approx((1.2 - 0.8) / 2.0));
    CHECK_THROWS_AS(cqa::ppo_objective({}, 0.2), cqa::NoData);
}

TEST_CASE("ppo plateau: clipped region has zero slope, trust region is linear") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> adv_dist(0.1, 3.0);
    std::uniform_real_distribution<double> eps_dist(0.05, 0.5);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        double eps = eps_dist(rng);
        double a = adv_dist(rng);

        // positive advantage, ratio beyond 1+eps: flat
        double r_hi = 1.0 + eps + 0.5 + (i % 7) * 0.3;
        double slope_hi = (cqa::ppo_clipped_term(r_hi + h, a, eps) -
                           cqa::ppo_clipped_term(r_hi - h, a, eps)) /
                          (2 * h);
        CHECK(std::abs(slope_hi) < 1e-9);
        CHECK(cqa::ppo_clipped_term(r_hi, a, eps) == Catch::Approx((1.0 + eps) * a));

        // negative advantage, ratio below 1-eps: flat
        double r_lo = (1.0 - eps) * 0.5;
        double slope_lo = (cqa::ppo_clipped_term(r_lo + h, -a, eps) -
                           cqa::ppo_clipped_term(r_lo - h, -a, eps)) /
                          (2 * h);
        CHECK(std::abs(slope_lo) < 1e-9);
        CHECK(cqa::ppo_clipped_term(r_lo, -a, eps) == Catch::Approx(-(1.0 - eps) * a));

        // strictly inside the window the term is ratio * A for either sign
        double r_in = 1.0 + (eps * 0.5) * ((i % 2 == 0) ? 1 : -1);
        double slope_in = (cqa::ppo_clipped_term(r_in + h, a, eps) -
                           cqa::ppo_clipped_term(r_in - h, a, eps)) /
                          (2 * h);
        CHECK(slope_in == Catch::Approx(a).margin(1e-6));
    }
}

TEST_CASE("gae two-step worked example") {
    // delta_1 = 1.0 + 0.5*0.0 - 0.4 = 0.6; delta_0 = 0.0 + 0.5*0.4 - 0.2 = 0.0
    // A_1 = 0.6; A_0 = 0.0 + 0.5*1.0*0.6 = 0.3 with lambda=1
    std::vector<cqa::TrajectoryStep> traj{{0.0, 0.2, 0.4}, {1.0, 0.4, 0.0}};
    std::vector<double> adv = cqa::gae_advantages(traj, {1.0, 0.5, 0});
    REQUIRE(adv.size() == 2);
    CHECK(adv[1] == Catch::Approx(0.6));
    CHECK(adv[0] == Catch::Approx(0.3));

    // lambda = 0.5, gamma = 1: A_0 = delta_0 + 0.5 * delta_1 = 0.2 + 0.5*0.6
    std::vector<double> adv2 = cqa::gae_advantages(traj, {0.5, 1.0, 0});
    CHECK(adv2[1] == Catch::Approx(0.6));
    CHECK(adv2[0] == Catch::Approx(0.5));
}

TEST_CASE("gae recursion matches the double-sum oracle on 500 random trajectories") {
    std::mt19937_64 rng(123321);
    const double lambdas[] = {0.0, 0.5, 0.95, 1.0};
    const double gammas[] = {0.9, 1.0};
    int cases = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t len = 1 + rng() % 32;
        std::vector<cqa::TrajectoryStep> traj = random_trajectory(rng, len);
        cqa::GaeParams p;
        p.lambda = lambdas[trial % 4];
        p.gamma = gammas[(trial / 4) % 2];
        p.horizon = (trial % 5 == 0) ? static_cast<int>(1 + rng() % (len + 4)) : 0;
        std::vector<double> got = cqa::gae_advantages(traj, p);
        std::vector<double> want = gae_oracle(traj, p);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            INFO("trial " << trial << " t=" << i << " lambda=" << p.lambda
                          << " gamma=" << p.gamma << " horizon=" << p.horizon);
            REQUIRE(std::abs(got[i] - want[i]) <= 1e-12);
        }
        ++cases;
    }
    CHECK(cases == 500);
}

TEST_CASE("gae telescopes at lambda=gamma=1") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t len = 2 + rng() % 16;
        std::vector<cqa::TrajectoryStep> traj = random_trajectory(rng, len);
        std::vector<double> adv = cqa::gae_advantages(traj, {1.0, 1.0, 0});
        // sum of deltas telescopes: A_t = sum_u R_u + V_last_next - V_t
        double tail_reward = 0.0;
        for (std::size_t u = 0; u < len; ++u) tail_reward += traj[u].reward;
        double bootstrap = traj.back().next_value;
        for (std::size_t t = 0; t < len; ++t) {
            CHECK(adv[t] == Catch::Approx(tail_reward + bootstrap - traj[t].value).margin(1e-9));
            tail_reward -= traj[t].reward;
        }
    }
}

TEST_CASE("gae rejects inconsistent value chains and empty trajectories") {
    std::vector<cqa::TrajectoryStep> bad{{0.0, 0.2, 0.9}, {1.0, 0.4, 0.0}};
    try {
        cqa::gae_advantages(bad, {});
        FAIL("expected InconsistentValues");
    } catch (const cqa::InconsistentValues& e) {
        CHECK(std::string(e.what()).find("0") != std::string::npos);
    }
    CHECK_THROWS_AS(cqa::gae_advantages({}, {}), cqa::NoData);

    // the last step's next_value is the bootstrap slot and is unconstrained
    std::vector<cqa::TrajectoryStep> ok{{0.0, 0.2, 0.4}, {1.0, 0.4, 123.0}};
    CHECK_NOTHROW(cqa::gae_advantages(ok, {}));
}

TEST_CASE("value TD loss forms") {
    // delta = 0 + 1*1 - 0 = 1
    CHECK(cqa::value_td_loss(0.0, 1.0, 1.0, 0.0) == 0.5);            // squared default
    CHECK(cqa::value_td_loss(0.0, 1.0, 1.0, 0.0, false) == 0.5);     // linear: 1/2 * delta
    CHECK(cqa::value_td_loss(1.0, 0.9, 2.0, 0.5, true) ==
          Catch::Approx(0.5 * 2.3 * 2.3));
    CHECK(cqa::value_td_loss(1.0, 0.9, 2.0, 0.5, false) == Catch::Approx(0.5 * 2.3));
    CHECK(cqa::value_td_squared(0.0, 1.0, 0.0, 0.0) == 0.0);
    // squared form is nonnegative everywhere; linear is signed
    CHECK(cqa::value_td_loss(-3.0, 1.0, 0.0, 0.0) >= 0.0);
    CHECK(cqa::value_td_loss(-3.0, 1.0, 0.0, 0.0, false) < 0.0);
}

TEST_CASE("compound reward is the indicator mean") {
    CHECK(cqa::compound_reward({1, 0, 1, 1}) == 0.75);
    CHECK(cqa::compound_reward({0, 0}) == 0.0);
    CHECK(cqa::compound_reward({1}) == 1.0);
    CHECK_THROWS_AS(cqa::compound_reward({}), cqa::NoData);
}
