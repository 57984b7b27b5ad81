#pragma once

#include <algorithm>
#include <random>

#include "fairshare/fairness.hpp"
#include "fairshare/model.hpp"
#include "fairshare/rng.hpp"

namespace fairshare::testing {

inline double uniform(Engine& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Engine& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Strict-mode parameters with the in-group preference ordering on psi.
inline ModelParams random_params(Engine& rng, int horizon)
{
    ModelParams p;
    p.pi_A = uniform(rng, 0.05, 0.95);
    p.q_A = uniform(rng, 0.51, 0.99);
    p.q_B = uniform(rng, 0.51, 0.99);
    p.horizon = horizon;
    auto ordered_pair = [&] {
        double x = uniform(rng, 0.01, 0.99);
        double y = uniform(rng, 0.01, 0.99);
        if (x < y) std::swap(x, y);
        if (x == y) x = std::min(0.99, y + 1e-3);
        return std::pair{x, y};
    };
    const auto [aa, ab] = ordered_pair();
    const auto [bb, ba] = ordered_pair();
    p.psi(Group::A, Article::a) = aa;
    p.psi(Group::A, Article::b) = ab;
    p.psi(Group::B, Article::b) = bb;
    p.psi(Group::B, Article::a) = ba;
    return p;
}

// Log-uniform bounds on both sides of 1.
inline FairnessBounds random_bounds(Engine& rng)
{
    return {std::exp(uniform(rng, std::log(0.02), std::log(0.98))),
            std::exp(uniform(rng, std::log(1.02), std::log(50.0)))};
}

}  // namespace fairshare::testing
