#pragma once

#include <cstdint>
#include <random>

namespace fairshare {

using Engine = std::mt19937_64;

/// One SplitMix64 step: advances state and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `stream` (e.g. a trial index) under `master`. Streams are
/// decorrelated, and the mapping does not depend on how work is scheduled.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

Engine make_engine(std::uint64_t master, std::uint64_t stream);

/// Beta(alpha, beta) draw as X / (X + Y) with X ~ Gamma(alpha), Y ~ Gamma(beta).
double sample_beta(Engine& engine, double alpha, double beta);

}  // namespace fairshare
