#include "fairshare/rng.hpp"

namespace fairshare {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t state = master;
    const std::uint64_t base = splitmix64(state);
    state = base ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(state);
    return splitmix64(state);
}

Engine make_engine(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t state = stream_seed(master, stream);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
    return Engine(seq);
}

double sample_beta(Engine& engine, double alpha, double beta)
{
    std::gamma_distribution<double> gx(alpha, 1.0);
    std::gamma_distribution<double> gy(beta, 1.0);
    const double x = gx(engine);
    const double y = gy(engine);
    const double sum = x + y;
    // Both gammas underflow for tiny shapes; split the mass by the mean.
    if (!(sum > 0.0)) {
        std::bernoulli_distribution coin(alpha / (alpha + beta));
        return coin(engine) ? 1.0 : 0.0;
    }
    return x / sum;
}

}  // namespace fairshare
