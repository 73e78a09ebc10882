#include "smcheck/rng.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace smcheck {

namespace {

constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
constexpr double max_uniform = 1.0 - 0x1.0p-53;

std::uint64_t splitmix_next(std::uint64_t& x) noexcept
{
    x += golden_gamma;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    return splitmix_next(x);
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed)
{
    std::uint64_t x = seed;
    for (auto& word : state_)
        word = splitmix_next(x);
}

std::uint64_t RandomSource::next() noexcept
{
    auto& s = state_;
    const std::uint64_t result = std::rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = std::rotl(s[3], 45);
    return result;
}

std::uint64_t RandomSource::uniform_int(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("uniform_int: range must be non-empty");
    // Values below `threshold` would make the top partial block over-represented.
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r = next();
    while (r < threshold)
        r = next();
    return r % n;
}

double RandomSource::uniform01() noexcept
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

bool RandomSource::bernoulli(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("bernoulli: probability must lie in [0, 1], got " + std::to_string(p));
    return uniform01() < p;
}

double RandomSource::exponential(double mean)
{
    if (!(mean > 0.0))
        throw std::invalid_argument("exponential: mean must be positive, got " + std::to_string(mean));
    return exponential_from_uniform(mean, uniform01());
}

double RandomSource::exponential_from_uniform(double mean, double u)
{
    if (!(u >= 0.0))
        u = 0.0;
    if (u > max_uniform)
        u = max_uniform;
    return 0.0 - mean * std::log1p(-u);
}

RandomSource RandomSource::fork(std::uint64_t index) const
{
    return RandomSource(splitmix64(seed_ ^ splitmix64(index)));
}

} // namespace smcheck
