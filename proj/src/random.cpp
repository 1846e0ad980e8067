#include "nicki/random.hpp"

#include "nicki/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nicki {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

double Rng::uniform()
{
    // 53 random bits, shifted by half an ulp so 0 is never produced.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t n)
{
    if (n == 0) {
        throw ParameterError("Rng::index: empty range");
    }
    // Rejection sampling keeps the result unbiased.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return static_cast<std::size_t>(x % bound);
}

double Rng::gumbel()
{
    const double u = std::clamp(uniform(), 1e-12, 1.0 - 1e-12);
    return -std::log(-std::log(u));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream)
{
    return splitmix64(root ^ fnv1a(stream));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index)
{
    return splitmix64(derive_seed(root, stream) + index);
}

std::vector<double> gumbel_noise(std::size_t n, std::uint64_t seed)
{
    if (n == 0) {
        throw ParameterError("gumbel_noise: n must be at least 1");
    }
    Rng rng(seed);
    std::vector<double> out(n);
    for (double& g : out) {
        g = rng.gumbel();
    }
    return out;
}

} // namespace nicki
