#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace nicki {

/// Seeded generator with platform-stable conversions.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard; the real-valued conversions below are written out so that
/// results do not depend on the standard library's distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    double gumbel();

    template <typename It>
    void shuffle(It first, It last)
    {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = index(i);
            std::swap(first[static_cast<std::ptrdiff_t>(i - 1)], first[static_cast<std::ptrdiff_t>(j)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Child seed for a named stream: splitmix64(root ^ fnv1a(name)).
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

// n draws of −log(−log(u)), u clamped to [1e-12, 1 − 1e-12].
std::vector<double> gumbel_noise(std::size_t n, std::uint64_t seed);

} // namespace nicki
