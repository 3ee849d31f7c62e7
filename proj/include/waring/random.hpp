#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "waring/algebra.hpp"

namespace waring {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the independent substream for (seed, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Deterministic random stream; one per trial or restart.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    Complex complex_normal() { return {normal(), normal()}; }

    std::vector<double> normal_vector(std::size_t n)
    {
        std::vector<double> v(n);
        for (auto& x : v)
            x = normal();
        return v;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline ProjectivePoint random_real_point(Rng& rng, int n)
{
    std::vector<Complex> c(static_cast<std::size_t>(n + 1));
    for (auto& z : c)
        z = rng.normal();
    return ProjectivePoint(std::move(c));
}

inline ProjectivePoint random_complex_point(Rng& rng, int n)
{
    std::vector<Complex> c(static_cast<std::size_t>(n + 1));
    for (auto& z : c)
        z = rng.complex_normal();
    return ProjectivePoint(std::move(c), 0.0);
}

} // namespace waring
