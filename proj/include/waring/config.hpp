#pragma once

#include <cstdint>
#include <string_view>

namespace waring {

inline constexpr std::string_view kVersion = "0.1.0";

/// Numerical thresholds shared by every engine.
struct Tolerances {
    double real = 1e-8;      ///< |im| bound for classifying a point or root as real
    double pair = 1e-6;      ///< max distance between a root and its conjugate partner
    double sep = 1e-6;       ///< min distance between distinct roots (square-free test)
    double rank = 1e-10;     ///< relative singular value cutoff
    double residual = 1e-8;  ///< relative residual for span membership
    double root = 1e-9;      ///< scaled backward error accepted from the root finder
    double distinct = 1e-8;  ///< min distance between distinct points of a set

    bool valid() const noexcept
    {
        return real > 0 && pair > 0 && sep > 0 && rank > 0 && residual > 0 && root > 0 &&
               distinct > 0;
    }
};

/// Levenberg-Marquardt settings for the Veronese engine.
struct NLSConfig {
    int max_iters = 2000;
    double lambda_init = 1e-3;
    double gradient_tol = 1e-15;
    double residual_tol = 1e-6;
    int restarts = 8;
    std::uint64_t seed = 1;
    int threads = 1;
    int stall_window = 200;  ///< abandon a run whose residual fails to drop 30% over this many iterations (0 = never)

    bool valid() const noexcept
    {
        return max_iters > 0 && lambda_init > 0 && gradient_tol > 0 && residual_tol > 0 &&
               restarts > 0 && threads > 0 && stall_window >= 0;
    }
};

struct GlobalConfig {
    Tolerances tol;
    NLSConfig nls;
    std::uint64_t seed = 1;
    int max_retries = 20;
    int kernel_budget = 256;
    bool prefer_pair = false;

    bool valid() const noexcept
    {
        return tol.valid() && nls.valid() && max_retries > 0 && kernel_budget > 0;
    }
};

} // namespace waring
