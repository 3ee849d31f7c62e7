#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "waring/errors.hpp"

namespace waring {

using Exponent = std::vector<int>;

inline double factorial(int k)
{
    double r = 1.0;
    for (int i = 2; i <= k; ++i)
        r *= i;
    return r;
}

inline std::int64_t binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    if (k > n - k)
        k = n - k;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

/// d! / (alpha_0! ... alpha_n!)
inline double multinomial(std::span<const int> alpha)
{
    int d = 0;
    double denom = 1.0;
    for (int a : alpha) {
        d += a;
        denom *= factorial(a);
    }
    return factorial(d) / denom;
}

/// Exponent vectors of total degree d in n+1 variables, graded-lex order:
/// x0^d first, then decreasing powers of x0, recursively. For binary forms
/// entry i is x^(d-i) y^i.
class MonomialBasis {
public:
    MonomialBasis(int n, int d) : n_(n), d_(d)
    {
        if (n < 0 || d < 0)
            throw InvalidArgument("MonomialBasis: n and d must be non-negative");
        Exponent cur(static_cast<std::size_t>(n + 1), 0);
        fill(0, d, cur);
        for (std::size_t i = 0; i < exps_.size(); ++i)
            index_.emplace(exps_[i], i);
    }

    int n() const noexcept { return n_; }
    int d() const noexcept { return d_; }
    std::size_t size() const noexcept { return exps_.size(); }
    const Exponent& operator[](std::size_t i) const { return exps_[i]; }
    const std::vector<Exponent>& exponents() const noexcept { return exps_; }

    /// Position of alpha, or size() when alpha is not a degree-d exponent.
    std::size_t index_of(const Exponent& alpha) const
    {
        auto it = index_.find(alpha);
        return it == index_.end() ? exps_.size() : it->second;
    }

private:
    void fill(std::size_t var, int remaining, Exponent& cur)
    {
        if (var == cur.size() - 1) {
            cur[var] = remaining;
            exps_.push_back(cur);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[var] = e;
            fill(var + 1, remaining - e, cur);
        }
        cur[var] = 0;
    }

    int n_;
    int d_;
    std::vector<Exponent> exps_;
    std::map<Exponent, std::size_t> index_;
};

/// Number of monomials of degree d in n+1 variables.
inline std::size_t monomial_count(int n, int d)
{
    return static_cast<std::size_t>(binomial(n + d, n));
}

} // namespace waring
