#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "waring/algebra.hpp"
#include "waring/label.hpp"

namespace waring {

namespace detail {

inline Complex horner(std::span<const Complex> c, Complex t)
{
    Complex v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;)
        v = v * t + c[i];
    return v;
}

inline Complex horner_derivative(std::span<const Complex> c, Complex t)
{
    Complex v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;)
        v = v * t + static_cast<double>(i) * c[i];
    return v;
}

/// Parlett-Reinsch balancing with radix 2 (exact in floating point).
template <typename Matrix>
void balance(Matrix& a)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0)
                continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

} // namespace detail

/// Scaled backward error |p(t)| / sum |c_i| |t|^i.
inline double root_backward_error(std::span<const Complex> c, Complex t)
{
    double scale = 0.0;
    double at = std::abs(t);
    double pw = 1.0;
    for (const auto& ci : c) {
        scale += std::abs(ci) * pw;
        pw *= at;
    }
    return scale == 0.0 ? 0.0 : std::abs(detail::horner(c, t)) / scale;
}

/// Roots (with multiplicity) of sum_i c[i] t^i, coefficients in ascending
/// order. Highest-order zeros are trimmed. Balanced companion matrix
/// eigenvalues followed by one Newton step per root.
inline std::vector<Complex> univariate_roots(std::span<const Complex> coeffs)
{
    std::size_t len = coeffs.size();
    while (len > 0 && coeffs[len - 1] == Complex{})
        --len;
    if (len == 0)
        throw InvalidArgument("univariate_roots: zero polynomial");
    for (std::size_t i = 0; i < len; ++i)
        if (!is_finite(coeffs[i]))
            throw InvalidArgument("univariate_roots: non-finite coefficient");
    const std::span<const Complex> c = coeffs.first(len);
    const auto m = static_cast<Eigen::Index>(len - 1);
    if (m == 0)
        return {};

    const bool real = std::ranges::all_of(c, [](Complex z) { return z.imag() == 0.0; });
    Eigen::VectorXcd eig;
    if (real) {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 1; i < m; ++i)
            comp(i, i - 1) = 1.0;
        for (Eigen::Index i = 0; i < m; ++i)
            comp(i, m - 1) = -c[static_cast<std::size_t>(i)].real() / c[len - 1].real();
        detail::balance(comp);
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success)
            throw Error("univariate_roots: eigenvalue iteration did not converge");
        eig = es.eigenvalues();
    } else {
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
        for (Eigen::Index i = 1; i < m; ++i)
            comp(i, i - 1) = 1.0;
        for (Eigen::Index i = 0; i < m; ++i)
            comp(i, m - 1) = -c[static_cast<std::size_t>(i)] / c[len - 1];
        detail::balance(comp);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        if (es.info() != Eigen::Success)
            throw Error("univariate_roots: eigenvalue iteration did not converge");
        eig = es.eigenvalues();
    }

    std::vector<Complex> roots(eig.data(), eig.data() + eig.size());
    for (auto& t : roots) {
        const Complex dp = detail::horner_derivative(c, t);
        if (dp == Complex{})
            continue;
        const Complex next = t - detail::horner(c, t) / dp;
        if (is_finite(next) && std::abs(detail::horner(c, next)) < std::abs(detail::horner(c, t)))
            t = next;
    }
    return roots;
}

inline std::vector<Complex> univariate_roots(std::span<const double> coeffs)
{
    std::vector<Complex> c(coeffs.begin(), coeffs.end());
    return univariate_roots(std::span<const Complex>(c));
}

/// Roots split into real ones and conjugate pairs (one representative with
/// positive imaginary part per pair).
struct RootPartition {
    std::vector<double> real;
    std::vector<Complex> pairs;

    Label label() const
    {
        return Label(static_cast<int>(pairs.size()), static_cast<int>(real.size()));
    }
};

/// Classifies roots with |im| <= tau_real (1 + |z|) as real and greedily
/// matches the rest to their nearest conjugate. Throws PairingFailure when a
/// root has no partner within tau_pair (1 + |z|).
inline RootPartition pair_conjugate_roots(std::span<const Complex> roots, double tau_real,
                                          double tau_pair)
{
    RootPartition out;
    std::vector<Complex> rest;
    for (const auto& z : roots) {
        if (!is_finite(z))
            throw InvalidArgument("pair_conjugate_roots: non-finite root");
        if (std::abs(z.imag()) <= tau_real * (1.0 + std::abs(z)))
            out.real.push_back(z.real());
        else
            rest.push_back(z);
    }
    std::vector<bool> used(rest.size(), false);
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        const Complex target = std::conj(rest[i]);
        std::size_t best = rest.size();
        double best_dist = 0.0;
        for (std::size_t j = 0; j < rest.size(); ++j) {
            if (used[j])
                continue;
            const double dist = std::abs(rest[j] - target);
            if (best == rest.size() || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (best == rest.size() || best_dist > tau_pair * (1.0 + std::abs(rest[i])))
            throw PairingFailure("pair_conjugate_roots: root has no conjugate partner");
        used[best] = true;
        const Complex a = rest[i];
        const Complex b = rest[best];
        // representative: average of z and conj(partner), upper half plane
        Complex rep = 0.5 * (a + std::conj(b));
        if (rep.imag() < 0.0)
            rep = std::conj(rep);
        out.pairs.push_back(rep);
    }
    return out;
}

inline RootPartition pair_conjugate_roots(std::span<const Complex> roots,
                                          const Tolerances& tol = {})
{
    return pair_conjugate_roots(roots, tol.real, tol.pair);
}

/// Zeros of a real binary form g(X, Y) = sum_j g_j X^(k-j) Y^j as points of P^1.
struct BinaryRoots {
    std::vector<ProjectivePoint> real_points;
    std::vector<ProjectivePoint> pair_points;  ///< one representative per conjugate pair
    double min_separation = 0.0;               ///< over all k zeros, conjugates included

    Label label() const
    {
        return Label(static_cast<int>(pair_points.size()), static_cast<int>(real_points.size()));
    }

    std::vector<ProjectivePoint> all() const
    {
        std::vector<ProjectivePoint> out = real_points;
        for (const auto& p : pair_points) {
            out.push_back(p);
            out.push_back(conjugate_point(p));
        }
        return out;
    }
};

namespace detail {

/// Coefficients (ascending in t) of g(c - s t, s + c t).
inline std::vector<Complex> rotate_binary(std::span<const double> g, double c, double s)
{
    const std::size_t k = g.size() - 1;
    std::vector<Complex> out(k + 1, 0.0);
    std::vector<double> poly;
    for (std::size_t j = 0; j <= k; ++j) {
        if (g[j] == 0.0)
            continue;
        poly.assign(1, g[j]);
        auto mul = [&poly](double a0, double a1) {
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i] * a0;
                next[i + 1] += poly[i] * a1;
            }
            poly.swap(next);
        };
        for (std::size_t e = 0; e < k - j; ++e)
            mul(c, -s);
        for (std::size_t e = 0; e < j; ++e)
            mul(s, c);
        for (std::size_t i = 0; i < poly.size(); ++i)
            out[i] += poly[i];
    }
    return out;
}

} // namespace detail

/// Roots of a real binary form. The form is first rotated by a real angle
/// that keeps the leading coefficient large, so zeros at or near infinity are
/// handled without special cases; rotation preserves realness of roots.
inline BinaryRoots binary_form_roots(std::span<const double> g, const Tolerances& tol = {})
{
    if (g.size() < 2)
        throw InvalidArgument("binary_form_roots: degree must be at least 1");
    const double gmax = std::ranges::max(g, {}, [](double x) { return std::abs(x); });
    if (gmax == 0.0)
        throw InvalidArgument("binary_form_roots: zero form");
    const std::size_t k = g.size() - 1;

    constexpr int kAngles = 16;
    double best_lead = -1.0;
    double cbest = 1.0;
    double sbest = 0.0;
    for (int m = 0; m < kAngles; ++m) {
        const double theta = std::numbers::pi * m / kAngles;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // g(-s, c)
        double lead = 0.0;
        for (std::size_t j = 0; j <= k; ++j)
            lead += g[j] * std::pow(-s, static_cast<double>(k - j)) * std::pow(c, static_cast<double>(j));
        if (std::abs(lead) > best_lead) {
            best_lead = std::abs(lead);
            cbest = c;
            sbest = s;
        }
    }

    const std::vector<Complex> h = detail::rotate_binary(g, cbest, sbest);
    const std::vector<Complex> ts = univariate_roots(h);
    const RootPartition part = pair_conjugate_roots(ts, tol);

    BinaryRoots out;
    auto to_point = [&](Complex t) {
        return ProjectivePoint({cbest - sbest * t, sbest + cbest * t}, 0.0);
    };
    for (double t : part.real)
        out.real_points.push_back(ProjectivePoint({Complex(cbest - sbest * t), Complex(sbest + cbest * t)}));
    for (const auto& t : part.pairs)
        out.pair_points.push_back(to_point(t));

    const auto all = out.all();
    out.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            out.min_separation = std::min(out.min_separation, projective_distance(all[i], all[j]));
    return out;
}

} // namespace waring
