#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "waring/config.hpp"
#include "waring/errors.hpp"
#include "waring/monomials.hpp"

namespace waring {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) noexcept
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// A point of complex projective space, stored as its canonical representative:
/// the first coordinate of largest modulus is exactly 1. Points whose
/// imaginary parts are all within tau_real of zero are snapped to real.
class ProjectivePoint {
public:
    explicit ProjectivePoint(std::vector<Complex> coords, double tau_real = Tolerances{}.real)
        : coords_(std::move(coords))
    {
        if (coords_.size() < 2)
            throw InvalidArgument("ProjectivePoint: need at least two coordinates");
        std::size_t lead = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (!is_finite(coords_[i]))
                throw InvalidArgument("ProjectivePoint: non-finite coordinate");
            double m = std::abs(coords_[i]);
            if (m > best) {
                best = m;
                lead = i;
            }
        }
        if (best == 0.0)
            throw InvalidArgument("ProjectivePoint: all coordinates are zero");
        const Complex pivot = coords_[lead];
        for (auto& c : coords_)
            c /= pivot;
        coords_[lead] = 1.0;

        double max_im = 0.0;
        for (const auto& c : coords_)
            max_im = std::max(max_im, std::abs(c.imag()));
        real_ = max_im <= tau_real;
        if (real_)
            for (auto& c : coords_)
                c = c.real();
    }

    ProjectivePoint(std::initializer_list<Complex> coords)
        : ProjectivePoint(std::vector<Complex>(coords)) {}

    static ProjectivePoint from_real(std::span<const double> coords)
    {
        return ProjectivePoint(std::vector<Complex>(coords.begin(), coords.end()));
    }

    /// Ambient projective dimension n (the point has n+1 coordinates).
    int dim() const noexcept { return static_cast<int>(coords_.size()) - 1; }
    std::size_t size() const noexcept { return coords_.size(); }
    bool is_real() const noexcept { return real_; }
    std::span<const Complex> coords() const noexcept { return coords_; }
    const Complex& operator[](std::size_t i) const { return coords_[i]; }

    Eigen::VectorXcd vector() const
    {
        return Eigen::Map<const Eigen::VectorXcd>(coords_.data(),
                                                  static_cast<Eigen::Index>(coords_.size()));
    }

private:
    std::vector<Complex> coords_;
    bool real_ = false;
};

/// Complex conjugation sigma, re-normalized. Fixed points are exactly the real points.
inline ProjectivePoint conjugate_point(const ProjectivePoint& p)
{
    std::vector<Complex> c(p.coords().begin(), p.coords().end());
    for (auto& z : c)
        z = std::conj(z);
    return ProjectivePoint(std::move(c));
}

/// Gauge-invariant distance: the smallest Euclidean distance between unit
/// representatives of p and q over all phases. Zero iff p == q projectively.
inline double projective_distance(const ProjectivePoint& p, const ProjectivePoint& q)
{
    if (p.size() != q.size())
        throw InvalidArgument("projective_distance: dimension mismatch");
    const Eigen::VectorXcd u = p.vector().normalized();
    const Eigen::VectorXcd v = q.vector().normalized();
    const Complex ip = v.dot(u);  // conj(v) . u
    const Complex phase = std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex(1.0);
    return (u - phase * v).norm();
}

/// Degree-d form in n+1 variables, stored densely over MonomialBasis(n, d).
class HomogeneousForm {
public:
    HomogeneousForm(int n, int d, std::vector<Complex> coeffs) : n_(n), d_(d), c_(std::move(coeffs))
    {
        if (n < 1)
            throw InvalidArgument("HomogeneousForm: need at least two variables");
        if (d < 1)
            throw InvalidArgument("HomogeneousForm: degree must be at least 1");
        if (c_.size() != monomial_count(n, d))
            throw InvalidArgument("HomogeneousForm: coefficient count does not match basis");
        bool nonzero = false;
        real_ = true;
        for (const auto& z : c_) {
            if (!is_finite(z))
                throw InvalidArgument("HomogeneousForm: non-finite coefficient");
            nonzero = nonzero || z != Complex{};
            real_ = real_ && z.imag() == 0.0;
        }
        if (!nonzero)
            throw InvalidArgument("HomogeneousForm: zero form");
    }

    static HomogeneousForm from_real(int n, int d, std::span<const double> coeffs)
    {
        return HomogeneousForm(n, d, std::vector<Complex>(coeffs.begin(), coeffs.end()));
    }

    /// Builds f from its scaled coefficients a_alpha = c_alpha / multinomial(alpha).
    static HomogeneousForm from_scaled(int n, int d, std::span<const Complex> scaled)
    {
        MonomialBasis basis(n, d);
        if (scaled.size() != basis.size())
            throw InvalidArgument("HomogeneousForm: coefficient count does not match basis");
        std::vector<Complex> c(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i)
            c[i] = scaled[i] * multinomial(basis[i]);
        return HomogeneousForm(n, d, std::move(c));
    }

    int n() const noexcept { return n_; }
    int d() const noexcept { return d_; }
    bool is_real() const noexcept { return real_; }
    std::span<const Complex> coeffs() const noexcept { return c_; }
    MonomialBasis basis() const { return MonomialBasis(n_, d_); }

    Complex coefficient(const Exponent& alpha) const
    {
        const MonomialBasis b = basis();
        const std::size_t i = b.index_of(alpha);
        if (i == b.size())
            throw InvalidArgument("HomogeneousForm: exponent vector has wrong length or degree");
        return c_[i];
    }

    /// a_alpha = c_alpha / multinomial(alpha); the Hankel entries for binary forms.
    std::vector<Complex> scaled() const
    {
        const MonomialBasis b = basis();
        std::vector<Complex> a(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            a[i] = c_[i] / multinomial(b[i]);
        return a;
    }

    /// Coordinates c_alpha / sqrt(multinomial(alpha)); their 2-norm is the Bombieri norm.
    Eigen::VectorXcd bombieri() const
    {
        const MonomialBasis b = basis();
        Eigen::VectorXcd v(static_cast<Eigen::Index>(c_.size()));
        for (std::size_t i = 0; i < c_.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = c_[i] / std::sqrt(multinomial(b[i]));
        return v;
    }

    double bombieri_norm() const { return bombieri().norm(); }

private:
    int n_;
    int d_;
    std::vector<Complex> c_;
    bool real_ = true;
};

inline bool operator==(const HomogeneousForm& f, const HomogeneousForm& g)
{
    return f.n() == g.n() && f.d() == g.d() && std::ranges::equal(f.coeffs(), g.coeffs());
}

/// Relative Bombieri distance ||f - g|| / ||g||.
inline double relative_distance(const HomogeneousForm& f, const HomogeneousForm& g)
{
    if (f.n() != g.n() || f.d() != g.d())
        throw InvalidArgument("relative_distance: shape mismatch");
    return (f.bombieri() - g.bombieri()).norm() / g.bombieri_norm();
}

namespace detail {

/// p^alpha for every alpha in the basis.
inline std::vector<Complex> monomial_values(const MonomialBasis& basis, std::span<const Complex> p)
{
    const std::size_t vars = p.size();
    const int d = basis.d();
    std::vector<Complex> pw(vars * static_cast<std::size_t>(d + 1));
    for (std::size_t i = 0; i < vars; ++i) {
        pw[i * (d + 1)] = 1.0;
        for (int e = 1; e <= d; ++e)
            pw[i * (d + 1) + e] = pw[i * (d + 1) + e - 1] * p[i];
    }
    std::vector<Complex> out(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k) {
        Complex v = 1.0;
        for (std::size_t i = 0; i < vars; ++i)
            v *= pw[i * (d + 1) + basis[k][i]];
        out[k] = v;
    }
    return out;
}

} // namespace detail

/// (l_0 x_0 + ... + l_n x_n)^d expanded by the multinomial theorem, using the
/// canonical representative of ell.
inline HomogeneousForm power_of_linear_form(const ProjectivePoint& ell, int d)
{
    if (d < 1)
        throw InvalidArgument("power_of_linear_form: degree must be at least 1");
    const MonomialBasis basis(ell.dim(), d);
    std::vector<Complex> c = detail::monomial_values(basis, ell.coords());
    for (std::size_t k = 0; k < basis.size(); ++k)
        c[k] *= multinomial(basis[k]);
    if (ell.is_real())
        for (auto& z : c)
            z = z.real();
    return HomogeneousForm(ell.dim(), d, std::move(c));
}

inline Complex evaluate(const HomogeneousForm& f, std::span<const Complex> x)
{
    if (static_cast<int>(x.size()) != f.n() + 1)
        throw InvalidArgument("evaluate: dimension mismatch");
    const auto vals = detail::monomial_values(f.basis(), x);
    Complex s = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k)
        s += f.coeffs()[k] * vals[k];
    return s;
}

/// f at the canonical representative of p.
inline Complex evaluate(const HomogeneousForm& f, const ProjectivePoint& p)
{
    return evaluate(f, p.coords());
}

/// Apolarity pairing matrix between degree-(d-k) and degree-k monomials.
struct CatalecticantMatrix {
    int k = 0;
    std::vector<Exponent> row_exponents;  ///< degree d-k
    std::vector<Exponent> col_exponents;  ///< degree k
    Eigen::MatrixXcd values;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
    Eigen::MatrixXd real() const { return values.real(); }
};

namespace detail {

/// Catalecticant without the 1 <= k <= d-1 restriction (k = 0 and k = d are
/// the single-row/column flattenings used by the binary rank search).
inline CatalecticantMatrix catalecticant_any(const HomogeneousForm& f, int k)
{
    const int n = f.n();
    const int d = f.d();
    const MonomialBasis rows(n, d - k);
    const MonomialBasis cols(n, k);
    const MonomialBasis full(n, d);
    CatalecticantMatrix m;
    m.k = k;
    m.row_exponents = rows.exponents();
    m.col_exponents = cols.exponents();
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    Exponent sum(static_cast<std::size_t>(n + 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double weight = 1.0;
            for (int v = 0; v <= n; ++v) {
                sum[v] = rows[i][v] + cols[j][v];
                if (n >= 2)
                    weight *= factorial(sum[v]) / (factorial(rows[i][v]) * factorial(cols[j][v]));
            }
            const std::size_t idx = full.index_of(sum);
            Complex c = f.coeffs()[idx];
            // binary: Hankel in a_i = c_i / C(d, i)
            if (n == 1)
                c /= multinomial(sum);
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c * weight;
        }
    }
    return m;
}

} // namespace detail

/// Catalecticant in the fixed normalization: Hankel M[i][j] = a_{i+j} for
/// binary forms, c_{b+g} (b+g)!/(b! g!) on graded-lex bases otherwise.
inline CatalecticantMatrix catalecticant(const HomogeneousForm& f, int k)
{
    if (k < 1 || k > f.d() - 1)
        throw InvalidArgument("catalecticant: contraction degree out of range [1, d-1]");
    return detail::catalecticant_any(f, k);
}

/// Number of singular values above tol * sigma_max; 0 for the zero matrix.
template <typename Derived>
int numeric_rank(const Eigen::MatrixBase<Derived>& m, double tol = Tolerances{}.rank)
{
    if (m.size() == 0)
        return 0;
    using Plain = typename Derived::PlainObject;
    Eigen::JacobiSVD<Plain> svd(m.eval());
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0))
            ++r;
    return r;
}

inline int numeric_rank(const CatalecticantMatrix& m, double tol = Tolerances{}.rank)
{
    if (m.values.imag().isZero(0.0))
        return numeric_rank(m.real(), tol);
    return numeric_rank(m.values, tol);
}

} // namespace waring
