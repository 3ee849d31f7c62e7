#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "waring/algebra.hpp"
#include "waring/label.hpp"

namespace waring {

/// A sigma-invariant finite set: real points plus one representative per
/// conjugate pair (the partner is implied).
class LabeledSet {
public:
    LabeledSet(std::vector<ProjectivePoint> real_points, std::vector<ProjectivePoint> pairs,
               double tau_distinct = Tolerances{}.distinct)
        : real_(std::move(real_points)), pairs_(std::move(pairs))
    {
        if (real_.empty() && pairs_.empty())
            throw InvalidArgument("LabeledSet: empty set");
        const int dim = real_.empty() ? pairs_.front().dim() : real_.front().dim();
        for (const auto& p : real_) {
            if (!p.is_real())
                throw InvalidArgument("LabeledSet: real_points entry is not real");
            if (p.dim() != dim)
                throw InvalidArgument("LabeledSet: dimension mismatch");
        }
        for (const auto& p : pairs_) {
            if (p.is_real())
                throw InvalidArgument("LabeledSet: pair representative is real");
            if (p.dim() != dim)
                throw InvalidArgument("LabeledSet: dimension mismatch");
        }
        const auto pts = points();
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (projective_distance(pts[i], pts[j]) <= tau_distinct)
                    throw DuplicatePoint("LabeledSet: points are not pairwise distinct");
    }

    const std::vector<ProjectivePoint>& real_points() const noexcept { return real_; }
    const std::vector<ProjectivePoint>& pairs() const noexcept { return pairs_; }
    Label label() const { return Label(static_cast<int>(pairs_.size()), static_cast<int>(real_.size())); }
    int dim() const { return real_.empty() ? pairs_.front().dim() : real_.front().dim(); }
    std::size_t size() const noexcept { return real_.size() + 2 * pairs_.size(); }

    /// Every point of the set: real points, then each representative followed by its conjugate.
    std::vector<ProjectivePoint> points() const
    {
        std::vector<ProjectivePoint> out = real_;
        for (const auto& p : pairs_) {
            out.push_back(p);
            out.push_back(conjugate_point(p));
        }
        return out;
    }

private:
    std::vector<ProjectivePoint> real_;
    std::vector<ProjectivePoint> pairs_;
};

/// Coefficients exhibiting a real target in the real span of a labeled set.
/// The partner of each pair carries the conjugate coefficient implicitly.
struct SpanCertificate {
    std::vector<double> real_coeffs;
    std::vector<Complex> pair_coeffs;
    double residual = 0.0;
    bool rank_deficient = false;
};

struct Membership {
    SpanCertificate certificate;
    bool in_span = false;
};

/// Classifies a point set into real points and conjugate pairs.
inline LabeledSet label_of(const std::vector<ProjectivePoint>& points, const Tolerances& tol = {})
{
    if (points.empty())
        throw InvalidArgument("label_of: empty set");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (projective_distance(points[i], points[j]) <= tol.distinct)
                throw DuplicatePoint("label_of: duplicate point");

    std::vector<ProjectivePoint> reals;
    std::vector<std::size_t> complex_idx;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = points[i].coords();
        ProjectivePoint p(std::vector<Complex>(c.begin(), c.end()), tol.real);
        if (p.is_real())
            reals.push_back(std::move(p));
        else
            complex_idx.push_back(i);
    }
    std::vector<bool> used(complex_idx.size(), false);
    std::vector<ProjectivePoint> reps;
    for (std::size_t i = 0; i < complex_idx.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        const ProjectivePoint conj = conjugate_point(points[complex_idx[i]]);
        std::size_t best = complex_idx.size();
        double best_dist = 0.0;
        for (std::size_t j = 0; j < complex_idx.size(); ++j) {
            if (used[j])
                continue;
            const double dist = projective_distance(conj, points[complex_idx[j]]);
            if (best == complex_idx.size() || dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (best == complex_idx.size() || best_dist > tol.pair)
            throw NotSigmaInvariant("label_of: point has no conjugate partner in the set");
        used[best] = true;
        const auto c = points[complex_idx[i]].coords();
        reps.emplace_back(std::vector<Complex>(c.begin(), c.end()), 0.0);
    }
    return LabeledSet(std::move(reals), std::move(reps), tol.distinct);
}

namespace detail {

/// sqrt(multinomial(alpha)) p^alpha: Bombieri coordinates of l_p^d.
inline Eigen::VectorXcd power_bombieri(const MonomialBasis& basis, const ProjectivePoint& p)
{
    const auto vals = monomial_values(basis, p.coords());
    Eigen::VectorXcd v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = std::sqrt(multinomial(basis[k])) * vals[k];
    return v;
}

/// Real least squares in (lambda_i, Re mu_j, Im mu_j) given complex basis
/// vectors: real points contribute b_i, pairs contribute 2 Re(mu_j c_j).
inline Membership solve_membership(const std::vector<Eigen::VectorXcd>& real_vecs,
                                   const std::vector<Eigen::VectorXcd>& pair_vecs,
                                   const Eigen::VectorXd& target, const Tolerances& tol)
{
    const Eigen::Index rows = target.size();
    const Eigen::Index cols = static_cast<Eigen::Index>(real_vecs.size() + 2 * pair_vecs.size());
    Eigen::MatrixXd a(rows, cols);
    Eigen::Index col = 0;
    for (const auto& v : real_vecs)
        a.col(col++) = v.real();
    for (const auto& v : pair_vecs) {
        a.col(col++) = 2.0 * v.real();
        a.col(col++) = -2.0 * v.imag();
    }
    Membership m;
    const double scale = target.norm();
    if (scale == 0.0)
        throw InvalidArgument("span membership: zero target");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::VectorXd x = cod.solve(target);
    m.certificate.residual = (a * x - target).norm() / scale;
    m.certificate.rank_deficient = numeric_rank(a, tol.rank) < cols;
    col = 0;
    for (std::size_t i = 0; i < real_vecs.size(); ++i)
        m.certificate.real_coeffs.push_back(x(col++));
    for (std::size_t j = 0; j < pair_vecs.size(); ++j) {
        const double re = x(col++);
        const double im = x(col++);
        m.certificate.pair_coeffs.emplace_back(re, im);
    }
    m.in_span = m.certificate.residual <= tol.residual;
    return m;
}

} // namespace detail

/// Is the real form `target` in the real span of {l_p^d : p in S}? Residual
/// is measured in the Bombieri norm.
inline Membership span_membership(const HomogeneousForm& target, const LabeledSet& s,
                                  const Tolerances& tol = {})
{
    if (!target.is_real())
        throw InvalidArgument("span_membership: target must be real");
    if (target.n() != s.dim())
        throw InvalidArgument("span_membership: dimension mismatch");
    const MonomialBasis basis = target.basis();
    std::vector<Eigen::VectorXcd> rv;
    std::vector<Eigen::VectorXcd> pv;
    for (const auto& p : s.real_points())
        rv.push_back(detail::power_bombieri(basis, p));
    for (const auto& p : s.pairs())
        pv.push_back(detail::power_bombieri(basis, p));
    return detail::solve_membership(rv, pv, target.bombieri().real(), tol);
}

/// Is the real point q in the real span of the points of S themselves?
inline Membership span_membership_point(const ProjectivePoint& q, const LabeledSet& s,
                                        const Tolerances& tol = {})
{
    if (!q.is_real())
        throw InvalidArgument("span_membership_point: q must be real");
    if (q.dim() != s.dim())
        throw InvalidArgument("span_membership_point: dimension mismatch");
    std::vector<Eigen::VectorXcd> rv;
    std::vector<Eigen::VectorXcd> pv;
    for (const auto& p : s.real_points())
        rv.push_back(p.vector());
    for (const auto& p : s.pairs())
        pv.push_back(p.vector());
    return detail::solve_membership(rv, pv, q.vector().real(), tol);
}

/// sum lambda_i l_{p_i}^d + sum 2 Re(mu_j l_{q_j}^d); real by construction.
inline HomogeneousForm reconstruct(const LabeledSet& s, const SpanCertificate& cert, int d)
{
    if (cert.real_coeffs.size() != s.real_points().size() ||
        cert.pair_coeffs.size() != s.pairs().size())
        throw InvalidArgument("reconstruct: certificate shape does not match the set");
    const MonomialBasis basis(s.dim(), d);
    std::vector<double> acc(basis.size(), 0.0);
    for (std::size_t i = 0; i < s.real_points().size(); ++i) {
        const auto v = detail::monomial_values(basis, s.real_points()[i].coords());
        for (std::size_t k = 0; k < basis.size(); ++k)
            acc[k] += cert.real_coeffs[i] * multinomial(basis[k]) * v[k].real();
    }
    for (std::size_t j = 0; j < s.pairs().size(); ++j) {
        const auto v = detail::monomial_values(basis, s.pairs()[j].coords());
        for (std::size_t k = 0; k < basis.size(); ++k)
            acc[k] += 2.0 * (cert.pair_coeffs[j] * v[k]).real() * multinomial(basis[k]);
    }
    return HomogeneousForm::from_real(s.dim(), d, acc);
}

/// The real point sum lambda_i p_i + sum 2 Re(mu_j q_j) as a coordinate vector.
inline Eigen::VectorXd reconstruct_point(const LabeledSet& s, const SpanCertificate& cert)
{
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(s.dim() + 1);
    for (std::size_t i = 0; i < s.real_points().size(); ++i)
        acc += cert.real_coeffs[i] * s.real_points()[i].vector().real();
    for (std::size_t j = 0; j < s.pairs().size(); ++j)
        acc += 2.0 * (cert.pair_coeffs[j] * s.pairs()[j].vector()).real();
    return acc;
}

} // namespace waring
