#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "waring/algebra.hpp"
#include "waring/labels.hpp"
#include "waring/random.hpp"
#include "waring/roots.hpp"

namespace waring {

/// A real hypersurface {F = 0} in P^(n+1) and a real point q.
struct HypersurfaceInstance {
    HomogeneousForm surface;
    ProjectivePoint point;

    HypersurfaceInstance(HomogeneousForm f, ProjectivePoint q) : surface(std::move(f)), point(std::move(q))
    {
        if (!surface.is_real())
            throw InvalidArgument("HypersurfaceInstance: surface must be real");
        if (!point.is_real())
            throw InvalidArgument("HypersurfaceInstance: point must be real");
        if (point.dim() != surface.n())
            throw InvalidArgument("HypersurfaceInstance: dimension mismatch");
    }
};

/// F(t q + s v) as a binary form in (t, s): coefficient j multiplies t^(d-j) s^j.
inline HomogeneousForm restrict_to_line(const HomogeneousForm& f, std::span<const double> q, std::span<const double> v)
{
    if (!f.is_real())
        throw InvalidArgument("restrict_to_line: real form required");
    if (static_cast<int>(q.size()) != f.n() + 1 || static_cast<int>(v.size()) != f.n() + 1)
        throw InvalidArgument("restrict_to_line: dimension mismatch");
    const int d = f.d();
    const MonomialBasis basis = f.basis();
    std::vector<double> out(static_cast<std::size_t>(d + 1), 0.0);
    std::vector<double> poly;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const double c = f.coeffs()[k].real();
        if (c == 0.0)
            continue;
        poly.assign(1, c);
        for (std::size_t i = 0; i < q.size(); ++i)
            for (int e = 0; e < basis[k][i]; ++e) {
                std::vector<double> next(poly.size() + 1, 0.0);
                for (std::size_t j = 0; j < poly.size(); ++j) {
                    next[j] += poly[j] * q[i];
                    next[j + 1] += poly[j] * v[i];
                }
                poly.swap(next);
            }
        for (std::size_t j = 0; j < poly.size(); ++j)
            out[j] += poly[j];
    }
    return HomogeneousForm::from_real(1, d, out);
}

inline HomogeneousForm restrict_to_line(const HomogeneousForm& f, const ProjectivePoint& q, const ProjectivePoint& v)
{
    if (!q.is_real() || !v.is_real())
        throw InvalidArgument("restrict_to_line: real points required");
    if (projective_distance(q, v) <= Tolerances{}.distinct)
        throw InvalidArgument("restrict_to_line: q and v must be distinct");
    const Eigen::VectorXd qv = q.vector().real();
    const Eigen::VectorXd vv = v.vector().real();
    return restrict_to_line(f, std::span<const double>(qv.data(), static_cast<std::size_t>(qv.size())),
                            std::span<const double>(vv.data(), static_cast<std::size_t>(vv.size())));
}

struct HypersurfaceResult {
    LabeledSet set;
    SpanCertificate certificate;
    int attempts = 0;                  ///< lines drawn (0 when q lies on the surface)
    double on_surface_residual = 0.0;  ///< max |F(p)| / (||F|| ||p||^d) over returned points
};

struct HypersurfaceOptions {
    Tolerances tol;
    int max_retries = 20;
    bool prefer_pair = false;
};

inline double surface_residual(const HomogeneousForm& f, const ProjectivePoint& p)
{
    return std::abs(evaluate(f, p)) / (f.bombieri_norm() * std::pow(p.vector().norm(), f.d()));
}

/// Intersects the line through q in direction v with the surface and picks a
/// sigma-invariant pair of intersection points spanning the line. Returns
/// nothing when the line is not transversal within tolerance.
inline std::optional<HypersurfaceResult> label_on_line(const HypersurfaceInstance& inst, const Eigen::VectorXd& dir,
                                                       const HypersurfaceOptions& opt = {})
{
    const HomogeneousForm& f = inst.surface;
    const Eigen::VectorXd q = inst.point.vector().real();
    const std::span<const double> qs(q.data(), static_cast<std::size_t>(q.size()));
    const std::span<const double> vs(dir.data(), static_cast<std::size_t>(dir.size()));

    std::optional<HomogeneousForm> line;
    try {
        line.emplace(restrict_to_line(f, qs, vs));
    } catch (const InvalidArgument&) {
        return std::nullopt;  // line inside the surface
    }
    std::vector<double> g(static_cast<std::size_t>(f.d() + 1));
    for (std::size_t j = 0; j < g.size(); ++j)
        g[j] = line->coeffs()[j].real();

    BinaryRoots roots;
    try {
        roots = binary_form_roots(g, opt.tol);
    } catch (const PairingFailure&) {
        return std::nullopt;
    }
    auto embed = [&](const ProjectivePoint& ts, double tau_real) {
        std::vector<Complex> c(q.size());
        for (Eigen::Index i = 0; i < q.size(); ++i)
            c[static_cast<std::size_t>(i)] = ts[0] * q(i) + ts[1] * dir(i);
        return ProjectivePoint(std::move(c), tau_real);
    };
    std::vector<ProjectivePoint> reals;
    std::vector<ProjectivePoint> pairs;
    for (const auto& r : roots.real_points)
        reals.push_back(embed(r, opt.tol.real));
    for (const auto& r : roots.pair_points)
        pairs.push_back(embed(r, 0.0));

    std::vector<ProjectivePoint> all = reals;
    for (const auto& p : pairs) {
        all.push_back(p);
        all.push_back(conjugate_point(p));
    }
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (projective_distance(all[i], all[j]) <= opt.tol.sep)
                return std::nullopt;

    const bool use_real = reals.size() >= 2 && (!opt.prefer_pair || pairs.empty());
    std::vector<ProjectivePoint> chosen_real;
    std::vector<ProjectivePoint> chosen_pair;
    if (use_real) {
        std::size_t bi = 0;
        std::size_t bj = 1;
        double best = -1.0;
        for (std::size_t i = 0; i < reals.size(); ++i)
            for (std::size_t j = i + 1; j < reals.size(); ++j)
                if (const double dist = projective_distance(reals[i], reals[j]); dist > best) {
                    best = dist;
                    bi = i;
                    bj = j;
                }
        chosen_real = {reals[bi], reals[bj]};
    } else if (!pairs.empty()) {
        std::size_t bi = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (const double dist = projective_distance(pairs[i], conjugate_point(pairs[i])); dist > best) {
                best = dist;
                bi = i;
            }
        chosen_pair = {pairs[bi]};
    } else {
        return std::nullopt;
    }

    LabeledSet set(std::move(chosen_real), std::move(chosen_pair), opt.tol.distinct);
    Membership m = span_membership_point(inst.point, set, opt.tol);
    if (!m.in_span)
        return std::nullopt;
    double on_surface = 0.0;
    for (const auto& p : set.points())
        on_surface = std::max(on_surface, surface_residual(f, p));
    if (on_surface > opt.tol.residual)
        return std::nullopt;
    return HypersurfaceResult{std::move(set), std::move(m.certificate), 0, on_surface};
}

/// Labeled set of weight <= 2 on the hypersurface whose real span contains q:
/// {q} itself (label (0,1)) when q is on the surface, otherwise two points of
/// a transversal real line through q, labeled (0,2) or (1,0).
inline HypersurfaceResult find_label_hypersurface(const HypersurfaceInstance& inst, Rng& rng,
                                                  const HypersurfaceOptions& opt = {})
{
    const HomogeneousForm& f = inst.surface;
    if (f.d() < 2)
        throw InvalidArgument("find_label_hypersurface: degree must be at least 2");
    if (surface_residual(f, inst.point) <= opt.tol.residual) {
        LabeledSet set({inst.point}, {}, opt.tol.distinct);
        Membership m = span_membership_point(inst.point, set, opt.tol);
        return HypersurfaceResult{std::move(set), std::move(m.certificate), 0, surface_residual(f, inst.point)};
    }
    const Eigen::VectorXd q = inst.point.vector().real().normalized();
    for (int attempt = 1; attempt <= opt.max_retries; ++attempt) {
        Eigen::VectorXd v(q.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v(i) = rng.normal();
        v -= v.dot(q) * q;
        if (v.norm() < 1e-8)
            continue;
        v.normalize();
        if (auto res = label_on_line(inst, v, opt)) {
            res->attempts = attempt;
            return std::move(*res);
        }
    }
    throw RetriesExhausted("find_label_hypersurface: no transversal line found within the retry budget");
}

} // namespace waring
