#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "waring/algebra.hpp"
#include "waring/labels.hpp"
#include "waring/roots.hpp"

namespace waring {

namespace detail {

inline bool is_prime(int p)
{
    if (p < 2)
        return false;
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0)
            return false;
    return true;
}

inline double radical_inverse(std::uint64_t i, int base)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

/// Deterministic low-discrepancy directions on the unit sphere of R^dim
/// (Halton points of the cube pushed radially).
inline std::vector<Eigen::VectorXd> halton_directions(int dim, int count)
{
    std::vector<int> primes;
    for (int p = 2; static_cast<int>(primes.size()) < dim; ++p)
        if (is_prime(p))
            primes.push_back(p);
    std::vector<Eigen::VectorXd> out;
    for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
        Eigen::VectorXd v(dim);
        for (int j = 0; j < dim; ++j)
            v(j) = 2.0 * radical_inverse(i, primes[static_cast<std::size_t>(j)]) - 1.0;
        const double nrm = v.norm();
        if (nrm < 1e-3)
            continue;
        out.push_back(v / nrm);
    }
    return out;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline void require_real_binary(const HomogeneousForm& f, const char* who)
{
    if (f.n() != 1)
        throw InvalidArgument(std::string(who) + ": binary form required");
    if (!f.is_real())
        throw InvalidArgument(std::string(who) + ": real form required");
}

} // namespace detail

/// Orthonormal basis of the kernel of the Hankel catalecticant at level k;
/// each vector (g_0..g_k) is read as the binary form sum_j g_j X^(k-j) Y^j.
/// Level k = d (the one-row flattening) is accepted as well.
inline std::vector<Eigen::VectorXd> apolar_kernel(const HomogeneousForm& f, int k, double rank_tol = Tolerances{}.rank)
{
    detail::require_real_binary(f, "apolar_kernel");
    if (k < 1 || k > f.d())
        throw InvalidArgument("apolar_kernel: k out of range [1, d]");
    const Eigen::MatrixXd h = detail::catalecticant_any(f, k).real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rank_tol * s(0))
            ++rank;
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index j = rank; j < h.cols(); ++j)
        out.emplace_back(svd.matrixV().col(j));
    return out;
}

struct BinarySearchConfig {
    Tolerances tol;
    int budget = 256;
};

/// A square-free apolar generator of minimal degree and its zeros.
struct ApolarGenerator {
    int rank = 0;
    Eigen::VectorXd coeffs;
    BinaryRoots roots;
};

namespace detail {

/// Square-free kernel members at level k, best separated first. A 1-dimensional
/// kernel yields its generator (if square-free); larger kernels are sampled.
inline std::vector<ApolarGenerator> square_free_candidates(const std::vector<Eigen::VectorXd>& kernel, int k,
                                                           const BinarySearchConfig& cfg, int want)
{
    std::vector<ApolarGenerator> found;
    auto consider = [&](const Eigen::VectorXd& g) {
        try {
            BinaryRoots r = binary_form_roots(to_std(g), cfg.tol);
            if (r.min_separation > cfg.tol.sep)
                found.push_back({k, g, std::move(r)});
        } catch (const PairingFailure&) {
        }
    };
    if (kernel.size() == 1) {
        consider(kernel.front());
        return found;
    }
    const int dim = static_cast<int>(kernel.size());
    const auto dirs = halton_directions(dim, cfg.budget);
    for (const auto& c : dirs) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 1);
        for (int i = 0; i < dim; ++i)
            g += c(i) * kernel[static_cast<std::size_t>(i)];
        consider(g);
        if (static_cast<int>(found.size()) >= want)
            break;
    }
    std::ranges::stable_sort(found, [](const ApolarGenerator& a, const ApolarGenerator& b) {
        return a.roots.min_separation > b.roots.min_separation;
    });
    return found;
}

inline constexpr int kCandidatesPerLevel = 8;

} // namespace detail

/// Complex Waring rank of a real binary form and a square-free generator of
/// that degree. Throws RankSearchExhausted when no level up to d has one.
inline ApolarGenerator complex_rank_binary(const HomogeneousForm& f, const BinarySearchConfig& cfg = {})
{
    detail::require_real_binary(f, "complex_rank_binary");
    for (int k = 1; k <= f.d(); ++k) {
        const auto kernel = apolar_kernel(f, k, cfg.tol.rank);
        if (kernel.empty())
            continue;
        auto cands = detail::square_free_candidates(kernel, k, cfg, detail::kCandidatesPerLevel);
        if (!cands.empty())
            return std::move(cands.front());
    }
    throw RankSearchExhausted("complex_rank_binary: no square-free apolar generator up to degree d");
}

struct SylvesterResult {
    LabeledSet set;
    SpanCertificate certificate;
    int rank = 0;
    Eigen::VectorXd generator;
};

/// Labeled decomposition of a real binary form: the zeros (a : b) of the
/// minimal square-free apolar generator give the linear forms a x + b y.
inline SylvesterResult sylvester_decompose(const HomogeneousForm& f, const BinarySearchConfig& cfg = {})
{
    detail::require_real_binary(f, "sylvester_decompose");
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= f.d(); ++k) {
        const auto kernel = apolar_kernel(f, k, cfg.tol.rank);
        if (kernel.empty())
            continue;
        const auto cands = detail::square_free_candidates(kernel, k, cfg, detail::kCandidatesPerLevel);
        for (const auto& c : cands) {
            LabeledSet set(c.roots.real_points, c.roots.pair_points, cfg.tol.distinct);
            Membership m = span_membership(f, set, cfg.tol);
            best = std::min(best, m.certificate.residual);
            if (m.in_span)
                return SylvesterResult{std::move(set), std::move(m.certificate), k, c.coeffs};
        }
        if (!cands.empty())
            throw DecompositionFailure("sylvester_decompose: generator zeros do not reproduce the form", best);
    }
    throw RankSearchExhausted("sylvester_decompose: no square-free apolar generator up to degree d");
}

enum class CubicClass { PairClass, RealClass, TangentDevelopable };

inline const char* to_string(CubicClass c)
{
    switch (c) {
    case CubicClass::PairClass:
        return "PairClass";
    case CubicClass::RealClass:
        return "RealClass";
    case CubicClass::TangentDevelopable:
        return "TangentDevelopable";
    }
    return "?";
}

struct CubicClassification {
    CubicClass cls = CubicClass::TangentDevelopable;
    double apolar_discriminant = 0.0;  ///< g1^2 - 4 g0 g2 of the k = 2 generator (0 if not unique)
};

/// Which side of the tangent developable a real binary cubic lies on: label
/// (1,0) decompositions, label (0,2) decompositions, or neither.
inline CubicClassification classify_cubic(const HomogeneousForm& f, const Tolerances& tol = {})
{
    detail::require_real_binary(f, "classify_cubic");
    if (f.d() != 3)
        throw InvalidArgument("classify_cubic: cubic required");
    const auto kernel = apolar_kernel(f, 2, tol.rank);
    CubicClassification out;
    if (kernel.size() != 1)
        return out;
    const Eigen::VectorXd& g = kernel.front();
    out.apolar_discriminant = g(1) * g(1) - 4.0 * g(0) * g(2);
    try {
        const BinaryRoots r = binary_form_roots(detail::to_std(g), tol);
        if (r.min_separation <= tol.sep)
            return out;
        out.cls = r.label() == Label(1, 0) ? CubicClass::PairClass : CubicClass::RealClass;
    } catch (const PairingFailure&) {
    }
    return out;
}

/// Real rank, or the lower bound reached when the search could neither find
/// a real decomposition nor exclude the current level.
struct RealRank {
    std::optional<int> value;
    int lower_bound = 0;
};

namespace detail {

inline ProjectivePoint angle_point(double theta)
{
    return ProjectivePoint({std::cos(theta), std::sin(theta)});
}

/// Real decomposition of f on the points at the given angles, if it certifies.
inline std::optional<SylvesterResult> real_certificate(const HomogeneousForm& f, const std::vector<double>& angles,
                                                       const Tolerances& tol)
{
    std::vector<ProjectivePoint> pts;
    for (double a : angles)
        pts.push_back(angle_point(a));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (projective_distance(pts[i], pts[j]) <= tol.sep)
                return std::nullopt;
    LabeledSet set(pts, {}, tol.distinct);
    Membership m = span_membership(f, set, tol);
    if (!m.in_span)
        return std::nullopt;
    return SylvesterResult{std::move(set), std::move(m.certificate), static_cast<int>(angles.size()), {}};
}

/// Least-squares distance from f to the span of the real powers at `angles`.
inline double angle_residual(const HomogeneousForm& f, const std::vector<double>& angles, const Tolerances& tol)
{
    std::vector<ProjectivePoint> pts;
    for (double a : angles)
        pts.push_back(angle_point(a));
    const MonomialBasis basis = f.basis();
    std::vector<Eigen::VectorXcd> rv;
    for (const auto& p : pts)
        rv.push_back(power_bombieri(basis, p));
    return solve_membership(rv, {}, f.bombieri().real(), tol).certificate.residual;
}

/// Levenberg-Marquardt on the angles of k real points (finite differences).
inline std::optional<SylvesterResult> refine_real(const HomogeneousForm& f, std::vector<double> angles,
                                                  const Tolerances& tol)
{
    const std::size_t k = angles.size();
    const MonomialBasis basis = f.basis();
    const Eigen::VectorXd target = f.bombieri().real();
    auto residual_vec = [&](const std::vector<double>& th) {
        Eigen::MatrixXd a(target.size(), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i)
            a.col(static_cast<Eigen::Index>(i)) = power_bombieri(basis, angle_point(th[i])).real();
        const Eigen::VectorXd x = a.completeOrthogonalDecomposition().solve(target);
        return Eigen::VectorXd(a * x - target);
    };
    Eigen::VectorXd r = residual_vec(angles);
    double mu = 1e-3;
    for (int it = 0; it < 100 && r.norm() > 1e-3 * tol.residual * target.norm(); ++it) {
        Eigen::MatrixXd jac(r.size(), static_cast<Eigen::Index>(k));
        constexpr double h = 1e-7;
        for (std::size_t i = 0; i < k; ++i) {
            auto tp = angles;
            auto tm = angles;
            tp[i] += h;
            tm[i] -= h;
            jac.col(static_cast<Eigen::Index>(i)) = (residual_vec(tp) - residual_vec(tm)) / (2 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool accepted = false;
        for (int tries = 0; tries < 20 && !accepted; ++tries) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd step = lhs.ldlt().solve(-g);
            auto next = angles;
            for (std::size_t i = 0; i < k; ++i)
                next[i] += step(static_cast<Eigen::Index>(i));
            const Eigen::VectorXd rn = residual_vec(next);
            if (rn.norm() < r.norm()) {
                angles = next;
                r = rn;
                mu = std::max(mu / 3.0, 1e-12);
                accepted = true;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted)
            break;
    }
    return real_certificate(f, angles, tol);
}

/// At level d the kernel is a hyperplane: fix d-1 real zeros and solve the
/// single linear condition for the last factor.
inline std::optional<SylvesterResult> real_decomposition_full_level(const HomogeneousForm& f, const Tolerances& tol)
{
    const int d = f.d();
    std::vector<double> a(static_cast<std::size_t>(d + 1));
    const auto scaled = f.scaled();
    for (int i = 0; i <= d; ++i)
        a[static_cast<std::size_t>(i)] = scaled[static_cast<std::size_t>(i)].real();
    for (int attempt = 0; attempt < 16; ++attempt) {
        const double offset = 0.1 + 0.61803398875 * attempt;
        std::vector<double> angles;
        for (int i = 0; i < d - 1; ++i)
            angles.push_back(offset + std::numbers::pi * i / d);
        // P = prod (sin t_i X - cos t_i Y), vanishing at (cos t_i : sin t_i)
        std::vector<double> p{1.0};
        for (double t : angles) {
            std::vector<double> next(p.size() + 1, 0.0);
            for (std::size_t j = 0; j < p.size(); ++j) {
                next[j] += p[j] * std::sin(t);
                next[j + 1] -= p[j] * std::cos(t);
            }
            p.swap(next);
        }
        // G = P (u X + w Y): g_j = u p_j + w p_{j-1}; <a, g> = u A + w B = 0
        double big_a = 0.0;
        double big_b = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            big_a += a[j] * p[j];
            big_b += a[j + 1] * p[j];
        }
        // zero of u X + w Y is (w : -u) = (-B : -A) up to sign
        const double last = (big_a == 0.0 && big_b == 0.0) ? offset - 0.5 : std::atan2(big_b, big_a);
        angles.push_back(last);
        if (auto res = real_certificate(f, angles, tol))
            return res;
    }
    return std::nullopt;
}

} // namespace detail

/// Smallest k >= complex rank whose apolar kernel contains a member with k
/// distinct real zeros. One-dimensional kernels are decided exactly; larger
/// ones are sampled (`budget` directions) then refined locally.
inline RealRank real_rank_binary(const HomogeneousForm& f, const BinarySearchConfig& cfg = {})
{
    detail::require_real_binary(f, "real_rank_binary");
    const ApolarGenerator cr = complex_rank_binary(f, cfg);
    RealRank out;
    out.lower_bound = cr.rank;
    for (int k = cr.rank; k <= f.d(); ++k) {
        const auto kernel = apolar_kernel(f, k, cfg.tol.rank);
        if (kernel.empty()) {
            out.lower_bound = k + 1;
            continue;
        }
        if (kernel.size() == 1) {
            const auto cands = detail::square_free_candidates(kernel, k, cfg, 1);
            if (!cands.empty() && cands.front().roots.label() == Label(0, k)) {
                LabeledSet set(cands.front().roots.real_points, {}, cfg.tol.distinct);
                if (span_membership(f, set, cfg.tol).in_span) {
                    out.value = k;
                    return out;
                }
            }
            // the only candidate at this level is not a real decomposition
            out.lower_bound = k + 1;
            continue;
        }

        const int dim = static_cast<int>(kernel.size());
        std::vector<double> best_angles;
        double best_score = std::numeric_limits<double>::infinity();
        for (const auto& c : detail::halton_directions(dim, cfg.budget)) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 1);
            for (int i = 0; i < dim; ++i)
                g += c(i) * kernel[static_cast<std::size_t>(i)];
            BinaryRoots r;
            try {
                r = binary_form_roots(detail::to_std(g), cfg.tol);
            } catch (const PairingFailure&) {
                continue;
            }
            if (r.label() == Label(0, k) && r.min_separation > cfg.tol.sep) {
                LabeledSet set(r.real_points, {}, cfg.tol.distinct);
                if (span_membership(f, set, cfg.tol).in_span) {
                    out.value = k;
                    return out;
                }
            }
            // seed for refinement: the member whose zeros are closest to real
            std::vector<double> angles;
            double score = 0.0;
            for (const auto& p : r.all()) {
                score += std::abs(p[0].imag()) + std::abs(p[1].imag());
                angles.push_back(std::atan2(p[1].real(), p[0].real()));
            }
            if (score < best_score) {
                best_score = score;
                best_angles = angles;
            }
        }
        if (!best_angles.empty() && detail::refine_real(f, std::move(best_angles), cfg.tol)) {
            out.value = k;
            return out;
        }
        if (k == f.d() && detail::real_decomposition_full_level(f, cfg.tol)) {
            out.value = k;
            return out;
        }
        out.lower_bound = k;
        return out;
    }
    return out;
}

/// True iff the Sylvester engine finds a label of weight <= floor((r + 5) / 2)
/// for a binary form of degree r.
inline bool weight_bound_check(const HomogeneousForm& f, const BinarySearchConfig& cfg = {})
{
    try {
        const SylvesterResult res = sylvester_decompose(f, cfg);
        return weight(res.set.label()) <= (f.d() + 5) / 2;
    } catch (const Error&) {
        return false;
    }
}

} // namespace waring
