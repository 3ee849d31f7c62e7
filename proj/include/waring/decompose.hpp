#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "waring/algebra.hpp"
#include "waring/labels.hpp"
#include "waring/random.hpp"

namespace waring {

/// Shape of the labeled set being searched for: a conjugate pairs, b real points.
struct LabelTemplate {
    int a = 0;
    int b = 0;

    Label label() const { return Label(a, b); }
    int weight() const { return 2 * a + b; }
};

struct DecompositionProblem {
    HomogeneousForm f;
    LabelTemplate tmpl;
    NLSConfig config;
    Tolerances tol;

    DecompositionProblem(HomogeneousForm form, LabelTemplate t, NLSConfig cfg = {}, Tolerances tl = {})
        : f(std::move(form)), tmpl(t), config(cfg), tol(tl)
    {
        if (!f.is_real())
            throw InvalidArgument("DecompositionProblem: real form required");
        (void)tmpl.label();  // validates (a, b) != (0, 0)
        if (!config.valid())
            throw InvalidArgument("DecompositionProblem: invalid NLS configuration");
    }
};

/// Offsets into the flattened parameter vector:
/// [real points b(n+1)] [pairs: n+1 real parts then n+1 imaginary parts, each]
/// [lambda b] [Re mu, Im mu per pair].
struct ParameterLayout {
    int vars;  // n + 1
    int a;
    int b;

    Eigen::Index real_point(int i) const { return static_cast<Eigen::Index>(i) * vars; }
    Eigen::Index pair_point(int j) const { return static_cast<Eigen::Index>(b) * vars + 2 * j * vars; }
    Eigen::Index lambda(int i) const { return static_cast<Eigen::Index>(b + 2 * a) * vars + i; }
    Eigen::Index mu(int j) const { return lambda(b) + 2 * j; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(b + 2 * a) * vars + b + 2 * a; }
};

inline ParameterLayout layout_of(const DecompositionProblem& p)
{
    return {p.f.n() + 1, p.tmpl.a, p.tmpl.b};
}

struct ResidualJacobian {
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
};

namespace detail {

struct Workspace {
    MonomialBasis basis;
    Eigen::VectorXd sqrt_mult;
    Eigen::VectorXd target;  // Bombieri coordinates of f

    explicit Workspace(const HomogeneousForm& f) : basis(f.basis()), target(f.bombieri().real())
    {
        sqrt_mult.resize(static_cast<Eigen::Index>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k)
            sqrt_mult(static_cast<Eigen::Index>(k)) = std::sqrt(multinomial(basis[k]));
    }
};

/// Powers table pw[i * (d + 1) + e] = x_i^e.
template <typename T>
void power_table(const T* x, int vars, int d, std::vector<T>& pw)
{
    pw.assign(static_cast<std::size_t>(vars * (d + 1)), T(1));
    for (int i = 0; i < vars; ++i)
        for (int e = 1; e <= d; ++e)
            pw[static_cast<std::size_t>(i * (d + 1) + e)] = pw[static_cast<std::size_t>(i * (d + 1) + e - 1)] * x[i];
}

inline void evaluate_model(const Workspace& ws, const ParameterLayout& lay, const Eigen::VectorXd& x,
                           Eigen::VectorXd& r, Eigen::MatrixXd* jac)
{
    const int d = ws.basis.d();
    const int vars = lay.vars;
    const auto rows = static_cast<Eigen::Index>(ws.basis.size());
    r = -ws.target;
    if (jac)
        jac->setZero(rows, lay.size());
    std::vector<double> pw;
    std::vector<Complex> cpw;
    std::vector<Complex> q(static_cast<std::size_t>(vars));

    for (int i = 0; i < lay.b; ++i) {
        const double* p = x.data() + lay.real_point(i);
        const double lam = x(lay.lambda(i));
        power_table(p, vars, d, pw);
        for (Eigen::Index row = 0; row < rows; ++row) {
            const auto& alpha = ws.basis[static_cast<std::size_t>(row)];
            const double s = ws.sqrt_mult(row);
            double mono = 1.0;
            for (int v = 0; v < vars; ++v)
                mono *= pw[static_cast<std::size_t>(v * (d + 1) + alpha[static_cast<std::size_t>(v)])];
            r(row) += lam * s * mono;
            if (!jac)
                continue;
            (*jac)(row, lay.lambda(i)) = s * mono;
            for (int k = 0; k < vars; ++k) {
                const int ak = alpha[static_cast<std::size_t>(k)];
                if (ak == 0)
                    continue;
                double dm = ak;
                for (int v = 0; v < vars; ++v) {
                    const int e = alpha[static_cast<std::size_t>(v)] - (v == k ? 1 : 0);
                    dm *= pw[static_cast<std::size_t>(v * (d + 1) + e)];
                }
                (*jac)(row, lay.real_point(i) + k) = lam * s * dm;
            }
        }
    }
    for (int j = 0; j < lay.a; ++j) {
        const Eigen::Index base = lay.pair_point(j);
        for (int v = 0; v < vars; ++v)
            q[static_cast<std::size_t>(v)] = Complex(x(base + v), x(base + vars + v));
        const Complex mu(x(lay.mu(j)), x(lay.mu(j) + 1));
        power_table(q.data(), vars, d, cpw);
        for (Eigen::Index row = 0; row < rows; ++row) {
            const auto& alpha = ws.basis[static_cast<std::size_t>(row)];
            const double s = ws.sqrt_mult(row);
            Complex mono = 1.0;
            for (int v = 0; v < vars; ++v)
                mono *= cpw[static_cast<std::size_t>(v * (d + 1) + alpha[static_cast<std::size_t>(v)])];
            r(row) += 2.0 * s * (mu * mono).real();
            if (!jac)
                continue;
            (*jac)(row, lay.mu(j)) = 2.0 * s * mono.real();
            (*jac)(row, lay.mu(j) + 1) = -2.0 * s * mono.imag();
            for (int k = 0; k < vars; ++k) {
                const int ak = alpha[static_cast<std::size_t>(k)];
                if (ak == 0)
                    continue;
                Complex dm = static_cast<double>(ak);
                for (int v = 0; v < vars; ++v) {
                    const int e = alpha[static_cast<std::size_t>(v)] - (v == k ? 1 : 0);
                    dm *= cpw[static_cast<std::size_t>(v * (d + 1) + e)];
                }
                const Complex md = mu * dm;
                (*jac)(row, base + k) = 2.0 * s * md.real();
                (*jac)(row, base + vars + k) = -2.0 * s * md.imag();
            }
        }
    }
}

} // namespace detail

/// Residual (model - f in Bombieri coordinates) and its analytic Jacobian with
/// respect to every entry of the flattened parameter vector.
inline ResidualJacobian residual_and_gradient(const DecompositionProblem& problem, const Eigen::VectorXd& params)
{
    const ParameterLayout lay = layout_of(problem);
    if (params.size() != lay.size())
        throw InvalidArgument("residual_and_gradient: parameter vector has the wrong shape");
    const detail::Workspace ws(problem.f);
    ResidualJacobian out;
    detail::evaluate_model(ws, lay, params, out.residual, &out.jacobian);
    return out;
}

/// Flattens a labeled set and certificate into the parameter layout.
inline Eigen::VectorXd pack_parameters(const LabeledSet& s, const SpanCertificate& c)
{
    const int vars = s.dim() + 1;
    const ParameterLayout lay{vars, static_cast<int>(s.pairs().size()), static_cast<int>(s.real_points().size())};
    Eigen::VectorXd x(lay.size());
    for (int i = 0; i < lay.b; ++i) {
        for (int v = 0; v < vars; ++v)
            x(lay.real_point(i) + v) = s.real_points()[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)].real();
        x(lay.lambda(i)) = c.real_coeffs[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < lay.a; ++j) {
        for (int v = 0; v < vars; ++v) {
            const Complex z = s.pairs()[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)];
            x(lay.pair_point(j) + v) = z.real();
            x(lay.pair_point(j) + vars + v) = z.imag();
        }
        x(lay.mu(j)) = c.pair_coeffs[static_cast<std::size_t>(j)].real();
        x(lay.mu(j) + 1) = c.pair_coeffs[static_cast<std::size_t>(j)].imag();
    }
    return x;
}

/// Necessary condition for f in sigma_k: every catalecticant has rank <= k.
enum class FilterVerdict { Possible, Impossible };

inline FilterVerdict secant_membership_filter(const HomogeneousForm& f, int k, double rank_tol = Tolerances{}.rank)
{
    if (k < 1)
        throw InvalidArgument("secant_membership_filter: k must be positive");
    for (int level = 1; level <= f.d() - 1; ++level) {
        const CatalecticantMatrix m = catalecticant(f, level);
        if (std::min(m.rows(), m.cols()) <= k)
            continue;
        if (numeric_rank(m, rank_tol) > k)
            return FilterVerdict::Impossible;
    }
    return FilterVerdict::Possible;
}

struct GenericRankInfo {
    int g = 0;
    bool outside_hypotheses = false;  ///< n < 1 or d < 3
    bool listed_exception = false;    ///< (n, d) in {(2,6), (3,4), (5,3)}
    bool defective = false;           ///< classically defective quartics/cubics where the formula overshoots
};

/// ceil(C(n+d, n) / (n+1)) with the relevant flags.
inline GenericRankInfo generic_rank(int n, int d)
{
    if (n < 1 || d < 1)
        throw InvalidArgument("generic_rank: need n >= 1 and d >= 1");
    GenericRankInfo info;
    const auto dim = binomial(n + d, n);
    info.g = static_cast<int>((dim + n) / (n + 1));
    info.outside_hypotheses = d < 3;
    info.listed_exception = (n == 2 && d == 6) || (n == 3 && d == 4) || (n == 5 && d == 3);
    info.defective = d == 2 || (d == 4 && n >= 2 && n <= 4) || (n == 4 && d == 3);
    return info;
}

struct DecompositionOutcome {
    bool success = false;
    std::optional<LabeledSet> set;
    SpanCertificate certificate;
    LabelTemplate tmpl;
    double best_residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_iterate;
    int restart = -1;  ///< index of the successful restart
    bool filtered = false;
    bool smaller_label_fallback = false;
    std::string reason;
};

/// One Levenberg-Marquardt run. `trace` receives the relative residual after
/// every accepted step.
struct LMRun {
    Eigen::VectorXd x;
    double relative_residual = 0.0;
    int iterations = 0;
    std::vector<double> trace;
};

namespace detail {

/// Index of the largest-modulus coordinate of each point; these entries stay
/// frozen at 1 (real part) / 0 (imaginary part) during the iteration.
inline std::vector<bool> gauge_mask(const ParameterLayout& lay, const Eigen::VectorXd& x)
{
    std::vector<bool> free(static_cast<std::size_t>(lay.size()), true);
    auto pick = [&](auto modulus) {
        int best = 0;
        double bv = -1.0;
        for (int v = 0; v < lay.vars; ++v)
            if (const double m = modulus(v); m > bv) {
                bv = m;
                best = v;
            }
        return best;
    };
    for (int i = 0; i < lay.b; ++i) {
        const int k = pick([&](int v) { return std::abs(x(lay.real_point(i) + v)); });
        free[static_cast<std::size_t>(lay.real_point(i) + k)] = false;
    }
    for (int j = 0; j < lay.a; ++j) {
        const Eigen::Index base = lay.pair_point(j);
        const int k = pick([&](int v) { return std::hypot(x(base + v), x(base + lay.vars + v)); });
        free[static_cast<std::size_t>(base + k)] = false;
        free[static_cast<std::size_t>(base + lay.vars + k)] = false;
    }
    return free;
}

/// Rescales every point so its largest coordinate is 1, compensating in the
/// coefficient (l_{p/c}^d = c^-d l_p^d). The model is unchanged.
inline void regauge(const ParameterLayout& lay, int d, Eigen::VectorXd& x)
{
    for (int i = 0; i < lay.b; ++i) {
        const Eigen::Index base = lay.real_point(i);
        Eigen::Index k = 0;
        x.segment(base, lay.vars).cwiseAbs().maxCoeff(&k);
        const double c = x(base + k);
        if (c == 0.0)
            continue;
        x.segment(base, lay.vars) /= c;
        x(lay.lambda(i)) *= std::pow(c, d);
    }
    for (int j = 0; j < lay.a; ++j) {
        const Eigen::Index base = lay.pair_point(j);
        int k = 0;
        double bv = -1.0;
        for (int v = 0; v < lay.vars; ++v)
            if (const double m = std::hypot(x(base + v), x(base + lay.vars + v)); m > bv) {
                bv = m;
                k = v;
            }
        const Complex c(x(base + k), x(base + lay.vars + k));
        if (c == Complex{})
            continue;
        for (int v = 0; v < lay.vars; ++v) {
            const Complex z = Complex(x(base + v), x(base + lay.vars + v)) / c;
            x(base + v) = z.real();
            x(base + lay.vars + v) = z.imag();
        }
        x(base + k) = 1.0;
        x(base + lay.vars + k) = 0.0;
        const Complex mu = Complex(x(lay.mu(j)), x(lay.mu(j) + 1)) * std::pow(c, d);
        x(lay.mu(j)) = mu.real();
        x(lay.mu(j) + 1) = mu.imag();
    }
}

inline bool needs_regauge(const ParameterLayout& lay, const Eigen::VectorXd& x)
{
    for (int i = 0; i < lay.b; ++i)
        if (x.segment(lay.real_point(i), lay.vars).cwiseAbs().maxCoeff() > 2.0)
            return true;
    for (int j = 0; j < lay.a; ++j) {
        const Eigen::Index base = lay.pair_point(j);
        for (int v = 0; v < lay.vars; ++v)
            if (std::hypot(x(base + v), x(base + lay.vars + v)) > 2.0)
                return true;
    }
    return false;
}

/// Linear least-squares coefficients for fixed points (initialization).
inline void fit_coefficients(const Workspace& ws, const ParameterLayout& lay, Eigen::VectorXd& x)
{
    const int vars = lay.vars;
    const auto rows = static_cast<Eigen::Index>(ws.basis.size());
    Eigen::MatrixXd a(rows, lay.b + 2 * lay.a);
    std::vector<Complex> p(static_cast<std::size_t>(vars));
    for (int i = 0; i < lay.b; ++i) {
        for (int v = 0; v < vars; ++v)
            p[static_cast<std::size_t>(v)] = x(lay.real_point(i) + v);
        const auto vals = monomial_values(ws.basis, p);
        for (Eigen::Index r = 0; r < rows; ++r)
            a(r, i) = ws.sqrt_mult(r) * vals[static_cast<std::size_t>(r)].real();
    }
    for (int j = 0; j < lay.a; ++j) {
        for (int v = 0; v < vars; ++v)
            p[static_cast<std::size_t>(v)] = Complex(x(lay.pair_point(j) + v), x(lay.pair_point(j) + vars + v));
        const auto vals = monomial_values(ws.basis, p);
        for (Eigen::Index r = 0; r < rows; ++r) {
            a(r, lay.b + 2 * j) = 2.0 * ws.sqrt_mult(r) * vals[static_cast<std::size_t>(r)].real();
            a(r, lay.b + 2 * j + 1) = -2.0 * ws.sqrt_mult(r) * vals[static_cast<std::size_t>(r)].imag();
        }
    }
    const Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(ws.target);
    for (int i = 0; i < lay.b; ++i)
        x(lay.lambda(i)) = c(i);
    for (int j = 0; j < lay.a; ++j) {
        x(lay.mu(j)) = c(lay.b + 2 * j);
        x(lay.mu(j) + 1) = c(lay.b + 2 * j + 1);
    }
}

inline LMRun levenberg_marquardt(const Workspace& ws, const ParameterLayout& lay, Eigen::VectorXd x,
                                 const NLSConfig& cfg, double stop_residual)
{
    const int d = ws.basis.d();
    const double fnorm = ws.target.norm();
    regauge(lay, d, x);
    std::vector<bool> free = gauge_mask(lay, x);
    std::vector<Eigen::Index> idx;
    auto rebuild_index = [&]() {
        idx.clear();
        for (Eigen::Index i = 0; i < lay.size(); ++i)
            if (free[static_cast<std::size_t>(i)])
                idx.push_back(i);
    };
    rebuild_index();

    Eigen::VectorXd r;
    Eigen::MatrixXd jfull;
    evaluate_model(ws, lay, x, r, &jfull);
    auto reduce = [&](const Eigen::MatrixXd& j) {
        Eigen::MatrixXd out(j.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t c = 0; c < idx.size(); ++c)
            out.col(static_cast<Eigen::Index>(c)) = j.col(idx[c]);
        return out;
    };
    Eigen::MatrixXd jac = reduce(jfull);
    Eigen::MatrixXd a = jac.transpose() * jac;
    Eigen::VectorXd g = jac.transpose() * r;
    double mu = cfg.lambda_init * std::max(1.0, a.diagonal().maxCoeff());
    double nu = 2.0;

    LMRun run;
    double rn2 = r.squaredNorm();
    double window_start = std::sqrt(rn2);
    Eigen::VectorXd xn;
    Eigen::VectorXd rtrial;
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        if (std::sqrt(rn2) <= stop_residual * fnorm)
            break;
        if (g.lpNorm<Eigen::Infinity>() <= cfg.gradient_tol * fnorm * fnorm)
            break;
        if (cfg.stall_window > 0 && it > 0 && it % cfg.stall_window == 0) {
            // abandon stalled runs far from a solution
            const double now = std::sqrt(rn2);
            if (now > 1e-3 * fnorm && now > 0.7 * window_start)
                break;
            window_start = now;
        }
        Eigen::MatrixXd lhs = a;
        lhs.diagonal().array() += mu;
        const Eigen::VectorXd h = lhs.ldlt().solve(-g);
        if (!h.allFinite())
            break;
        const Eigen::Index pn = static_cast<Eigen::Index>(idx.size());
        Eigen::VectorXd xr(pn);
        for (Eigen::Index c = 0; c < pn; ++c)
            xr(c) = x(idx[static_cast<std::size_t>(c)]);
        if (h.norm() <= 1e-15 * (xr.norm() + 1e-15))
            break;
        xn = x;
        for (Eigen::Index c = 0; c < pn; ++c)
            xn(idx[static_cast<std::size_t>(c)]) += h(c);
        evaluate_model(ws, lay, xn, rtrial, nullptr);
        const double trial2 = rtrial.squaredNorm();
        const double predicted = h.dot(mu * h - g);
        const double rho = predicted > 0.0 ? (rn2 - trial2) / predicted : -1.0;
        if (rho > 0.0 && trial2 < rn2) {
            x = xn;
            if (needs_regauge(lay, x)) {
                regauge(lay, d, x);
                free = gauge_mask(lay, x);
                rebuild_index();
            }
            evaluate_model(ws, lay, x, r, &jfull);
            rn2 = r.squaredNorm();
            jac = reduce(jfull);
            a = jac.transpose() * jac;
            g = jac.transpose() * r;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
            run.trace.push_back(std::sqrt(rn2) / fnorm);
        } else {
            mu *= nu;
            nu *= 2.0;
            if (!std::isfinite(mu) || mu > 1e30)
                break;
        }
    }
    run.x = std::move(x);
    run.relative_residual = std::sqrt(rn2) / fnorm;
    run.iterations = it;
    return run;
}

/// Random start: Gaussian points (complex for pairs), coefficients by linear least squares.
inline Eigen::VectorXd random_start(const Workspace& ws, const ParameterLayout& lay, Rng& rng)
{
    Eigen::VectorXd x = Eigen::VectorXd::Zero(lay.size());
    for (int i = 0; i < lay.b; ++i)
        for (int v = 0; v < lay.vars; ++v)
            x(lay.real_point(i) + v) = rng.normal();
    for (int j = 0; j < lay.a; ++j)
        for (int v = 0; v < lay.vars; ++v) {
            x(lay.pair_point(j) + v) = rng.normal();
            x(lay.pair_point(j) + lay.vars + v) = rng.normal();
        }
    regauge(lay, ws.basis.d(), x);
    fit_coefficients(ws, lay, x);
    return x;
}

/// Turns a converged iterate into a labeled set plus certificate, or explains
/// why it does not carry the requested label.
inline std::optional<std::string> accept_iterate(const DecompositionProblem& p, const ParameterLayout& lay,
                                                 const Eigen::VectorXd& x, DecompositionOutcome& out)
{
    const int vars = lay.vars;
    std::vector<ProjectivePoint> pts;
    try {
        for (int i = 0; i < lay.b; ++i) {
            std::vector<Complex> c(static_cast<std::size_t>(vars));
            for (int v = 0; v < vars; ++v)
                c[static_cast<std::size_t>(v)] = x(lay.real_point(i) + v);
            pts.emplace_back(std::move(c));
        }
        for (int j = 0; j < lay.a; ++j) {
            std::vector<Complex> c(static_cast<std::size_t>(vars));
            for (int v = 0; v < vars; ++v)
                c[static_cast<std::size_t>(v)] = Complex(x(lay.pair_point(j) + v), x(lay.pair_point(j) + vars + v));
            ProjectivePoint q(std::move(c), 0.0);
            if (ProjectivePoint(std::vector<Complex>(q.coords().begin(), q.coords().end()), p.tol.real).is_real())
                return "pair drifted to a real point";
            pts.push_back(q);
            pts.push_back(conjugate_point(q));
        }
    } catch (const InvalidArgument&) {
        return "degenerate point";
    }
    std::optional<LabeledSet> set;
    try {
        set.emplace(label_of(pts, p.tol));
    } catch (const DuplicatePoint&) {
        return "points collapsed";
    } catch (const NotSigmaInvariant&) {
        return "set is not conjugation invariant";
    }
    if (set->label() != p.tmpl.label())
        return "label differs from template";
    Tolerances tol = p.tol;
    tol.residual = p.config.residual_tol;
    Membership m = span_membership(p.f, *set, tol);
    if (!m.in_span)
        return "certificate residual above tolerance";
    // every term must genuinely contribute
    const MonomialBasis basis = p.f.basis();
    const double fnorm = p.f.bombieri_norm();
    for (std::size_t i = 0; i < set->real_points().size(); ++i) {
        const double term = std::abs(m.certificate.real_coeffs[i]) *
                            power_bombieri(basis, set->real_points()[i]).norm();
        if (term <= p.config.residual_tol * fnorm)
            return "negligible term";
    }
    for (std::size_t j = 0; j < set->pairs().size(); ++j) {
        const double term = 2.0 * std::abs(m.certificate.pair_coeffs[j]) *
                            power_bombieri(basis, set->pairs()[j]).norm();
        if (term <= p.config.residual_tol * fnorm)
            return "negligible term";
    }
    out.set = std::move(set);
    out.certificate = std::move(m.certificate);
    return std::nullopt;
}

struct Attempt {
    LMRun run;
    DecompositionOutcome outcome;
};

inline Attempt run_attempt(const DecompositionProblem& p, const Workspace& ws, const ParameterLayout& lay,
                           Eigen::VectorXd start)
{
    Attempt at;
    at.run = levenberg_marquardt(ws, lay, std::move(start), p.config, 1e-2 * p.config.residual_tol);
    at.outcome.tmpl = p.tmpl;
    at.outcome.best_residual = at.run.relative_residual;
    at.outcome.best_iterate = at.run.x;
    if (at.run.relative_residual > p.config.residual_tol) {
        at.outcome.reason = "residual above tolerance";
        return at;
    }
    if (auto why = accept_iterate(p, lay, at.run.x, at.outcome)) {
        at.outcome.reason = *why;
        return at;
    }
    at.outcome.success = true;
    return at;
}

/// Runs restarts 0..R-1 (in parallel batches when threads > 1); the lowest
/// successful index wins, so the result does not depend on scheduling.
template <typename StartFn>
DecompositionOutcome multistart(const DecompositionProblem& p, StartFn make_start)
{
    const Workspace ws(p.f);
    const ParameterLayout lay = layout_of(p);
    DecompositionOutcome best;
    best.tmpl = p.tmpl;
    best.reason = "no restart converged";
    const int batch = std::max(1, p.config.threads);
    for (int first = 0; first < p.config.restarts; first += batch) {
        const int last = std::min(p.config.restarts, first + batch);
        std::vector<Attempt> results(static_cast<std::size_t>(last - first));
        auto job = [&](int r) {
            Rng rng(p.config.seed, static_cast<std::uint64_t>(r));
            return run_attempt(p, ws, lay, make_start(ws, lay, rng));
        };
        if (batch == 1) {
            results[0] = job(first);
        } else {
            std::vector<std::future<Attempt>> futs;
            for (int r = first; r < last; ++r)
                futs.push_back(std::async(std::launch::async, job, r));
            for (std::size_t i = 0; i < futs.size(); ++i)
                results[i] = futs[i].get();
        }
        for (std::size_t i = 0; i < results.size(); ++i) {
            Attempt& at = results[i];
            if (at.outcome.success) {
                at.outcome.restart = first + static_cast<int>(i);
                return std::move(at.outcome);
            }
            if (at.outcome.best_residual < best.best_residual) {
                best.best_residual = at.outcome.best_residual;
                best.best_iterate = at.outcome.best_iterate;
                best.reason = at.outcome.reason;
            }
        }
    }
    return best;
}

} // namespace detail

/// Accepted-step trace of a single LM run from the given start (diagnostics).
inline LMRun levenberg_marquardt(const DecompositionProblem& p, const Eigen::VectorXd& start)
{
    const detail::Workspace ws(p.f);
    return detail::levenberg_marquardt(ws, layout_of(p), start, p.config, 1e-2 * p.config.residual_tol);
}

/// Multistart Levenberg-Marquardt for a labeled decomposition with exactly
/// the template's label. Forms failing the catalecticant filter are rejected
/// without iterating.
inline DecompositionOutcome decompose_with_template(const DecompositionProblem& p)
{
    if (secant_membership_filter(p.f, p.tmpl.weight(), p.tol.rank) == FilterVerdict::Impossible) {
        DecompositionOutcome out;
        out.tmpl = p.tmpl;
        out.filtered = true;
        out.reason = "catalecticant rank exceeds template weight";
        return out;
    }
    return detail::multistart(p, [](const detail::Workspace& ws, const ParameterLayout& lay, Rng& rng) {
        return detail::random_start(ws, lay, rng);
    });
}

/// Templates of weight w in decreasing number of real points.
inline std::vector<LabelTemplate> templates_of_weight(int w, bool skip_all_real)
{
    if (w < 1)
        throw InvalidArgument("templates_of_weight: weight must be positive");
    std::vector<LabelTemplate> out;
    for (int b = w; b >= 0; b -= 2) {
        if (skip_all_real && b == w)
            continue;
        out.push_back({(w - b) / 2, b});
    }
    return out;
}

inline DecompositionOutcome decompose_weight(const HomogeneousForm& f, int w, bool skip_all_real,
                                             const NLSConfig& cfg = {}, const Tolerances& tol = {})
{
    DecompositionOutcome best;
    best.reason = "no template succeeded";
    const std::vector<LabelTemplate> templates = templates_of_weight(w, skip_all_real);
    if (templates.empty()) {
        best.reason = "no template of this weight";
        return best;
    }
    best.tmpl = templates.front();
    if (secant_membership_filter(f, w, tol.rank) == FilterVerdict::Impossible) {
        best.filtered = true;
        best.reason = "catalecticant rank exceeds weight";
        return best;
    }
    for (const LabelTemplate& t : templates) {
        DecompositionOutcome out = decompose_with_template(DecompositionProblem(f, t, cfg, tol));
        if (out.success)
            return out;
        if (out.best_residual < best.best_residual) {
            best.best_residual = out.best_residual;
            best.best_iterate = out.best_iterate;
            best.tmpl = t;
            best.reason = out.reason;
        }
    }
    return best;
}

/// Weight-(k+1) labeled decomposition built along the join of sigma_(k-1) with
/// a conjugate pair: a weight-(k-1) fit of a perturbed copy of f seeds every
/// point but one extra random conjugate pair. If f already has a weight-(k-1)
/// label, that smaller label is returned instead.
inline DecompositionOutcome join_decompose(const HomogeneousForm& f, int k, const NLSConfig& cfg = {},
                                           const Tolerances& tol = {})
{
    if (k < 2)
        throw InvalidArgument("join_decompose: k must be at least 2");
    const int inner = k - 1;

    DecompositionOutcome honest = decompose_weight(f, inner, false, cfg, tol);
    if (honest.success) {
        honest.smaller_label_fallback = true;
        return honest;
    }

    DecompositionOutcome best;
    best.reason = "no join template succeeded";
    const double fnorm = f.bombieri_norm();
    for (const LabelTemplate& seed_t : templates_of_weight(inner, false)) {
        const LabelTemplate t{seed_t.a + 1, seed_t.b};
        const DecompositionProblem p(f, t, cfg, tol);
        auto start = [&](const detail::Workspace& ws, const ParameterLayout& lay, Rng& rng) {
            // perturbed target, fitted at the inner weight
            std::vector<double> pert(ws.basis.size());
            for (std::size_t i = 0; i < pert.size(); ++i)
                pert[i] = f.coeffs()[i].real() + 1e-3 * fnorm * rng.normal() * ws.sqrt_mult(static_cast<Eigen::Index>(i));
            const HomogeneousForm g = HomogeneousForm::from_real(f.n(), f.d(), pert);
            const detail::Workspace inner_ws(g);
            const ParameterLayout inner_lay{lay.vars, seed_t.a, seed_t.b};
            NLSConfig quick = cfg;
            quick.max_iters = std::min(cfg.max_iters, 100);
            const LMRun seed = detail::levenberg_marquardt(inner_ws, inner_lay,
                                                           detail::random_start(inner_ws, inner_lay, rng), quick,
                                                           1e-2 * cfg.residual_tol);
            Eigen::VectorXd x = Eigen::VectorXd::Zero(lay.size());
            for (int i = 0; i < seed_t.b; ++i) {
                x.segment(lay.real_point(i), lay.vars) = seed.x.segment(inner_lay.real_point(i), lay.vars);
                x(lay.lambda(i)) = seed.x(inner_lay.lambda(i));
            }
            for (int j = 0; j < seed_t.a; ++j) {
                x.segment(lay.pair_point(j), 2 * lay.vars) = seed.x.segment(inner_lay.pair_point(j), 2 * lay.vars);
                x.segment(lay.mu(j), 2) = seed.x.segment(inner_lay.mu(j), 2);
            }
            for (int v = 0; v < lay.vars; ++v) {
                x(lay.pair_point(seed_t.a) + v) = rng.normal();
                x(lay.pair_point(seed_t.a) + lay.vars + v) = rng.normal();
            }
            detail::regauge(lay, ws.basis.d(), x);
            detail::fit_coefficients(ws, lay, x);
            return x;
        };
        DecompositionOutcome out = detail::multistart(p, start);
        if (out.success)
            return out;
        if (out.best_residual < best.best_residual) {
            best.best_residual = out.best_residual;
            best.best_iterate = out.best_iterate;
            best.tmpl = t;
            best.reason = out.reason;
        }
    }
    return best;
}

struct PlantedDecomposition {
    LabeledSet set;
    SpanCertificate certificate;
    HomogeneousForm form;
};

/// Random labeled configuration with pairwise projective distance at least
/// min_sep (conjugates included) and the form it reconstructs.
inline PlantedDecomposition planted_decomposition(Rng& rng, int n, int d, LabelTemplate t, double min_sep = 0.3)
{
    (void)t.label();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<ProjectivePoint> reals;
        std::vector<ProjectivePoint> pairs;
        std::vector<ProjectivePoint> all;
        auto separated = [&](const ProjectivePoint& p) {
            return std::ranges::all_of(all, [&](const ProjectivePoint& q) { return projective_distance(p, q) >= min_sep; });
        };
        bool ok = true;
        for (int i = 0; i < t.b && ok; ++i) {
            ProjectivePoint p = random_real_point(rng, n);
            ok = separated(p);
            all.push_back(p);
            reals.push_back(std::move(p));
        }
        for (int j = 0; j < t.a && ok; ++j) {
            ProjectivePoint q = random_complex_point(rng, n);
            const ProjectivePoint qc = conjugate_point(q);
            ok = separated(q) && projective_distance(q, qc) >= min_sep;
            all.push_back(q);
            ok = ok && separated(qc);
            all.push_back(qc);
            pairs.push_back(std::move(q));
        }
        if (!ok)
            continue;
        LabeledSet set(std::move(reals), std::move(pairs));
        SpanCertificate cert;
        for (int i = 0; i < t.b; ++i)
            cert.real_coeffs.push_back(rng.normal());
        for (int j = 0; j < t.a; ++j)
            cert.pair_coeffs.push_back(rng.complex_normal());
        HomogeneousForm f = reconstruct(set, cert, d);
        return {std::move(set), std::move(cert), std::move(f)};
    }
    throw InvalidArgument("planted_decomposition: could not draw a separated configuration");
}

/// Decomposition with label (k/2 + 1, 0): conjugate pairs only. k below 4 is
/// accepted but outside the range where such labels are guaranteed.
inline DecompositionOutcome conjugate_only_decompose(const HomogeneousForm& f, int k_even, const NLSConfig& cfg = {},
                                                     const Tolerances& tol = {})
{
    if (k_even < 0 || k_even % 2 != 0)
        throw InvalidArgument("conjugate_only_decompose: k must be even and non-negative");
    return decompose_with_template(DecompositionProblem(f, {k_even / 2 + 1, 0}, cfg, tol));
}

} // namespace waring
