#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "waring/binary.hpp"
#include "waring/config.hpp"
#include "waring/decompose.hpp"
#include "waring/hypersurface.hpp"
#include "waring/random.hpp"

namespace waring {

enum class Distribution { GaussianMonomial, GaussianBombieri };

inline std::string to_string(Distribution d)
{
    return d == Distribution::GaussianMonomial ? "gaussian-monomial" : "gaussian-bombieri";
}

inline Distribution parse_distribution(const std::string& s)
{
    if (s == "gaussian-monomial")
        return Distribution::GaussianMonomial;
    if (s == "gaussian-bombieri")
        return Distribution::GaussianBombieri;
    throw InvalidArgument("unknown distribution '" + s + "'");
}

struct BinaryGeometry {
    int d;
};
struct VeroneseGeometry {
    int n;
    int d;
};
struct HypersurfaceGeometry {
    HomogeneousForm surface;
};
using Geometry = std::variant<BinaryGeometry, VeroneseGeometry, HypersurfaceGeometry>;

struct EnsembleSpec {
    Geometry geometry = BinaryGeometry{3};
    Distribution distribution = Distribution::GaussianMonomial;
    int trials = 1;
    std::uint64_t seed = 1;
    GlobalConfig config;
    std::optional<int> weight;  ///< Veronese search weight; defaults to generic rank + 1
    bool skip_all_real = false;

    void validate() const
    {
        if (trials < 1)
            throw InvalidArgument("EnsembleSpec: trials must be at least 1");
        if (!config.valid())
            throw InvalidArgument("EnsembleSpec: invalid configuration");
        if (const auto* b = std::get_if<BinaryGeometry>(&geometry); b && b->d < 1)
            throw InvalidArgument("EnsembleSpec: binary degree must be positive");
        if (const auto* v = std::get_if<VeroneseGeometry>(&geometry); v && (v->n < 1 || v->d < 2))
            throw InvalidArgument("EnsembleSpec: Veronese needs n >= 1 and d >= 2");
        if (const auto* h = std::get_if<HypersurfaceGeometry>(&geometry); h && (!h->surface.is_real() || h->surface.d() < 2))
            throw InvalidArgument("EnsembleSpec: hypersurface must be real of degree >= 2");
        if (weight && *weight < 1)
            throw InvalidArgument("EnsembleSpec: weight must be positive");
    }

    int veronese_weight() const
    {
        const auto& v = std::get<VeroneseGeometry>(geometry);
        return weight.value_or(generic_rank(v.n, v.d).g + 1);
    }
};

/// Real form with independent Gaussian coefficients: unit variance per
/// monomial, or variance equal to the multinomial coefficient (Bombieri).
inline HomogeneousForm sample_random_form(int n, int d, Distribution dist, Rng& rng)
{
    const MonomialBasis basis(n, d);
    std::vector<double> c(basis.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = rng.normal();
        if (dist == Distribution::GaussianBombieri)
            c[i] *= std::sqrt(multinomial(basis[i]));
    }
    if (std::ranges::all_of(c, [](double x) { return x == 0.0; }))
        c[0] = 1.0;
    return HomogeneousForm::from_real(n, d, c);
}

/// Form of trial `index` for the spec's geometry (binary or Veronese).
inline HomogeneousForm sample_random_form(const EnsembleSpec& spec, std::uint64_t index)
{
    spec.validate();
    Rng rng(spec.seed, index);
    if (const auto* b = std::get_if<BinaryGeometry>(&spec.geometry))
        return sample_random_form(1, b->d, spec.distribution, rng);
    if (const auto* v = std::get_if<VeroneseGeometry>(&spec.geometry))
        return sample_random_form(v->n, v->d, spec.distribution, rng);
    throw InvalidArgument("sample_random_form: hypersurface ensembles sample points, not forms");
}

struct LabelHistogram {
    std::map<Label, long> counts;
    long failures = 0;
    long trials = 0;
    std::vector<std::optional<Label>> per_trial;

    int max_weight() const
    {
        int w = 0;
        for (const auto& [l, c] : counts)
            w = std::max(w, weight(l));
        return w;
    }

    double frequency(Label l) const
    {
        const auto it = counts.find(l);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trials);
    }
};

/// Runs fn(i) for i in [0, count) on `threads` workers; results land in slot i.
template <typename T, typename Fn>
std::vector<T> parallel_trials(int count, int threads, Fn fn)
{
    std::vector<T> out(static_cast<std::size_t>(count));
    const int workers = std::clamp(threads, 1, std::max(1, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers)
                    out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

/// Label achieved in trial `index`, or nullopt when the engine failed.
inline std::optional<Label> run_trial(const EnsembleSpec& spec, std::uint64_t index)
{
    const GlobalConfig& cfg = spec.config;
    try {
        if (const auto* h = std::get_if<HypersurfaceGeometry>(&spec.geometry)) {
            Rng rng(spec.seed, index);
            const ProjectivePoint q = random_real_point(rng, h->surface.n());
            const HypersurfaceInstance inst(h->surface, q);
            return find_label_hypersurface(inst, rng, {cfg.tol, cfg.max_retries, cfg.prefer_pair}).set.label();
        }
        const HomogeneousForm f = sample_random_form(spec, index);
        if (std::holds_alternative<BinaryGeometry>(spec.geometry))
            return sylvester_decompose(f, {cfg.tol, cfg.kernel_budget}).set.label();
        NLSConfig nls = cfg.nls;
        nls.seed = derive_seed(spec.seed, index);
        nls.threads = 1;
        const DecompositionOutcome out = decompose_weight(f, spec.veronese_weight(), spec.skip_all_real, nls, cfg.tol);
        if (out.success)
            return out.set->label();
    } catch (const Error&) {
    }
    return std::nullopt;
}

/// Tallies achieved labels over all trials. Trials run in parallel and are
/// merged in index order, so the histogram is independent of `threads`.
inline LabelHistogram survey_labels(const EnsembleSpec& spec, int threads = 1)
{
    spec.validate();
    LabelHistogram h;
    h.trials = spec.trials;
    h.per_trial = parallel_trials<std::optional<Label>>(spec.trials, threads, [&](int i) {
        return run_trial(spec, static_cast<std::uint64_t>(i));
    });
    for (const auto& l : h.per_trial) {
        if (l)
            ++h.counts[*l];
        else
            ++h.failures;
    }
    return h;
}

} // namespace waring
