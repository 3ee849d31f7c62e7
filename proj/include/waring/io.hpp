#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "waring/config.hpp"
#include "waring/errors.hpp"
#include "waring/labels.hpp"
#include "waring/survey.hpp"

namespace waring::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline void require_object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw SchemaError(path.empty() ? "$" : path, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k))
            throw SchemaError(path + (path.empty() ? "" : ".") + k, "unknown field");
}

inline std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

inline const Json& field(const Json& j, const std::string& path, const std::string& key)
{
    if (!j.contains(key))
        throw SchemaError(join(path, key), "missing required field");
    return j.at(key);
}

inline long long as_int(const Json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw SchemaError(path, "expected an integer");
    return j.get<long long>();
}

inline double as_number(const Json& j, const std::string& path)
{
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x))
        throw SchemaError(path, "expected a finite number");
    return x;
}

inline bool as_bool(const Json& j, const std::string& path)
{
    if (!j.is_boolean())
        throw SchemaError(path, "expected a boolean");
    return j.get<bool>();
}

inline std::uint64_t as_seed(const Json& j, const std::string& path)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw SchemaError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline Complex as_complex(const Json& j, const std::string& path)
{
    if (j.is_number())
        return as_number(j, path);
    if (j.is_array() && j.size() == 2)
        return {as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
    throw SchemaError(path, "expected a number or [re, im]");
}

inline Json complex_json(Complex z) { return Json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline Json point_coords_json(const ProjectivePoint& p)
{
    Json out = Json::array();
    for (const Complex& z : p.coords())
        out.push_back(complex_json(z));
    return out;
}

} // namespace detail

// ---- forms -----------------------------------------------------------------

inline HomogeneousForm form_from_json(const Json& j, const std::string& path = "")
{
    using namespace detail;
    require_object(j, path, {"n", "d", "coeffs", "basis"});
    const long long n = as_int(field(j, path, "n"), join(path, "n"));
    const long long d = as_int(field(j, path, "d"), join(path, "d"));
    if (n < 1 || n > 64)
        throw SchemaError(join(path, "n"), "must be between 1 and 64");
    if (d < 1 || d > 64)
        throw SchemaError(join(path, "d"), "must be between 1 and 64");
    bool scaled = false;
    if (j.contains("basis")) {
        const Json& b = j.at("basis");
        if (!b.is_string() || (b != "monomial" && b != "scaled"))
            throw SchemaError(join(path, "basis"), "expected \"monomial\" or \"scaled\"");
        scaled = b == "scaled";
        if (scaled && n != 1)
            throw SchemaError(join(path, "basis"), "the scaled convention applies to binary forms only");
    }
    const MonomialBasis basis(static_cast<int>(n), static_cast<int>(d));
    std::vector<Complex> c(basis.size(), Complex{});
    std::vector<bool> seen(basis.size(), false);
    const Json& coeffs = field(j, path, "coeffs");
    const std::string cpath = join(path, "coeffs");
    if (!coeffs.is_array())
        throw SchemaError(cpath, "expected an array");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const std::string ipath = cpath + "[" + std::to_string(i) + "]";
        const Json& e = coeffs[i];
        require_object(e, ipath, {"alpha", "re", "im"});
        const Json& a = field(e, ipath, "alpha");
        const std::string apath = ipath + ".alpha";
        if (!a.is_array() || a.size() != static_cast<std::size_t>(n + 1))
            throw SchemaError(apath, "expected " + std::to_string(n + 1) + " exponents");
        Exponent alpha;
        long long total = 0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const long long x = as_int(a[k], apath + "[" + std::to_string(k) + "]");
            if (x < 0)
                throw SchemaError(apath, "exponents must be non-negative");
            total += x;
            alpha.push_back(static_cast<int>(x));
        }
        if (total != d)
            throw SchemaError(apath, "exponents sum to " + std::to_string(total) + ", expected " + std::to_string(d));
        const std::size_t idx = basis.index_of(alpha);
        if (seen[idx])
            throw SchemaError(apath, "duplicate monomial");
        seen[idx] = true;
        const double re = as_number(field(e, ipath, "re"), ipath + ".re");
        const double im = e.contains("im") ? as_number(e.at("im"), ipath + ".im") : 0.0;
        c[idx] = {re, im};
    }
    try {
        return scaled ? HomogeneousForm::from_scaled(static_cast<int>(n), static_cast<int>(d), c)
                      : HomogeneousForm(static_cast<int>(n), static_cast<int>(d), std::move(c));
    } catch (const InvalidArgument& e) {
        throw SchemaError(cpath, e.what());
    }
}

inline Json form_to_json(const HomogeneousForm& f)
{
    Json coeffs = Json::array();
    for (std::size_t i = 0; i < f.basis().size(); ++i) {
        const Complex z = f.coeffs()[i];
        if (z == Complex{})
            continue;
        coeffs.push_back(Json{{"alpha", f.basis()[i]}, {"re", z.real()}, {"im", z.imag()}});
    }
    return Json{{"n", f.n()}, {"d", f.d()}, {"coeffs", coeffs}};
}

// ---- points ----------------------------------------------------------------

inline ProjectivePoint point_from_json(const Json& j, const std::string& path = "", double tau_real = Tolerances{}.real)
{
    using namespace detail;
    require_object(j, path, {"coords"});
    const Json& c = field(j, path, "coords");
    const std::string cpath = join(path, "coords");
    if (!c.is_array() || c.size() < 2)
        throw SchemaError(cpath, "expected at least two coordinates");
    std::vector<Complex> z;
    for (std::size_t i = 0; i < c.size(); ++i)
        z.push_back(as_complex(c[i], cpath + "[" + std::to_string(i) + "]"));
    try {
        return ProjectivePoint(std::move(z), tau_real);
    } catch (const InvalidArgument& e) {
        throw SchemaError(cpath, e.what());
    }
}

inline Json point_to_json(const ProjectivePoint& p) { return Json{{"coords", detail::point_coords_json(p)}}; }

// ---- certificates ----------------------------------------------------------

inline Json label_json(Label l) { return Json::array({l.a, l.b}); }

inline Json certificate_to_json(const LabeledSet& s, const SpanCertificate& c)
{
    Json reals = Json::array();
    for (const auto& p : s.real_points())
        reals.push_back(detail::point_coords_json(p));
    Json pairs = Json::array();
    for (const auto& p : s.pairs())
        pairs.push_back(detail::point_coords_json(p));
    Json pc = Json::array();
    for (const Complex& z : c.pair_coeffs)
        pc.push_back(detail::complex_json(z));
    return Json{{"label", label_json(s.label())}, {"real_points", reals}, {"pairs", pairs},
                {"real_coeffs", c.real_coeffs}, {"pair_coeffs", pc}, {"residual", c.residual}};
}

// ---- configuration ---------------------------------------------------------

inline Json config_to_json(const GlobalConfig& g)
{
    const Tolerances& t = g.tol;
    const NLSConfig& n = g.nls;
    return Json{
        {"tolerances",
         {{"real", t.real}, {"pair", t.pair}, {"sep", t.sep}, {"rank", t.rank}, {"residual", t.residual},
          {"root", t.root}, {"distinct", t.distinct}}},
        {"nls",
         {{"max_iters", n.max_iters}, {"lambda_init", n.lambda_init}, {"gradient_tol", n.gradient_tol},
          {"residual_tol", n.residual_tol}, {"restarts", n.restarts}, {"stall_window", n.stall_window}}},
        {"seed", g.seed},
        {"max_retries", g.max_retries},
        {"kernel_budget", g.kernel_budget},
        {"prefer_pair", g.prefer_pair}};
}

/// Overlays the fields present in `j` onto `base`.
inline GlobalConfig config_from_json(const Json& j, GlobalConfig base = {}, const std::string& path = "")
{
    using namespace detail;
    require_object(j, path, {"tolerances", "nls", "seed", "max_retries", "kernel_budget", "prefer_pair"});
    if (j.contains("tolerances")) {
        const std::string tp = join(path, "tolerances");
        const Json& t = j.at("tolerances");
        require_object(t, tp, {"real", "pair", "sep", "rank", "residual", "root", "distinct"});
        const std::pair<const char*, double*> slots[] = {
            {"real", &base.tol.real}, {"pair", &base.tol.pair}, {"sep", &base.tol.sep},
            {"rank", &base.tol.rank}, {"residual", &base.tol.residual}, {"root", &base.tol.root},
            {"distinct", &base.tol.distinct}};
        for (auto [k, p] : slots)
            if (t.contains(k)) {
                *p = as_number(t.at(k), join(tp, k));
                if (*p <= 0)
                    throw SchemaError(join(tp, k), "must be positive");
            }
    }
    if (j.contains("nls")) {
        const std::string np = join(path, "nls");
        const Json& n = j.at("nls");
        require_object(n, np, {"max_iters", "lambda_init", "gradient_tol", "residual_tol", "restarts", "stall_window"});
        auto positive_int = [&](const char* k, int& dst, long long min) {
            if (!n.contains(k))
                return;
            const long long v = as_int(n.at(k), join(np, k));
            if (v < min || v > 1'000'000)
                throw SchemaError(join(np, k), "out of range");
            dst = static_cast<int>(v);
        };
        auto positive_real = [&](const char* k, double& dst) {
            if (!n.contains(k))
                return;
            dst = as_number(n.at(k), join(np, k));
            if (dst <= 0)
                throw SchemaError(join(np, k), "must be positive");
        };
        positive_int("max_iters", base.nls.max_iters, 1);
        positive_int("restarts", base.nls.restarts, 1);
        positive_int("stall_window", base.nls.stall_window, 0);
        positive_real("lambda_init", base.nls.lambda_init);
        positive_real("gradient_tol", base.nls.gradient_tol);
        positive_real("residual_tol", base.nls.residual_tol);
    }
    if (j.contains("seed"))
        base.seed = as_seed(j.at("seed"), join(path, "seed"));
    auto bounded = [&](const char* k, int& dst) {
        if (!j.contains(k))
            return;
        const long long v = as_int(j.at(k), join(path, k));
        if (v < 1 || v > 1'000'000)
            throw SchemaError(join(path, k), "out of range");
        dst = static_cast<int>(v);
    };
    bounded("max_retries", base.max_retries);
    bounded("kernel_budget", base.kernel_budget);
    if (j.contains("prefer_pair"))
        base.prefer_pair = as_bool(j.at("prefer_pair"), join(path, "prefer_pair"));
    return base;
}

// ---- survey ----------------------------------------------------------------

inline EnsembleSpec spec_from_json(const Json& j, const GlobalConfig& defaults = {})
{
    using namespace detail;
    require_object(j, "", {"geometry", "distribution", "trials", "seed", "weight", "skip_all_real", "config"});
    EnsembleSpec spec;
    spec.config = defaults;
    if (j.contains("config"))
        spec.config = config_from_json(j.at("config"), defaults, "config");
    const Json& g = field(j, "", "geometry");
    if (!g.is_object() || !g.contains("kind") || !g.at("kind").is_string())
        throw SchemaError("geometry.kind", "expected \"binary\", \"veronese\" or \"hypersurface\"");
    const std::string kind = g.at("kind");
    if (kind == "binary") {
        require_object(g, "geometry", {"kind", "d"});
        const long long d = as_int(field(g, "geometry", "d"), "geometry.d");
        if (d < 1 || d > 64)
            throw SchemaError("geometry.d", "must be between 1 and 64");
        spec.geometry = BinaryGeometry{static_cast<int>(d)};
    } else if (kind == "veronese") {
        require_object(g, "geometry", {"kind", "n", "d"});
        const long long n = as_int(field(g, "geometry", "n"), "geometry.n");
        const long long d = as_int(field(g, "geometry", "d"), "geometry.d");
        if (n < 1 || n > 16)
            throw SchemaError("geometry.n", "must be between 1 and 16");
        if (d < 2 || d > 32)
            throw SchemaError("geometry.d", "must be between 2 and 32");
        spec.geometry = VeroneseGeometry{static_cast<int>(n), static_cast<int>(d)};
    } else if (kind == "hypersurface") {
        require_object(g, "geometry", {"kind", "surface"});
        HomogeneousForm f = form_from_json(field(g, "geometry", "surface"), "geometry.surface");
        if (!f.is_real() || f.d() < 2)
            throw SchemaError("geometry.surface", "must be real of degree at least 2");
        spec.geometry = HypersurfaceGeometry{std::move(f)};
    } else {
        throw SchemaError("geometry.kind", "expected \"binary\", \"veronese\" or \"hypersurface\"");
    }
    if (j.contains("distribution")) {
        const Json& d = j.at("distribution");
        if (!d.is_string() || (d != "gaussian-monomial" && d != "gaussian-bombieri"))
            throw SchemaError("distribution", "expected \"gaussian-monomial\" or \"gaussian-bombieri\"");
        spec.distribution = parse_distribution(d.get<std::string>());
    }
    const long long trials = as_int(field(j, "", "trials"), "trials");
    if (trials < 1 || trials > 100'000'000)
        throw SchemaError("trials", "must be at least 1");
    spec.trials = static_cast<int>(trials);
    spec.seed = j.contains("seed") ? as_seed(j.at("seed"), "seed") : spec.config.seed;
    if (j.contains("weight")) {
        const long long w = as_int(j.at("weight"), "weight");
        if (w < 1 || w > 1000)
            throw SchemaError("weight", "must be positive");
        if (!std::holds_alternative<VeroneseGeometry>(spec.geometry))
            throw SchemaError("weight", "only meaningful for Veronese ensembles");
        spec.weight = static_cast<int>(w);
    }
    if (j.contains("skip_all_real"))
        spec.skip_all_real = as_bool(j.at("skip_all_real"), "skip_all_real");
    spec.config.seed = spec.seed;
    return spec;
}

inline Json geometry_json(const Geometry& g)
{
    if (const auto* b = std::get_if<BinaryGeometry>(&g))
        return Json{{"kind", "binary"}, {"d", b->d}};
    if (const auto* v = std::get_if<VeroneseGeometry>(&g))
        return Json{{"kind", "veronese"}, {"n", v->n}, {"d", v->d}};
    return Json{{"kind", "hypersurface"}, {"surface", form_to_json(std::get<HypersurfaceGeometry>(g).surface)}};
}

inline Json spec_to_json(const EnsembleSpec& s)
{
    Json j{{"geometry", geometry_json(s.geometry)},
           {"distribution", to_string(s.distribution)},
           {"trials", s.trials},
           {"seed", s.seed}};
    if (s.weight)
        j["weight"] = *s.weight;
    j["skip_all_real"] = s.skip_all_real;
    j["config"] = config_to_json(s.config);
    return j;
}

inline Json histogram_to_json(const LabelHistogram& h)
{
    Json counts = Json::array();
    for (const auto& [l, c] : h.counts)
        counts.push_back(Json{{"label", label_json(l)}, {"weight", weight(l)}, {"count", c}});
    return Json{{"trials", h.trials}, {"failures", h.failures}, {"max_weight", h.max_weight()}, {"counts", counts}};
}

inline std::string histogram_to_csv(const LabelHistogram& h)
{
    std::ostringstream os;
    os << "kind,a,b,weight,count\n";
    for (const auto& [l, c] : h.counts)
        os << "label," << l.a << ',' << l.b << ',' << weight(l) << ',' << c << '\n';
    os << "failure,,,," << h.failures << '\n';
    return os.str();
}

} // namespace waring::io
