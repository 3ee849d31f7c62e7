#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "waring/binary.hpp"
#include "waring/decompose.hpp"
#include "waring/hypersurface.hpp"
#include "waring/io.hpp"
#include "waring/survey.hpp"

namespace waring::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRetries = 2, kFailure = 3 };

using io::Json;

namespace detail {

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("$", "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON in '") + path + "': " + e.what());
    }
}

/// Config file, then WARING_LABELS_SEED, then an explicit --seed.
inline GlobalConfig resolve_config(const std::string& config_path, const std::optional<std::uint64_t>& seed)
{
    GlobalConfig cfg;
    if (!config_path.empty())
        cfg = io::config_from_json(read_json_file(config_path));
    if (const char* env = std::getenv("WARING_LABELS_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || env[0] == '-')
            throw SchemaError("WARING_LABELS_SEED", "expected a non-negative integer");
        cfg.seed = v;
    }
    if (seed)
        cfg.seed = *seed;
    cfg.nls.seed = cfg.seed;
    return cfg;
}

inline Json envelope(const std::string& command, const GlobalConfig& cfg)
{
    return Json{{"command", command}, {"version", std::string(kVersion)}, {"seed", cfg.seed},
                {"config", io::config_to_json(cfg)}};
}

inline void emit(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

inline std::pair<int, int> parse_template(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw SchemaError("--template", "expected a,b");
    try {
        std::size_t p1 = 0;
        std::size_t p2 = 0;
        const int a = std::stoi(s.substr(0, comma), &p1);
        const int b = std::stoi(s.substr(comma + 1), &p2);
        if (p1 != comma || p2 != s.size() - comma - 1 || a < 0 || b < 0 || a + b == 0)
            throw SchemaError("--template", "expected non-negative a,b not both zero");
        return {a, b};
    } catch (const std::logic_error&) {
        throw SchemaError("--template", "expected a,b");
    }
}

inline Json outcome_json(const DecompositionOutcome& out)
{
    Json j = out.success ? io::certificate_to_json(*out.set, out.certificate) : Json::object();
    j["success"] = out.success;
    j["template"] = out.tmpl.a + out.tmpl.b > 0 ? io::label_json(out.tmpl.label()) : Json(nullptr);
    j["restart"] = out.restart;
    j["best_residual"] = out.best_residual;
    j["filtered"] = out.filtered;
    j["smaller_label_fallback"] = out.smaller_label_fallback;
    if (!out.success)
        j["reason"] = out.reason;
    return j;
}

} // namespace detail

/// Runs one subcommand. `args` excludes the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Labeled (conjugation-invariant) Waring decompositions of real forms", "waring-labels"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string form_path;
    std::string config_path;
    std::optional<std::uint64_t> seed;

    auto* binary = app.add_subcommand("decompose-binary", "Labeled Sylvester decomposition of a real binary form");
    binary->add_option("--form", form_path, "form JSON")->required();
    binary->add_option("--config", config_path, "configuration JSON");
    binary->add_option("--seed", seed, "random seed");

    std::string surface_path;
    std::string point_path;
    std::optional<int> max_retries;
    bool prefer_pair = false;
    auto* hyper = app.add_subcommand("label-hypersurface", "Label of a real point with respect to a real hypersurface");
    hyper->add_option("--surface", surface_path, "hypersurface form JSON")->required();
    hyper->add_option("--point", point_path, "point JSON")->required();
    hyper->add_option("--seed", seed, "random seed");
    hyper->add_option("--max-retries", max_retries, "line draws before giving up (default 20)")->check(CLI::PositiveNumber);
    hyper->add_flag("--prefer-pair", prefer_pair, "prefer a conjugate pair over two real points");
    hyper->add_option("--config", config_path, "configuration JSON");

    int weight_arg = 0;
    std::string template_arg;
    bool skip_all_real = false;
    bool conjugate_only = false;
    bool join = false;
    int threads = 1;
    auto* veronese = app.add_subcommand("decompose-veronese", "Labeled decomposition of a real form at a given weight");
    veronese->add_option("--form", form_path, "form JSON")->required();
    veronese->add_option("--weight", weight_arg, "label weight 2a+b")->required()->check(CLI::PositiveNumber);
    auto* tmpl_opt = veronese->add_option("--template", template_arg, "fixed template a,b");
    auto* skip_opt = veronese->add_flag("--skip-all-real", skip_all_real, "omit the all-real template (0,W)");
    auto* conj_opt = veronese->add_flag("--conjugate-only", conjugate_only, "conjugate pairs only: template (W/2,0)");
    auto* join_opt = veronese->add_flag("--join", join, "join search: weight-(W-2) seeds plus one extra pair");
    tmpl_opt->excludes(conj_opt)->excludes(join_opt)->excludes(skip_opt);
    conj_opt->excludes(join_opt)->excludes(skip_opt);
    veronese->add_option("--seed", seed, "random seed");
    veronese->add_option("--config", config_path, "configuration JSON");
    veronese->add_option("--threads", threads, "parallel restarts")->check(CLI::Range(1, 256));

    auto* rank = app.add_subcommand("rank", "Complex and real Waring rank of a real binary form");
    rank->add_option("--form", form_path, "form JSON")->required();
    rank->add_option("--config", config_path, "configuration JSON");
    rank->add_option("--seed", seed, "random seed");

    std::string spec_path;
    std::string csv_path;
    auto* survey = app.add_subcommand("survey", "Monte Carlo histogram of achieved labels");
    survey->add_option("--spec", spec_path, "ensemble spec JSON")->required();
    survey->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
    survey->add_option("--csv", csv_path, "also write the histogram as CSV to this file");
    survey->add_option("--config", config_path, "configuration JSON");
    survey->add_option("--seed", seed, "random seed (overrides the spec)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        GlobalConfig cfg = detail::resolve_config(config_path, seed);
        if (binary->parsed()) {
            const HomogeneousForm f = io::form_from_json(detail::read_json_file(form_path));
            if (f.n() != 1 || !f.is_real())
                throw SchemaError("n", "decompose-binary needs a real binary form (n = 1)");
            const SylvesterResult r = sylvester_decompose(f, {cfg.tol, cfg.kernel_budget});
            Json doc = detail::envelope("decompose-binary", cfg);
            Json res = io::certificate_to_json(r.set, r.certificate);
            res["complex_rank"] = r.rank;
            if (f.d() == 3)
                res["cubic_class"] = to_string(classify_cubic(f, cfg.tol).cls);
            doc["input"] = io::form_to_json(f);
            doc["result"] = res;
            detail::emit(out, doc);
            return kSuccess;
        }
        if (hyper->parsed()) {
            if (max_retries)
                cfg.max_retries = *max_retries;
            cfg.prefer_pair = cfg.prefer_pair || prefer_pair;
            const HomogeneousForm f = io::form_from_json(detail::read_json_file(surface_path));
            const ProjectivePoint q = io::point_from_json(detail::read_json_file(point_path), "", cfg.tol.real);
            if (!f.is_real())
                throw SchemaError("coeffs", "surface must be real");
            if (!q.is_real())
                throw SchemaError("coords", "point must be real");
            if (q.dim() != f.n())
                throw SchemaError("coords", "point dimension does not match the surface");
            if (f.d() < 2)
                throw SchemaError("d", "surface degree must be at least 2");
            Rng rng(cfg.seed);
            const HypersurfaceResult r =
                find_label_hypersurface(HypersurfaceInstance(f, q), rng, {cfg.tol, cfg.max_retries, cfg.prefer_pair});
            Json doc = detail::envelope("label-hypersurface", cfg);
            Json res = io::certificate_to_json(r.set, r.certificate);
            res["attempts"] = r.attempts;
            res["on_surface_residual"] = r.on_surface_residual;
            doc["input"] = Json{{"surface", io::form_to_json(f)}, {"point", io::point_to_json(q)}};
            doc["result"] = res;
            detail::emit(out, doc);
            return kSuccess;
        }
        if (veronese->parsed()) {
            cfg.nls.threads = threads;
            const HomogeneousForm f = io::form_from_json(detail::read_json_file(form_path));
            if (!f.is_real())
                throw SchemaError("coeffs", "form must be real");
            DecompositionOutcome outcome;
            std::string mode = "weight";
            if (!template_arg.empty()) {
                const auto [a, b] = detail::parse_template(template_arg);
                if (2 * a + b != weight_arg)
                    throw SchemaError("--template", "template weight differs from --weight");
                mode = "template";
                outcome = decompose_with_template(DecompositionProblem(f, {a, b}, cfg.nls, cfg.tol));
            } else if (conjugate_only) {
                if (weight_arg % 2 != 0)
                    throw SchemaError("--weight", "conjugate-only labels have even weight");
                mode = "conjugate-only";
                outcome = conjugate_only_decompose(f, weight_arg - 2, cfg.nls, cfg.tol);
            } else if (join) {
                if (weight_arg < 3)
                    throw SchemaError("--weight", "join search needs weight at least 3");
                mode = "join";
                outcome = join_decompose(f, weight_arg - 1, cfg.nls, cfg.tol);
            } else {
                outcome = decompose_weight(f, weight_arg, skip_all_real, cfg.nls, cfg.tol);
            }
            Json doc = detail::envelope("decompose-veronese", cfg);
            doc["input"] = Json{{"form", io::form_to_json(f)}, {"weight", weight_arg}, {"mode", mode},
                                {"skip_all_real", skip_all_real}};
            const GenericRankInfo g = generic_rank(f.n(), f.d());
            doc["generic_rank"] = Json{{"g", g.g}, {"outside_hypotheses", g.outside_hypotheses},
                                       {"listed_exception", g.listed_exception}, {"defective", g.defective}};
            doc["result"] = detail::outcome_json(outcome);
            detail::emit(out, doc);
            if (!outcome.success) {
                err << "decompose-veronese: " << outcome.reason << " (best residual " << outcome.best_residual << ")\n";
                return kFailure;
            }
            return kSuccess;
        }
        if (rank->parsed()) {
            const HomogeneousForm f = io::form_from_json(detail::read_json_file(form_path));
            if (f.n() != 1 || !f.is_real())
                throw SchemaError("n", "rank supports real binary forms (n = 1) only");
            const BinarySearchConfig bc{cfg.tol, cfg.kernel_budget};
            const ApolarGenerator g = complex_rank_binary(f, bc);
            const RealRank rr = real_rank_binary(f, bc);
            Json doc = detail::envelope("rank", cfg);
            doc["input"] = io::form_to_json(f);
            Json res{{"complex_rank", g.rank}};
            res["real_rank"] = rr.value ? Json(*rr.value) : Json(nullptr);
            res["real_rank_lower_bound"] = rr.lower_bound;
            doc["result"] = res;
            detail::emit(out, doc);
            return kSuccess;
        }
        if (survey->parsed()) {
            EnsembleSpec spec = io::spec_from_json(detail::read_json_file(spec_path), cfg);
            if (seed || std::getenv("WARING_LABELS_SEED")) {
                spec.seed = cfg.seed;
                spec.config.seed = cfg.seed;
            }
            const LabelHistogram h = survey_labels(spec, threads);
            Json doc = detail::envelope("survey", spec.config);
            doc["spec"] = io::spec_to_json(spec);
            doc["result"] = io::histogram_to_json(h);
            detail::emit(out, doc);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv)
                    throw SchemaError("--csv", "cannot write '" + csv_path + "'");
                csv << io::histogram_to_csv(h);
            }
            return kSuccess;
        }
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kUsage;
    } catch (const RetriesExhausted& e) {
        err << e.what() << '\n';
        return kRetries;
    } catch (const DecompositionFailure& e) {
        err << e.what() << " (best residual " << e.best_residual() << ")\n";
        return kFailure;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

} // namespace waring::cli
