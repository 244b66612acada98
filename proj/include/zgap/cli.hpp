#pragma once

// Command-line front end. Every subcommand prints one JSON envelope
//   {params_echo, value, im_residual, error_estimate, evaluations, wall_ms, ...}
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "zgap/zgap.hpp"

namespace zgap::cli {

using json = nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

// Flat key=value file; '#' starts a comment.
inline std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

// Appends config entries as --key=value for every key not already given on
// the command line.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;
    const auto entries = read_config(path);
    auto given = [&](const std::string& key) {
        for (const auto& a : rest)
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : entries)
        if (!given(key)) rest.push_back("--" + key + "=" + value);
    return rest;
}

struct CommonParams {
    double theta = 0.25;
    int r = 1;
    double kappa = 3.18;
    double v = 1.26;
    std::vector<double> poly{1.0, -5.8, 6.4};
    int j = 0;
    std::string scheme = "reduced7";
    int order = 12;
    int t_order = 20;
    std::uint64_t samples = 10'000'000;
    std::uint64_t seed = 20170101;
    double rel_tol = 0.0;
};

inline void add_integral_options(CLI::App* sub, CommonParams& p, bool with_j, bool with_point = true) {
    sub->add_option("--theta", p.theta, "theta in (0, 1/4]")->capture_default_str();
    sub->add_option("--r", p.r, "divisor exponent r")->capture_default_str();
    sub->add_option("--kappa", p.kappa, "kappa")->capture_default_str();
    if (with_point) {
        sub->add_option("--v", p.v, "v")->capture_default_str();
        sub->add_option("--poly", p.poly, "P coefficients, constant term first")->delimiter(',')->capture_default_str();
    }
    if (with_j) sub->add_option("--j", p.j, "derivative order 0, 1 or 2")->capture_default_str();
    sub->add_option("--scheme", p.scheme, "direct9 | reduced7 | mc9 | mc7")->capture_default_str();
    sub->add_option("--order", p.order, "Gauss-Legendre nodes per x/t1/t2 axis")->capture_default_str();
    sub->add_option("--t-order", p.t_order, "Gauss-Legendre nodes for t3, t4")->capture_default_str();
    sub->add_option("--samples", p.samples, "Monte Carlo samples")->capture_default_str();
    sub->add_option("--seed", p.seed, "Monte Carlo seed")->capture_default_str();
    sub->add_option("--rel-tol", p.rel_tol, "fail if error estimate exceeds rel-tol * |value| (0: off)")
        ->capture_default_str();
}

inline Scheme scheme_of(const std::string& name) {
    const auto s = parse_scheme(name);
    if (!s) throw std::invalid_argument("unknown scheme '" + name + "'");
    return *s;
}

inline CjOptions cj_options(const CommonParams& p, int threads) {
    CjOptions o;
    o.order = p.order;
    o.t_order = p.t_order;
    o.samples = p.samples;
    o.seed = p.seed;
    o.threads = threads;
    o.rel_tolerance = p.rel_tol;
    return o;
}

inline json echo(const CommonParams& p) {
    return json{{"theta", p.theta}, {"r", p.r},         {"kappa", p.kappa},     {"v", p.v},
                {"poly", p.poly},   {"j", p.j},         {"scheme", p.scheme},   {"order", p.order},
                {"t_order", p.t_order}, {"samples", p.samples}, {"seed", p.seed}, {"rel_tol", p.rel_tol}};
}

inline json estimate_json(const IntegralEstimate& e) {
    return json{{"re", e.value.real()},
                {"im", e.value.imag()},
                {"error_estimate", e.error_estimate},
                {"evaluations", e.evaluations},
                {"scheme", std::string(to_string(e.scheme))}};
}

inline json envelope(json params, json value, json im_residual, double error_estimate, std::uint64_t evaluations) {
    return json{{"params_echo", std::move(params)},
                {"value", std::move(value)},
                {"im_residual", std::move(im_residual)},
                {"error_estimate", error_estimate},
                {"evaluations", evaluations},
                {"wall_ms", 0.0}};
}

inline json trace_json(const std::vector<OptimizeStep>& trace) {
    json out = json::array();
    for (const auto& s : trace)
        out.push_back({{"iteration", s.iteration}, {"stage", s.stage}, {"v", s.v}, {"b", s.b}, {"h", s.h}});
    return out;
}

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"zgap: mean-value integrals, ratio criteria and zero-gap empirics"};
    app.name("zgap");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0: all cores)")->capture_default_str();
    app.add_option("--config", "flat key=value file; command-line flags override it");

    detail::CommonParams cp;
    json result;
    int status = kExitOk;

    // compute-cj
    auto* cj = app.add_subcommand("compute-cj", "c_j(v, kappa) by the chosen scheme");
    detail::add_integral_options(cj, cp, true);

    // ratio
    auto* ratio_cmd = app.add_subcommand("ratio", "h1 = c0/(kappa^2 c1) or h2 = 4 c1/(kappa^2 c2)");
    std::string ratio_target = "h1";
    ratio_cmd->add_option("target", ratio_target, "h1 | h2")->required();
    detail::add_integral_options(ratio_cmd, cp, false);

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "maximize h over (v, P) at fixed kappa");
    std::string opt_target = "h1";
    int degree = 2, budget = 50;
    opt_cmd->add_option("--target", opt_target, "h1 | h2")->capture_default_str();
    opt_cmd->add_option("--degree", degree, "degree of P")->capture_default_str();
    opt_cmd->add_option("--budget", budget, "alternation rounds")->capture_default_str();
    detail::add_integral_options(opt_cmd, cp, false, false);

    // max-kappa
    auto* mk_cmd = app.add_subcommand("max-kappa", "largest kappa with sup h certified > 1");
    std::string mk_target = "h1";
    double mk_tol = 1e-3, mk_lo = 0.0, mk_hi = 0.0;
    mk_cmd->add_option("--target", mk_target, "h1 | h2")->capture_default_str();
    mk_cmd->add_option("--tol", mk_tol, "bisection tolerance (>= 1e-3)")->capture_default_str();
    mk_cmd->add_option("--kappa-lo", mk_lo, "lower bracket (0: default)")->capture_default_str();
    mk_cmd->add_option("--kappa-hi", mk_hi, "upper bracket (0: default)")->capture_default_str();
    mk_cmd->add_option("--degree", degree, "degree of P")->capture_default_str();
    mk_cmd->add_option("--budget", budget, "alternation rounds per kappa")->capture_default_str();
    mk_cmd->add_option("--theta", cp.theta, "theta")->capture_default_str();
    mk_cmd->add_option("--r", cp.r, "r")->capture_default_str();
    mk_cmd->add_option("--scheme", cp.scheme, "direct9 | reduced7")->capture_default_str();
    mk_cmd->add_option("--order", cp.order, "Gauss-Legendre nodes per axis")->capture_default_str();

    // zeros
    auto* zeros_cmd = app.add_subcommand("zeros", "zeros of Z(t) on [t-min, t-max]");
    double t_min = 0.0, t_max = 100.0, zero_tol = 1e-9;
    std::string cache_path, csv_path;
    zeros_cmd->add_option("--t-min", t_min, "lower end")->capture_default_str();
    zeros_cmd->add_option("--t-max", t_max, "upper end")->capture_default_str();
    zeros_cmd->add_option("--tol", zero_tol, "bisection tolerance")->capture_default_str();
    zeros_cmd->add_option("--cache", cache_path, "write the binary zero cache here");
    zeros_cmd->add_option("--csv", csv_path, "write the gap CSV here");

    // gaps
    auto* gaps_cmd = app.add_subcommand("gaps", "normalized gap statistics");
    double bin_width = 0.1;
    gaps_cmd->add_option("--cache", cache_path, "read zeros from this cache (else compute)");
    gaps_cmd->add_option("--t-min", t_min, "lower end when computing")->capture_default_str();
    gaps_cmd->add_option("--t-max", t_max, "upper end when computing")->capture_default_str();
    gaps_cmd->add_option("--tol", zero_tol, "bisection tolerance when computing")->capture_default_str();
    gaps_cmd->add_option("--bin-width", bin_width, "histogram bin width")->capture_default_str();
    gaps_cmd->add_option("--csv", csv_path, "write the gap CSV here");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "verification suites");
    std::string suite;
    int count = 1000;
    double count_T = 1e5;
    verify_cmd->add_option("--suite", suite, "wirtinger | lemma42 | count | triangulate")
        ->required()
        ->check(CLI::IsMember({"wirtinger", "lemma42", "count", "triangulate"}));
    verify_cmd->add_option("--count", count, "random instances per inequality (wirtinger)")->capture_default_str();
    verify_cmd->add_option("--T", count_T, "height for the count suite")->capture_default_str();
    detail::add_integral_options(verify_cmd, cp, true);

    // direct-check
    auto* dc_cmd = app.add_subcommand("direct-check", "finite-T mean square of |F|^2 against the main term");
    double dc_T = 1e5, coverage = 1.0;
    int windows = 64;
    dc_cmd->add_option("--T", dc_T, "height T in [1e4, 1e6]")->capture_default_str();
    dc_cmd->add_option("--coverage", coverage, "fraction of [T, 2T] integrated")->capture_default_str();
    dc_cmd->add_option("--windows", windows, "number of sampled windows")->capture_default_str();
    detail::add_integral_options(dc_cmd, cp, false);

    std::vector<std::string> args;
    try {
        args = detail::expand_config(raw_args);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (*cj) {
            const CjParams p{cp.theta, cp.r, cp.kappa, cp.v, cp.j};
            const auto e = compute_cj(p, AmplifierPolynomial(cp.poly), detail::scheme_of(cp.scheme),
                                      detail::cj_options(cp, threads));
            result = detail::envelope(detail::echo(cp), e.value.real(), e.value.imag(), e.error_estimate, e.evaluations);
        } else if (*ratio_cmd) {
            const auto target = parse_target(ratio_target);
            if (!target) throw std::invalid_argument("ratio target must be h1 or h2");
            if (*target == Target::h2) {  // published h2 point unless overridden
                const auto pub = published_point(Target::h2);
                if (ratio_cmd->count("--kappa") == 0) cp.kappa = pub.kappa;
                if (ratio_cmd->count("--v") == 0) cp.v = pub.v;
                if (ratio_cmd->count("--poly") == 0) cp.poly = pub.poly;
            }
            const auto res = ratio(*target, cp.v, cp.kappa, cp.theta, cp.r, AmplifierPolynomial(cp.poly),
                                   detail::scheme_of(cp.scheme), detail::cj_options(cp, threads));
            auto params = detail::echo(cp);
            params["target"] = ratio_target;
            params.erase("j");
            const double im = std::max(std::abs(res.numerator_c.value.imag()), std::abs(res.denominator_c.value.imag()));
            result = detail::envelope(params, res.h, im, res.propagated_error,
                                      res.numerator_c.evaluations + res.denominator_c.evaluations);
            result["certified"] = res.certified();
            result["numerator"] = detail::estimate_json(res.numerator_c);
            result["denominator"] = detail::estimate_json(res.denominator_c);
        } else if (*opt_cmd) {
            const auto target = parse_target(opt_target);
            if (!target) throw std::invalid_argument("optimize target must be h1 or h2");
            if (opt_cmd->count("--kappa") == 0) cp.kappa = published_point(*target).kappa;
            OptimizeOptions o;
            o.degree = degree;
            o.budget = budget;
            o.scheme = detail::scheme_of(cp.scheme);
            o.cj = detail::cj_options(cp, threads);
            const auto res = optimize_params(*target, cp.kappa, cp.theta, cp.r, o);
            json params{{"target", opt_target}, {"kappa", cp.kappa}, {"theta", cp.theta}, {"r", cp.r},
                        {"degree", degree},     {"budget", budget},  {"scheme", cp.scheme}, {"order", cp.order}};
            const double im = std::max(std::abs(res.result.numerator_c.value.imag()),
                                       std::abs(res.result.denominator_c.value.imag()));
            result = detail::envelope(params, res.result.h, im, res.result.propagated_error,
                                      res.result.numerator_c.evaluations + res.result.denominator_c.evaluations);
            result["v"] = res.v;
            result["poly"] = res.P.coeffs();
            result["certified"] = res.result.certified();
            result["budget_exhausted"] = res.budget_exhausted;
            result["used_nelder_mead"] = res.used_nelder_mead;
            result["tensor_h"] = res.tensor_h;
            result["trace"] = detail::trace_json(res.trace);
            if (res.budget_exhausted) status = kExitNumerical;
        } else if (*mk_cmd) {
            const auto target = parse_target(mk_target);
            if (!target) throw std::invalid_argument("max-kappa target must be h1 or h2");
            MaxKappaOptions o;
            o.kappa_lo = mk_lo;
            o.kappa_hi = mk_hi;
            o.tol = mk_tol;
            o.optimize.degree = degree;
            o.optimize.budget = budget;
            o.optimize.scheme = detail::scheme_of(cp.scheme);
            o.optimize.cj = detail::cj_options(cp, threads);
            const auto res = max_kappa(*target, cp.theta, cp.r, o);
            json params{{"target", mk_target}, {"theta", cp.theta}, {"r", cp.r},          {"degree", degree},
                        {"tol", mk_tol},       {"kappa_lo", mk_lo}, {"kappa_hi", mk_hi}, {"scheme", cp.scheme},
                        {"order", cp.order}};
            result = detail::envelope(params, res.kappa, nullptr, mk_tol, res.trace.size());
            result["h_at_kappa"] = res.h_at_kappa;
            result["v"] = res.v;
            result["poly"] = res.poly;
            json trace = json::array();
            for (const auto& t : res.trace)
                trace.push_back({{"kappa", t.kappa}, {"h", t.h}, {"error", t.error}, {"certified", t.certified}});
            result["trace"] = trace;
        } else if (*zeros_cmd) {
            ZeroSearchOptions o;
            o.tolerance = zero_tol;
            o.threads = threads;
            const auto z = find_zeros(t_min, t_max, o);
            if (!cache_path.empty()) write_zero_cache(cache_path, z.ordinates);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv) throw std::invalid_argument("cannot open " + csv_path);
                write_gap_csv(csv, z.ordinates);
            }
            json params{{"t_min", t_min}, {"t_max", t_max}, {"tol", zero_tol}};
            result = detail::envelope(params, z.ordinates.size(), nullptr, zero_tol, z.ordinates.size());
            result["method"] = z.method;
            result["anomalies"] = z.anomalies;
            if (z.ordinates.size() <= 100) result["ordinates"] = z.ordinates;
            if (!z.ordinates.empty()) {
                result["first"] = z.ordinates.front();
                result["last"] = z.ordinates.back();
            }
        } else if (*gaps_cmd) {
            std::vector<double> ordinates;
            json params{{"bin_width", bin_width}};
            if (!cache_path.empty()) {
                ordinates = read_zero_cache(cache_path);
                params["cache"] = cache_path;
            } else {
                ZeroSearchOptions o;
                o.tolerance = zero_tol;
                o.threads = threads;
                ordinates = find_zeros(t_min, t_max, o).ordinates;
                params["t_min"] = t_min;
                params["t_max"] = t_max;
                params["tol"] = zero_tol;
            }
            const auto g = gap_stats(ordinates, bin_width);
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv) throw std::invalid_argument("cannot open " + csv_path);
                write_gap_csv(csv, ordinates);
            }
            result = detail::envelope(params, g.mean, nullptr, 0.0, ordinates.size());
            result["max"] = g.max;
            result["max_height"] = g.max_height;
            result["gaps"] = g.normalized_gaps.size();
            result["histogram"] = g.histogram.counts;
        } else if (*verify_cmd) {
            json params{{"suite", suite}};
            if (suite == "wirtinger") {
                const auto rep = run_wirtinger_suite(count, cp.seed);
                params["count"] = count;
                params["seed"] = cp.seed;
                result = detail::envelope(params, rep.random_i_passed + rep.random_ii_passed, nullptr, 0.0,
                                          static_cast<std::uint64_t>(rep.random_i_total + rep.random_ii_total + 2));
                result["cases"] = {
                    {"extremal_i", {{"ratio", rep.extremal_i_ratio}}},
                    {"extremal_ii", {{"ratio", rep.extremal_ii_ratio}}},
                    {"random_i", {{"passed", rep.random_i_passed}, {"total", rep.random_i_total}, {"worst_ratio", rep.worst_ratio_i}}},
                    {"random_ii", {{"passed", rep.random_ii_passed}, {"total", rep.random_ii_total}, {"worst_ratio", rep.worst_ratio_ii}}}};
                result["passed"] = rep.passed();
                if (!rep.passed()) status = kExitNumerical;
            } else if (suite == "lemma42") {
                json cases = json::array();
                double worst = 0.0;
                const auto table = sieve_divisor_coeffs(2, 1'000'000);
                for (double y : {1e4, 1e5, 1e6}) {
                    const auto rep = verify_lemma42(table, 0.0, y, {0.0, 1.0});
                    worst = std::max(worst, rep.normalized_residual);
                    cases.push_back({{"r", 2}, {"y", y}, {"lhs", rep.lhs.real()}, {"main_term", rep.main_term.real()},
                                     {"normalized_residual", rep.normalized_residual}});
                }
                params["r"] = 2;
                params["f"] = {0.0, 1.0};
                result = detail::envelope(params, worst, nullptr, 0.0, 1'110'000);
                result["cases"] = cases;
            } else if (suite == "count") {
                ZeroSearchOptions o;
                o.threads = threads;
                const auto z = find_zeros(0.0, count_T, o);
                double worst = 0.0;
                json grid = json::array();
                for (int k = 1; k <= 100; ++k) {
                    const double T = std::max(15.0, count_T * k / 100.0);
                    const auto rep = count_check(z, T);
                    worst = std::max(worst, std::abs(rep.discrepancy));
                    grid.push_back({{"T", T}, {"counted", rep.counted}, {"discrepancy", rep.discrepancy}});
                }
                params["T"] = count_T;
                result = detail::envelope(params, worst, nullptr, 0.0, z.ordinates.size());
                result["grid"] = grid;
                result["passed"] = worst <= 5.0;
                if (worst > 5.0) status = kExitNumerical;
            } else {  // triangulate
                const CjParams p{cp.theta, cp.r, cp.kappa, cp.v, cp.j};
                const AmplifierPolynomial P(cp.poly);
                auto o = detail::cj_options(cp, threads);
                CjOptions o9 = o;
                o9.order = std::min(o.order, 6);
                o9.t_order = std::min(o.t_order, 12);
                const auto d9 = compute_cj(p, P, Scheme::direct9, o9);
                const auto r7 = compute_cj(p, P, Scheme::reduced7, o);
                const auto m9 = compute_cj(p, P, Scheme::mc9, o);
                auto z = [](const IntegralEstimate& a, const IntegralEstimate& b) {
                    const double s = std::hypot(a.error_estimate, b.error_estimate);
                    return s > 0.0 ? std::abs(a.value.real() - b.value.real()) / s : 0.0;
                };
                const double worst = std::max({z(d9, r7), z(d9, m9), z(r7, m9)});
                params.update(detail::echo(cp));
                result = detail::envelope(params, worst, std::max({std::abs(d9.value.imag()), std::abs(r7.value.imag()),
                                                                   std::abs(m9.value.imag())}),
                                          0.0, d9.evaluations + r7.evaluations + m9.evaluations);
                result["direct9"] = detail::estimate_json(d9);
                result["reduced7"] = detail::estimate_json(r7);
                result["mc9"] = detail::estimate_json(m9);
                result["passed"] = worst <= 3.0;
                if (worst > 3.0) status = kExitNumerical;
            }
        } else if (*dc_cmd) {
            MeanSquareOptions o;
            o.coverage = coverage;
            o.windows = windows;
            o.threads = threads;
            o.scheme = detail::scheme_of(cp.scheme);
            o.cj = detail::cj_options(cp, threads);
            const CjParams p{cp.theta, cp.r, cp.kappa, cp.v, 0};
            const auto rep = direct_meansquare(dc_T, p, AmplifierPolynomial(cp.poly), o);
            auto params = detail::echo(cp);
            params.erase("j");
            params["T"] = dc_T;
            params["coverage"] = coverage;
            params["windows"] = windows;
            result = detail::envelope(params, rep.ratio, nullptr, 0.0, rep.points);
            result["direct"] = rep.direct;
            result["predicted"] = rep.predicted;
            result["c0"] = rep.c0;
            result["A"] = rep.A;
            result["L"] = rep.L;
            result["y"] = rep.y;
            result["step"] = rep.step;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const convergence_error& e) {
        err << "numerical failure: " << e.what() << " (achieved " << e.achieved() << ", requested " << e.requested()
            << ")\n";
        return kExitNumerical;
    } catch (const indeterminate_ratio& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const bracket_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    result["wall_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << result.dump(2) << "\n";
    return status;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace zgap::cli
