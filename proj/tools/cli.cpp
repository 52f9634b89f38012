#include "cli.hpp"

#include "amocci/cusum.hpp"
#include "amocci/error.hpp"
#include "amocci/limitdist.hpp"
#include "amocci/lrv.hpp"
#include "amocci/study.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace amocci::cli {

using nlohmann::json;

AnalyzeReport analyze(const TimeSeries& series, const AnalyzeOptions& options) {
    for (double alpha : options.alphas) validate_alpha(alpha);

    AnalyzeReport rep;
    rep.options = options;
    rep.n = series.size();

    const auto fit = fit_amoc(series, options.gamma);
    rep.m_hat = fit.m_hat;
    rep.mu1_hat = fit.mu1_hat;
    rep.mu2_hat = fit.mu2_hat;
    rep.d_hat = fit.d_hat;
    rep.theta_hat = static_cast<double>(fit.m_hat) / static_cast<double>(rep.n);

    rep.lambda = options.lambda ? *options.lambda : default_window(rep.n);
    const auto lrv = bartlett_lrv(series, fit.m_hat, rep.lambda);
    rep.tau2 = lrv.tau2;
    rep.tau2_floored = lrv.floored;
    if (lrv.floored) {
        rep.warnings.push_back(fmt::format("long-run variance floored (raw estimate {})",
                                           format_number(lrv.raw_tau2)));
    }

    rep.bootstrap_seed = derive_seed(options.seed, {1});
    rep.limit_seed = derive_seed(options.seed, {2});

    BootstrapConfig bcfg;
    bcfg.block_length = options.block_length;
    bcfg.resamples = options.resamples;
    bcfg.scheme = options.scheme;
    bcfg.seed = rep.bootstrap_seed;
    bcfg.threads = options.threads;
    const auto dist = bootstrap_distribution(fit, bcfg);
    const auto boot_samples = as_real(dist);

    std::optional<LimitSamples> limit;
    if (fit.d_hat == 0.0) {
        rep.warnings.emplace_back("estimated shift is zero; asymptotic intervals undefined");
    } else {
        rep.asymptotic_scale = asymptotic_scale(lrv.tau2, fit.d_hat);
        LimitLawConfig lcfg;
        lcfg.theta = rep.theta_hat;
        lcfg.gamma = options.gamma;
        lcfg.half_width = options.limit_half_width;
        lcfg.step = options.limit_step;
        lcfg.replicates = options.limit_replicates;
        lcfg.seed = rep.limit_seed;
        lcfg.threads = options.threads;
        limit = simulate_scaled_argmax_samples(lcfg);
        rep.boundary_hit_fraction = limit->boundary_hit_fraction;
        if (limit->boundary_hit_fraction > 0.0) {
            rep.warnings.push_back(fmt::format("{}% of limit-law draws near the grid edge",
                                               format_number(100.0 * limit->boundary_hit_fraction)));
        }
    }

    const double n = static_cast<double>(rep.n);
    const double m_hat = static_cast<double>(fit.m_hat);
    for (double alpha : options.alphas) {
        AlphaReport ar;
        ar.alpha = alpha;
        const auto bq = bootstrap_quantiles(boot_samples, alpha);
        ar.bootstrap.q_low = bq.lower;
        ar.bootstrap.q_high = bq.upper;
        ar.bootstrap.raw = bootstrap_ci_from_quantiles(m_hat, bq, alpha);
        ar.bootstrap.clipped = ar.bootstrap.raw.clipped(1.0, n);
        if (limit) {
            IntervalPair ap;
            ap.q_low = quantile(*limit, alpha / 2.0);
            ap.q_high = quantile(*limit, 1.0 - alpha / 2.0);
            ap.raw = asymptotic_ci_from_quantiles(m_hat, *rep.asymptotic_scale, ap.q_low,
                                                  ap.q_high, alpha);
            ap.clipped = ap.raw.clipped(1.0, n);
            ar.asymptotic = ap;
        }
        rep.intervals.push_back(ar);
    }
    return rep;
}

namespace {

std::string fmt_interval(const ConfidenceInterval& ci) {
    return fmt::format("[{}, {}]", format_number(ci.lower), format_number(ci.upper));
}

json interval_json(const IntervalPair& p) {
    return {{"lower", p.raw.lower},
            {"upper", p.raw.upper},
            {"clipped_lower", p.clipped.lower},
            {"clipped_upper", p.clipped.upper},
            {"q_low", p.q_low},
            {"q_high", p.q_high}};
}

}  // namespace

void print_report(std::ostream& out, const AnalyzeReport& r) {
    const auto& o = r.options;
    out << "n            " << r.n << '\n'
        << "gamma        " << format_number(o.gamma) << '\n'
        << "m_hat        " << r.m_hat << '\n'
        << "mu1_hat      " << format_number(r.mu1_hat) << '\n'
        << "mu2_hat      " << format_number(r.mu2_hat) << '\n'
        << "d_hat        " << format_number(r.d_hat) << '\n'
        << "tau2         " << format_number(r.tau2) << (r.tau2_floored ? " (floored)" : "") << '\n'
        << "lambda       " << r.lambda << '\n'
        << "block_length " << o.block_length << '\n'
        << "resamples    " << o.resamples << '\n'
        << "scheme       " << to_string(o.scheme) << '\n'
        << "seed         " << o.seed << '\n'
        << "limit_law    M=" << o.limit_replicates << " T=" << format_number(o.limit_half_width)
        << " h=" << format_number(o.limit_step) << " theta_hat=" << format_number(r.theta_hat)
        << '\n';
    for (const auto& a : r.intervals) {
        out << "alpha " << format_number(a.alpha) << '\n';
        out << "  bootstrap   raw " << fmt_interval(a.bootstrap.raw) << "  clipped "
            << fmt_interval(a.bootstrap.clipped) << '\n';
        if (a.asymptotic) {
            out << "  asymptotic  raw " << fmt_interval(a.asymptotic->raw) << "  clipped "
                << fmt_interval(a.asymptotic->clipped) << '\n';
        } else {
            out << "  asymptotic  undefined\n";
        }
    }
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

std::string report_to_json(const AnalyzeReport& r) {
    const auto& o = r.options;
    json intervals = json::array();
    for (const auto& a : r.intervals) {
        intervals.push_back({{"alpha", a.alpha},
                             {"bootstrap", interval_json(a.bootstrap)},
                             {"asymptotic", a.asymptotic ? interval_json(*a.asymptotic) : json()}});
    }
    json doc = {
        {"inputs",
         {{"gamma", o.gamma},
          {"block_length", o.block_length},
          {"resamples", o.resamples},
          {"scheme", std::string(to_string(o.scheme))},
          {"alphas", o.alphas},
          {"lambda", r.lambda},
          {"seed", o.seed},
          {"limit_replicates", o.limit_replicates},
          {"limit_half_width", o.limit_half_width},
          {"limit_step", o.limit_step}}},
        {"n", r.n},
        {"m_hat", r.m_hat},
        {"mu1_hat", r.mu1_hat},
        {"mu2_hat", r.mu2_hat},
        {"d_hat", r.d_hat},
        {"tau2", r.tau2},
        {"tau2_floored", r.tau2_floored},
        {"theta_hat", r.theta_hat},
        {"bootstrap_seed", r.bootstrap_seed},
        {"limit_seed", r.limit_seed},
        {"asymptotic_scale", r.asymptotic_scale ? json(*r.asymptotic_scale) : json()},
        {"boundary_hit_fraction", r.boundary_hit_fraction},
        {"intervals", intervals},
        {"warnings", r.warnings},
    };
    return doc.dump(2);
}

namespace {

int report_error(std::ostream& err, const std::string& what, int code) {
    err << "amocci: " << what << '\n';
    return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Change-point confidence intervals for AMOC mean-shift series"};
    app.require_subcommand(1);

    AnalyzeOptions aopt;
    std::string input_path;
    std::string json_path;
    std::string scheme_name = "circular_overlapping";
    auto* analyze_cmd = app.add_subcommand("analyze", "Estimate the change-point and its intervals");
    analyze_cmd->add_option("--input", input_path, "Series file, one number per line")->required();
    analyze_cmd->add_option("--gamma", aopt.gamma, "CUSUM weight exponent in [0, 1/2]");
    analyze_cmd->add_option("--block-length", aopt.block_length, "Bootstrap block length K")->required();
    analyze_cmd->add_option("--resamples", aopt.resamples, "Bootstrap resamples B");
    analyze_cmd->add_option("--scheme", scheme_name, "circular_overlapping | circular_nonoverlapping");
    analyze_cmd->add_option("--alpha", aopt.alphas, "Levels alpha (interval level 1 - alpha)")->delimiter(',');
    analyze_cmd->add_option("--lambda", aopt.lambda, "Bartlett window (default floor(0.1 n))");
    analyze_cmd->add_option("--seed", aopt.seed, "Master seed");
    analyze_cmd->add_option("--threads", aopt.threads, "Worker threads (0 = all)");
    analyze_cmd->add_option("--limit-replicates", aopt.limit_replicates, "Limit-law Monte Carlo size M");
    analyze_cmd->add_option("--limit-half-width", aopt.limit_half_width, "Limit-law grid half-width T");
    analyze_cmd->add_option("--limit-step", aopt.limit_step, "Limit-law grid step h");
    analyze_cmd->add_option("--json", json_path, "Also write the report as JSON to this file");

    std::string config_path;
    std::string output_dir;
    unsigned study_threads = 0;
    auto* study_cmd = app.add_subcommand("study", "Run the coverage/length simulation study");
    study_cmd->add_option("--config", config_path, "Study configuration (JSON)")->required();
    study_cmd->add_option("--output", output_dir, "Output directory")->required();
    study_cmd->add_option("--threads", study_threads, "Worker threads (0 = all)");

    LimitLawConfig lopt;
    std::vector<double> levels{0.025, 0.05, 0.5, 0.95, 0.975};
    auto* limit_cmd = app.add_subcommand("limit-quantiles", "Quantile table of the limit law");
    limit_cmd->add_option("--theta", lopt.theta, "Relative change position in (0, 1)");
    limit_cmd->add_option("--gamma", lopt.gamma, "CUSUM weight exponent in [0, 1/2]");
    limit_cmd->add_option("--replicates", lopt.replicates, "Monte Carlo size M");
    limit_cmd->add_option("--half-width", lopt.half_width, "Grid half-width T");
    limit_cmd->add_option("--step", lopt.step, "Grid step h");
    limit_cmd->add_option("--seed", lopt.seed, "Seed");
    limit_cmd->add_option("--threads", lopt.threads, "Worker threads (0 = all)");
    limit_cmd->add_option("--p", levels, "Probability levels in (0, 1)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*analyze_cmd) {
            aopt.scheme = parse_block_scheme(scheme_name);
            TimeSeries series = [&] {
                try {
                    return read_series_file(input_path);
                } catch (const std::invalid_argument& e) {
                    throw DataError(e.what());
                }
            }();
            const auto report = analyze(series, aopt);
            print_report(out, report);
            if (!json_path.empty()) {
                std::ofstream f(json_path);
                if (!f) return report_error(err, "cannot write " + json_path, exit_usage);
                f << report_to_json(report) << '\n';
            }
            return exit_ok;
        }
        if (*study_cmd) {
            std::ifstream f(config_path);
            if (!f) return report_error(err, "cannot open config " + config_path, exit_usage);
            std::stringstream buf;
            buf << f.rdbuf();
            const auto config = parse_study_config(buf.str());
            const auto result = run_study(config, study_threads);
            write_study_outputs(output_dir, config, result);
            out << "wrote cole.csv, coil.csv, replications.csv, manifest.json to " << output_dir
                << " (config " << config_hash(config) << ")\n";
            return exit_ok;
        }
        if (*limit_cmd) {
            for (double p : levels) {
                if (!(p > 0.0 && p < 1.0)) {
                    return report_error(err, "--p levels must lie in (0, 1)", exit_usage);
                }
            }
            const auto samples = simulate_argmax_samples(lopt);
            out << "p,q\n";
            for (double p : levels) {
                out << format_number(p) << ',' << format_number(quantile(samples, p)) << '\n';
            }
            return exit_ok;
        }
    } catch (const ConfigError& e) {
        std::string keys;
        for (const auto& k : e.keys()) keys += (keys.empty() ? "" : ", ") + k;
        return report_error(err, std::string(e.what()) + " [offending keys: " + keys + "]",
                            exit_usage);
    } catch (const DataError& e) {
        return report_error(err, e.what(), exit_data);
    } catch (const BoundaryHitError& e) {
        return report_error(err, e.what(), exit_numerical);
    } catch (const std::invalid_argument& e) {
        return report_error(err, e.what(), exit_usage);
    } catch (const std::exception& e) {
        return report_error(err, e.what(), exit_data);
    }
    return exit_usage;
}

}  // namespace amocci::cli
