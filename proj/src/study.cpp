#include "amocci/study.hpp"

#include "amocci/cusum.hpp"
#include "amocci/error.hpp"
#include "amocci/lrv.hpp"
#include "amocci/model.hpp"
#include "amocci/parallel.hpp"
#include "amocci/summation.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace amocci {

using nlohmann::json;

namespace {

bool is_sorted_strict(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

}  // namespace

void StudyConfig::validate() const {
    std::vector<std::string> bad;
    if (n < TimeSeries::min_length) bad.emplace_back("n");
    if (m < 1 || m + 1 > n) bad.emplace_back("m");
    if (!std::isfinite(mu)) bad.emplace_back("mu");
    if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) bad.emplace_back("innovation_sd");
    if (d_values.empty() ||
        std::any_of(d_values.begin(), d_values.end(), [](double d) { return !std::isfinite(d); }))
        bad.emplace_back("d_values");
    if (rho_values.empty() || std::any_of(rho_values.begin(), rho_values.end(),
                                          [](double r) { return !(std::fabs(r) < 1.0); }))
        bad.emplace_back("rho_values");
    if (gamma_values.empty() ||
        std::any_of(gamma_values.begin(), gamma_values.end(),
                    [](double g) { return !(g >= 0.0 && g <= 0.5); }))
        bad.emplace_back("gamma_values");
    if (block_lengths.empty() ||
        std::any_of(block_lengths.begin(), block_lengths.end(),
                    [this](std::size_t k) { return k < 1 || k > n; }))
        bad.emplace_back("block_lengths");
    if (replications < 1) bad.emplace_back("replications");
    if (resamples < 2) bad.emplace_back("resamples");
    if (!(lambda_fraction > 0.0 && lambda_fraction <= 1.0)) bad.emplace_back("lambda_fraction");
    if (alpha_grid.empty() || !is_sorted_strict(alpha_grid) ||
        std::any_of(alpha_grid.begin(), alpha_grid.end(),
                    [](double a) { return !(a > 0.0 && a < 1.0); }))
        bad.emplace_back("alpha_grid");
    {
        LimitLawConfig probe = limit_law;
        probe.theta = 0.5;
        probe.gamma = 0.5;
        try {
            probe.validate();
        } catch (const std::invalid_argument&) {
            bad.emplace_back("limit_law");
        }
    }
    if (!bad.empty()) {
        std::string msg = "invalid study configuration:";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg, std::move(bad));
    }
}

namespace {

// Reads `key` from `obj` into `out` if present; records the key on failure.
template <class T>
void read_field(const json& obj, const std::string& key, const std::string& path, T& out,
                std::vector<std::string>& bad) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return;
    }
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!it->is_number_unsigned()) throw std::invalid_argument("not unsigned");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) throw std::invalid_argument("not a number");
        } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
            if (!it->is_array()) throw std::invalid_argument("not an array");
            for (const auto& e : *it)
                if (!e.is_number_unsigned()) throw std::invalid_argument("not unsigned");
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
            if (!it->is_array()) throw std::invalid_argument("not an array");
            for (const auto& e : *it)
                if (!e.is_number()) throw std::invalid_argument("not a number");
        }
        out = it->get<T>();
    } catch (const std::exception&) {
        bad.push_back(path + key);
    }
}

}  // namespace

StudyConfig parse_study_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("study config is not valid JSON: ") + e.what(), {"<document>"});
    }
    if (!doc.is_object()) {
        throw ConfigError("study config must be a JSON object", {"<document>"});
    }

    static const std::set<std::string> top_keys{
        "n",          "m",           "mu",          "innovation_sd",   "d_values",
        "rho_values", "gamma_values", "block_lengths", "replications", "resamples",
        "lambda_fraction", "alpha_grid", "master_seed", "scheme",      "limit_law"};
    static const std::set<std::string> limit_keys{"half_width", "step", "replicates", "seed"};

    StudyConfig cfg;
    std::vector<std::string> bad;
    for (const auto& [key, value] : doc.items()) {
        if (!top_keys.count(key)) bad.push_back(key);
    }

    read_field(doc, "n", "", cfg.n, bad);
    read_field(doc, "m", "", cfg.m, bad);
    read_field(doc, "mu", "", cfg.mu, bad);
    read_field(doc, "innovation_sd", "", cfg.innovation_sd, bad);
    read_field(doc, "d_values", "", cfg.d_values, bad);
    read_field(doc, "rho_values", "", cfg.rho_values, bad);
    read_field(doc, "gamma_values", "", cfg.gamma_values, bad);
    read_field(doc, "block_lengths", "", cfg.block_lengths, bad);
    read_field(doc, "replications", "", cfg.replications, bad);
    read_field(doc, "resamples", "", cfg.resamples, bad);
    read_field(doc, "lambda_fraction", "", cfg.lambda_fraction, bad);
    read_field(doc, "alpha_grid", "", cfg.alpha_grid, bad);
    read_field(doc, "master_seed", "", cfg.master_seed, bad);

    if (const auto it = doc.find("scheme"); it != doc.end()) {
        try {
            cfg.scheme = parse_block_scheme(it->get<std::string>());
        } catch (const std::exception&) {
            bad.emplace_back("scheme");
        }
    }
    if (const auto it = doc.find("limit_law"); it != doc.end()) {
        if (!it->is_object()) {
            bad.emplace_back("limit_law");
        } else {
            for (const auto& [key, value] : it->items()) {
                if (!limit_keys.count(key)) bad.push_back("limit_law." + key);
            }
            read_field(*it, "half_width", "limit_law.", cfg.limit_law.half_width, bad);
            read_field(*it, "step", "limit_law.", cfg.limit_law.step, bad);
            read_field(*it, "replicates", "limit_law.", cfg.limit_law.replicates, bad);
            read_field(*it, "seed", "limit_law.", cfg.limit_law.seed, bad);
        }
    }

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        for (const auto& k : e.keys()) {
            if (std::find(bad.begin(), bad.end(), k) == bad.end()) bad.push_back(k);
        }
    }
    if (!bad.empty()) {
        std::string msg = "invalid study configuration:";
        for (const auto& k : bad) msg += " " + k;
        throw ConfigError(msg, std::move(bad));
    }
    return cfg;
}

std::string canonical_config(const StudyConfig& c) {
    json doc = {
        {"n", c.n},
        {"m", c.m},
        {"mu", c.mu},
        {"innovation_sd", c.innovation_sd},
        {"d_values", c.d_values},
        {"rho_values", c.rho_values},
        {"gamma_values", c.gamma_values},
        {"block_lengths", c.block_lengths},
        {"replications", c.replications},
        {"resamples", c.resamples},
        {"lambda_fraction", c.lambda_fraction},
        {"alpha_grid", c.alpha_grid},
        {"master_seed", c.master_seed},
        {"scheme", std::string(to_string(c.scheme))},
        {"limit_law",
         {{"half_width", c.limit_law.half_width},
          {"step", c.limit_law.step},
          {"replicates", c.limit_law.replicates},
          {"seed", c.limit_law.seed}}},
    };
    return doc.dump(2);
}

std::string config_hash(const StudyConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

double cole_statistic(std::span<const double> z, double m) {
    if (z.empty()) {
        throw std::invalid_argument("cole_statistic: empty sample");
    }
    std::size_t at_or_below = 0;
    std::size_t at_or_above = 0;
    for (double v : z) {
        if (v <= m) ++at_or_below;
        if (v >= m) ++at_or_above;
    }
    return (2.0 * static_cast<double>(std::min(at_or_below, at_or_above))) /
           static_cast<double>(z.size());
}

CoilSummary coil_summaries(std::span<const double> lengths) {
    if (lengths.empty()) {
        throw std::invalid_argument("coil_summaries: empty input");
    }
    std::vector<double> sorted(lengths.begin(), lengths.end());
    std::sort(sorted.begin(), sorted.end());
    return {compensated_mean(lengths), quantile(sorted, 0.25), quantile(sorted, 0.75)};
}

std::vector<StudyCell> study_cells(const StudyConfig& config) {
    std::vector<StudyCell> cells;
    for (double d : config.d_values)
        for (double rho : config.rho_values)
            for (double gamma : config.gamma_values) cells.push_back({d, rho, gamma});
    return cells;
}

namespace {

struct ReplicationOutcome {
    ReplicationRecord asymptotic;
    std::vector<ReplicationRecord> bootstrap;
};

ReplicationOutcome run_replication(const StudyConfig& config, const StudyCell& cell,
                                   std::size_t cell_index, std::size_t r,
                                   LimitSampleCache& cache) {
    RngStream stream = make_stream(config.master_seed, {cell_index, r});
    const auto errors = ar1_generate({cell.rho, config.innovation_sd}, config.n, stream);
    const auto series = make_amoc_series({config.n, config.m, config.mu, cell.d}, errors);
    const auto fit = fit_amoc(series, cell.gamma);
    const auto lrv = bartlett_lrv(series, fit.m_hat, default_window(config.n, config.lambda_fraction));

    const double m_true = static_cast<double>(config.m);
    const double m_hat = static_cast<double>(fit.m_hat);

    ReplicationRecord base;
    base.cell = cell_index;
    base.replication = r;
    base.m_hat = fit.m_hat;
    base.d_hat = fit.d_hat;
    base.tau2 = lrv.tau2;

    ReplicationOutcome out;
    out.asymptotic = base;
    out.asymptotic.method = CiMethod::asymptotic;
    if (fit.d_hat == 0.0) {
        out.asymptotic.defined = false;
    } else {
        const auto limit = cache.get(m_hat / static_cast<double>(config.n), cell.gamma);
        const double scale = asymptotic_scale(lrv.tau2, fit.d_hat);
        std::vector<double> z(limit->samples.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            z[j] = m_hat - scale * limit->samples[j];
        }
        out.asymptotic.p_stat = cole_statistic(z, m_true);
        for (double alpha : config.alpha_grid) {
            out.asymptotic.lengths.push_back(
                asymptotic_ci(fit.m_hat, lrv.tau2, fit.d_hat, *limit, alpha).length());
        }
    }

    for (std::size_t j = 0; j < config.block_lengths.size(); ++j) {
        BootstrapConfig bcfg;
        bcfg.block_length = config.block_lengths[j];
        bcfg.resamples = config.resamples;
        bcfg.scheme = config.scheme;
        bcfg.seed = derive_seed(config.master_seed, {cell_index, r, j + 1});
        bcfg.threads = 1;
        const auto dist = bootstrap_distribution(fit, bcfg);
        const auto samples = as_real(dist);

        ReplicationRecord rec = base;
        rec.method = CiMethod::bootstrap;
        rec.block_length = bcfg.block_length;
        std::vector<double> z(samples.size());
        for (std::size_t b = 0; b < z.size(); ++b) {
            z[b] = 2.0 * m_hat - samples[b];
        }
        rec.p_stat = cole_statistic(z, m_true);
        for (double alpha : config.alpha_grid) {
            rec.lengths.push_back(bootstrap_ci(samples, m_hat, alpha).length());
        }
        out.bootstrap.push_back(std::move(rec));
    }
    return out;
}

void aggregate(const StudyConfig& config, const std::vector<const ReplicationRecord*>& records,
               CiMethod method, std::size_t cell, std::size_t block_length, StudyResult& result) {
    std::vector<double> p;
    std::vector<std::vector<double>> lengths(config.alpha_grid.size());
    for (const auto* rec : records) {
        if (!rec->defined) continue;
        p.push_back(rec->p_stat);
        for (std::size_t a = 0; a < lengths.size(); ++a) lengths[a].push_back(rec->lengths[a]);
    }
    for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
        const double alpha = config.alpha_grid[a];
        ColeRow cole{method, cell, block_length, alpha, std::nullopt};
        CoilRow coil{method, cell, block_length, alpha, std::nullopt};
        if (!p.empty()) {
            const auto hits = std::count_if(p.begin(), p.end(), [alpha](double v) { return v <= alpha; });
            cole.noncoverage = static_cast<double>(hits) / static_cast<double>(p.size());
            coil.summary = coil_summaries(lengths[a]);
        }
        result.cole.push_back(cole);
        result.coil.push_back(coil);
    }
}

}  // namespace

StudyResult run_study(const StudyConfig& config, unsigned threads) {
    config.validate();

    StudyResult result;
    result.cells = study_cells(config);
    const std::size_t cells = result.cells.size();
    const std::size_t reps = config.replications;

    LimitLawConfig limit_base = config.limit_law;
    limit_base.threads = 1;
    LimitSampleCache cache(limit_base);

    std::vector<ReplicationOutcome> outcomes(cells * reps);
    parallel_for(outcomes.size(), threads, [&](std::size_t task) {
        const std::size_t c = task / reps;
        const std::size_t r = task % reps;
        outcomes[task] = run_replication(config, result.cells[c], c, r, cache);
    });
    result.limit_law_simulations = cache.size();

    result.undefined_asymptotic.assign(cells, 0);
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<const ReplicationRecord*> asym;
        std::vector<std::vector<const ReplicationRecord*>> boot(config.block_lengths.size());
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& o = outcomes[c * reps + r];
            result.replications.push_back(o.asymptotic);
            asym.push_back(&o.asymptotic);
            if (!o.asymptotic.defined) ++result.undefined_asymptotic[c];
            for (std::size_t j = 0; j < o.bootstrap.size(); ++j) {
                result.replications.push_back(o.bootstrap[j]);
                boot[j].push_back(&o.bootstrap[j]);
            }
        }
        aggregate(config, asym, CiMethod::asymptotic, c, 0, result);
        for (std::size_t j = 0; j < boot.size(); ++j) {
            aggregate(config, boot[j], CiMethod::bootstrap, c, config.block_lengths[j], result);
        }
    }
    return result;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    return fmt::format("{}", x);
}

namespace {

std::string cell_prefix(CiMethod method, const StudyCell& cell, std::size_t block_length) {
    return fmt::format("{},{},{},{},{}", to_string(method), format_number(cell.d),
                       format_number(cell.rho), format_number(cell.gamma), block_length);
}

}  // namespace

void write_cole_csv(std::ostream& out, const StudyResult& result) {
    out << "method,d,rho,gamma,K,alpha,empirical_noncoverage\n";
    for (const auto& row : result.cole) {
        out << cell_prefix(row.method, result.cells[row.cell], row.block_length) << ','
            << format_number(row.alpha) << ','
            << (row.noncoverage ? format_number(*row.noncoverage) : std::string("NA")) << '\n';
    }
}

void write_coil_csv(std::ostream& out, const StudyResult& result) {
    out << "method,d,rho,gamma,K,alpha,mean_len,q25_len,q75_len\n";
    for (const auto& row : result.coil) {
        out << cell_prefix(row.method, result.cells[row.cell], row.block_length) << ','
            << format_number(row.alpha) << ',';
        if (row.summary) {
            out << format_number(row.summary->mean) << ',' << format_number(row.summary->q25)
                << ',' << format_number(row.summary->q75) << '\n';
        } else {
            out << "NA,NA,NA\n";
        }
    }
}

void write_replications_csv(std::ostream& out, const StudyConfig& config,
                            const StudyResult& result) {
    out << "method,d,rho,gamma,K,r,m_hat,d_hat,tau2,p_stat";
    for (double alpha : config.alpha_grid) out << ",len_" << format_number(alpha);
    out << '\n';
    for (const auto& rec : result.replications) {
        out << cell_prefix(rec.method, result.cells[rec.cell], rec.block_length) << ','
            << rec.replication << ',' << rec.m_hat << ',' << format_number(rec.d_hat) << ','
            << format_number(rec.tau2) << ',';
        if (rec.defined) {
            out << format_number(rec.p_stat);
            for (double len : rec.lengths) out << ',' << format_number(len);
        } else {
            out << "NA";
            for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) out << ",NA";
        }
        out << '\n';
    }
}

void write_manifest(std::ostream& out, const StudyConfig& config, const StudyResult& result) {
    json undefined = json::array();
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        undefined.push_back({{"d", result.cells[c].d},
                             {"rho", result.cells[c].rho},
                             {"gamma", result.cells[c].gamma},
                             {"undefined_asymptotic", result.undefined_asymptotic[c]}});
    }
    json doc = {
        {"config", json::parse(canonical_config(config))},
        {"config_hash", config_hash(config)},
        {"master_seed", config.master_seed},
        {"cells", undefined},
        {"limit_law_simulations", result.limit_law_simulations},
        {"files", {"cole.csv", "coil.csv", "replications.csv"}},
    };
    out << doc.dump(2) << '\n';
}

void write_study_outputs(const std::filesystem::path& dir, const StudyConfig& config,
                         const StudyResult& result) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("cole.csv");
        write_cole_csv(f, result);
    }
    {
        auto f = open("coil.csv");
        write_coil_csv(f, result);
    }
    {
        auto f = open("replications.csv");
        write_replications_csv(f, config, result);
    }
    {
        auto f = open("manifest.json");
        write_manifest(f, config, result);
    }
}

}  // namespace amocci
