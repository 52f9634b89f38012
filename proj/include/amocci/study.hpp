#pragma once

#include "amocci/bootstrap.hpp"
#include "amocci/interval.hpp"
#include "amocci/limitdist.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amocci {

/// Simulation design: AR(1) errors plus one mean shift, replicated over a
/// grid of shifts, AR coefficients and CUSUM weights, comparing asymptotic and
/// block-bootstrap intervals for the change-point.
struct StudyConfig {
    std::size_t n = 80;
    std::size_t m = 40;
    double mu = 0.0;
    double innovation_sd = 1.0;
    std::vector<double> d_values{0.5, 1.0, 2.0, 4.0};
    std::vector<double> rho_values{0.1, 0.3};
    std::vector<double> gamma_values{0.0, 0.5};
    std::vector<std::size_t> block_lengths{4, 8, 16};
    std::size_t replications = 500;
    std::size_t resamples = 1000;
    double lambda_fraction = 0.1;
    std::vector<double> alpha_grid{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
    std::uint64_t master_seed = 2008;
    BlockScheme scheme = BlockScheme::circular_overlapping;
    // theta and gamma are filled per replication from m_hat / n and the cell.
    LimitLawConfig limit_law{0.5, 0.5, 200.0, 0.05, 10000, 4711, 1};

    /// Throws ConfigError naming every invalid field.
    void validate() const;
};

/// Parses a JSON object; missing keys keep their defaults, unknown keys and
/// ill-typed or out-of-range values raise ConfigError listing all of them.
[[nodiscard]] StudyConfig parse_study_config(std::string_view json_text);

/// Canonical JSON (sorted keys, every field present). Excludes thread counts.
[[nodiscard]] std::string canonical_config(const StudyConfig& config);

/// FNV-1a 64 of canonical_config, as 16 hex digits.
[[nodiscard]] std::string config_hash(const StudyConfig& config);

/// 2 min(fraction(Z <= m), fraction(Z >= m)). Not capped at 1: with mass
/// sitting exactly at m both fractions can exceed 1/2.
[[nodiscard]] double cole_statistic(std::span<const double> z, double m);

struct CoilSummary {
    double mean = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

/// Mean and empirical quartiles (same quantile rule as the limit-law module).
[[nodiscard]] CoilSummary coil_summaries(std::span<const double> lengths);

struct StudyCell {
    double d = 0.0;
    double rho = 0.0;
    double gamma = 0.0;
};

/// Cells in output order: d outermost, then rho, then gamma.
[[nodiscard]] std::vector<StudyCell> study_cells(const StudyConfig& config);

struct ReplicationRecord {
    CiMethod method = CiMethod::bootstrap;
    std::size_t cell = 0;
    std::size_t block_length = 0;  // 0 for the asymptotic method
    std::size_t replication = 0;
    std::size_t m_hat = 0;
    double d_hat = 0.0;
    double tau2 = 0.0;
    bool defined = true;  // false: asymptotic interval undefined (d_hat = 0)
    double p_stat = 0.0;
    std::vector<double> lengths;  // one per alpha in the grid
};

struct ColeRow {
    CiMethod method = CiMethod::bootstrap;
    std::size_t cell = 0;
    std::size_t block_length = 0;
    double alpha = 0.0;
    std::optional<double> noncoverage;  // empty when no replication was defined
};

struct CoilRow {
    CiMethod method = CiMethod::bootstrap;
    std::size_t cell = 0;
    std::size_t block_length = 0;
    double alpha = 0.0;
    std::optional<CoilSummary> summary;
};

struct StudyResult {
    std::vector<StudyCell> cells;
    std::vector<ReplicationRecord> replications;  // cell-major, then replication, then method
    std::vector<ColeRow> cole;
    std::vector<CoilRow> coil;
    std::vector<std::size_t> undefined_asymptotic;  // per cell
    std::size_t limit_law_simulations = 0;
};

/// Runs every (cell, replication). Replication r of cell c draws its errors
/// from a stream keyed by (master_seed, c, r); the bootstrap for the j-th block
/// length uses seed (master_seed, c, r, j + 1). Output is identical for every
/// thread count.
[[nodiscard]] StudyResult run_study(const StudyConfig& config, unsigned threads = 1);

void write_cole_csv(std::ostream& out, const StudyResult& result);
void write_coil_csv(std::ostream& out, const StudyResult& result);
void write_replications_csv(std::ostream& out, const StudyConfig& config,
                            const StudyResult& result);
void write_manifest(std::ostream& out, const StudyConfig& config, const StudyResult& result);

/// Writes cole.csv, coil.csv, replications.csv and manifest.json into `dir`
/// (created if needed).
void write_study_outputs(const std::filesystem::path& dir, const StudyConfig& config,
                         const StudyResult& result);

/// Shortest round-trip decimal text for a double.
[[nodiscard]] std::string format_number(double x);

}  // namespace amocci
