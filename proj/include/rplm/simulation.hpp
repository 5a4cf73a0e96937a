#pragma once

#include "rplm/bandwidth.hpp"
#include "rplm/plm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rplm {

using Rng = std::mt19937_64;

enum class DesignKind { Sphere, Cylinder };

/// Data-generating process for one Monte Carlo study.
struct SimDesign {
    DesignKind kind = DesignKind::Sphere;
    std::size_t n = 200;
    double beta_true = 5.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    /// Throws ContractViolation unless n >= 10 and noise_sd > 0.
    void validate() const;
};

DesignKind parse_design(const std::string& name);
std::string design_name(DesignKind kind);

/// One draw from the von Mises distribution vM(mean, kappa), returned in
/// [0, 2pi). Best-Fisher wrapped-Cauchy rejection; kappa = 0 is uniform.
double sample_von_mises(double mean, double kappa, Rng& rng);

/// Generated data together with the true g at each sample point.
struct SimulatedSample {
    Dataset data;
    Eigen::VectorXd g_true;
};

/// y = beta x + exp(-(t1 + 2 t2 + t3)^2) + eps, x = t1 + t2 + t3 + eta with
/// t = (cos a cos b, sin a cos b, sin b), a ~ vM(0, 3), b ~ vM(pi, 5).
SimulatedSample gen_sphere_dataset(const SimDesign& design, Rng& rng);

/// y = beta x + s^2 + sin(a) + eps, x = exp(a) + eta with a ~ vM(pi, 3)
/// and s ~ U(-2, 2) on the cylinder of heights [-2, 2].
SimulatedSample gen_cylinder_dataset(const SimDesign& design, Rng& rng);

SimulatedSample generate(const SimDesign& design, Rng& rng);

/// Independent generator for replication r of a study seeded with `seed`.
Rng replication_rng(std::uint64_t seed, std::size_t replication);

/// Candidate bandwidths used for the simulated designs: 30 log-spaced values
/// in [0.05, 0.9 pi].
BandwidthGrid design_grid(DesignKind kind);

struct Replication {
    std::size_t index = 0;
    bool ok = false;
    double beta_hat = 0.0;
    double standard_error = 0.0;
    double bandwidth = 0.0;
    double mse_g = 0.0;
    double wald = 0.0;  // against the true beta
    std::string failure;
};

/// Mean, sd and MSE of beta-hat plus the mean of the per-replication MSE of
/// g-hat at the sample points. `reps` counts the aggregated replications.
struct McSummary {
    std::size_t reps = 0;
    std::size_t failed = 0;
    double beta_true = 0.0;
    double mean_beta = 0.0;
    double sd_beta = 0.0;
    double mse_beta = 0.0;
    double mean_mse_g = 0.0;
};

struct McResult {
    McSummary summary;
    std::vector<Replication> replications;
};

/// Runs one replication: generate, choose h by cross-validation over
/// `grid`, fit, score.
Replication run_replication(const SimDesign& design, std::size_t index, const BandwidthGrid& grid);

/// Throws UnstableDesign when more than 5% of the replications fail.
McResult run_monte_carlo(const SimDesign& design, std::size_t reps, const BandwidthGrid& grid, unsigned threads = 1);
McSummary monte_carlo(const SimDesign& design, std::size_t reps, const BandwidthGrid& grid, unsigned threads = 1);

/// Aggregates the successful replications (in index order).
McSummary summarize(std::span<const Replication> replications, double beta_true);

/// JSON document with "schema": 1 and the summary fields.
std::string summary_json(const McSummary& summary, const SimDesign& design);
/// Header plus one row: design,mean_beta,sd_beta,mse_beta,mean_mse_g.
std::string summary_table_csv(const McSummary& summary, const SimDesign& design);

}  // namespace rplm
