#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qtlpower/adjustments.hpp"
#include "qtlpower/stattests.hpp"
#include "qtlpower/trait_sim.hpp"

namespace qtlpower {

/// Power estimate for one (cell, method).
struct CellResult {
    StudyConfig config;
    Method method = Method::AllUnderlying;
    double power = 0.0;
    int rejections = 0;
    int replicates = 0;
    int non_testable = 0;
    int fallbacks = 0;
    double mc_std_err = 0.0;
};

/// Test applied to a method's sample: ANOVA (covariate F for
/// TreatmentCovariate) for the normal family, Kruskal-Wallis for lognormal.
TestKind test_for(Family family, Method method);

/// Mean for the normal family, median for lognormal.
LocationEstimator location_for(Family family) noexcept;

/// Throws DomainError if `method` cannot be analysed under `family`.
void check_method_supported(Family family, Method method);

/// Runs every replicate of one cell. All methods share each replicate's
/// dataset. Replicate r draws from replicate_seed(master_seed, cell_index, r),
/// so the result does not depend on `workers`.
std::vector<CellResult> run_cell(const StudyConfig& config, std::span<const Method> methods,
                                 std::uint64_t cell_index, int workers = 1);

struct GridSpec {
    Family family = Family::Normal;
    std::vector<double> delta_primes{1.0 / 3.0, 2.0 / 3.0, 1.0};
    std::vector<double> ps{0.1, 0.3, 0.5};
    std::vector<double> ds{10.0, 15.0, 20.0, 25.0, 30.0};
    /// Empty selects every method the family supports.
    std::vector<Method> methods;
    /// Fixed parameters shared by all cells (sample size, replicates, seed, ...).
    StudyConfig base;
    int workers = 1;
};

/// Methods analysed for `family` when none are requested explicitly.
std::vector<Method> default_methods(Family family);

/// Grid results. `cells` holds one entry per (delta', p, d, method) in the
/// order of the grid lists, methods innermost.
struct PowerTable {
    Family family = Family::Normal;
    std::vector<double> delta_primes;
    std::vector<double> ps;
    std::vector<double> ds;
    std::vector<Method> methods;
    std::vector<CellResult> cells;

    /// Throws DomainError if the grid has no such entry.
    const CellResult& at(double delta_prime, double p, double d, Method method) const;
};

/// Cell index for grid position (family, delta' index, p index, d index).
std::uint64_t grid_cell_index(const GridSpec& grid, std::size_t di, std::size_t pi,
                              std::size_t ki) noexcept;

PowerTable run_grid(const GridSpec& grid);

/// Single-normal model used to check the medicine-effect estimator.
struct EstimatorConfig {
    int n = 100;
    double mu = 120.0;
    double sigma = 20.0;
    double threshold = 140.0;
    double treat_prob = 0.8;
    double nu = -10.0;
    double tau = 3.0;
    int replicates = 100000;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct EstimatorReport {
    double mean = 0.0;
    double variance = 0.0;
    /// m sigma_c^2 / (k (m - k)) + tau^2 / k averaged over the kept replicates,
    /// sigma_c^2 being the variance of the normal truncated below at the threshold.
    double predicted_variance = 0.0;
    /// Same average with the untruncated sigma^2.
    double predicted_variance_untruncated = 0.0;
    double truncated_mean = 0.0;
    double truncated_variance = 0.0;
    int replicates = 0;
    int discarded = 0;
};

/// Mean and variance of the truncated normal N(mu, sigma^2 | X > threshold).
std::pair<double, double> truncated_normal_moments(double mu, double sigma, double threshold);

/// Monte Carlo check of nu_hat = mean(observed | treated) - mean(observed |
/// affected, untreated). Replicates with no treated or no affected-untreated
/// subject are discarded and counted.
EstimatorReport verify_estimator(const EstimatorConfig& config);

}  // namespace qtlpower
