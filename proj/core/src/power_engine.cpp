#include "qtlpower/power_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "qtlpower/errors.hpp"
#include "qtlpower/random.hpp"

namespace qtlpower {

namespace {

enum Outcome : std::uint8_t { kReject = 1, kNonTestable = 2, kFallback = 4 };

// Stream tag separating estimator checks from grid cells.
constexpr std::uint64_t kEstimatorStream = 0xe5717a70ULL;

// Calls body(i) for i in [0, count) on up to `workers` threads. Work is
// handed out by an atomic counter; the first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < std::min(threads, count); ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); }

}  // namespace

TestKind test_for(Family family, Method method) {
    check_method_supported(family, method);
    if (family == Family::Lognormal) return TestKind::KruskalWallis;
    return method == Method::TreatmentCovariate ? TestKind::CovariateAnova : TestKind::Anova;
}

LocationEstimator location_for(Family family) noexcept {
    return family == Family::Normal ? LocationEstimator::Mean : LocationEstimator::Median;
}

void check_method_supported(Family family, Method method) {
    if (family == Family::Lognormal && method == Method::TreatmentCovariate) {
        throw DomainError("the covariate method is not analysed for the lognormal family");
    }
}

std::vector<Method> default_methods(Family family) {
    std::vector<Method> out;
    for (Method m : kAllMethods) {
        if (family == Family::Lognormal && m == Method::TreatmentCovariate) continue;
        out.push_back(m);
    }
    return out;
}

std::vector<CellResult> run_cell(const StudyConfig& config, std::span<const Method> methods,
                                 std::uint64_t cell_index, int workers) {
    config.validate();
    if (methods.empty()) throw DomainError("no analysis methods requested");
    std::vector<TestKind> tests;
    tests.reserve(methods.size());
    for (Method m : methods) tests.push_back(test_for(config.family, m));
    const LocationEstimator location = location_for(config.family);

    const HaplotypeDistribution haplotypes = study_haplotypes(config);
    const std::array<ComponentParams, 3> components{
        component_params(config, Genotype::HomMajor), component_params(config, Genotype::Het),
        component_params(config, Genotype::HomMinor)};

    const auto reps = static_cast<std::size_t>(config.n_replicates);
    const std::size_t n_methods = methods.size();
    std::vector<std::uint8_t> outcomes(reps * n_methods, 0);

    parallel_for(reps, workers, [&](std::size_t r) {
        RandomStream rng(replicate_seed(config.master_seed, cell_index, r));
        Dataset ds;
        ds.config = config;
        ds.replicate_index = r;
        simulate_subjects(config, haplotypes, components, rng, ds.subjects);
        for (std::size_t j = 0; j < n_methods; ++j) {
            const AnalysisSample sample = apply_method(methods[j], ds, location);
            const TestResult test = run_test(tests[j], sample);
            std::uint8_t flags = 0;
            if (test.rejects(config.alpha)) flags |= kReject;
            if (!test.testable) flags |= kNonTestable;
            if (sample.fallback) flags |= kFallback;
            outcomes[r * n_methods + j] = flags;
        }
    });

    std::vector<CellResult> results;
    results.reserve(n_methods);
    for (std::size_t j = 0; j < n_methods; ++j) {
        CellResult cell;
        cell.config = config;
        cell.method = methods[j];
        cell.replicates = config.n_replicates;
        for (std::size_t r = 0; r < reps; ++r) {
            const std::uint8_t flags = outcomes[r * n_methods + j];
            cell.rejections += (flags & kReject) ? 1 : 0;
            cell.non_testable += (flags & kNonTestable) ? 1 : 0;
            cell.fallbacks += (flags & kFallback) ? 1 : 0;
        }
        cell.power = static_cast<double>(cell.rejections) / cell.replicates;
        cell.mc_std_err = std::sqrt(cell.power * (1.0 - cell.power) / cell.replicates);
        results.push_back(cell);
    }
    return results;
}

const CellResult& PowerTable::at(double delta_prime, double p, double d, Method method) const {
    for (const auto& cell : cells) {
        if (cell.method == method && close(cell.config.delta_prime, delta_prime) &&
            close(cell.config.p, p) && close(cell.config.d, d)) {
            return cell;
        }
    }
    throw DomainError(fmt::format("no grid cell for delta'={}, p={}, d={}, method={}", delta_prime,
                                  p, d, method_name(method)));
}

std::uint64_t grid_cell_index(const GridSpec& grid, std::size_t di, std::size_t pi,
                              std::size_t ki) noexcept {
    const std::uint64_t per_family = grid.delta_primes.size() * grid.ps.size() * grid.ds.size();
    return static_cast<std::uint64_t>(grid.family) * per_family +
           (di * grid.ps.size() + pi) * grid.ds.size() + ki;
}

PowerTable run_grid(const GridSpec& grid) {
    if (grid.delta_primes.empty() || grid.ps.empty() || grid.ds.empty()) {
        throw DomainError("grid must contain at least one value of delta-prime, p and d");
    }
    PowerTable table;
    table.family = grid.family;
    table.delta_primes = grid.delta_primes;
    table.ps = grid.ps;
    table.ds = grid.ds;
    table.methods = grid.methods.empty() ? default_methods(grid.family) : grid.methods;
    for (Method m : table.methods) check_method_supported(grid.family, m);

    for (std::size_t di = 0; di < grid.delta_primes.size(); ++di) {
        for (std::size_t pi = 0; pi < grid.ps.size(); ++pi) {
            for (std::size_t ki = 0; ki < grid.ds.size(); ++ki) {
                StudyConfig config = grid.base;
                config.family = grid.family;
                config.delta_prime = grid.delta_primes[di];
                config.p = grid.ps[pi];
                config.d = grid.ds[ki];
                auto cell = run_cell(config, table.methods, grid_cell_index(grid, di, pi, ki),
                                     grid.workers);
                table.cells.insert(table.cells.end(), cell.begin(), cell.end());
            }
        }
    }
    return table;
}

std::pair<double, double> truncated_normal_moments(double mu, double sigma, double threshold) {
    if (!(sigma > 0.0)) throw DomainError("truncated normal needs sigma > 0");
    const double z = (threshold - mu) / sigma;
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    const double tail = 0.5 * std::erfc(z / std::numbers::sqrt2);
    const double hazard = density / tail;
    const double mean = mu + sigma * hazard;
    const double variance = sigma * sigma * (1.0 + z * hazard - hazard * hazard);
    return {mean, variance};
}

EstimatorReport verify_estimator(const EstimatorConfig& config) {
    if (!(config.treat_prob > 0.0 && config.treat_prob < 1.0)) {
        throw DomainError(
            fmt::format("treatment probability must lie in (0, 1), got {}", config.treat_prob));
    }
    if (config.replicates < 10000) {
        throw DomainError(fmt::format("estimator check needs >= 10000 replicates, got {}",
                                      config.replicates));
    }
    if (config.n < 2) throw DomainError("estimator check needs n >= 2");
    if (!(config.sigma > 0.0) || !(config.tau >= 0.0)) {
        throw DomainError("estimator check needs sigma > 0 and tau >= 0");
    }

    const auto [mu_c, var_c] = truncated_normal_moments(config.mu, config.sigma, config.threshold);
    const auto reps = static_cast<std::size_t>(config.replicates);
    // NaN marks a discarded replicate.
    std::vector<double> estimates(reps);
    std::vector<double> predicted(reps);
    std::vector<double> predicted_raw(reps);

    parallel_for(reps, config.workers, [&](std::size_t r) {
        RandomStream rng(replicate_seed(config.seed, kEstimatorStream, r));
        double treated_sum = 0.0;
        double untreated_sum = 0.0;
        int affected = 0;
        int treated = 0;
        for (int i = 0; i < config.n; ++i) {
            const double underlying = rng.normal(config.mu, config.sigma);
            if (!(underlying > config.threshold)) continue;
            ++affected;
            if (rng.bernoulli(config.treat_prob)) {
                ++treated;
                treated_sum += underlying + rng.normal(config.nu, config.tau);
            } else {
                untreated_sum += underlying;
            }
        }
        if (treated == 0 || treated == affected) {
            estimates[r] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        const double m = affected;
        const double k = treated;
        estimates[r] = treated_sum / k - untreated_sum / (m - k);
        const double tau2 = config.tau * config.tau;
        predicted[r] = m * var_c / (k * (m - k)) + tau2 / k;
        predicted_raw[r] = m * config.sigma * config.sigma / (k * (m - k)) + tau2 / k;
    });

    EstimatorReport report;
    report.truncated_mean = mu_c;
    report.truncated_variance = var_c;
    double sum = 0.0;
    double pred_sum = 0.0;
    double pred_raw_sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        if (std::isnan(estimates[r])) {
            ++report.discarded;
            continue;
        }
        ++report.replicates;
        sum += estimates[r];
        pred_sum += predicted[r];
        pred_raw_sum += predicted_raw[r];
    }
    if (report.replicates < 2) {
        throw NumericError("estimator check: fewer than two non-degenerate replicates");
    }
    const double kept = report.replicates;
    report.mean = sum / kept;
    report.predicted_variance = pred_sum / kept;
    report.predicted_variance_untruncated = pred_raw_sum / kept;
    double ss = 0.0;
    for (double e : estimates) {
        if (std::isnan(e)) continue;
        ss += (e - report.mean) * (e - report.mean);
    }
    report.variance = ss / (kept - 1.0);
    return report;
}

}  // namespace qtlpower
