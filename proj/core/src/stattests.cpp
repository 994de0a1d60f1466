#include "qtlpower/stattests.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "qtlpower/errors.hpp"
#include "qtlpower/special_functions.hpp"

namespace qtlpower {

namespace {

// Sums of squares at or below this fraction of the total are treated as zero.
constexpr double kRelTol = 1e-12;

struct GroupStats {
    std::array<std::size_t, 3> count{};
    std::array<double, 3> mean{};
    int present = 0;
};

std::size_t group_index(Genotype g) { return static_cast<std::size_t>(g); }

GroupStats group_stats(const std::vector<double>& values, const std::vector<Genotype>& groups) {
    GroupStats stats;
    std::array<double, 3> sum{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto g = group_index(groups[i]);
        ++stats.count[g];
        sum[g] += values[i];
    }
    for (std::size_t g = 0; g < 3; ++g) {
        if (stats.count[g] == 0) continue;
        ++stats.present;
        stats.mean[g] = sum[g] / static_cast<double>(stats.count[g]);
    }
    return stats;
}

double overall_mean(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

void check_parallel(const AnalysisSample& sample) {
    if (sample.values.size() != sample.groups.size()) {
        throw DomainError("analysis sample values and groups differ in length");
    }
}

}  // namespace

std::string_view test_name(TestKind kind) noexcept {
    switch (kind) {
        case TestKind::Anova: return "anova";
        case TestKind::CovariateAnova: return "covariate-anova";
        case TestKind::KruskalWallis: return "kruskal-wallis";
    }
    return "?";
}

TestResult one_way_anova(const AnalysisSample& sample) {
    check_parallel(sample);
    TestResult result;
    const std::size_t n = sample.size();
    if (n == 0) return result;

    const GroupStats stats = group_stats(sample.values, sample.groups);
    result.n_groups = stats.present;
    const double grand = overall_mean(sample.values);

    double ssb = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
        if (stats.count[g] == 0) continue;
        const double diff = stats.mean[g] - grand;
        ssb += static_cast<double>(stats.count[g]) * diff * diff;
    }
    double ssw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = sample.values[i] - stats.mean[group_index(sample.groups[i])];
        ssw += diff * diff;
    }

    const int k = stats.present;
    const auto error_df = static_cast<double>(n) - k;
    if (k < 2 || error_df < 1.0 || ssw <= kRelTol * (ssb + ssw)) return result;

    result.df1 = k - 1.0;
    result.df2 = error_df;
    result.statistic = (ssb / result.df1) / (ssw / error_df);
    result.p_value = f_sf(result.statistic, result.df1, error_df);
    result.testable = true;
    return result;
}

TestResult anova_with_covariate(const AnalysisSample& sample) {
    check_parallel(sample);
    if (!sample.covariate) throw DomainError("covariate F test needs a treatment covariate");
    const auto& cov = *sample.covariate;
    if (cov.size() != sample.size()) {
        throw DomainError("analysis sample covariate differs in length");
    }
    const std::size_t n = sample.size();
    if (n == 0) return {};

    const bool constant = std::all_of(cov.begin(), cov.end(), [&](auto c) { return c == cov.front(); });
    if (constant) return one_way_anova(sample);

    std::vector<double> m(cov.begin(), cov.end());
    const GroupStats ys = group_stats(sample.values, sample.groups);
    const GroupStats ms = group_stats(m, sample.groups);

    // Reduced model: value ~ 1 + treatment.
    const double y_bar = overall_mean(sample.values);
    const double m_bar = overall_mean(m);
    double syy = 0.0;
    double sym = 0.0;
    double smm = 0.0;
    // Full model via within-genotype centering (Frisch-Waugh).
    double wyy = 0.0;
    double wym = 0.0;
    double wmm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = sample.values[i] - y_bar;
        const double dm = m[i] - m_bar;
        syy += dy * dy;
        sym += dy * dm;
        smm += dm * dm;
        const auto g = group_index(sample.groups[i]);
        const double wy = sample.values[i] - ys.mean[g];
        const double wm = m[i] - ms.mean[g];
        wyy += wy * wy;
        wym += wy * wm;
        wmm += wm * wm;
    }

    TestResult result;
    const int k = ys.present;
    result.n_groups = k;
    const auto error_df = static_cast<double>(n) - k - 1.0;
    // Treatment constant within every genotype group: collinear with the factor.
    if (k < 2 || error_df < 1.0 || wmm <= kRelTol * smm) return result;

    const double rss_reduced = syy - sym * sym / smm;
    const double rss_full = wyy - wym * wym / wmm;
    if (rss_full <= kRelTol * syy) return result;

    result.df1 = k - 1.0;
    result.df2 = error_df;
    const double extra = std::max(rss_reduced - rss_full, 0.0);
    result.statistic = (extra / result.df1) / (rss_full / error_df);
    result.p_value = f_sf(result.statistic, result.df1, error_df);
    result.testable = true;
    return result;
}

TestResult kruskal_wallis(const AnalysisSample& sample) {
    check_parallel(sample);
    TestResult result;
    const std::size_t n = sample.size();
    if (n < 2) return result;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample.values[a] < sample.values[b]; });

    std::array<double, 3> rank_sum{};
    std::array<std::size_t, 3> count{};
    double tie_sum = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && sample.values[order[end]] == sample.values[order[start]]) ++end;
        // Ranks start+1 .. end share their midrank.
        const double midrank = 0.5 * static_cast<double>(start + 1 + end);
        const auto ties = static_cast<double>(end - start);
        tie_sum += ties * ties * ties - ties;
        for (std::size_t j = start; j < end; ++j) {
            const auto g = group_index(sample.groups[order[j]]);
            rank_sum[g] += midrank;
            ++count[g];
        }
        start = end;
    }

    const auto total = static_cast<double>(n);
    int k = 0;
    double spread = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
        if (count[g] == 0) continue;
        ++k;
        const auto size = static_cast<double>(count[g]);
        const double diff = rank_sum[g] / size - 0.5 * (total + 1.0);
        spread += size * diff * diff;
    }
    result.n_groups = k;
    const double correction = 1.0 - tie_sum / (total * total * total - total);
    if (k < 2 || correction <= kRelTol) return result;

    result.statistic = 12.0 / (total * (total + 1.0)) * spread / correction;
    result.df1 = k - 1.0;
    result.p_value = chi_square_sf(result.statistic, result.df1);
    result.testable = true;
    return result;
}

TestResult run_test(TestKind kind, const AnalysisSample& sample) {
    switch (kind) {
        case TestKind::Anova: return one_way_anova(sample);
        case TestKind::CovariateAnova: return anova_with_covariate(sample);
        case TestKind::KruskalWallis: return kruskal_wallis(sample);
    }
    throw DomainError("unknown test kind");
}

}  // namespace qtlpower
