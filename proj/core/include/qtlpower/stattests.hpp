#pragma once

#include <optional>
#include <string_view>

#include "qtlpower/adjustments.hpp"

namespace qtlpower {

/// Outcome of one hypothesis test. A non-testable sample (too few groups,
/// no residual variation, ...) carries no p-value and never rejects.
struct TestResult {
    double statistic = 0.0;
    double df1 = 0.0;
    std::optional<double> df2;
    std::optional<double> p_value;
    bool testable = false;
    int n_groups = 0;

    bool rejects(double alpha) const noexcept { return testable && p_value && *p_value < alpha; }
};

enum class TestKind : unsigned char { Anova, CovariateAnova, KruskalWallis };

std::string_view test_name(TestKind kind) noexcept;

/// Single-factor ANOVA over the marker genotype groups present in the sample.
TestResult one_way_anova(const AnalysisSample& sample);

/// Genotype F test in the linear model value ~ 1 + genotype + treatment,
/// by extra sum of squares against value ~ 1 + treatment. Falls back to
/// one_way_anova when the covariate is constant. Throws DomainError when the
/// sample has no covariate.
TestResult anova_with_covariate(const AnalysisSample& sample);

/// Kruskal-Wallis H with midranks, tie correction and a chi-square(k-1) reference.
TestResult kruskal_wallis(const AnalysisSample& sample);

TestResult run_test(TestKind kind, const AnalysisSample& sample);

}  // namespace qtlpower
