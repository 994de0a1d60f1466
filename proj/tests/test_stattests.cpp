#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qtlpower/errors.hpp"
#include "qtlpower/stattests.hpp"

using namespace qtlpower;

namespace {

AnalysisSample grouped(const std::vector<double>& values, const std::vector<int>& groups) {
    AnalysisSample s;
    s.values = values;
    for (int g : groups) s.groups.push_back(static_cast<Genotype>(g));
    return s;
}

AnalysisSample with_covariate(AnalysisSample s, const std::vector<int>& cov) {
    s.covariate = std::vector<std::uint8_t>(cov.begin(), cov.end());
    return s;
}

struct Instance {
    std::vector<double> y;
    std::vector<int> g;
    std::vector<int> m;
};

Instance random_instance(RandomStream& rng) {
    Instance inst;
    const int n = 6 + static_cast<int>(rng.uniform() * 10.0);  // 6..15
    for (int i = 0; i < n; ++i) {
        inst.g.push_back(static_cast<int>(rng.uniform() * 3.0));
        inst.m.push_back(rng.uniform() < 0.35 ? 1 : 0);
        inst.y.push_back(rng.normal(120.0 + 5.0 * inst.g.back() - 8.0 * inst.m.back(), 10.0));
    }
    return inst;
}

int distinct(const std::vector<int>& v) {
    std::vector<int> s = v;
    std::sort(s.begin(), s.end());
    return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
}

}  // namespace

TEST_CASE("one_way_anova hand example") {
    const auto r = one_way_anova(grouped({1, 2, 3, 4}, {0, 0, 1, 1}));
    REQUIRE(r.testable);
    CHECK(r.statistic == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(r.df1 == 1.0);
    CHECK(*r.df2 == 2.0);
    CHECK(std::fabs(*r.p_value - 0.10557) < 1e-5);
    CHECK(r.n_groups == 2);
}

TEST_CASE("one_way_anova degenerate inputs") {
    const auto same = one_way_anova(grouped({1, 2, 3, 1, 2, 3}, {0, 0, 0, 2, 2, 2}));
    REQUIRE(same.testable);
    CHECK(same.statistic == 0.0);
    CHECK(*same.p_value == 1.0);

    const auto single = one_way_anova(grouped({1, 2, 3}, {1, 1, 1}));
    CHECK_FALSE(single.testable);
    CHECK_FALSE(single.p_value.has_value());
    CHECK_FALSE(single.rejects(0.05));

    CHECK_FALSE(one_way_anova(grouped({1, 2}, {0, 1})).testable);           // no error df
    CHECK_FALSE(one_way_anova(grouped({1, 1, 5, 5}, {0, 0, 1, 1})).testable);  // SSW = 0
    CHECK_FALSE(one_way_anova(AnalysisSample{}).testable);
}

TEST_CASE("one_way_anova and covariate F match the normal-equation oracle") {
    RandomStream rng(51);
    int compared = 0;
    while (compared < 100) {
        const Instance inst = random_instance(rng);
        if (distinct(inst.g) < 2 || distinct(inst.m) < 2) continue;
        if (static_cast<int>(inst.y.size()) - distinct(inst.g) - 1 < 1) continue;

        const auto sample = grouped(inst.y, inst.g);
        const auto plain = one_way_anova(sample);
        const auto plain_oracle = oracle::genotype_f_test(inst.y, inst.g, {});
        REQUIRE(plain.testable);
        CHECK(plain.statistic == doctest::Approx(plain_oracle.f).epsilon(1e-8));
        CHECK(std::fabs(*plain.p_value - plain_oracle.p) <= 1e-8);

        const std::vector<double> cov(inst.m.begin(), inst.m.end());
        oracle::FTest cov_oracle{};
        try {
            cov_oracle = oracle::genotype_f_test(inst.y, inst.g, cov);
        } catch (const std::runtime_error&) {
            // Treatment collinear with genotype.
            CHECK_FALSE(anova_with_covariate(with_covariate(sample, inst.m)).testable);
            continue;
        }
        const auto adjusted = anova_with_covariate(with_covariate(sample, inst.m));
        REQUIRE(adjusted.testable);
        CHECK(std::fabs(adjusted.statistic - cov_oracle.f) <= 1e-8 * std::max(1.0, cov_oracle.f));
        CHECK(std::fabs(*adjusted.p_value - cov_oracle.p) <= 1e-8);
        CHECK(*adjusted.df2 == cov_oracle.df2);
        ++compared;
    }
}

TEST_CASE("anova_with_covariate reduces to one_way_anova for constant covariates") {
    RandomStream rng(52);
    for (int i = 0; i < 50; ++i) {
        const Instance inst = random_instance(rng);
        const auto sample = grouped(inst.y, inst.g);
        const auto plain = one_way_anova(sample);
        for (int c : {0, 1}) {
            const auto cov = anova_with_covariate(with_covariate(sample, std::vector<int>(inst.y.size(), c)));
            CHECK(cov.testable == plain.testable);
            if (!plain.testable) continue;
            CHECK(std::fabs(cov.statistic - plain.statistic) <= 1e-9);
            CHECK(std::fabs(*cov.p_value - *plain.p_value) <= 1e-9);
        }
    }
}

TEST_CASE("anova_with_covariate degenerate cases") {
    // Values fully determined by genotype.
    const auto exact = with_covariate(grouped({100, 100, 120, 120, 140, 140}, {0, 0, 1, 1, 2, 2}),
                                      {0, 1, 0, 1, 1, 0});
    CHECK_FALSE(anova_with_covariate(exact).testable);
    // Treatment constant within each genotype group but not overall.
    const auto collinear = with_covariate(grouped({1, 3, 2, 7, 5, 4}, {0, 0, 0, 1, 1, 1}),
                                          {0, 0, 0, 1, 1, 1});
    CHECK_FALSE(anova_with_covariate(collinear).testable);
    CHECK_THROWS_AS(anova_with_covariate(grouped({1, 2, 3}, {0, 1, 2})), DomainError);
}

TEST_CASE("kruskal_wallis fixtures") {
    auto r = kruskal_wallis(grouped({1, 2, 3, 4, 5, 6}, {0, 0, 1, 1, 2, 2}));
    REQUIRE(r.testable);
    CHECK(std::fabs(r.statistic - 32.0 / 7.0) <= 1e-12);
    CHECK(r.df1 == 2.0);
    CHECK(std::fabs(*r.p_value - std::exp(-16.0 / 7.0)) <= 1e-12);
    CHECK(std::fabs(*r.p_value - 0.1017) < 1e-4);

    // Ties: exact values from rational arithmetic.
    r = kruskal_wallis(grouped({1, 1, 2, 2, 3, 3, 3, 4}, {0, 0, 0, 1, 1, 1, 2, 2}));
    CHECK(std::fabs(r.statistic - 1267.0 / 234.0) <= 1e-12);
    r = kruskal_wallis(grouped({5, 5, 5, 1, 2, 5, 7, 7, 0}, {0, 0, 0, 0, 1, 1, 2, 2, 2}));
    CHECK(std::fabs(r.statistic - 75.0 / 109.0) <= 1e-12);

    CHECK_FALSE(kruskal_wallis(grouped({4, 4, 4, 4}, {0, 1, 2, 0})).testable);
    CHECK_FALSE(kruskal_wallis(grouped({1, 2, 3}, {2, 2, 2})).testable);
}

TEST_CASE("kruskal_wallis matches the brute-force rank oracle") {
    RandomStream rng(53);
    for (int i = 0; i < 100; ++i) {
        Instance inst = random_instance(rng);
        // Coarsen to force ties.
        for (double& y : inst.y) y = std::round(y / 5.0);
        if (distinct(inst.g) < 2) continue;
        const auto r = kruskal_wallis(grouped(inst.y, inst.g));
        if (!r.testable) continue;
        const double h = oracle::kruskal_h(inst.y, inst.g);
        CHECK(std::fabs(r.statistic - h) <= 1e-10);
        CHECK(std::fabs(*r.p_value - oracle::chi_square_sf(h, distinct(inst.g) - 1.0)) <= 1e-9);
    }
}

TEST_CASE("test statistics are invariant under the documented transformations") {
    RandomStream rng(54);
    for (int i = 0; i < 50; ++i) {
        const Instance inst = random_instance(rng);
        const auto base = grouped(inst.y, inst.g);
        const auto a = one_way_anova(base);
        const auto k = kruskal_wallis(base);

        auto shifted = base;
        for (double& v : shifted.values) v += 37.5;
        const auto a_shift = one_way_anova(shifted);
        CHECK(a_shift.testable == a.testable);
        if (a.testable) CHECK(a_shift.statistic == doctest::Approx(a.statistic).epsilon(1e-9));

        auto cubed = base;
        for (double& v : cubed.values) v = v * v * v;
        const auto k_cubed = kruskal_wallis(cubed);
        CHECK(k_cubed.testable == k.testable);
        if (k.testable) CHECK(k_cubed.statistic == doctest::Approx(k.statistic).epsilon(1e-12));

        std::vector<std::size_t> perm(base.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::reverse(perm.begin(), perm.end());
        AnalysisSample permuted;
        for (auto j : perm) {
            permuted.values.push_back(base.values[j]);
            permuted.groups.push_back(base.groups[j]);
        }
        const auto a_perm = one_way_anova(permuted);
        if (a.testable) CHECK(a_perm.statistic == doctest::Approx(a.statistic).epsilon(1e-9));
        const auto k_perm = kruskal_wallis(permuted);
        if (k.testable) CHECK(k_perm.statistic == doctest::Approx(k.statistic).epsilon(1e-12));
    }
}

TEST_CASE("run_test dispatch") {
    const auto s = with_covariate(grouped({1, 2, 3, 4, 5, 6}, {0, 0, 1, 1, 2, 2}), {0, 0, 0, 0, 0, 0});
    CHECK(run_test(TestKind::Anova, s).statistic == one_way_anova(s).statistic);
    CHECK(run_test(TestKind::KruskalWallis, s).statistic == kruskal_wallis(s).statistic);
    CHECK(run_test(TestKind::CovariateAnova, s).statistic == one_way_anova(s).statistic);
    CHECK(test_name(TestKind::KruskalWallis) == "kruskal-wallis");
}
