#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "qtlpower/errors.hpp"
#include "qtlpower/genetics.hpp"

using namespace qtlpower;

TEST_CASE("genotype_probs follows Hardy-Weinberg proportions") {
    auto check = [](double p, std::array<double, 3> expected) {
        const auto probs = genotype_probs(p);
        for (std::size_t i = 0; i < 3; ++i) CHECK(probs[i] == doctest::Approx(expected[i]).epsilon(1e-14));
        CHECK(std::fabs(probs[0] + probs[1] + probs[2] - 1.0) <= 1e-12);
    };
    check(0.5, {0.25, 0.50, 0.25});
    check(0.1, {0.81, 0.18, 0.01});
    check(0.3, {0.49, 0.42, 0.09});
    CHECK_THROWS_AS(genotype_probs(0.0), DomainError);
    CHECK_THROWS_AS(genotype_probs(1.0), DomainError);
    CHECK_THROWS_AS(genotype_probs(-0.2), DomainError);
}

TEST_CASE("delta_from_normalized scales by p(1-p)") {
    CHECK(delta_from_normalized(0.1, 1.0) == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(delta_from_normalized(0.3, 0.0) == 0.0);
    CHECK(delta_from_normalized(0.3, 2.0 / 3.0) == doctest::Approx(0.14).epsilon(1e-14));
    CHECK_THROWS_AS(delta_from_normalized(0.3, -0.1), DomainError);
    CHECK_THROWS_AS(delta_from_normalized(0.3, 1.2), DomainError);
}

TEST_CASE("haplotype_distribution examples") {
    auto h = haplotype_distribution(0.5, 0.0);
    CHECK(h.pAB == doctest::Approx(0.25));
    CHECK(h.pAb == doctest::Approx(0.25));
    CHECK(h.paB == doctest::Approx(0.25));
    CHECK(h.pab == doctest::Approx(0.25));

    h = haplotype_distribution(0.1, 0.09);
    CHECK(h.pAB == doctest::Approx(0.90));
    CHECK(std::fabs(h.pAb) <= 1e-12);
    CHECK(std::fabs(h.paB) <= 1e-12);
    CHECK(h.pab == doctest::Approx(0.10));
    CHECK(h.delta_prime == doctest::Approx(1.0));

    h = haplotype_distribution(0.3, 0.14);
    CHECK(h.pAB == doctest::Approx(0.63));
    CHECK(h.pAb == doctest::Approx(0.07));
    CHECK(h.paB == doctest::Approx(0.07));
    CHECK(h.pab == doctest::Approx(0.23));
    CHECK(std::fabs(h.pAB + h.pAb + h.paB + h.pab - 1.0) <= 1e-12);
}

TEST_CASE("haplotype_distribution rejects negative frequencies by name") {
    try {
        haplotype_distribution(0.1, 0.1);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("Ab") != std::string::npos);
    }
    CHECK_THROWS_AS(haplotype_distribution(0.3, -0.2), DomainError);
}

TEST_CASE("haplotype invariants hold over the (p, delta') range") {
    for (double p = 0.01; p < 1.0; p += 0.01) {
        for (double dp = 0.0; dp <= 1.0 + 1e-12; dp += 0.05) {
            const double delta = delta_from_normalized(p, std::min(dp, 1.0));
            const auto h = haplotype_distribution(p, delta);
            for (double f : {h.pAB, h.pAb, h.paB, h.pab}) {
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
            }
            CHECK(std::fabs(h.pAB + h.pAb + h.paB + h.pab - 1.0) <= 1e-12);
            const double pA = h.pAB + h.pAb;
            const double pB = h.pAB + h.paB;
            CHECK(std::fabs(h.pAB - pA * pB - delta) <= 1e-12);
            CHECK(h.pAb == h.paB);
        }
    }
}

TEST_CASE("fuse_haplotypes combines alleles per locus") {
    CHECK(fuse_haplotypes(Haplotype::AB, Haplotype::aB) == GenotypePair{Genotype::Het, Genotype::HomMajor});
    CHECK(fuse_haplotypes(Haplotype::ab, Haplotype::ab) == GenotypePair{Genotype::HomMinor, Genotype::HomMinor});
    CHECK(fuse_haplotypes(Haplotype::Ab, Haplotype::aB) == GenotypePair{Genotype::Het, Genotype::Het});
    CHECK(qtl_label(Genotype::Het) == "Aa");
    CHECK(marker_label(Genotype::HomMinor) == "bb");
}

TEST_CASE("complete linkage ties marker to QTL genotype") {
    const auto dist = haplotype_distribution(0.3, delta_from_normalized(0.3, 1.0));
    RandomStream rng(11);
    for (int i = 0; i < 20000; ++i) {
        const auto pair = sample_genotype_pair(dist, rng);
        REQUIRE(pair.qtl == pair.marker);
    }
}

TEST_CASE("no linkage gives independent genotypes") {
    const auto dist = haplotype_distribution(0.3, 0.0);
    RandomStream rng(12);
    std::vector<std::vector<double>> table(3, std::vector<double>(3, 0.0));
    for (int i = 0; i < 100000; ++i) {
        const auto pair = sample_genotype_pair(dist, rng);
        table[static_cast<std::size_t>(pair.qtl)][static_cast<std::size_t>(pair.marker)] += 1.0;
    }
    // chi-square(4) 0.999 quantile
    CHECK(oracle::chi_square_independence(table) < 18.4668);
}

TEST_CASE("sampled QTL genotypes match Hardy-Weinberg") {
    for (double p : {0.1, 0.3, 0.5}) {
        const auto dist = haplotype_distribution(p, delta_from_normalized(p, 2.0 / 3.0));
        RandomStream rng(13);
        std::array<double, 3> counts{};
        const int n = 100000;
        for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_genotype_pair(dist, rng).qtl)] += 1.0;
        const auto probs = genotype_probs(p);
        double stat = 0.0;
        for (std::size_t g = 0; g < 3; ++g) {
            const double e = n * probs[g];
            stat += (counts[g] - e) * (counts[g] - e) / e;
        }
        // chi-square(2) 0.999 quantile
        CHECK(stat < 13.8155);
    }
}

TEST_CASE("empirical LD matches the requested delta") {
    for (double p : {0.1, 0.3, 0.5}) {
        for (double dp : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
            const double delta = delta_from_normalized(p, dp);
            const auto dist = haplotype_distribution(p, delta);
            RandomStream rng(14);
            const int n = 100000;
            std::array<double, 4> counts{};
            for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_haplotype(dist, rng))] += 1.0;
            const double fAB = counts[0] / n;
            const double fA = (counts[0] + counts[1]) / n;
            const double fB = (counts[0] + counts[2]) / n;
            const double estimate = fAB - fA * fB;
            const double pA = 1.0 - p;
            const double var = (pA * p * pA * p + delta * (1 - 2 * pA) * (1 - 2 * pA) - delta * delta) / n;
            // 1/n covers the O(1/n) bias where the first-order variance vanishes.
            CHECK(std::fabs(estimate - delta) <= 3.0 * std::sqrt(var) + 1.0 / n);
        }
    }
}
