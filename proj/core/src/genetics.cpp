#include "qtlpower/genetics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qtlpower/errors.hpp"

namespace qtlpower {

namespace {

void check_frequency(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError(fmt::format("allele frequency must lie in (0, 1), got {}", p));
    }
}

// Slack for frequencies that are zero in exact arithmetic.
constexpr double kFreqTol = 1e-12;

}  // namespace

std::string_view qtl_label(Genotype g) noexcept {
    switch (g) {
        case Genotype::HomMajor: return "AA";
        case Genotype::Het: return "Aa";
        case Genotype::HomMinor: return "aa";
    }
    return "??";
}

std::string_view marker_label(Genotype g) noexcept {
    switch (g) {
        case Genotype::HomMajor: return "BB";
        case Genotype::Het: return "Bb";
        case Genotype::HomMinor: return "bb";
    }
    return "??";
}

std::array<double, 3> genotype_probs(double p) {
    check_frequency(p);
    const double q = 1.0 - p;
    return {q * q, 2.0 * p * q, p * p};
}

double delta_from_normalized(double p, double delta_prime) {
    check_frequency(p);
    if (!(delta_prime >= 0.0 && delta_prime <= 1.0)) {
        throw DomainError(
            fmt::format("normalized LD must lie in [0, 1], got {}", delta_prime));
    }
    return delta_prime * p * (1.0 - p);
}

HaplotypeDistribution haplotype_distribution(double p, double delta) {
    check_frequency(p);
    const double q = 1.0 - p;
    HaplotypeDistribution dist;
    dist.p = p;
    dist.delta = delta;
    dist.pAB = q * q + delta;
    dist.pAb = p * q - delta;
    dist.paB = p * q - delta;
    dist.pab = p * p + delta;

    const std::array<std::pair<const char*, double*>, 4> named{{
        {"AB", &dist.pAB}, {"Ab", &dist.pAb}, {"aB", &dist.paB}, {"ab", &dist.pab}}};
    for (auto [name, freq] : named) {
        if (*freq < -kFreqTol || *freq > 1.0 + kFreqTol) {
            throw DomainError(fmt::format(
                "haplotype {} frequency {} outside [0, 1] for p={}, delta={}", name, *freq, p, delta));
        }
        *freq = std::clamp(*freq, 0.0, 1.0);
    }

    // delta' = delta / max{P(A)P(b), P(a)P(B)} for delta > 0 and
    // delta / min{P(A)P(B), P(a)P(b)} for delta < 0.
    if (delta > 0.0) {
        dist.delta_prime = delta / (p * q);
    } else if (delta < 0.0) {
        dist.delta_prime = delta / std::min(q * q, p * p);
    }
    return dist;
}

Haplotype sample_haplotype(const HaplotypeDistribution& dist, RandomStream& rng) noexcept {
    const double u = rng.uniform();
    double cumulative = dist.pAB;
    if (u < cumulative) return Haplotype::AB;
    cumulative += dist.pAb;
    if (u < cumulative) return Haplotype::Ab;
    cumulative += dist.paB;
    if (u < cumulative) return Haplotype::aB;
    // Rounding in the cumulative sum can leave u just above it; the last
    // haplotype absorbs the remainder unless it has zero mass.
    if (dist.pab > 0.0) return Haplotype::ab;
    if (dist.paB > 0.0) return Haplotype::aB;
    if (dist.pAb > 0.0) return Haplotype::Ab;
    return Haplotype::AB;
}

GenotypePair fuse_haplotypes(Haplotype first, Haplotype second) noexcept {
    auto minor_a = [](Haplotype h) {
        return (h == Haplotype::aB || h == Haplotype::ab) ? 1 : 0;
    };
    auto minor_b = [](Haplotype h) {
        return (h == Haplotype::Ab || h == Haplotype::ab) ? 1 : 0;
    };
    return {static_cast<Genotype>(minor_a(first) + minor_a(second)),
            static_cast<Genotype>(minor_b(first) + minor_b(second))};
}

GenotypePair sample_genotype_pair(const HaplotypeDistribution& dist, RandomStream& rng) noexcept {
    const Haplotype first = sample_haplotype(dist, rng);
    const Haplotype second = sample_haplotype(dist, rng);
    return fuse_haplotypes(first, second);
}

}  // namespace qtlpower
