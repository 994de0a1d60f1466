#pragma once

#include <array>
#include <string_view>

#include "qtlpower/random.hpp"

namespace qtlpower {

/// Biallelic genotype, counted by copies of the minor allele.
enum class Genotype : unsigned char {
    HomMajor = 0,  // AA / BB
    Het = 1,       // Aa / Bb
    HomMinor = 2,  // aa / bb
};

inline constexpr std::array<Genotype, 3> kGenotypes{Genotype::HomMajor, Genotype::Het,
                                                    Genotype::HomMinor};

constexpr int minor_allele_count(Genotype g) noexcept { return static_cast<int>(g); }

/// "AA"/"Aa"/"aa" for the trait locus.
std::string_view qtl_label(Genotype g) noexcept;
/// "BB"/"Bb"/"bb" for the marker locus.
std::string_view marker_label(Genotype g) noexcept;

/// Hardy-Weinberg genotype probabilities (AA, Aa, aa) for minor-allele frequency p.
std::array<double, 3> genotype_probs(double p);

/// Converts normalized LD to raw LD when both loci share minor-allele
/// frequency p. Only 0 <= delta_prime <= 1 is accepted.
double delta_from_normalized(double p, double delta_prime);

/// Two-locus haplotype frequencies with equal allele frequencies at the
/// trait locus (A/a) and the marker (B/b). Capital letters are major alleles.
struct HaplotypeDistribution {
    double pAB = 0.0;
    double pAb = 0.0;
    double paB = 0.0;
    double pab = 0.0;
    double p = 0.0;
    double delta = 0.0;
    double delta_prime = 0.0;
};

HaplotypeDistribution haplotype_distribution(double p, double delta);

/// Index into (AB, Ab, aB, ab).
enum class Haplotype : unsigned char { AB = 0, Ab = 1, aB = 2, ab = 3 };

struct GenotypePair {
    Genotype qtl;
    Genotype marker;

    friend bool operator==(const GenotypePair&, const GenotypePair&) = default;
};

/// Inverse-CDF draw over the fixed order (AB, Ab, aB, ab).
Haplotype sample_haplotype(const HaplotypeDistribution& dist, RandomStream& rng) noexcept;

/// Combines two haplotypes into the genotypes at each locus.
GenotypePair fuse_haplotypes(Haplotype first, Haplotype second) noexcept;

/// Draws two haplotypes i.i.d. and fuses them.
GenotypePair sample_genotype_pair(const HaplotypeDistribution& dist, RandomStream& rng) noexcept;

}  // namespace qtlpower
