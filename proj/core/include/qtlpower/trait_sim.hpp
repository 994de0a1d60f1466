#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "qtlpower/genetics.hpp"
#include "qtlpower/random.hpp"

namespace qtlpower {

enum class Family : unsigned char { Normal, Lognormal };

std::string_view family_name(Family f) noexcept;
/// Parses "normal" / "lognormal"; throws DomainError otherwise.
Family parse_family(std::string_view name);

/// Parameters of one simulated study cell. Blood-pressure quantities are in mm Hg.
struct StudyConfig {
    double p = 0.1;             // minor-allele frequency (trait locus and marker)
    double d = 10.0;            // spacing between adjacent genotype means
    double delta_prime = 1.0;   // normalized LD between trait locus and marker
    Family family = Family::Normal;
    double baseline_mean = 120.0;
    double component_sd = 20.0;
    double threshold = 140.0;   // affected iff underlying > threshold
    double treat_prob = 0.8;    // P(treated | affected)
    double med_effect_mean = -10.0;
    double med_effect_sd = 3.0;
    int n_subjects = 100;
    int n_replicates = 1000;
    double alpha = 0.05;
    std::uint64_t master_seed = 0;

    /// Throws DomainError naming the first violated constraint.
    void validate() const;
};

/// Distribution of the underlying trait within one genotype class.
/// For the lognormal family `location`/`scale` are on the log scale.
struct ComponentParams {
    Family family = Family::Normal;
    double location = 0.0;
    double scale = 0.0;
};

/// Normal: (baseline + (g-1)*d, sd). Lognormal: moment-matched so the raw-scale
/// mean is baseline + (g-1)*d and the raw-scale variance is sd^2.
ComponentParams component_params(const StudyConfig& config, Genotype qtl);

double draw_underlying(const ComponentParams& params, RandomStream& rng) noexcept;

struct TreatmentOutcome {
    double observed = 0.0;
    bool affected = false;
    bool treated = false;
};

/// Deterministic core of the treatment step, given the coin result and the
/// medicine-effect draw. `accepted` and `effect` are ignored when unaffected.
TreatmentOutcome treatment_outcome(double underlying, double threshold, bool accepted,
                                   double effect) noexcept;

/// Labels the subject affected, flips the treatment coin when affected and
/// draws the medicine effect when treated, in that order.
TreatmentOutcome apply_treatment(double underlying, const StudyConfig& config,
                                 RandomStream& rng) noexcept;

struct Subject {
    double underlying = 0.0;
    double observed = 0.0;
    Genotype qtl = Genotype::HomMajor;
    Genotype marker = Genotype::HomMajor;
    bool affected = false;
    bool treated = false;
};

struct Dataset {
    std::vector<Subject> subjects;
    StudyConfig config;
    std::uint64_t replicate_index = 0;
};

/// Builds the haplotype distribution implied by (p, delta_prime).
HaplotypeDistribution study_haplotypes(const StudyConfig& config);

/// Per subject: genotype pair, underlying trait from the QTL genotype,
/// then treatment. The marker genotype is the analysis grouping.
Dataset simulate_dataset(const StudyConfig& config, RandomStream& rng,
                         std::uint64_t replicate_index = 0);

/// Variant reusing precomputed haplotype and component parameters.
void simulate_subjects(const StudyConfig& config, const HaplotypeDistribution& haplotypes,
                       const std::array<ComponentParams, 3>& components, RandomStream& rng,
                       std::vector<Subject>& out);

/// CSV dump with header
/// `subject,qtl_genotype,marker_genotype,underlying,observed,affected,treated`.
void write_dataset_csv(std::ostream& os, const Dataset& dataset);

}  // namespace qtlpower
