#include "qtlpower/trait_sim.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qtlpower/errors.hpp"

namespace qtlpower {

std::string_view family_name(Family f) noexcept {
    return f == Family::Normal ? "normal" : "lognormal";
}

Family parse_family(std::string_view name) {
    if (name == "normal") return Family::Normal;
    if (name == "lognormal") return Family::Lognormal;
    throw DomainError(fmt::format("unknown family '{}' (expected normal or lognormal)", name));
}

void StudyConfig::validate() const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError(fmt::format("p must lie in (0, 1), got {}", p));
    if (!(d >= 0.0)) throw DomainError(fmt::format("d must be >= 0, got {}", d));
    if (!(delta_prime >= 0.0 && delta_prime <= 1.0))
        throw DomainError(fmt::format("delta-prime must lie in [0, 1], got {}", delta_prime));
    if (!(component_sd > 0.0))
        throw DomainError(fmt::format("component sd must be > 0, got {}", component_sd));
    if (!(treat_prob >= 0.0 && treat_prob <= 1.0))
        throw DomainError(fmt::format("treatment probability must lie in [0, 1], got {}", treat_prob));
    if (!(med_effect_sd >= 0.0))
        throw DomainError(fmt::format("medicine effect sd must be >= 0, got {}", med_effect_sd));
    if (n_subjects < 3)
        throw DomainError(fmt::format("sample size must be >= 3, got {}", n_subjects));
    if (n_replicates < 1)
        throw DomainError(fmt::format("replicates must be >= 1, got {}", n_replicates));
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
    if (family == Family::Lognormal && !(baseline_mean - d > 0.0))
        throw DomainError(fmt::format(
            "lognormal family needs positive genotype means, got {}", baseline_mean - d));
}

ComponentParams component_params(const StudyConfig& config, Genotype qtl) {
    const double mean = config.baseline_mean + (minor_allele_count(qtl) - 1) * config.d;
    if (config.family == Family::Normal) {
        return {Family::Normal, mean, config.component_sd};
    }
    if (!(mean > 0.0)) {
        throw DomainError(fmt::format("lognormal component needs a positive mean, got {}", mean));
    }
    const double variance = config.component_sd * config.component_sd;
    const double log_var = std::log1p(variance / (mean * mean));
    return {Family::Lognormal, std::log(mean) - 0.5 * log_var, std::sqrt(log_var)};
}

double draw_underlying(const ComponentParams& params, RandomStream& rng) noexcept {
    const double z = params.location + params.scale * rng.standard_normal();
    return params.family == Family::Normal ? z : std::exp(z);
}

TreatmentOutcome treatment_outcome(double underlying, double threshold, bool accepted,
                                   double effect) noexcept {
    TreatmentOutcome out{underlying, underlying > threshold, false};
    if (out.affected && accepted) {
        out.treated = true;
        out.observed = underlying + effect;
    }
    return out;
}

TreatmentOutcome apply_treatment(double underlying, const StudyConfig& config,
                                 RandomStream& rng) noexcept {
    if (!(underlying > config.threshold)) {
        return {underlying, false, false};
    }
    const bool accepted = rng.bernoulli(config.treat_prob);
    const double effect =
        accepted ? rng.normal(config.med_effect_mean, config.med_effect_sd) : 0.0;
    return treatment_outcome(underlying, config.threshold, accepted, effect);
}

HaplotypeDistribution study_haplotypes(const StudyConfig& config) {
    return haplotype_distribution(config.p, delta_from_normalized(config.p, config.delta_prime));
}

void simulate_subjects(const StudyConfig& config, const HaplotypeDistribution& haplotypes,
                       const std::array<ComponentParams, 3>& components, RandomStream& rng,
                       std::vector<Subject>& out) {
    out.resize(static_cast<std::size_t>(config.n_subjects));
    for (auto& subject : out) {
        const GenotypePair pair = sample_genotype_pair(haplotypes, rng);
        const double underlying =
            draw_underlying(components[static_cast<std::size_t>(pair.qtl)], rng);
        const TreatmentOutcome t = apply_treatment(underlying, config, rng);
        subject = Subject{underlying, t.observed, pair.qtl, pair.marker, t.affected, t.treated};
    }
}

Dataset simulate_dataset(const StudyConfig& config, RandomStream& rng,
                         std::uint64_t replicate_index) {
    config.validate();
    const HaplotypeDistribution haplotypes = study_haplotypes(config);
    const std::array<ComponentParams, 3> components{
        component_params(config, Genotype::HomMajor), component_params(config, Genotype::Het),
        component_params(config, Genotype::HomMinor)};
    Dataset ds;
    ds.config = config;
    ds.replicate_index = replicate_index;
    simulate_subjects(config, haplotypes, components, rng, ds.subjects);
    return ds;
}

void write_dataset_csv(std::ostream& os, const Dataset& dataset) {
    os << "subject,qtl_genotype,marker_genotype,underlying,observed,affected,treated\n";
    std::size_t index = 1;
    for (const auto& s : dataset.subjects) {
        fmt::print(os, "{},{},{},{:.6f},{:.6f},{},{}\n", index++, qtl_label(s.qtl),
                   marker_label(s.marker), s.underlying, s.observed, s.affected ? 1 : 0,
                   s.treated ? 1 : 0);
    }
}

}  // namespace qtlpower
