#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qtlpower/genetics.hpp"
#include "qtlpower/trait_sim.hpp"

namespace qtlpower {

/// Analysis methods, in table column order.
enum class Method : unsigned char {
    AllUnderlying,
    AllObserved,
    OmitAffected,
    OmitTreated,
    TreatmentCovariate,
    ConstantAdjustment,
    LevyAdjustment,
};

inline constexpr std::array<Method, 7> kAllMethods{
    Method::AllUnderlying, Method::AllObserved,        Method::OmitAffected,
    Method::OmitTreated,   Method::TreatmentCovariate, Method::ConstantAdjustment,
    Method::LevyAdjustment};

/// CLI name: underlying, observed, omit-affected, omit-treated, covariate, constant, levy.
std::string_view method_name(Method m) noexcept;
/// Long column title used in Markdown tables.
std::string_view method_title(Method m) noexcept;
/// Throws DomainError listing the valid names.
Method parse_method(std::string_view name);

/// Location statistic for the constant adjustment.
enum class LocationEstimator : unsigned char { Mean, Median };

/// Trait values ready for a hypothesis test, grouped by marker genotype.
struct AnalysisSample {
    std::vector<double> values;
    std::vector<Genotype> groups;
    std::optional<std::vector<std::uint8_t>> covariate;
    std::optional<double> adjustment_estimate;
    /// Constant adjustment could not estimate the medicine effect.
    bool fallback = false;

    std::size_t size() const noexcept { return values.size(); }
};

AnalysisSample all_underlying(std::span<const Subject> subjects);
AnalysisSample all_observed(std::span<const Subject> subjects);
/// Keeps subjects with observed < threshold and not treated.
AnalysisSample omit_affected(std::span<const Subject> subjects, double threshold);
AnalysisSample omit_treated(std::span<const Subject> subjects);
AnalysisSample treatment_covariate(std::span<const Subject> subjects);

/// Shifts treated subjects by the estimated medicine effect
///   m = loc(observed | treated) - loc(observed | untreated, observed > threshold),
/// i.e. value = observed - m * treated. Empty groups fall back to m = 0 with
/// `fallback` set.
AnalysisSample constant_adjustment(std::span<const Subject> subjects, double threshold,
                                   LocationEstimator estimator);

/// Non-parametric residual adjustment. Residuals around the observed mean are
/// visited in ascending order (ties by subject index); a treated subject's
/// residual at rank k becomes the average of itself and the k-1 already
/// modified residuals below it.
AnalysisSample levy_adjustment(std::span<const Subject> subjects);

/// Dispatches on `method`; `estimator` only affects ConstantAdjustment.
AnalysisSample apply_method(Method method, const Dataset& dataset,
                            LocationEstimator estimator = LocationEstimator::Mean);

/// Median of a non-empty range (average of the middle pair for even sizes).
double median(std::vector<double> values);

}  // namespace qtlpower
