#include "qtlpower/adjustments.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "qtlpower/errors.hpp"

namespace qtlpower {

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::AllUnderlying: return "underlying";
        case Method::AllObserved: return "observed";
        case Method::OmitAffected: return "omit-affected";
        case Method::OmitTreated: return "omit-treated";
        case Method::TreatmentCovariate: return "covariate";
        case Method::ConstantAdjustment: return "constant";
        case Method::LevyAdjustment: return "levy";
    }
    return "?";
}

std::string_view method_title(Method m) noexcept {
    switch (m) {
        case Method::AllUnderlying: return "All underlying";
        case Method::AllObserved: return "All observed";
        case Method::OmitAffected: return "Omit affected subjects";
        case Method::OmitTreated: return "Omit treated subjects";
        case Method::TreatmentCovariate: return "Treatment as covariate";
        case Method::ConstantAdjustment: return "Constant adjustment";
        case Method::LevyAdjustment: return "Non-parametric adjustment";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    std::vector<std::string_view> names;
    for (Method m : kAllMethods) names.push_back(method_name(m));
    throw DomainError(fmt::format("unknown method '{}' (valid: {})", name, fmt::join(names, ", ")));
}

namespace {

template <typename Keep, typename Value>
AnalysisSample collect(std::span<const Subject> subjects, Keep keep, Value value) {
    AnalysisSample out;
    out.values.reserve(subjects.size());
    out.groups.reserve(subjects.size());
    for (const auto& s : subjects) {
        if (!keep(s)) continue;
        out.values.push_back(value(s));
        out.groups.push_back(s.marker);
    }
    return out;
}

constexpr auto keep_all = [](const Subject&) { return true; };
constexpr auto observed_of = [](const Subject& s) { return s.observed; };

double mean(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of an empty sample");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

AnalysisSample all_underlying(std::span<const Subject> subjects) {
    return collect(subjects, keep_all, [](const Subject& s) { return s.underlying; });
}

AnalysisSample all_observed(std::span<const Subject> subjects) {
    return collect(subjects, keep_all, observed_of);
}

AnalysisSample omit_affected(std::span<const Subject> subjects, double threshold) {
    return collect(
        subjects, [threshold](const Subject& s) { return s.observed < threshold && !s.treated; },
        observed_of);
}

AnalysisSample omit_treated(std::span<const Subject> subjects) {
    return collect(subjects, [](const Subject& s) { return !s.treated; }, observed_of);
}

AnalysisSample treatment_covariate(std::span<const Subject> subjects) {
    AnalysisSample out = all_observed(subjects);
    std::vector<std::uint8_t> covariate;
    covariate.reserve(subjects.size());
    for (const auto& s : subjects) covariate.push_back(s.treated ? 1 : 0);
    out.covariate = std::move(covariate);
    return out;
}

AnalysisSample constant_adjustment(std::span<const Subject> subjects, double threshold,
                                   LocationEstimator estimator) {
    std::vector<double> treated;
    std::vector<double> affected_untreated;
    for (const auto& s : subjects) {
        if (s.treated) {
            treated.push_back(s.observed);
        } else if (s.observed > threshold) {
            affected_untreated.push_back(s.observed);
        }
    }

    AnalysisSample out = all_observed(subjects);
    if (treated.empty() || affected_untreated.empty()) {
        out.adjustment_estimate = 0.0;
        out.fallback = true;
        return out;
    }

    const auto location = [estimator](std::vector<double>& v) {
        return estimator == LocationEstimator::Mean ? mean(v) : median(std::move(v));
    };
    const double estimate = location(treated) - location(affected_untreated);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        if (subjects[i].treated) out.values[i] -= estimate;
    }
    out.adjustment_estimate = estimate;
    return out;
}

AnalysisSample levy_adjustment(std::span<const Subject> subjects) {
    AnalysisSample out = all_observed(subjects);
    const std::size_t n = subjects.size();
    if (n == 0) return out;

    const double center = mean(out.values);
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = out.values[i] - center;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return residual[a] > residual[b]; });

    // Running sum of modified residuals at ranks below k.
    double prefix = 0.0;
    for (std::size_t rank = 0; rank < n; ++rank) {
        const std::size_t i = order[rank];
        double modified = residual[i];
        if (subjects[i].treated) {
            modified = (residual[i] + prefix) / static_cast<double>(rank + 1);
            out.values[i] = center + modified;
        }
        prefix += modified;
    }
    return out;
}

AnalysisSample apply_method(Method method, const Dataset& dataset, LocationEstimator estimator) {
    const std::span<const Subject> subjects(dataset.subjects);
    switch (method) {
        case Method::AllUnderlying: return all_underlying(subjects);
        case Method::AllObserved: return all_observed(subjects);
        case Method::OmitAffected: return omit_affected(subjects, dataset.config.threshold);
        case Method::OmitTreated: return omit_treated(subjects);
        case Method::TreatmentCovariate: return treatment_covariate(subjects);
        case Method::ConstantAdjustment:
            return constant_adjustment(subjects, dataset.config.threshold, estimator);
        case Method::LevyAdjustment: return levy_adjustment(subjects);
    }
    throw DomainError("unknown method");
}

}  // namespace qtlpower
