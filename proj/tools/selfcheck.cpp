#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cli.hpp"
#include "qtlpower/adjustments.hpp"
#include "qtlpower/genetics.hpp"
#include "qtlpower/special_functions.hpp"
#include "qtlpower/stattests.hpp"

namespace qtlpower::cli {

namespace {

struct Check {
    std::string name;
    std::function<double()> compute;
    double expected;
    double tolerance;
};

AnalysisSample grouped(const std::vector<double>& values, const std::vector<int>& groups) {
    AnalysisSample s;
    s.values = values;
    for (int g : groups) s.groups.push_back(static_cast<Genotype>(g));
    return s;
}

std::vector<Subject> subjects(const std::vector<double>& observed, const std::vector<int>& treated) {
    std::vector<Subject> out;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        Subject s;
        s.observed = observed[i];
        s.underlying = observed[i];
        s.treated = treated[i] != 0;
        s.affected = s.treated || observed[i] > 140.0;
        out.push_back(s);
    }
    return out;
}

}  // namespace

int run_selfcheck(std::ostream& out) {
    const std::vector<Check> checks{
        {"reg_inc_beta(2,3,0.5)", [] { return reg_inc_beta(2, 3, 0.5); }, 0.6875, 1e-10},
        {"reg_inc_beta(4,4,0.5)", [] { return reg_inc_beta(4, 4, 0.5); }, 0.5, 1e-10},
        {"f_sf(0,3,7)", [] { return f_sf(0, 3, 7); }, 1.0, 1e-12},
        {"f_sf(1,5,5)", [] { return f_sf(1, 5, 5); }, 0.5, 1e-10},
        {"f_sf(8,1,2)", [] { return f_sf(8, 1, 2); }, 1.0 - std::sqrt(0.8), 1e-10},
        {"f_sf(4.1028,2,10)", [] { return f_sf(4.1028, 2, 10); }, 0.05, 1e-4},
        {"chi_square_sf(0,2)", [] { return chi_square_sf(0, 2); }, 1.0, 1e-12},
        {"chi_square_sf(4.6052,2)", [] { return chi_square_sf(4.6052, 2); }, 0.1, 1e-4},
        {"chi_square_sf(3.8415,1)", [] { return chi_square_sf(3.8415, 1); }, 0.05, 1e-4},
        {"chi_square_sf(7.8147,3)", [] { return chi_square_sf(7.8147, 3); }, 0.05, 1e-4},
        {"anova {1,2} vs {3,4}: F",
         [] { return one_way_anova(grouped({1, 2, 3, 4}, {0, 0, 1, 1})).statistic; }, 8.0, 1e-12},
        {"anova {1,2} vs {3,4}: p",
         [] { return *one_way_anova(grouped({1, 2, 3, 4}, {0, 0, 1, 1})).p_value; },
         1.0 - std::sqrt(0.8), 1e-10},
        {"kruskal-wallis {1,2},{3,4},{5,6}: H",
         [] { return kruskal_wallis(grouped({1, 2, 3, 4, 5, 6}, {0, 0, 1, 1, 2, 2})).statistic; },
         32.0 / 7.0, 1e-12},
        {"kruskal-wallis {1,2},{3,4},{5,6}: p",
         [] { return *kruskal_wallis(grouped({1, 2, 3, 4, 5, 6}, {0, 0, 1, 1, 2, 2})).p_value; },
         std::exp(-16.0 / 7.0), 1e-10},
        {"levy {99,120,150} lowest residual treated",
         [] {
             const auto s = subjects({99, 120, 150}, {1, 0, 0});
             return levy_adjustment(s).values[0];
         },
         123.0, 1e-12},
        {"constant adjustment estimate",
         [] {
             const auto s = subjects({130, 135, 145, 150}, {1, 1, 0, 0});
             return *constant_adjustment(s, 140.0, LocationEstimator::Mean).adjustment_estimate;
         },
         -15.0, 1e-12},
        {"haplotype pAB (p=0.3, delta=0.14)", [] { return haplotype_distribution(0.3, 0.14).pAB; },
         0.63, 1e-12},
        {"delta from delta'=2/3 at p=0.3", [] { return delta_from_normalized(0.3, 2.0 / 3.0); },
         0.14, 1e-12},
    };

    int failures = 0;
    for (const auto& check : checks) {
        double value = std::nan("");
        std::string error;
        try {
            value = check.compute();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const bool ok = error.empty() && std::fabs(value - check.expected) <= check.tolerance;
        if (!ok) ++failures;
        if (error.empty()) {
            fmt::print(out, "{} {}: got {:.12g}, expected {:.12g} (tol {:g})\n", ok ? "ok  " : "FAIL",
                       check.name, value, check.expected, check.tolerance);
        } else {
            fmt::print(out, "FAIL {}: {}\n", check.name, error);
        }
    }
    fmt::print(out, "{} checks, {} failed\n", checks.size(), failures);
    return failures;
}

}  // namespace qtlpower::cli
