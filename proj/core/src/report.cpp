#include "qtlpower/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qtlpower/errors.hpp"

namespace qtlpower {

namespace {

std::size_t method_rank(Method m) { return static_cast<std::size_t>(m); }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(fmt::format("malformed {} '{}' in power CSV", what, s));
    }
}

int to_int(const std::string& s, std::string_view what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError(fmt::format("malformed {} '{}' in power CSV", what, s));
    }
}

}  // namespace

std::vector<CellResult> sorted_rows(const PowerTable& table) {
    std::vector<CellResult> rows = table.cells;
    std::stable_sort(rows.begin(), rows.end(), [](const CellResult& a, const CellResult& b) {
        if (a.config.family != b.config.family) return a.config.family < b.config.family;
        if (a.config.delta_prime != b.config.delta_prime)
            return a.config.delta_prime > b.config.delta_prime;
        if (a.config.p != b.config.p) return a.config.p < b.config.p;
        if (a.config.d != b.config.d) return a.config.d < b.config.d;
        return method_rank(a.method) < method_rank(b.method);
    });
    return rows;
}

void emit_csv(std::ostream& os, const PowerTable& table) {
    os << kPowerCsvHeader << '\n';
    for (const auto& row : sorted_rows(table)) {
        fmt::print(os, "{},{:.4f},{},{},{},{:.4f},{},{},{},{},{:.4f}\n",
                   family_name(row.config.family), row.config.delta_prime, row.config.p,
                   row.config.d, method_name(row.method), row.power, row.rejections,
                   row.replicates, row.non_testable, row.fallbacks, row.mc_std_err);
    }
}

std::vector<CellResult> read_power_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kPowerCsvHeader) {
        throw DomainError("power CSV is missing the expected header");
    }
    std::vector<CellResult> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 11) {
            throw DomainError(fmt::format("power CSV row has {} fields, expected 11", f.size()));
        }
        CellResult row;
        row.config.family = parse_family(f[0]);
        row.config.delta_prime = to_double(f[1], "delta_prime");
        row.config.p = to_double(f[2], "p");
        row.config.d = to_double(f[3], "d");
        row.method = parse_method(f[4]);
        row.power = to_double(f[5], "power");
        row.rejections = to_int(f[6], "rejections");
        row.replicates = to_int(f[7], "replicates");
        row.non_testable = to_int(f[8], "non_testable");
        row.fallbacks = to_int(f[9], "fallbacks");
        row.mc_std_err = to_double(f[10], "mc_stderr");
        row.config.n_replicates = row.replicates;
        rows.push_back(row);
    }
    return rows;
}

std::string format_percent(int rejections, int replicates) {
    if (replicates <= 0) throw DomainError("percentage needs a positive replicate count");
    // Tenths of a percent, exactly, with ties going to the even neighbour.
    const std::int64_t num = static_cast<std::int64_t>(rejections) * 1000;
    const std::int64_t den = replicates;
    std::int64_t tenths = num / den;
    const std::int64_t twice_rem = 2 * (num % den);
    if (twice_rem > den || (twice_rem == den && tenths % 2 == 1)) ++tenths;
    return fmt::format("{}.{}", tenths / 10, tenths % 10);
}

std::string format_delta_prime(double delta_prime) {
    if (std::fabs(delta_prime - 1.0) < 1e-9) return "1";
    if (std::fabs(delta_prime - 2.0 / 3.0) < 1e-9) return "2/3";
    if (std::fabs(delta_prime - 1.0 / 3.0) < 1e-9) return "1/3";
    if (delta_prime == 0.0) return "0";
    return fmt::format("{:.4f}", delta_prime);
}

void emit_markdown(std::ostream& os, const PowerTable& table) {
    std::vector<double> delta_primes = table.delta_primes;
    std::sort(delta_primes.begin(), delta_primes.end(), std::greater<>());
    std::vector<double> ps = table.ps;
    std::sort(ps.begin(), ps.end());
    std::vector<double> ds = table.ds;
    std::sort(ds.begin(), ds.end());
    std::vector<Method> methods = table.methods;
    std::sort(methods.begin(), methods.end(),
              [](Method a, Method b) { return method_rank(a) < method_rank(b); });

    bool first = true;
    for (double dp : delta_primes) {
        if (!first) os << '\n';
        first = false;
        fmt::print(os, "Powers (%) obtained by different methods, {} family, delta' = {}\n\n",
                   family_name(table.family), format_delta_prime(dp));
        os << "| p | d (mm Hg) |";
        for (Method m : methods) fmt::print(os, " {} |", method_title(m));
        os << "\n|---|---|";
        for (std::size_t i = 0; i < methods.size(); ++i) os << "---|";
        os << '\n';
        for (double p : ps) {
            for (double d : ds) {
                fmt::print(os, "| {} | {} |", p, d);
                for (Method m : methods) {
                    const CellResult& cell = table.at(dp, p, d, m);
                    fmt::print(os, " {} |", format_percent(cell.rejections, cell.replicates));
                }
                os << '\n';
            }
        }
    }
}

}  // namespace qtlpower
