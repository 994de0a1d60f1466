#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qtlpower/power_engine.hpp"

namespace qtlpower {

inline constexpr std::string_view kPowerCsvHeader =
    "family,delta_prime,p,d,method,power,rejections,replicates,non_testable,fallbacks,mc_stderr";

/// Table rows ordered by delta' descending, then p, d and method column order.
std::vector<CellResult> sorted_rows(const PowerTable& table);

/// One CSV row per (cell, method); powers and delta' with four decimals.
void emit_csv(std::ostream& os, const PowerTable& table);

/// Parses CSV written by emit_csv. Throws DomainError on malformed input.
std::vector<CellResult> read_power_csv(std::istream& is);

/// rejections / replicates as a percentage with one decimal, rounded half to even.
std::string format_percent(int rejections, int replicates);

/// "1", "2/3", "1/3" for the study's LD levels, else four decimals.
std::string format_delta_prime(double delta_prime);

/// One Markdown table per delta' value: rows p x d, one column per method.
void emit_markdown(std::ostream& os, const PowerTable& table);

}  // namespace qtlpower
