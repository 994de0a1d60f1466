#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtlpower/power_engine.hpp"

namespace qtlpower::cli {

/// Malformed command line or configuration; exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Power, Simulate, VerifyEstimator, SelfCheck };
enum class OutputFormat { Csv, Markdown, Both };

struct RunSpec {
    Command command = Command::Power;
    GridSpec grid;
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> out;
    std::uint64_t replicate = 0;  // simulate only
    EstimatorConfig estimator;     // verify-estimator only
    bool help_shown = false;
};

/// Default seed: $QTLPOWER_SEED when set, otherwise a fixed constant.
std::uint64_t default_seed();

/// Parses "0.1,0.3" style lists; entries may be fractions such as "2/3".
std::vector<double> parse_number_list(const std::string& text);

/// Flat `key=value` lines; `#` starts a comment. Keys are flag names without
/// the leading dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Parses argv (without the program name). Config-file values apply first and
/// command-line flags override them. Throws UsageError.
RunSpec parse_run_spec(const std::vector<std::string>& args, std::ostream& help_out);

/// Runs the tool; returns the process exit code (0 ok, 1 usage, 2 runtime).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Built-in fixture suite; prints one line per check and returns the failure count.
int run_selfcheck(std::ostream& out);

}  // namespace qtlpower::cli
