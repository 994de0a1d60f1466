#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "qtlpower/errors.hpp"
#include "qtlpower/report.hpp"
#include "qtlpower/trait_sim.hpp"

namespace qtlpower::cli {

namespace {

constexpr std::uint64_t kFallbackSeed = 20240917;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& raw) {
    const std::string text = trim(raw);
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        }
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        const double n = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(text);
        const double d = std::stod(den, &used);
        if (used != den.size() || d == 0.0) throw std::invalid_argument(text);
        return n / d;
    } catch (const std::exception&) {
        throw UsageError(fmt::format("not a number: '{}'", text));
    }
}

template <typename Int>
Int parse_integer(const std::string& raw, std::string_view flag) {
    const std::string text = trim(raw);
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size() || v < 0) throw std::invalid_argument(text);
        return static_cast<Int>(v);
    } catch (const std::exception&) {
        throw UsageError(fmt::format("--{} expects a nonnegative integer, got '{}'", flag, text));
    }
}

std::uint64_t parse_seed(const std::string& raw) {
    const std::string text = trim(raw);
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used, 0);
        if (used != text.size() || text.starts_with('-')) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw UsageError(fmt::format("seed must be a 64-bit unsigned integer, got '{}'", text));
    }
}

double single_number(const std::string& text, std::string_view flag) {
    const auto values = parse_number_list(text);
    if (values.size() != 1) throw UsageError(fmt::format("--{} takes a single value", flag));
    return values.front();
}

using Setter = std::function<void(RunSpec&, const std::string&)>;

std::string option_help(Command command, const std::string& key) {
    static const std::map<std::string, std::string> shared{
        {"p", "QTL allele frequency; comma list, e.g. 0.1,0.3,0.5"},
        {"d", "Genotype effect on the trait (mm Hg); comma list"},
        {"delta-prime", "Normalized LD in [0,1]; comma list, fractions allowed (2/3)"},
        {"family", "Trait family: normal or lognormal"},
        {"methods", "Comma list of analysis methods, or 'all'"},
        {"n", "Subjects per study"},
        {"reps", "Monte Carlo replicates"},
        {"alpha", "Significance level"},
        {"seed", "Master RNG seed (default $QTLPOWER_SEED or 20240917)"},
        {"workers", "Worker threads; results do not depend on this"},
        {"format", "csv, markdown or both"},
        {"out", "Output path (prefix when --format both); stdout if omitted"},
        {"replicate", "Replicate index whose dataset is dumped"},
        {"mu", "Trait mean"},
        {"sigma", "Trait standard deviation"},
        {"threshold", "Treatment threshold (treated if above)"},
        {"treat-prob", "Probability an affected subject is treated"},
        {"nu", "Mean medicine effect"},
        {"tau", "Standard deviation of the medicine effect"},
    };
    if (command == Command::Simulate) {
        if (key == "p" || key == "d" || key == "delta-prime") {
            return "Single value for " + key + " (defaults 0.3, 10, 1)";
        }
        if (key == "out") return "Output CSV path; stdout if omitted";
    }
    const auto it = shared.find(key);
    return it == shared.end() ? std::string{} : it->second;
}

// Keys accepted by each subcommand, shared by flags and the config file.
std::map<std::string, Setter> grid_setters() {
    return {
        {"p", [](RunSpec& s, const std::string& v) { s.grid.ps = parse_number_list(v); }},
        {"d", [](RunSpec& s, const std::string& v) { s.grid.ds = parse_number_list(v); }},
        {"delta-prime",
         [](RunSpec& s, const std::string& v) { s.grid.delta_primes = parse_number_list(v); }},
        {"family",
         [](RunSpec& s, const std::string& v) {
             try {
                 s.grid.family = parse_family(trim(v));
             } catch (const DomainError& e) {
                 throw UsageError(e.what());
             }
         }},
        {"methods",
         [](RunSpec& s, const std::string& v) {
             s.grid.methods.clear();
             if (trim(v) == "all") return;  // empty list selects the family default
             std::istringstream ss(v);
             std::string name;
             while (std::getline(ss, name, ',')) {
                 try {
                     s.grid.methods.push_back(parse_method(trim(name)));
                 } catch (const DomainError& e) {
                     throw UsageError(e.what());
                 }
             }
         }},
        {"reps",
         [](RunSpec& s, const std::string& v) {
             s.grid.base.n_replicates = parse_integer<int>(v, "reps");
         }},
        {"n",
         [](RunSpec& s, const std::string& v) {
             s.grid.base.n_subjects = parse_integer<int>(v, "n");
         }},
        {"alpha",
         [](RunSpec& s, const std::string& v) { s.grid.base.alpha = single_number(v, "alpha"); }},
        {"seed", [](RunSpec& s, const std::string& v) { s.grid.base.master_seed = parse_seed(v); }},
        {"workers",
         [](RunSpec& s, const std::string& v) { s.grid.workers = parse_integer<int>(v, "workers"); }},
        {"out", [](RunSpec& s, const std::string& v) { s.out = trim(v); }},
        {"format",
         [](RunSpec& s, const std::string& v) {
             const std::string f = trim(v);
             if (f == "csv") s.format = OutputFormat::Csv;
             else if (f == "markdown") s.format = OutputFormat::Markdown;
             else if (f == "both") s.format = OutputFormat::Both;
             else throw UsageError(fmt::format("--format must be csv, markdown or both, got '{}'", f));
         }},
    };
}

std::map<std::string, Setter> simulate_setters() {
    auto all = grid_setters();
    std::map<std::string, Setter> out;
    for (const char* key : {"p", "d", "delta-prime", "family", "n", "seed", "out"}) {
        out[key] = all[key];
    }
    out["replicate"] = [](RunSpec& s, const std::string& v) {
        s.replicate = parse_integer<std::uint64_t>(v, "replicate");
    };
    return out;
}

std::map<std::string, Setter> estimator_setters() {
    auto number = [](double EstimatorConfig::*field, const char* flag) {
        return [field, flag](RunSpec& s, const std::string& v) {
            s.estimator.*field = single_number(v, flag);
        };
    };
    return {
        {"n", [](RunSpec& s, const std::string& v) { s.estimator.n = parse_integer<int>(v, "n"); }},
        {"mu", number(&EstimatorConfig::mu, "mu")},
        {"sigma", number(&EstimatorConfig::sigma, "sigma")},
        {"threshold", number(&EstimatorConfig::threshold, "threshold")},
        {"treat-prob", number(&EstimatorConfig::treat_prob, "treat-prob")},
        {"nu", number(&EstimatorConfig::nu, "nu")},
        {"tau", number(&EstimatorConfig::tau, "tau")},
        {"reps",
         [](RunSpec& s, const std::string& v) {
             s.estimator.replicates = parse_integer<int>(v, "reps");
         }},
        {"seed", [](RunSpec& s, const std::string& v) { s.estimator.seed = parse_seed(v); }},
        {"workers",
         [](RunSpec& s, const std::string& v) {
             s.estimator.workers = parse_integer<int>(v, "workers");
         }},
    };
}

void validate_power(const RunSpec& request) {
    const GridSpec& g = request.grid;
    if (g.ps.empty() || g.ds.empty() || g.delta_primes.empty()) {
        throw UsageError("--p, --d and --delta-prime need at least one value");
    }
    try {
        for (Method m : g.methods) check_method_supported(g.family, m);
        for (double dp : g.delta_primes) {
            for (double p : g.ps) {
                for (double d : g.ds) {
                    StudyConfig c = g.base;
                    c.family = g.family;
                    c.delta_prime = dp;
                    c.p = p;
                    c.d = d;
                    c.validate();
                }
            }
        }
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (g.workers < 1) throw UsageError("--workers must be >= 1");
}

StudyConfig simulate_config(const RunSpec& request) {
    const GridSpec& g = request.grid;
    if (g.ps.size() != 1 || g.ds.size() != 1 || g.delta_primes.size() != 1) {
        throw UsageError("simulate takes exactly one value each for --p, --d and --delta-prime");
    }
    StudyConfig c = g.base;
    c.family = g.family;
    c.p = g.ps.front();
    c.d = g.ds.front();
    c.delta_prime = g.delta_primes.front();
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return c;
}

}  // namespace

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QTLPOWER_SEED"); env != nullptr && *env != '\0') {
        return parse_seed(env);
    }
    return kFallbackSeed;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) throw UsageError(fmt::format("empty entry in list '{}'", text));
        out.push_back(parse_number(item));
    }
    if (out.empty()) throw UsageError("empty value list");
    return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError(fmt::format("cannot open config file '{}'", path));
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(fmt::format("{}:{}: expected key=value", path, line_no));
        }
        std::string key = trim(line.substr(0, eq));
        if (key.starts_with("--")) key.erase(0, 2);
        entries.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return entries;
}

RunSpec parse_run_spec(const std::vector<std::string>& args, std::ostream& help_out) {
    RunSpec request;
    request.grid.base.master_seed = default_seed();
    request.estimator.seed = request.grid.base.master_seed;

    CLI::App app{"Monte Carlo power of single-marker QTL tests under treated traits", "qtlpower"};
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        Command command;
        std::map<std::string, Setter> setters;
    };
    std::vector<Sub> subs{
        {app.add_subcommand("power", "Estimate power over a (delta', p, d) grid"), Command::Power,
         grid_setters()},
        {app.add_subcommand("simulate", "Dump one simulated dataset as CSV"), Command::Simulate,
         simulate_setters()},
        {app.add_subcommand("verify-estimator", "Monte Carlo check of the medicine-effect estimator"),
         Command::VerifyEstimator, estimator_setters()},
        {app.add_subcommand("selfcheck", "Run the built-in numeric fixture suite"),
         Command::SelfCheck, {}},
    };

    std::optional<std::string> config_path;
    // Flag values are collected first so the config file can be applied beneath them.
    std::vector<std::pair<std::string, std::string>> flag_values;
    for (auto& sub : subs) {
        if (sub.command != Command::SelfCheck) {
            sub.app->add_option("--config", config_path, "Flat key=value file of flag defaults");
        }
        for (const auto& [key, setter] : sub.setters) {
            std::string names = "--" + key;
            if (key == "methods") names += ",--method";
            const auto help = option_help(sub.command, key);
            sub.app->add_option_function<std::string>(
                names, [&flag_values, key = key](const std::string& v) {
                    flag_values.emplace_back(key, v);
                }, help);
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, help_out, help_out);
        request.help_shown = true;
        return request;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, help_out, help_out);
        request.help_shown = true;
        return request;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const Sub* chosen = nullptr;
    for (const auto& sub : subs) {
        if (sub.app->parsed()) chosen = &sub;
    }
    if (chosen == nullptr) throw UsageError("a subcommand is required");
    request.command = chosen->command;
    if (request.command == Command::Simulate) {
        // One dataset needs one cell; start from a representative one.
        request.grid.ps = {0.3};
        request.grid.ds = {10.0};
        request.grid.delta_primes = {1.0};
    }

    auto apply = [&](const std::string& key, const std::string& value, bool from_file) {
        const auto it = chosen->setters.find(key);
        if (it == chosen->setters.end()) {
            throw UsageError(fmt::format("unknown {} '{}' for {}", from_file ? "config key" : "flag",
                                         key, chosen->app->get_name()));
        }
        it->second(request, value);
    };
    if (config_path) {
        for (const auto& [key, value] : read_config_file(*config_path)) apply(key, value, true);
    }
    for (const auto& [key, value] : flag_values) apply(key, value, false);

    switch (request.command) {
        case Command::Power: validate_power(request); break;
        case Command::Simulate: simulate_config(request); break;
        case Command::VerifyEstimator:
            if (request.estimator.workers < 1) throw UsageError("--workers must be >= 1");
            break;
        case Command::SelfCheck: break;
    }
    return request;
}

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
    return out;
}

void run_power(const RunSpec& request, std::ostream& out) {
    const PowerTable table = run_grid(request.grid);
    const bool csv = request.format != OutputFormat::Markdown;
    const bool md = request.format != OutputFormat::Csv;
    if (!request.out) {
        if (csv) emit_csv(out, table);
        if (csv && md) out << '\n';
        if (md) emit_markdown(out, table);
        return;
    }
    if (request.format == OutputFormat::Both) {
        auto csv_file = open_output(*request.out + ".csv");
        emit_csv(csv_file, table);
        auto md_file = open_output(*request.out + ".md");
        emit_markdown(md_file, table);
        return;
    }
    auto file = open_output(*request.out);
    if (csv) emit_csv(file, table);
    else emit_markdown(file, table);
}

void run_simulate(const RunSpec& request, std::ostream& out) {
    const StudyConfig config = simulate_config(request);
    RandomStream rng(replicate_seed(config.master_seed, 0, request.replicate));
    const Dataset ds = simulate_dataset(config, rng, request.replicate);
    if (request.out) {
        auto file = open_output(*request.out);
        write_dataset_csv(file, ds);
    } else {
        write_dataset_csv(out, ds);
    }
}

void run_verify(const RunSpec& request, std::ostream& out) {
    const EstimatorReport r = verify_estimator(request.estimator);
    const EstimatorConfig& c = request.estimator;
    fmt::print(out, "n: {}\n", c.n);
    fmt::print(out, "nu: {}\n", c.nu);
    fmt::print(out, "tau: {}\n", c.tau);
    fmt::print(out, "replicates: {}\n", r.replicates);
    fmt::print(out, "discarded: {}\n", r.discarded);
    fmt::print(out, "mean_nu_hat: {:.6f}\n", r.mean);
    fmt::print(out, "bias: {:.6f}\n", r.mean - c.nu);
    fmt::print(out, "var_nu_hat: {:.6f}\n", r.variance);
    fmt::print(out, "predicted_var: {:.6f}\n", r.predicted_variance);
    fmt::print(out, "predicted_var_untruncated: {:.6f}\n", r.predicted_variance_untruncated);
    fmt::print(out, "var_ratio: {:.6f}\n", r.variance / r.predicted_variance);
    fmt::print(out, "truncated_mean: {:.6f}\n", r.truncated_mean);
    fmt::print(out, "truncated_var: {:.6f}\n", r.truncated_variance);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunSpec request;
    try {
        request = parse_run_spec(args, out);
    } catch (const UsageError& e) {
        fmt::print(err, "qtlpower: {}\nRun with --help for usage.\n", e.what());
        return 1;
    }
    if (request.help_shown) return 0;
    try {
        switch (request.command) {
            case Command::Power: run_power(request, out); break;
            case Command::Simulate: run_simulate(request, out); break;
            case Command::VerifyEstimator: run_verify(request, out); break;
            case Command::SelfCheck: return run_selfcheck(out) == 0 ? 0 : 2;
        }
    } catch (const DomainError& e) {
        fmt::print(err, "qtlpower: {}\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        fmt::print(err, "qtlpower: {}\n", e.what());
        return 2;
    }
    return 0;
}

}  // namespace qtlpower::cli
