#pragma once

// Experiment configuration, read from a YAML file.
//
//   name: constant-demo
//   family: constant-data          # see listFamilies()
//   grid: { steps: 1000, horizon: 1.0 }
//   intensities: [2.0]             # lambda, or a ladder
//   bounds: [1.0]                  # constraint penalty m, or a ladder
//   seed: 7
//   paths: 100000
//   instances: 20
//   suites: [closed-form]          # omit for every suite of the family
//   tolerances: { identity: 1.0e-12, closed-form: 5.0e-3 }
//   american-put: { spot: 100, strike: 100, volatility: 0.2, rate: 0.05 }
//   constraint: { lower: -0.5, upper: 0.5 }
//   switching: { cost: 0.1 }
//   output: { dir: reports, format: json }

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "penbsde/errors.hpp"

namespace penbsde::harness {

/// Configuration problem with the offending field path and source line (0 if unknown).
class ConfigError : public Error {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& field, const std::string& message);

    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
    std::size_t line_;
};

struct Tolerances {
    double identity = 1e-12;
    double oracle = 1e-12;
    double closedForm = 5e-3;
    double closedFormFine = 1e-3;
    double ladder = 1e-10;
    double policy = 1e-10;
    double ode = 5e-3;
    double sigmas = 3.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string family;
    std::size_t steps = 8;
    double horizon = 1.0;
    std::vector<double> intensities{2.0};
    std::vector<double> bounds{1.0};
    std::uint64_t seed = 1;
    std::size_t paths = 100000;
    std::size_t instances = 20;
    /// Absent: every suite of the family. Present and empty: nothing runs.
    std::optional<std::vector<std::string>> suites;
    Tolerances tolerances;

    double spot = 100.0;
    double strike = 100.0;
    double volatility = 0.2;
    /// Discount rate of the put; 0 makes early exercise worthless.
    double putRate = 0.05;
    double constraintLower = -0.5;
    double constraintUpper = 0.5;
    double switchingCost = 0.1;

    std::string outputDir;
    std::string format = "json";
};

ExperimentConfig parseConfig(const std::string& text, const std::string& source = "<string>");
ExperimentConfig loadConfig(const std::string& path);

/// Re-checks the numeric guards of the solvers; throws ConfigError.
void validateConfig(const ExperimentConfig& config, const std::string& source = "<config>");

}  // namespace penbsde::harness
