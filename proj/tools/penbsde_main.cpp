// penbsde run <config.yaml> [--seed N] [--out DIR] [--format json|csv] [--jobs N] [--timings]
// penbsde list-families
//
// Exit status: 0 every check passed, 1 some check failed, 2 bad configuration or usage.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "penbsde/harness/config.hpp"
#include "penbsde/harness/experiment.hpp"
#include "penbsde/harness/report.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

}  // namespace

int main(int argc, char** argv) {
    using namespace penbsde::harness;

    CLI::App app{"Penalized and reflected BSDE experiments on the binomial lattice"};
    app.require_subcommand(1);

    std::string configPath;
    std::optional<unsigned long long> seed;
    std::optional<std::string> outDir;
    std::optional<std::string> format;
    std::size_t jobs = 1;
    bool timings = false;

    CLI::App* run = app.add_subcommand("run", "Run an experiment configuration");
    run->add_option("config", configPath, "YAML configuration")->required();
    run->add_option("--seed", seed, "Override the configured seed");
    run->add_option("--out", outDir, "Write the report into this directory");
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timings", timings, "Include per-check wall-clock seconds");

    CLI::App* list = app.add_subcommand("list-families", "Print the experiment families and their suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfig;
    }

    if (list->parsed()) {
        for (const auto& family : listFamilies()) {
            std::cout << family << ':';
            for (const auto& suite : familySuites(family)) std::cout << ' ' << suite;
            std::cout << '\n';
        }
        return kPass;
    }

    ExperimentConfig config;
    try {
        config = loadConfig(configPath);
        if (seed) config.seed = *seed;
        if (outDir) config.outputDir = *outDir;
        if (format) config.format = *format;
        validateConfig(config, configPath);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const penbsde::Error& e) {
        std::cerr << "config error: " << configPath << ": " << e.what() << '\n';
        return kConfig;
    }

    const RunReport report = runExperiment(config, jobs);
    const std::string text = config.format == "csv" ? emitCsv(report, timings) : emitJson(report, timings);
    if (config.outputDir.empty()) {
        std::cout << text;
    } else {
        try {
            const std::string path = writeReport(report, config.outputDir, config.format, timings);
            std::cerr << "wrote " << path << '\n';
        } catch (const penbsde::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kConfig;
        }
    }
    for (const auto& check : report.checks)
        if (!check.passed) std::cerr << "FAIL " << check.name << '\n';
    return report.passed() ? kPass : kFail;
}
