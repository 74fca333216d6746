#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "penbsde/harness/config.hpp"
#include "penbsde/harness/experiment.hpp"
#include "penbsde/harness/report.hpp"

using namespace penbsde::harness;

namespace {

ConfigError configErrorOf(const std::string& text) {
    try {
        parseConfig(text, "test.yaml");
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a ConfigError";
    return ConfigError("", 0, "", "");
}

RunReport sampleReport() {
    RunReport r;
    r.experiment = "sample";
    r.family = "constant-data";
    r.seed = 99;
    r.checks.push_back({"a/one", 0.1, 1.0 / 3.0, "closed-form", 1e-12, true, 0.25});
    r.checks.push_back({"a/two", -2.5e-17, 0.0, "identity", 5e-3, false, 1.5});
    return r;
}

}  // namespace

TEST(Config, DefaultsAndKeys) {
    const ExperimentConfig c = parseConfig(R"(
name: demo
family: american-put
grid: { steps: 50, horizon: 0.5 }
intensities: [1, 2, 4]
seed: 12
paths: 1000
suites: [binomial]
tolerances: { ladder: 1.0e-9, sigmas: 4 }
american-put: { spot: 90, strike: 100, volatility: 0.3, rate: 0.02 }
output: { dir: out, format: csv }
)");
    EXPECT_EQ(c.name, "demo");
    EXPECT_EQ(c.steps, 50u);
    EXPECT_DOUBLE_EQ(c.horizon, 0.5);
    EXPECT_EQ(c.intensities, (std::vector<double>{1, 2, 4}));
    EXPECT_EQ(c.bounds, std::vector<double>{1.0});
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.paths, 1000u);
    ASSERT_TRUE(c.suites.has_value());
    EXPECT_EQ(*c.suites, std::vector<std::string>{"binomial"});
    EXPECT_DOUBLE_EQ(c.tolerances.ladder, 1e-9);
    EXPECT_DOUBLE_EQ(c.tolerances.sigmas, 4.0);
    EXPECT_DOUBLE_EQ(c.tolerances.identity, 1e-12);
    EXPECT_DOUBLE_EQ(c.spot, 90.0);
    EXPECT_DOUBLE_EQ(c.putRate, 0.02);
    EXPECT_EQ(c.outputDir, "out");
    EXPECT_EQ(c.format, "csv");
}

TEST(Config, ScalarIntensityBecomesList) {
    const ExperimentConfig c = parseConfig("family: constant-data\nintensities: 3\n");
    EXPECT_EQ(c.intensities, std::vector<double>{3.0});
    EXPECT_FALSE(c.suites.has_value());
}

TEST(Config, UnknownKeyReportsFieldAndLine) {
    const ConfigError e = configErrorOf("family: constant-data\ngrid:\n  steps: 10\n  horizn: 1\n");
    EXPECT_EQ(e.field(), "grid.horizn");
    EXPECT_EQ(e.line(), 4u);
    EXPECT_NE(std::string(e.what()).find("test.yaml:4: grid.horizn"), std::string::npos);
}

TEST(Config, BadValues) {
    EXPECT_EQ(configErrorOf("family: nope\n").field(), "family");
    EXPECT_EQ(configErrorOf("grid: { steps: 4 }\n").field(), "family");
    EXPECT_EQ(configErrorOf("family: constant-data\ngrid: { steps: -3 }\n").field(), "grid.steps");
    EXPECT_EQ(configErrorOf("family: constant-data\npaths: many\n").field(), "paths");
    EXPECT_EQ(configErrorOf("family: constant-data\nsuites: [closed-form, bogus]\n").field(), "suites[1]");
    EXPECT_EQ(configErrorOf("family: constant-data\ntolerances: { identity: 0 }\n").field(), "tolerances.identity");
    EXPECT_EQ(configErrorOf("family: constant-data\noutput: { format: xml }\n").field(), "output.format");
    EXPECT_EQ(configErrorOf("family: constant-data\n  : [\n").field(), "<document>");
}

TEST(Config, GuardsCarrySectionLine) {
    const ConfigError e = configErrorOf("family: constant-data\ngrid: { steps: 10 }\nintensities: [1, 200]\n");
    EXPECT_EQ(e.field(), "intensities[1]");
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(configErrorOf("family: constant-data\nintensities: [2, 1]\n").field(), "intensities[1]");
    EXPECT_EQ(configErrorOf("family: random-suite\ngrid: { steps: 9 }\n").field(), "grid.steps");
    EXPECT_EQ(configErrorOf("family: constant-data\nconstraint: { lower: 0.1 }\n").field(), "constraint");
    EXPECT_EQ(configErrorOf("family: constant-data\ngrid: { steps: 4 }\nbounds: [3]\n").field(), "bounds[0]");
}

TEST(Config, ValidateRejectsOverrides) {
    ExperimentConfig c;
    c.family = "constant-data";
    EXPECT_NO_THROW(validateConfig(c));
    c.steps = 1;
    c.intensities = {50.0};
    EXPECT_THROW(validateConfig(c), ConfigError);
}

TEST(Config, MissingFile) {
    EXPECT_THROW(loadConfig("/nonexistent/dir/none.yaml"), ConfigError);
}

TEST(Report, JsonFieldOrderAndRoundTrip) {
    const RunReport r = sampleReport();
    const std::string json = emitJson(r);
    EXPECT_EQ(json.find("seconds"), std::string::npos);
    const auto pos = [&](const char* key) { return json.find(std::string("\"") + key + "\""); };
    EXPECT_LT(pos("experiment"), pos("family"));
    EXPECT_LT(pos("family"), pos("seed"));
    EXPECT_LT(pos("seed"), pos("checks"));
    EXPECT_LT(pos("name"), pos("value"));
    EXPECT_LT(pos("value"), pos("reference"));
    EXPECT_LT(pos("reference"), pos("provenance"));
    EXPECT_LT(pos("provenance"), pos("tolerance"));

    const RunReport back = parseJson(json);
    EXPECT_EQ(back.experiment, r.experiment);
    EXPECT_EQ(back.family, r.family);
    EXPECT_EQ(back.seed, r.seed);
    ASSERT_EQ(back.checks.size(), 2u);
    EXPECT_EQ(back.checks[0].reference, 1.0 / 3.0);
    EXPECT_EQ(back.checks[1].value, -2.5e-17);
    EXPECT_FALSE(back.checks[1].passed);
    EXPECT_EQ(emitJson(back), json);

    const RunReport timed = parseJson(emitJson(r, true));
    EXPECT_DOUBLE_EQ(timed.checks[1].seconds, 1.5);
}

TEST(Report, CsvHeaderAndRows) {
    const std::string csv = emitCsv(sampleReport());
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kCsvHeader);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("a/one,", 0), 0u);
    EXPECT_NE(line.find("closed-form"), std::string::npos);
    std::getline(in, line);
    EXPECT_NE(line.find("identity"), std::string::npos);
    EXPECT_EQ(emitCsv(sampleReport(), true).rfind(std::string(kCsvHeader) + ",seconds\n", 0), 0u);
}

TEST(Report, PassedRequiresEveryCheck) {
    RunReport r = sampleReport();
    EXPECT_FALSE(r.passed());
    r.checks[1].passed = true;
    EXPECT_TRUE(r.passed());
}

TEST(Report, WriteReportCreatesFile) {
    const auto dir = std::filesystem::temp_directory_path() / "penbsde_report_test";
    std::filesystem::remove_all(dir);
    const std::string path = writeReport(sampleReport(), dir.string(), "csv");
    EXPECT_EQ(std::filesystem::path(path).filename(), "sample.csv");
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(text.str(), emitCsv(sampleReport()));
    std::filesystem::remove_all(dir);
    EXPECT_THROW(writeReport(sampleReport(), "/proc/nonexistent/dir", "json"), penbsde::Error);
}

TEST(Experiment, FamiliesAndSuites) {
    const auto families = listFamilies();
    EXPECT_EQ(families.size(), 5u);
    for (const char* f : {"constant-data", "random-suite", "american-put", "switching-2regime", "constrained-interval"}) {
        EXPECT_NE(std::find(families.begin(), families.end(), f), families.end()) << f;
        EXPECT_FALSE(familySuites(f).empty()) << f;
    }
    EXPECT_TRUE(familySuites("nope").empty());
}

namespace {

ExperimentConfig smallRandomSuite() {
    ExperimentConfig c;
    c.name = "small";
    c.family = "random-suite";
    c.steps = 4;
    c.instances = 3;
    c.paths = 2000;
    c.seed = 5;
    return c;
}

}  // namespace

TEST(Experiment, ReportIndependentOfJobs) {
    const ExperimentConfig c = smallRandomSuite();
    const RunReport one = runExperiment(c, 1);
    const RunReport three = runExperiment(c, 3);
    EXPECT_EQ(emitJson(one), emitJson(three));
    EXPECT_EQ(emitJson(one), emitJson(runExperiment(c, 1)));
    EXPECT_TRUE(one.passed()) << emitJson(one);
}

TEST(Experiment, SuiteSelectionKeepsChecks) {
    ExperimentConfig c = smallRandomSuite();
    const RunReport full = runExperiment(c);
    const std::string last = familySuites(c.family).back();
    c.suites = std::vector<std::string>{last};
    const RunReport part = runExperiment(c);
    ASSERT_FALSE(part.checks.empty());
    for (const auto& check : part.checks) {
        EXPECT_EQ(check.name.rfind(last + "/", 0), 0u) << check.name;
        const auto it = std::find_if(full.checks.begin(), full.checks.end(),
                                     [&](const CheckResult& x) { return x.name == check.name; });
        ASSERT_NE(it, full.checks.end());
        EXPECT_EQ(it->value, check.value);
    }
    c.suites = std::vector<std::string>{};
    EXPECT_TRUE(runExperiment(c).checks.empty());
}

TEST(Experiment, InvalidConfigThrows) {
    ExperimentConfig c = smallRandomSuite();
    c.family = "unknown";
    EXPECT_THROW(runExperiment(c), ConfigError);
}
