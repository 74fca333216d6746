#include "penbsde/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "penbsde/harness/experiment.hpp"
#include "penbsde/penalized.hpp"

namespace penbsde::harness {
namespace {

std::string location(const std::string& source, std::size_t line) {
    return line > 0 ? source + ":" + std::to_string(line) : source;
}

class Reader {
public:
    Reader(const std::string& source) : source_(source) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) const {
        throw ConfigError(source_, lineOf(node), field, message);
    }

    std::size_t lineOf(const YAML::Node& node) const {
        const YAML::Mark mark = node.Mark();
        return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 0;
    }

    template <class T>
    T scalar(const YAML::Node& node, const std::string& field) const {
        if (!node.IsScalar()) fail(node, field, "expected a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, field, "cannot parse '" + node.Scalar() + "'");
        }
    }

    std::vector<double> numbers(const YAML::Node& node, const std::string& field) const {
        std::vector<double> out;
        if (node.IsScalar()) {
            out.push_back(scalar<double>(node, field));
        } else if (node.IsSequence()) {
            for (std::size_t i = 0; i < node.size(); ++i)
                out.push_back(scalar<double>(node[i], field + "[" + std::to_string(i) + "]"));
        } else {
            fail(node, field, "expected a number or a list of numbers");
        }
        return out;
    }

    void checkKeys(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& allowed) const {
        if (!map.IsMap()) fail(map, prefix.empty() ? "<root>" : prefix, "expected a mapping");
        for (const auto& kv : map) {
            const std::string key = kv.first.as<std::string>();
            if (!allowed.count(key)) fail(kv.first, prefix.empty() ? key : prefix + "." + key, "unknown key");
        }
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
};

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& field,
                         const std::string& message)
    : Error(location(source, line) + ": " + field + ": " + message), field_(field), message_(message), line_(line) {}

ExperimentConfig parseConfig(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, static_cast<std::size_t>(e.mark.line + 1), "<document>", e.msg);
    }
    const Reader r(source);
    r.checkKeys(root, "",
                {"name", "family", "grid", "intensities", "bounds", "seed", "paths", "instances", "suites",
                 "tolerances", "american-put", "constraint", "switching", "output"});

    ExperimentConfig c;
    std::map<std::string, std::size_t> lines;
    const auto note = [&](const YAML::Node& node, const std::string& field) { lines[field] = r.lineOf(node); };

    if (root["name"]) c.name = r.scalar<std::string>(root["name"], "name");
    if (!root["family"]) throw ConfigError(source, 0, "family", "missing required key");
    c.family = r.scalar<std::string>(root["family"], "family");
    note(root["family"], "family");
    if (const auto grid = root["grid"]) {
        r.checkKeys(grid, "grid", {"steps", "horizon"});
        if (grid["steps"]) {
            const long long steps = r.scalar<long long>(grid["steps"], "grid.steps");
            if (steps <= 0) r.fail(grid["steps"], "grid.steps", "must be positive");
            c.steps = static_cast<std::size_t>(steps);
        }
        if (grid["horizon"]) c.horizon = r.scalar<double>(grid["horizon"], "grid.horizon");
        note(grid, "grid");
    }
    if (root["intensities"]) {
        c.intensities = r.numbers(root["intensities"], "intensities");
        note(root["intensities"], "intensities");
    }
    if (root["bounds"]) {
        c.bounds = r.numbers(root["bounds"], "bounds");
        note(root["bounds"], "bounds");
    }
    if (root["seed"]) c.seed = r.scalar<std::uint64_t>(root["seed"], "seed");
    if (root["paths"]) {
        const long long paths = r.scalar<long long>(root["paths"], "paths");
        if (paths <= 0) r.fail(root["paths"], "paths", "must be positive");
        c.paths = static_cast<std::size_t>(paths);
    }
    if (root["instances"]) {
        const long long n = r.scalar<long long>(root["instances"], "instances");
        if (n <= 0) r.fail(root["instances"], "instances", "must be positive");
        c.instances = static_cast<std::size_t>(n);
    }
    if (const auto suites = root["suites"]) {
        std::vector<std::string> names;
        if (suites.IsSequence()) {
            for (std::size_t i = 0; i < suites.size(); ++i)
                names.push_back(r.scalar<std::string>(suites[i], "suites[" + std::to_string(i) + "]"));
        } else if (!suites.IsNull()) {
            r.fail(suites, "suites", "expected a list");
        }
        c.suites = names;
        note(suites, "suites");
    }
    if (const auto tol = root["tolerances"]) {
        r.checkKeys(tol, "tolerances",
                    {"identity", "oracle", "closed-form", "closed-form-fine", "ladder", "policy", "ode", "sigmas"});
        const std::pair<const char*, double*> fields[] = {
            {"identity", &c.tolerances.identity},     {"oracle", &c.tolerances.oracle},
            {"closed-form", &c.tolerances.closedForm}, {"closed-form-fine", &c.tolerances.closedFormFine},
            {"ladder", &c.tolerances.ladder},         {"policy", &c.tolerances.policy},
            {"ode", &c.tolerances.ode},               {"sigmas", &c.tolerances.sigmas}};
        for (const auto& [key, target] : fields) {
            if (!tol[key]) continue;
            const std::string field = std::string("tolerances.") + key;
            *target = r.scalar<double>(tol[key], field);
            if (!(*target > 0.0)) r.fail(tol[key], field, "must be positive");
        }
    }
    if (const auto put = root["american-put"]) {
        r.checkKeys(put, "american-put", {"spot", "strike", "volatility", "rate"});
        if (put["spot"]) c.spot = r.scalar<double>(put["spot"], "american-put.spot");
        if (put["strike"]) c.strike = r.scalar<double>(put["strike"], "american-put.strike");
        if (put["volatility"]) c.volatility = r.scalar<double>(put["volatility"], "american-put.volatility");
        if (put["rate"]) c.putRate = r.scalar<double>(put["rate"], "american-put.rate");
        note(put, "american-put");
    }
    if (const auto set = root["constraint"]) {
        r.checkKeys(set, "constraint", {"lower", "upper"});
        if (set["lower"]) c.constraintLower = r.scalar<double>(set["lower"], "constraint.lower");
        if (set["upper"]) c.constraintUpper = r.scalar<double>(set["upper"], "constraint.upper");
        note(set, "constraint");
    }
    if (const auto sw = root["switching"]) {
        r.checkKeys(sw, "switching", {"cost"});
        if (sw["cost"]) c.switchingCost = r.scalar<double>(sw["cost"], "switching.cost");
        note(sw, "switching");
    }
    if (const auto out = root["output"]) {
        r.checkKeys(out, "output", {"dir", "format"});
        if (out["dir"]) c.outputDir = r.scalar<std::string>(out["dir"], "output.dir");
        if (out["format"]) c.format = r.scalar<std::string>(out["format"], "output.format");
        note(out, "output");
    }

    try {
        validateConfig(c, source);
    } catch (const ConfigError& e) {
        // Attach the line of the offending section when validation found it.
        const std::string section = e.field().substr(0, e.field().find_first_of(".["));
        const auto it = lines.find(section);
        if (e.line() == 0 && it != lines.end()) throw ConfigError(source, it->second, e.field(), e.message());
        throw;
    }
    return c;
}

ExperimentConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "<file>", "cannot open configuration file");
    std::ostringstream text;
    text << in.rdbuf();
    return parseConfig(text.str(), path);
}

void validateConfig(const ExperimentConfig& c, const std::string& source) {
    const auto fail = [&](const std::string& field, const std::string& message) {
        throw ConfigError(source, 0, field, message);
    };
    const auto families = listFamilies();
    if (std::find(families.begin(), families.end(), c.family) == families.end())
        fail("family", "unknown family '" + c.family + "'");
    if (c.suites) {
        const auto known = familySuites(c.family);
        for (std::size_t i = 0; i < c.suites->size(); ++i)
            if (std::find(known.begin(), known.end(), (*c.suites)[i]) == known.end())
                fail("suites[" + std::to_string(i) + "]",
                     "unknown suite '" + (*c.suites)[i] + "' for family '" + c.family + "'");
    }
    if (c.steps == 0) fail("grid.steps", "must be positive");
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) fail("grid.horizon", "must be positive");
    if (c.family == "random-suite" && c.steps > 8)
        fail("grid.steps", "random-suite instances are limited to 8 steps");
    const double dt = c.horizon / static_cast<double>(c.steps);

    if (c.intensities.empty()) fail("intensities", "must not be empty");
    for (std::size_t i = 0; i < c.intensities.size(); ++i) {
        const std::string field = "intensities[" + std::to_string(i) + "]";
        try {
            checkPenaltyGuard(c.intensities[i], dt);
        } catch (const InvalidParameter& e) {
            fail(field, e.what());
        }
        if (i > 0 && !(c.intensities[i] > c.intensities[i - 1])) fail(field, "intensities must be increasing");
    }
    if (c.bounds.empty()) fail("bounds", "must not be empty");
    for (std::size_t i = 0; i < c.bounds.size(); ++i) {
        const std::string field = "bounds[" + std::to_string(i) + "]";
        try {
            checkConstraintGuard(c.bounds[i], dt);
        } catch (const InvalidParameter& e) {
            fail(field, e.what());
        }
        if (i > 0 && !(c.bounds[i] > c.bounds[i - 1])) fail(field, "bounds must be increasing");
    }
    if (!(c.spot > 0.0)) fail("american-put.spot", "must be positive");
    if (!(c.strike > 0.0)) fail("american-put.strike", "must be positive");
    if (!(c.volatility > 0.0)) fail("american-put.volatility", "must be positive");
    if (!(c.putRate >= 0.0 && c.putRate * dt < 1.0)) fail("american-put.rate", "must satisfy 0 <= rate * dt < 1");
    if (!(c.constraintLower <= 0.0 && 0.0 <= c.constraintUpper))
        fail("constraint", "interval must contain the origin");
    if (!(c.switchingCost > 0.0)) fail("switching.cost", "must be positive");
    if (c.format != "json" && c.format != "csv") fail("output.format", "must be json or csv");
}

}  // namespace penbsde::harness
