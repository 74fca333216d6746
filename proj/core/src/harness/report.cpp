#include "penbsde/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "penbsde/errors.hpp"

namespace penbsde::harness {
namespace {

std::string number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

double readNumber(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "nan") return std::nan("");
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        throw Error("report field holds a non-numeric string: " + s);
    }
    return j.get<double>();
}

std::string csvField(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csvNumber(double v) {
    const std::string s = number(v);
    return s.front() == '"' ? s.substr(1, s.size() - 2) : s;
}

}  // namespace

bool RunReport::passed() const noexcept {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string emitJson(const RunReport& report, bool timings) {
    std::ostringstream out;
    out << "{\n  \"experiment\": " << quoted(report.experiment) << ",\n  \"family\": " << quoted(report.family)
        << ",\n  \"seed\": " << report.seed << ",\n  \"passed\": " << (report.passed() ? "true" : "false")
        << ",\n  \"checks\": [";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const CheckResult& c = report.checks[i];
        out << (i == 0 ? "\n" : ",\n") << "    {\"name\": " << quoted(c.name) << ", \"value\": " << number(c.value)
            << ", \"reference\": " << number(c.reference) << ", \"provenance\": " << quoted(c.provenance)
            << ", \"tolerance\": " << number(c.tolerance) << ", \"pass\": " << (c.passed ? "true" : "false");
        if (timings) out << ", \"seconds\": " << number(c.seconds);
        out << "}";
    }
    out << (report.checks.empty() ? "]\n}\n" : "\n  ]\n}\n");
    return out.str();
}

RunReport parseJson(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunReport report;
    report.experiment = j.at("experiment").get<std::string>();
    report.family = j.at("family").get<std::string>();
    report.seed = j.at("seed").get<unsigned long long>();
    for (const auto& item : j.at("checks")) {
        CheckResult c;
        c.name = item.at("name").get<std::string>();
        c.value = readNumber(item.at("value"));
        c.reference = readNumber(item.at("reference"));
        c.provenance = item.at("provenance").get<std::string>();
        c.tolerance = readNumber(item.at("tolerance"));
        c.passed = item.at("pass").get<bool>();
        if (item.contains("seconds")) c.seconds = readNumber(item.at("seconds"));
        report.checks.push_back(std::move(c));
    }
    return report;
}

std::string emitCsv(const RunReport& report, bool timings) {
    std::ostringstream out;
    out << kCsvHeader << (timings ? ",seconds" : "") << "\n";
    for (const auto& c : report.checks) {
        out << csvField(c.name) << ',' << csvNumber(c.value) << ',' << csvNumber(c.reference) << ','
            << csvField(c.provenance) << ',' << csvNumber(c.tolerance) << ',' << (c.passed ? "true" : "false");
        if (timings) out << ',' << csvNumber(c.seconds);
        out << "\n";
    }
    return out.str();
}

std::string writeReport(const RunReport& report, const std::string& dir, const std::string& format, bool timings) {
    if (format != "json" && format != "csv") throw Error("unknown report format '" + format + "'");
    std::error_code ec;
    if (!dir.empty()) std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create report directory " + dir + ": " + ec.message());
    const std::filesystem::path path = std::filesystem::path(dir.empty() ? "." : dir) / (report.experiment + "." + format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report " + path.string());
    out << (format == "json" ? emitJson(report, timings) : emitCsv(report, timings));
    if (!out) throw Error("cannot write report " + path.string());
    return path.string();
}

}  // namespace penbsde::harness
