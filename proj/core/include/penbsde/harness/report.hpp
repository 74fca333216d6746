#pragma once

#include <string>
#include <vector>

namespace penbsde::harness {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    /// Where the reference comes from, e.g. "closed-form", "enumeration-oracle".
    std::string provenance;
    double tolerance = 0.0;
    bool passed = false;
    /// Wall-clock seconds; only serialized on request so reports stay byte-stable.
    double seconds = 0.0;
};

struct RunReport {
    std::string experiment;
    std::string family;
    unsigned long long seed = 0;
    std::vector<CheckResult> checks;

    bool passed() const noexcept;
};

/// Fields in fixed order, doubles with 17 significant digits.
std::string emitJson(const RunReport& report, bool timings = false);
RunReport parseJson(const std::string& text);

/// Header: name,value,reference,provenance,tolerance,pass[,seconds]
std::string emitCsv(const RunReport& report, bool timings = false);
inline constexpr const char* kCsvHeader = "name,value,reference,provenance,tolerance,pass";

/// Writes <dir>/<experiment>.<format>; throws penbsde::Error when the file cannot be written.
std::string writeReport(const RunReport& report, const std::string& dir, const std::string& format,
                        bool timings = false);

}  // namespace penbsde::harness
