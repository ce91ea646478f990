#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spinwall {

inline constexpr const char* kLibraryName = "spinwall";
inline constexpr const char* kLibraryVersion = "1.0.0";

struct OutputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

// Header row + comma-separated values, LF line endings.
void write_csv(const OutputTable& t, const std::string& path);
std::string to_csv(const OutputTable& t);

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;  // optional context, serialized when non-empty
};

struct RunManifest {
    std::string experiment;
    std::map<std::string, std::string> config;   // echoed flat key=value
    std::map<std::string, std::string> records;  // measured facts worth keeping
    std::vector<CheckResult> checks;
    std::uint64_t seed = 0;
    double elapsed_s = 0.0;

    bool all_pass() const;
    CheckResult& add_check(const std::string& name, double measured, double tolerance,
                           bool pass);
};

// JSON object {config, version, checks:[{name, measured, tolerance, pass}],
// seed, elapsed_s} plus the experiment id and records block.
void write_manifest(const RunManifest& m, const std::string& path);
std::string to_json(const RunManifest& m);

}  // namespace spinwall
