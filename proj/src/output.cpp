#include "spinwall/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace spinwall {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_csv(const OutputTable& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.columns.size())
            throw std::invalid_argument("csv row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

static void write_text(const std::string& text, const std::string& path) {
    std::ofstream f(path, std::ios::binary);  // binary keeps LF on every platform
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_csv(const OutputTable& t, const std::string& path) {
    write_text(to_csv(t), path);
}

bool RunManifest::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

CheckResult& RunManifest::add_check(const std::string& name, double measured,
                                    double tolerance, bool pass) {
    checks.push_back(CheckResult{name, measured, tolerance, pass, ""});
    return checks.back();
}

std::string to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["experiment"] = m.experiment;
    j["version"] = kLibraryVersion;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.config) j["config"][k] = v;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : m.checks) {
        nlohmann::ordered_json jc;
        jc["name"] = c.name;
        jc["measured"] = c.measured;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        if (!c.note.empty()) jc["note"] = c.note;
        j["checks"].push_back(jc);
    }
    j["records"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.records) j["records"][k] = v;
    j["seed"] = m.seed;
    j["elapsed_s"] = m.elapsed_s;
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& m, const std::string& path) {
    write_text(to_json(m), path);
}

}  // namespace spinwall
