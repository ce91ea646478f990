#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "spinwall/experiments.hpp"
#include "spinwall/output.hpp"
#include "spinwall/threads.hpp"

namespace {

std::string trimmed(const std::string& s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// flat "key = value" lines, '#' comments
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trimmed(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string key = eq == std::string::npos ? "" : trimmed(body.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        kv[key] = trimmed(body.substr(eq + 1));
    }
    return kv;
}

const std::vector<std::pair<const char*, const char*>> kFlags = {
    {"tier", "desk or extended"},
    {"n", "ring size"},
    {"j0", "baseline exchange"},
    {"a0", "wall amplitude"},
    {"w", "wall width"},
    {"k0", "wall center (default: ring center)"},
    {"fraction", "multiplicative disorder strength, [0, 0.9]"},
    {"nseeds", "number of disorder realizations"},
    {"seed", "base RNG seed"},
    {"omega", "comma-separated drive rates, units of the gap"},
    {"s", "comma-separated wall separations (even)"},
    {"jt0", "three-site mean exchange"},
    {"jt1", "three-site modulation amplitude"},
    {"phi", "three-site drive phase offset"},
    {"convention", "pauli or spin_half"},
    {"j0-uev", "exchange energy in micro-eV"},
    {"spacing", "wall spacing in sites"},
    {"out", "output stem for <out>.csv and <out>.manifest.json"},
    {"threads", "worker threads (default: hardware, or SPINWALL_THREADS)"},
    {"tol", "eigensolver residual tolerance"},
    {"window", "Lanczos window size override"},
};

const std::vector<std::pair<const char*, const char*>> kExperiments = {
    {"soliton", "static wall: ground-state localization profile"},
    {"disorder", "wall stability under multiplicative exchange disorder"},
    {"transport", "quasi-static wall displacement sweep"},
    {"floquet3", "three-site driven ring: cycle states and geometric phase"},
    {"floquet9", "nine-site driven wall: cycle-state family deviation"},
    {"epr", "two counter-moving walls: singlet splitting and hybrid lobes"},
    {"capacity", "qubit channel capacity from exchange energy and spacing"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimerized Heisenberg spin-ring simulator"};
    app.require_subcommand(1);

    std::map<std::string, std::string> flag_values;
    std::map<std::string, std::vector<CLI::Option*>> flag_options;
    std::string config_path;
    for (const auto& [key, help] : kFlags) flag_values[key];  // stable storage

    for (const auto& [name, help] : kExperiments) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "flat key = value config file");
        for (const auto& [key, fhelp] : kFlags)
            flag_options[key].push_back(
                sub->add_option("--" + std::string(key), flag_values[key], fhelp));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        spinwall::ExperimentConfig cfg = spinwall::defaults_for(sub->get_name());
        if (!config_path.empty())
            for (const auto& [key, value] : read_config_file(config_path))
                spinwall::set_config_key(cfg, key, value);
        for (const auto& [key, opts] : flag_options)
            for (const CLI::Option* o : opts)
                if (o->count() > 0) spinwall::set_config_key(cfg, key, flag_values[key]);
        if (cfg.threads > 0) spinwall::set_thread_count(cfg.threads);

        const spinwall::ExperimentResult r = spinwall::run_experiment(cfg);

        if (cfg.experiment == "capacity")
            std::printf("Q = J0 / (hbar * D) = %s qubit/s  (J0 = %s eV, D = %s sites, "
                        "hbar = 6.582119569e-16 eV s)\n",
                        r.manifest.records.at("qubits_per_s").c_str(),
                        r.manifest.records.at("j0_ev").c_str(),
                        spinwall::format_double(cfg.spacing).c_str());

        int failed = 0;
        for (const auto& c : r.manifest.checks) {
            failed += c.pass ? 0 : 1;
            std::printf("[%s] %-40s measured %-24s tolerance %s\n",
                        c.pass ? "PASS" : "FAIL", c.name.c_str(),
                        spinwall::format_double(c.measured).c_str(),
                        spinwall::format_double(c.tolerance).c_str());
        }
        if (!cfg.out.empty()) {
            spinwall::write_outputs(r, cfg.out);
            std::printf("wrote %s.csv and %s.manifest.json\n", cfg.out.c_str(),
                        cfg.out.c_str());
        }
        std::printf("%s: %zu checks, %d failed, %.2f s\n", cfg.experiment.c_str(),
                    r.manifest.checks.size(), failed, r.manifest.elapsed_s);
        return failed == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
