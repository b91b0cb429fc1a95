// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewrg {

// published constants used as acceptance targets
inline constexpr const char* kExpSigmaStarDecimal = "1.7000157758867897671921936150581734037633645686725";
inline constexpr double kMu[5] = {30.79005494022096246, 4.23606797749978969, 0.68224911725088276,
                                  -0.68224911725088276, -0.13757909772243458};
inline constexpr int kPeakPositions[10] = {1, 6, 27, 116, 493, 2090, 8855, 37512, 158905, 673134};

struct Config {
    int N = 80;
    double rho_f = 3.0, rho_g = 2.0;
    double solver_tol = 1e-20;
    double parity_tol = 1e-11;
    double label_tol = 1e-4;
    int qmax = 55;
    double lambda = 1.0;
    int zoom_generations = 4;
    long nmax = 1000000;
    int generations = 30;
    std::string out = "out";
    std::string mode = "plain";
    std::string pair_file;  // input of the spectrum command
    bool raw_spectrum = true;

    // throws ConfigError naming the key
    void set(const std::string& key, const std::string& value);
    void load(const std::string& path);
    std::map<std::string, std::string> snapshot() const;
    void validate_radii_three() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
    bool counted = true;  // informational checks do not change the exit code
};

struct RunReport {
    std::string command;
    std::map<std::string, std::string> config;
    double wall_time = 0;
    std::string outputs_json = "{}";  // serialized key outputs
    std::vector<Check> checks;
    std::vector<std::string> files;
    bool passed() const;
    std::string to_json() const;
    std::string summary() const;
};

RunReport cmd_fixpoint(const Config& cfg);
RunReport cmd_spectrum(const Config& cfg);
RunReport cmd_butterfly(const Config& cfg);
RunReport cmd_eigenfunction(const Config& cfg);
RunReport cmd_recurrence(const Config& cfg);
RunReport cmd_selftest(const Config& cfg);
// dispatch by name; writes <out>/<command>_report.json
RunReport run_command(const std::string& name, const Config& cfg);

}  // namespace skewrg
