#pragma once

// synobs command line: simulate, analyze and verify.

#include "synobs/scenarios.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace synobs {

struct SimConfig {
    std::string scenario = "vaa";
    double t_end = 10.0;
    double dt = 0.01;
    std::string integrator = "exact";  // exact | euler
    double rate_gnss = 1.0;
    double rate_mag = 5.0;
    VAAGains gains;
    double tau_gnss = 1.0;
    double tau_mag = 0.2;
    int flow_steps = 50;
    std::int64_t seed = 0;
    std::string output = "trace.csv";
    bool no_updates = false;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    bool operator==(const SimConfig&) const;
};

/// Flat `key = value` text; loading it with `--config` gives back the same
/// configuration.
std::string to_ini(const SimConfig& cfg);

/// Parse simulate-style flags (no subcommand name). `--config` files are
/// read first and explicit flags override them. Throws ConfigError.
SimConfig parse_sim_config(const std::vector<std::string>& args);

std::vector<std::string> csv_columns(const ScenarioBundle& bundle);
void write_csv(std::ostream& os, const ScenarioBundle& bundle, const SimTrace& trace);

/// Scenario bundle with the channel rates, taus and flow steps of `cfg`.
ScenarioBundle configured_bundle(const SimConfig& cfg);

SimTrace run_simulation(const SimConfig& cfg, const ScenarioBundle& bundle);

/// Run one command line (without the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid_config = 1;
inline constexpr int check_failed = 2;
inline constexpr int non_closure = 3;
}  // namespace exit_code

}  // namespace synobs
