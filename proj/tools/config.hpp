#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fent/quadrature.hpp"
#include "fent/thermo.hpp"

namespace fent::cli {

// Bad keys or values. The message names the offending schema path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Everything a run needs. Built from a key = value file overlaid by flags;
// keys are the long flag names (see README).
struct RunConfig {
    std::string subcommand;
    int d = 2;
    std::string symbol = "gaussian";
    std::string hamiltonian = "quadratic";
    std::string region = "ball:1";
    std::string f = "quadratic";
    std::vector<double> gammas{1.0};
    std::string method = "pv";
    std::string mode = "fixed_symbol";
    std::string route = "auto";
    std::vector<double> alphas{8.0};
    std::vector<double> temperatures{1.0};
    double mu = 0.0;
    double rho = 0.01;
    double tol = 1e-8;
    double spacing = 0.0;
    double margin = 0.0;
    int trials = 1000;
    int n = 8;
    int budget = 100000;
    std::uint64_t seed = 20240607;
    int threads = 1;
    std::string output_dir;
    std::string name;
    QuadratureSpec quad;

    nlohmann::json to_json() const;
    // Applies key/value pairs; unknown keys and malformed values raise ConfigError.
    void apply(const std::map<std::string, std::string>& kv);
    void validate() const;
};

// Parses "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);
std::vector<std::string> config_keys();

std::vector<double> parse_list(const std::string& s);

// Symbol tags: gaussian[:scale], limit_fermi[-h], boltzmann[-h], fermi[-h]:T:mu,
// model[-h]:phi:omega:T, where h is a Hamiltonian tag (default quadratic).
Symbol parse_symbol(const std::string& tag, int d);

}  // namespace fent::cli
