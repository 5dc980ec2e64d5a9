#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fent::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("config." + key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != static_cast<double>(static_cast<long long>(x)))
        throw ConfigError("config." + key + ": expected an integer, got '" + v + "'");
    return static_cast<long long>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    try {
        return parse_list(v);
    } catch (const std::exception&) {
        throw ConfigError("config." + key + ": expected a comma-separated list of numbers, got '" + v + "'");
    }
}

const std::vector<std::string> kKeys = {
    "d",         "symbol",     "hamiltonian", "region",  "f",         "gamma",      "method", "mode",
    "route",     "alpha",      "T",          "mu",      "rho",       "tol",        "spacing", "margin",
    "trials",    "n",          "budget",     "seed",    "threads",   "out",        "name",   "pv-cutoff",
    "nodes-x",   "nodes-perp", "quad-tol",   "xi-radius"};

}  // namespace

std::vector<std::string> config_keys() { return kKeys; }

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("bad list entry " + item);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config file " + path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [k, v] : kv) {
        if (k == "d") d = static_cast<int>(to_int(k, v));
        else if (k == "symbol") symbol = v;
        else if (k == "hamiltonian") hamiltonian = v;
        else if (k == "region") region = v;
        else if (k == "f") f = v;
        else if (k == "gamma") gammas = to_list(k, v);
        else if (k == "method") method = v;
        else if (k == "mode") mode = v;
        else if (k == "route") route = v;
        else if (k == "alpha") alphas = to_list(k, v);
        else if (k == "T") temperatures = to_list(k, v);
        else if (k == "mu") mu = to_double(k, v);
        else if (k == "rho") rho = to_double(k, v);
        else if (k == "tol") tol = to_double(k, v);
        else if (k == "spacing") spacing = to_double(k, v);
        else if (k == "margin") margin = to_double(k, v);
        else if (k == "trials") trials = static_cast<int>(to_int(k, v));
        else if (k == "n") n = static_cast<int>(to_int(k, v));
        else if (k == "budget") budget = static_cast<int>(to_int(k, v));
        else if (k == "seed") seed = static_cast<std::uint64_t>(to_int(k, v));
        else if (k == "threads") threads = static_cast<int>(to_int(k, v));
        else if (k == "out") output_dir = v;
        else if (k == "name") name = v;
        else if (k == "pv-cutoff") quad.pv_cutoff = to_double(k, v);
        else if (k == "nodes-x") quad.nodes_x = static_cast<int>(to_int(k, v));
        else if (k == "nodes-perp") quad.nodes_perp = static_cast<int>(to_int(k, v));
        else if (k == "quad-tol") quad.tolerance = to_double(k, v);
        else if (k == "xi-radius") quad.xi_radius = to_double(k, v);
        else throw ConfigError("config: unknown key '" + k + "'");
    }
}

void RunConfig::validate() const {
    if (d < 2 || d > 3) throw ConfigError("config.d: must be 2 or 3");
    if (threads < 1) throw ConfigError("config.threads: must be at least 1");
    if (trials < 1) throw ConfigError("config.trials: must be positive");
    if (n < 1 || n > 16) throw ConfigError("config.n: must lie in [1, 16]");
    if (budget < 1) throw ConfigError("config.budget: must be positive");
    if (!(tol > 0.0)) throw ConfigError("config.tol: must be positive");
    if (spacing < 0.0) throw ConfigError("config.spacing: must be nonnegative");
    if (margin < 0.0) throw ConfigError("config.margin: must be nonnegative");
    if (!(rho > 0.0)) throw ConfigError("config.rho: must be positive");
    for (double a : alphas)
        if (!(a > 0.0)) throw ConfigError("config.alpha: entries must be positive");
    for (double t : temperatures)
        if (!(t > 0.0)) throw ConfigError("config.T: entries must be positive");
    for (double g : gammas)
        if (!(g > 0.0)) throw ConfigError("config.gamma: entries must be positive");
    static const std::vector<std::string> methods = {"pv", "parseval", "closed", "hs", "all"};
    if (std::find(methods.begin(), methods.end(), method) == methods.end())
        throw ConfigError("config.method: one of pv, parseval, closed, hs, all");
    static const std::vector<std::string> routes = {"auto", "cartesian", "polar"};
    if (std::find(routes.begin(), routes.end(), route) == routes.end())
        throw ConfigError("config.route: one of auto, cartesian, polar");
    try {
        quad.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config.quadrature: ") + e.what());
    }
}

nlohmann::json RunConfig::to_json() const {
    return {{"subcommand", subcommand},
            {"d", d},
            {"symbol", symbol},
            {"hamiltonian", hamiltonian},
            {"region", region},
            {"f", f},
            {"gamma", gammas},
            {"method", method},
            {"mode", mode},
            {"route", route},
            {"alpha", alphas},
            {"T", temperatures},
            {"mu", mu},
            {"rho", rho},
            {"tol", tol},
            {"spacing", spacing},
            {"margin", margin},
            {"trials", trials},
            {"n", n},
            {"budget", budget},
            {"seed", seed},
            {"threads", threads},
            {"out", output_dir},
            {"name", name},
            {"pv-cutoff", quad.pv_cutoff},
            {"nodes-x", quad.nodes_x},
            {"nodes-perp", quad.nodes_perp},
            {"quad-tol", quad.tolerance},
            {"xi-radius", quad.xi_radius}};
}

Symbol parse_symbol(const std::string& tag, int d) {
    std::vector<std::string> parts;
    std::stringstream ss(tag);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("empty symbol tag");
    std::string kind = parts[0], htag = "quadratic";
    if (const auto dash = kind.find('-'); dash != std::string::npos) {
        htag = kind.substr(dash + 1);
        kind = kind.substr(0, dash);
    }
    auto num = [&](std::size_t i) {
        if (i >= parts.size()) throw std::invalid_argument("symbol tag '" + tag + "' misses a parameter");
        std::size_t used = 0;
        const double v = std::stod(parts[i], &used);
        if (used != parts[i].size()) throw std::invalid_argument("bad number in symbol tag '" + tag + "'");
        return v;
    };
    if (kind == "gaussian") return Symbol::gaussian(d, parts.size() > 1 ? num(1) : 1.0);
    // Hamiltonian tags may themselves carry a parameter (scaled:c).
    const Hamiltonian h = parse_hamiltonian(htag, d);
    if (kind == "limit_fermi") return Symbol::limit_fermi(h);
    if (kind == "boltzmann") return Symbol::boltzmann(h);
    if (kind == "fermi") return Symbol::fermi(h, num(1), num(2));
    if (kind == "model") return Symbol::model(h, num(1), num(2), num(3));
    throw std::invalid_argument("unknown symbol tag '" + tag + "'");
}

}  // namespace fent::cli
