#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"
#include "toda/toda.hpp"

namespace toda::cli {

// Rejected configuration; `key` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& msg)
        : std::runtime_error(key + ": " + msg), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct DeltaGrid {
    double min = 1e-4;
    double max = 1e-1;
    int n = 13;

    // Log-spaced, largest first.
    std::vector<double> values() const;
};

struct SeriesSection {
    int order = 30;
    int p_max = 10;
    double alpha = 1.0;
};

struct PathSection {
    int vary = 0;  // index of the varied parameter; the rest stay fixed
    double lo = 0.05, hi = 0.2;  // bracket for the critical value
};

struct LgSection {
    double r0 = 1.0;
    std::vector<double> a0{0.05};
    double dT = 0.5;
    double T_max = 20.0;
    bool scan = false;
    DeltaGrid delta{1e-3, 1.0, 10};
};

struct LeavesSection {
    std::string kind = "pole";
    double b_min = -0.9, b_max = 0.9;
    int nb = 19;
    double y_min = 0.01, y_max = 0.3;
    int ny = 30;
    double gamma_tol = 1e-6;
};

struct RunConfig {
    std::string command;
    std::vector<int> leaf{3, 6};
    std::vector<cplx> zeta{0.1, 0.01};
    RenormConfig renorm;
    std::vector<int> q{1, 2};
    PathSection path;
    DeltaGrid delta;
    int k_max = 8;
    int char_order = 400;
    int threads = 1;
    std::string out = ".";
    SeriesSection series;
    LgSection lg;
    LeavesSection leaves;
};

inline const std::vector<std::string> kCommands{"series", "char", "spectrum", "scan", "lg", "leaves"};

// Reads every known key from `node`, validates ranges and rejects unknown keys.
RunConfig parse_config(const YAML::Node& node, const std::string& command);

// Effective configuration; parse_config(YAML::Load(dump), command) gives it back.
nlohmann::ordered_json to_json(const RunConfig& cfg);

// Sets node[a][b]... = YAML::Load(value) for key "a.b...".
void set_key(YAML::Node& root, const std::string& dotted, const std::string& value);

}  // namespace toda::cli
