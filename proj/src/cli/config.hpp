#pragma once

// System selection for the command-line tool: catalog names or JSON files.

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "perfun/catalog.hpp"
#include "perfun/flow.hpp"

namespace perfun::cli {

// Invalid command line or configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LoadedSystem {
    SystemInstance inst;
    // normalized echo of what was loaded
    nlohmann::json echo;
    // integrator settings requested by the file
    nlohmann::json integrator = nlohmann::json::object();
};

LoadedSystem loadCatalogSystem(const std::string& name, const std::string& paramsText);

// Reads and validates a single JSON document.
LoadedSystem loadSystemFile(const std::string& path);
LoadedSystem loadSystemJson(const nlohmann::json& doc);

// Applies {"rel_tol", "abs_tol", "max_time", "closure_tol", "max_step"} on top of cfg.
void applyIntegratorJson(const nlohmann::json& j, IntegratorConfig& cfg);

// "a:b"
std::pair<double, double> parseRange(const std::string& text);
// "x,y"
Point parsePoint(const std::string& text);

}  // namespace perfun::cli
