#pragma once

// Named built-in systems with default anchors, s-ranges and oracle notes.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perfun/systems.hpp"

namespace perfun {

// A normalizer pair with the W-orbit range used by default.
struct PairSetup {
    NormalizerPair pair;
    double sMin = 0.0;
    double sMax = 1.0;
};

struct SystemInstance {
    std::string name;
    std::map<std::string, double> params;
    // Potential-only entries carry no system (the potential is not a center).
    bool potentialOnly = false;
    std::optional<Expr> potential;

    std::optional<PairSetup> primary;
    std::optional<PairSetup> universal;
    std::shared_ptr<const SeparableSystem> separable;
    std::optional<Expr> hamiltonian;
    Point anchor;
    Region region;
    // Closed-form period when known.
    std::function<double(Point)> periodOracle;
    std::string oracle;
};

struct ParamSpec {
    std::string name;
    double defaultValue = 0.0;
    bool integer = false;
};

struct CatalogEntry {
    std::string name;
    std::vector<std::string> aliases;
    std::vector<ParamSpec> params;
    std::string description;
    std::string oracle;
    std::function<SystemInstance(const std::map<std::string, double>&)> build;
};

const std::vector<CatalogEntry>& catalog();
// Throws PreconditionError for an unknown name.
const CatalogEntry& findCatalogEntry(std::string_view name);

// Parameters as "k=2", "1,1,1" or a mix; unnamed values bind in declaration order.
std::map<std::string, double> parseParams(const CatalogEntry& entry, std::string_view text);
std::map<std::string, double> withDefaults(const CatalogEntry& entry, std::map<std::string, double> params);

SystemInstance buildSystem(std::string_view name, const std::map<std::string, double>& params = {});

// Expressions of the catalog potentials, shared with the analysis checkers.
Expr rationalPotential(double a, double b, double c);           // P/(1+P), P = a t^4 + b t^6 + c t^8
Expr cor11jPotential(double a, double b, double c);             // 1/(a + b t^4 + c t^8)
Expr cor11jjPotential(double a, double b, double c, int k);     // a t^4k / (1 + b t^2k + c t^6k)

}  // namespace perfun
