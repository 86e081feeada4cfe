#pragma once

// Adaptive Runge-Kutta 5(4) integration of planar flows, minimal-period
// detection on a section through the anchor, quadratures along cycles and
// advancement along normalizer orbits.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "perfun/systems.hpp"

namespace perfun {

struct IntegratorConfig {
    double relTol = 1e-10;
    double absTol = 1e-12;
    double maxStep = std::numeric_limits<double>::infinity();
    double maxTime = 1e4;
    // event refinement tolerance on the signed section coordinate
    double eventTol = 1e-12;
    // returns earlier than guardFraction * (2 * first downward crossing time) are ignored
    double guardFraction = 0.5;
    double blowupCap = 1e12;
    // closure residual accepted at a return, relative to 1 + |z0|
    double closureTol = 1e-6;
    double stationaryEps = 1e-12;
    // > 0 switches to fixed steps of this size (no error control)
    double fixedStep = 0.0;
    std::size_t maxSteps = 20'000'000;

    // Throws PreconditionError on invalid settings.
    void validate() const;
};

struct Section {
    Point origin;
    Vec2 normal;
};

struct CycleSample {
    double t;
    Point z;
};

// Integrands evaluated together at one point; eval writes names.size() values.
struct IntegrandSet {
    std::vector<std::string> names;
    std::function<void(Point, std::span<double>)> eval;
    std::size_t size() const { return names.size(); }
};

IntegrandSet integrands(std::vector<std::string> names, std::vector<std::function<double(Point)>> fs);

struct Cycle {
    Point anchor;
    Section section;
    double period = 0.0;
    // |phi(T, z0) - z0|
    double closure = 0.0;
    std::vector<CycleSample> samples;
    std::vector<std::string> names;
    std::vector<double> quadratures;
    std::size_t steps = 0;
};

Cycle integrateCycle(const VectorField& V, Point z0, const IntegratorConfig& cfg, bool keepSamples = true);

// Cycle through z0 with I_j = int_0^T f_j(phi_V(t, z0)) dt.
Cycle cycleQuadratures(const VectorField& V, Point z0, const IntegrandSet& fs, const IntegratorConfig& cfg,
                       bool keepSamples = false);

struct PathResult {
    Point end;
    std::vector<double> integrals;
    std::size_t steps = 0;
};

// Integrates z' = F(z) for the given (signed) duration with optional accumulators.
// Leaving `region` throws RegionExit.
PathResult integratePath(const VectorField& F, Point z, double duration, const IntegrandSet* fs,
                         const IntegratorConfig& cfg, const Region* region = nullptr);

// phi_W(ds, z)
Point advanceW(const VectorField& W, Point z, double ds, const IntegratorConfig& cfg,
               const Region* region = nullptr);

// phi_V(t, z)
Point flowMap(const VectorField& V, Point z, double t, const IntegratorConfig& cfg);

// phi_V(t_i, z) at t_i = i * duration / (count - 1), each integrated to full tolerance.
std::vector<CycleSample> sampleTrajectory(const VectorField& V, Point z, double duration, int count,
                                          const IntegratorConfig& cfg);

}  // namespace perfun
