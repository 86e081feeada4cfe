#pragma once

// Derivative profiles of the period function along W-orbits, critical-orbit
// location, and the sample-based certificate checkers.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "perfun/cofactors.hpp"
#include "perfun/errors.hpp"
#include "perfun/flow.hpp"
#include "perfun/systems.hpp"

namespace perfun {

// A profile row whose cycle could not be computed.
class RowFailure : public NumericalError {
public:
    RowFailure(const std::string& what, int row, double s) : NumericalError(what), row_(row), s_(s) {}
    int row() const { return row_; }
    double s() const { return s_; }

private:
    int row_;
    double s_;
};

struct SGrid {
    double sMin = 0.0;
    double sMax = 1.0;
    int steps = 11;

    double at(int i) const { return steps == 1 ? sMin : sMin + (sMax - sMin) * i / (steps - 1); }
    double span() const { return sMax - sMin; }
};

struct ProfileOptions {
    bool finiteDifferences = true;
    // stencil spacing for D1, D2; 0 picks 0.02 * span (0.05 * span for D3)
    double fdStep = 0.0;
    bool keepOrbits = false;
    const Region* region = nullptr;
};

struct ProfileRow {
    double s = 0.0;
    Point z;
    double T = 0.0;
    // absent when the integrands blow up on this cycle
    std::vector<std::optional<double>> dInt;
    // absent when the stencil leaves the annulus
    std::vector<std::optional<double>> dFd;
    std::vector<std::optional<double>> fdError;
    std::vector<std::optional<bool>> agree;
    bool blowup = false;
    std::string note;
    std::vector<CycleSample> orbit;
};

struct DerivativeProfile {
    std::string pairName;
    NormalizerKind kind = NormalizerKind::Custom;
    int order = 1;
    SGrid grid;
    double fdStep = 0.0;
    double fdStep3 = 0.0;
    std::vector<ProfileRow> rows;

    bool partial() const;
    // every interior row with both columns present agrees
    bool interiorAgrees() const;
};

// Tolerance used for the integral-vs-difference agreement flag.
bool fdAgrees(double dInt, double dFd, double errEst);

// mu_1..mu_n of the pair, evaluated together.
IntegrandSet cofactorIntegrands(const NormalizerPair& pair, int n);

// T and D_j = int_0^T mu_j dt on the cycle through z.
struct RowValues {
    double T = 0.0;
    std::vector<double> d;
};
RowValues periodDerivatives(const NormalizerPair& pair, Point z, int n, const IntegratorConfig& cfg);

DerivativeProfile derivativeProfile(const NormalizerPair& pair, Point z0, const SGrid& grid, int n,
                                    const IntegratorConfig& cfg, const ProfileOptions& opt = {});

struct CriticalOrbit {
    double s = 0.0;
    Point z;
    double T = 0.0;
    double bracketLo = 0.0, bracketHi = 0.0;
    double residual = 0.0;
    std::optional<double> d2;
    std::string classification;  // min | max | undetermined | undetermined cluster
};

struct CriticalOrbitReport {
    std::string pairName;
    std::vector<CriticalOrbit> orbits;
};

CriticalOrbitReport locateCritical(const DerivativeProfile& profile, const NormalizerPair& pair,
                                   const IntegratorConfig& cfg);

enum class Verdict { Holds, Violated, Inconclusive };

struct Certificate {
    std::string kind;
    std::string region;
    double margin = 0.0;
    Verdict verdict = Verdict::Holds;
    std::optional<Point> witness;
    std::optional<double> witnessValue;
    std::map<std::string, double> values;
    std::vector<std::string> notes;
    int samples = 0;

    // holds-on-samples | violated-at(...) | inconclusive
    std::string verdictText() const;
};

struct Grid2 {
    Region box;
    int nx = 201;
    int ny = 201;
};

// h keeps one sign on the sampled cycles and is nonzero somewhere on each.
Certificate certifyConditionB(const std::function<double(Point)>& h, const std::vector<Cycle>& cycles,
                              double tol = 1e-12, std::string kind = "condition-B");

enum class ConvexityTest { Mu2, DWMu };

// Sign of mu_2 (or of d_W mu) on a tensor grid; points where the cofactor is
// undefined or outside `domain` are skipped.
Certificate certifyConvexity(const NormalizerPair& pair, const Grid2& grid, ConvexityTest test = ConvexityTest::Mu2,
                             const std::function<bool(Point)>& domain = {});

// Sign of mu on a tensor grid (T monotone along W).
Certificate certifyMonotonicity(const NormalizerPair& pair, const Grid2& grid,
                                const std::function<bool(Point)>& domain = {});

// mu_n satisfying condition (B) on the cycles bounds the critical cycles by n - 1.
Certificate certifyAtMostNMinus1(const NormalizerPair& pair, int n, const std::vector<Cycle>& cycles);

// G'^4 - 8 G G'^2 G'' + 12 G^2 G''^2 - 4 G^2 G''' G' >= 0 on samples of [lo, hi].
Certificate certifyCorollary9(const Potential& G, double lo, double hi, int samples = 401);

Certificate checkCorollary5(int k, int n, const Expr& xiK, const Expr& xiN);

enum class Cor8Case { I, II };
struct Interval {
    double lo, hi;
};
Certificate checkCorollary8(const Expr& G, const Expr& F, Interval ig, Interval iF, Cor8Case c, double alpha = 0.0,
                            double beta = 0.0);

struct Corollary10Options {
    bool runProfile = true;
    int steps = 21;
    IntegratorConfig cfg;
};
Certificate checkCorollary10(double a, double b, double c, const Corollary10Options& opt = {});

enum class Cor11Family { J, JJ };
Certificate checkCorollary11(Cor11Family family, double a, double b, double c, int k = 1, Interval interval = {-2.0, 2.0});

Certificate checkSep(const Expr& L, Interval interval, int samples = 401);

struct IsochronicityReport {
    std::vector<Point> points;
    std::vector<double> periods;
    double mean = 0.0;
    double spread = 0.0;
};
IsochronicityReport isochronicityCheck(const SeparableSystem& sys, const std::vector<Point>& points,
                                       const IntegratorConfig& cfg);

struct LinearizationReport {
    // max relative change of |Psi|^2 along companion trajectories
    double radiusDrift = 0.0;
    // max |d arg(Psi)/dt + 1| (from the chain rule at samples and from angle increments)
    double angularSpeedError = 0.0;
    // max change of arg(Psi) along W_s-orbits
    double wsArgDrift = 0.0;
    bool passes() const { return radiusDrift <= 1e-6 && angularSpeedError <= 1e-4 && wsArgDrift <= 1e-6; }
};
// duration <= 0 integrates one period of each companion cycle.
LinearizationReport linearizationCheck(const SeparableSystem& sys, const std::vector<Point>& points, double duration,
                                       const IntegratorConfig& cfg, int samples = 400);

struct InvarianceReport {
    CriticalOrbitReport a, b;
    bool countsEqual = false;
    double maxPeriodGap = 0.0;
    // distance from each B-orbit point to the matching A-cycle
    double maxCycleGap = 0.0;
    bool matched(double periodTol = 1e-5, double cycleTol = 1e-4) const;
};
InvarianceReport normalizerInvarianceCheck(const NormalizerPair& pairA, const SGrid& gridA,
                                           const NormalizerPair& pairB, const SGrid& gridB, Point z0,
                                           const IntegratorConfig& cfg);

}  // namespace perfun
