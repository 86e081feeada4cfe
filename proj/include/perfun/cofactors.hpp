#pragma once

// Cofactor sequences mu_1..mu_n, closed-form cofactors, the numerical
// C-factor and the potential conditions (C), (C_lambda).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perfun/flow.hpp"
#include "perfun/systems.hpp"

namespace perfun {

constexpr int kMaxCofactorOrder = kDefaultMaxJetOrder;

struct CofactorSeq {
    Point z;
    int order = 0;
    std::vector<double> mu;  // mu[0] = mu_1
};

// mu_1 = mu, mu_n = mu_{n-1} mu + d_W mu_{n-1}, on jets: mu to order n - 1,
// W to order n - 2.
CofactorSeq muRecursive(const NormalizerPair& pair, Point z, int n);

// Jets of mu_1..mu_n at z, each truncated to order `extra`.
std::vector<Jet2> muRecursiveJets(const NormalizerPair& pair, Point z, int n, int extra);

// mu, d_W mu, ..., d_W^k mu at z.
std::vector<double> directionalDerivatives(const NormalizerPair& pair, Point z, int k);

// mu_2..mu_n from mu, mu', mu'', ... (n <= 5); derivs needs n - 1 entries.
std::vector<double> muExplicitPolynomials(const std::vector<double>& derivs, int n);

// Cofactor of the universal normalizer from second derivatives of H.
double muHClosed(const Expr& H, Point z);

// (G'^4 - 8 G G'^2 G'' + 12 G^2 G''^2 - 4 G^2 G' G''') / G'^4 with derivatives
// of the shifted potential at x.
double muS2Corollary9(const Potential& G, double x);
// 4 [1 + 2 (G G''/G'^2)(F F''/F'^2) + (3 G^2 G''^2 - 3 G G'^2 G'' - G^2 G' G''')/G'^4 + (same in F)]
double muS2Display(const SeparableSystem& sys, Point z);
// Quartic-in-G' form when F = y^2/2 and G' != 0, otherwise the Gamma/Phi form.
double muS2Closed(const SeparableSystem& sys, Point z);
bool isHalfSquare(const Potential& F);

// xi = sum of homogeneous parts (degree, part); W = (x, y).
using HomogeneousParts = std::vector<std::pair<int, Expr>>;
// xi^(k) = sum deg^k xi_deg
Expr xiDerivative(const HomogeneousParts& parts, int k);
// mu_1..mu_n as rational expressions in xi, xi', ..., xi^(n) (n <= 5)
std::vector<Expr> muXiSeq(const HomogeneousParts& parts, int n);

// m(z) = exp(int mu along the W-orbit from the anchor cycle to z); m = 1 on the cycle.
double cFactorNumeric(const NormalizerPair& pair, Point z, const Cycle& anchorCycle,
                      const IntegratorConfig& cfg, const Region* region = nullptr);

// 2 L L''^2 - L'^2 L'' - L L' L'''
double zeta(const Expr& L, double t);
// 2 L^2 L''^2 + L L'^2 L'' - L^2 L' L''' - lambda L'^4
double zetaLambda(const Expr& L, double t, double lambda);
// (2 L^2 L''^2 + L L'^2 L'' - L^2 L' L''') / L'^4
double zetaLambdaRatio(const Expr& L, double t);
// sum of |terms| of zeta, the scale for sign decisions
double zetaScale(const Expr& L, double t);
// expanded zeta of 1/(a + b t^4 + c t^8)
double zetaDisplayJ(double a, double b, double c, double t);

// -d_{W_delta} ln(delta rho)
double muFromIntegratingFactor(const JacobianTriple& triple, const Expr& rho, Point z);

struct PotentialConditionReport {
    double lo = 0.0, hi = 0.0;
    int samples = 0;
    double minValue = 0.0;
    double minAt = 0.0;
    std::optional<double> lambda;
    bool holds = true;
    // first sample below -tol
    std::optional<double> violatedAt;
    std::optional<double> violatedValue;
    std::string verdict() const;
};

// Samples zeta >= 0 on [lo, hi] (t = 0 skipped). relTol scales the zero band by the term sizes.
PotentialConditionReport conditionC(const Expr& L, double lo, double hi, int samples = 401, double relTol = 1e-10);
// Samples the ratio >= lambda on [lo, hi] minus t = 0.
PotentialConditionReport conditionCLambda(const Expr& L, double lambda, double lo, double hi, int samples = 401,
                                          double relTol = 1e-10);

}  // namespace perfun
