#pragma once

// Planar vector fields, normalizer pairs and the system families built from
// Hamiltonians, separable potentials, reparametrized linear centers and
// jacobian maps.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perfun/expr.hpp"
#include "perfun/jet.hpp"
#include "perfun/vec2.hpp"

namespace perfun {

// Scalar field on the plane. Either backed by an expression or by a function
// producing jets directly (for quantities such as 2G/G' that need special care
// on the axes).
class ScalarField {
public:
    using JetFn = std::function<Jet2(Point, int)>;

    ScalarField();
    explicit ScalarField(Expr e);
    ScalarField(JetFn fn, std::string label);

    double operator()(Point p) const;
    Jet2 jet(Point p, int order) const;

    const std::optional<Expr>& expr() const { return expr_; }
    const std::string& label() const { return label_; }

private:
    std::optional<Expr> expr_;
    JetFn fn_;
    std::string label_;
};

struct VectorField {
    ScalarField x, y;

    Vec2 operator()(Point p) const { return {x(p), y(p)}; }
    std::array<Jet2, 2> jet(Point p, int order) const { return {x.jet(p, order), y.jet(p, order)}; }
    std::string describe() const;
};

VectorField vectorField(const Expr& v1, const Expr& v2);
// -V; same orbits, reversed time.
VectorField reversed(const VectorField& v);
// c V for a constant c.
VectorField scaled(const VectorField& v, double c);

enum class NormalizerKind { SeparableWs, UniversalH, Commuting, Reparam, JacobianWdelta, Custom };

const char* kindName(NormalizerKind k);

// A system V with a transversal normalizer W, [V, W] = mu V.
struct NormalizerPair {
    std::string name;
    NormalizerKind kind = NormalizerKind::Custom;
    VectorField V;
    VectorField W;
    // Closed-form cofactor; empty means "general", computed from the bracket.
    std::optional<ScalarField> mu;
    // C-factor m with [mV, W] = 0, when known in closed form.
    std::optional<ScalarField> cFactor;

    double cofactor(Point p) const;
    Jet2 cofactorJet(Point p, int order) const;
};

// Axis-aligned rectangle.
struct Region {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
    bool contains(Point p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
};

// ---------------------------------------------------------------- brackets

// [V, W] = J_W V - J_V W
Vec2 lieBracket(const VectorField& V, const VectorField& W, Point z);
// ([V, W] . V) / |V|^2; throws StationaryPoint when |V| is below eps.
double nCofactor(const VectorField& V, const VectorField& W, Point z, double eps = 1e-12);
// V1 W2 - V2 W1
double transversality(const VectorField& V, const VectorField& W, Point z);
// Jet of ([V, W] . V) / |V|^2; consumes V and W to order + 1.
Jet2 generalCofactorJet(const VectorField& V, const VectorField& W, Point z, int order);
// Residual |[V, W] - mu V| with mu from nCofactor.
double normalizerResidual(const VectorField& V, const VectorField& W, Point z);

// ---------------------------------------------------------------- Hamiltonians

// (H_y, -H_x)
VectorField buildHamiltonian(const Expr& H);
// grad H / |grad H|^2
VectorField buildUniversalNormalizer(const Expr& H);
// ((H_yy - H_xx) H_x^2 - 4 H_xy H_x H_y + (H_xx - H_yy) H_y^2) / |grad H|^4
Expr universalCofactorExpr(const Expr& H);
// Hamiltonian system of H with the universal normalizer and closed-form cofactor.
NormalizerPair hamiltonianUniversalPair(const Expr& H, std::string name = {});
// Any V with first integral H: universal normalizer, cofactor from the bracket.
NormalizerPair universalPair(const VectorField& V, const Expr& H, std::string name = {});

// ---------------------------------------------------------------- potentials

// A one-variable potential L(t), shifted so that L(0) = 0, with leading term
// c t^(2k). Near t = 0 the quotients 2L/L' and the signed root s(t) sqrt(2L)
// come from power series at 0 instead of removable 0/0 forms.
class Potential {
public:
    // leadingOrder 0 means detect from the Taylor coefficients at 0.
    explicit Potential(Expr L, int leadingOrder = 0);

    const Expr& raw() const { return raw_; }
    double rawAtZero() const { return raw0_; }
    int leadingOrder() const { return 2 * k_; }
    double leadingCoeff() const { return series_[0]; }
    double axisEps() const { return eps_; }

    // shifted value and jet
    double value(double t) const;
    Jet1 jet(double t, int order) const;
    double derivative(double t) const { return dRaw_(t); }
    // Gamma = 2L/L'
    Jet1 gamma(double t, int order) const;
    // p(t) = s(t) sqrt(2 L(t)) and p'(t); need leading order 2
    double signedRoot(double t) const;
    double signedRootDerivative(double t) const;

private:
    Expr raw_;
    Expr dRaw_;
    double raw0_ = 0.0;
    int k_ = 1;
    double eps_ = 1e-4;
    std::vector<double> series_;       // shifted coefficients divided by t^(2k)
    std::vector<double> gammaSeries_;  // Taylor coefficients of Gamma at 0
    std::vector<double> rootSeries_;   // Taylor coefficients of p at 0 (k = 1)
};

// Hamiltonian H = G(x) + F(y): x' = F'(y), y' = -G'(x).
class SeparableSystem {
public:
    SeparableSystem(Expr G, Expr F, int orderG = 0, int orderF = 0);

    const Potential& G() const { return *G_; }
    const Potential& F() const { return *F_; }

    const VectorField& V() const { return V_; }
    // (Gamma(x), Phi(y))
    const VectorField& Ws() const { return Ws_; }
    // Gamma' + Phi' - 2
    const ScalarField& muS() const { return muS_; }
    // (Gamma' + Phi' - 2)^2 + Gamma Gamma'' + Phi Phi''
    const ScalarField& muS2() const { return muS2_; }
    // (q(y)/P'(x), -p(x)/Q'(y)); needs leading order 2 in both potentials
    VectorField companion() const;

    // shifted G(x) + F(y)
    double hamiltonian(Point p) const { return G_->value(p.x) + F_->value(p.y); }
    // Psi(x, y) = (p(x), q(y))
    Vec2 psi(Point p) const { return {G_->signedRoot(p.x), F_->signedRoot(p.y)}; }
    bool satisfiesSep() const { return G_->leadingOrder() == 2 && F_->leadingOrder() == 2; }

    // Expression forms of 2G/G' and 2F/F' (shifted potentials, no axis handling).
    Expr gammaExpr() const;
    Expr phiExpr() const;

    NormalizerPair pair(std::string name = {}) const;

private:
    std::shared_ptr<const Potential> G_, F_;
    VectorField V_, Ws_;
    ScalarField muS_, muS2_;
};

// x' = y xi, y' = -x xi with W = (x, y), mu = -(x xi_x + y xi_y)/xi, m = 1/xi.
NormalizerPair buildReparamCenter(const Expr& xi, std::string name = {});

// Jacobian map Psi = (P, Q) with delta = det J_Psi.
class JacobianTriple {
public:
    JacobianTriple(Expr P, Expr Q);

    const Expr& P() const { return P_; }
    const Expr& Q() const { return Q_; }
    Expr delta() const;

    // (P P_y + Q Q_y, -P P_x - Q Q_x)
    const VectorField& VPsi() const { return VPsi_; }
    // V_Psi / delta
    const VectorField& Vdelta() const { return Vdelta_; }
    // ((P Q_y - Q P_y)/delta, (-P Q_x + Q P_x)/delta)
    const VectorField& Wdelta() const { return Wdelta_; }
    const ScalarField& deltaField() const { return delta_; }

    // V_Psi with W_delta, cofactor -d_W(ln delta), m = 1/delta.
    NormalizerPair pair(std::string name = {}) const;

private:
    Expr P_, Q_;
    ScalarField delta_;
    VectorField VPsi_, Vdelta_, Wdelta_;
};

}  // namespace perfun
