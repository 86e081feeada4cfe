#include "perfun/systems.hpp"

#include <algorithm>
#include <cmath>

#include "perfun/errors.hpp"

namespace perfun {

// ---------------------------------------------------------------- fields

ScalarField::ScalarField() : ScalarField(Expr::constant(0.0, 2)) {}

ScalarField::ScalarField(Expr e) : expr_(std::move(e)), label_(expr_->str()) {
    if (expr_->arity() != 2) throw PreconditionError("scalar field expression must have arity 2");
}

ScalarField::ScalarField(JetFn fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}

double ScalarField::operator()(Point p) const {
    if (expr_) return (*expr_)(p);
    return fn_(p, 0).value();
}

Jet2 ScalarField::jet(Point p, int order) const {
    if (expr_) return expr_->jet2(p, order);
    return fn_(p, order);
}

std::string VectorField::describe() const { return "(" + x.label() + ", " + y.label() + ")"; }

VectorField vectorField(const Expr& v1, const Expr& v2) { return {ScalarField(v1), ScalarField(v2)}; }

namespace {

ScalarField scaledField(const ScalarField& f, double c) {
    if (f.expr()) return ScalarField(c * *f.expr());
    return ScalarField([f, c](Point p, int n) { return f.jet(p, n) * c; },
                       c == -1.0 ? "-(" + f.label() + ")" : std::to_string(c) + "*(" + f.label() + ")");
}

// d_W g with W truncated to the order of the result
Jet2 directional(const std::array<Jet2, 2>& W, const Jet2& g) { return W[0] * g.dx() + W[1] * g.dy(); }

}  // namespace

VectorField reversed(const VectorField& v) { return {scaledField(v.x, -1.0), scaledField(v.y, -1.0)}; }

VectorField scaled(const VectorField& v, double c) { return {scaledField(v.x, c), scaledField(v.y, c)}; }

const char* kindName(NormalizerKind k) {
    switch (k) {
    case NormalizerKind::SeparableWs: return "separable-Ws";
    case NormalizerKind::UniversalH: return "universal-H";
    case NormalizerKind::Commuting: return "commuting";
    case NormalizerKind::Reparam: return "reparam";
    case NormalizerKind::JacobianWdelta: return "jacobian-Wdelta";
    case NormalizerKind::Custom: return "custom";
    }
    return "custom";
}

double NormalizerPair::cofactor(Point p) const {
    if (mu) return (*mu)(p);
    return nCofactor(V, W, p);
}

Jet2 NormalizerPair::cofactorJet(Point p, int order) const {
    if (mu) return mu->jet(p, order);
    return generalCofactorJet(V, W, p, order);
}

// ---------------------------------------------------------------- brackets

Vec2 lieBracket(const VectorField& V, const VectorField& W, Point z) {
    const auto v = V.jet(z, 1);
    const auto w = W.jet(z, 1);
    const double v1 = v[0].value(), v2 = v[1].value();
    const double w1 = w[0].value(), w2 = w[1].value();
    return {w[0].coeff(1, 0) * v1 + w[0].coeff(0, 1) * v2 - v[0].coeff(1, 0) * w1 - v[0].coeff(0, 1) * w2,
            w[1].coeff(1, 0) * v1 + w[1].coeff(0, 1) * v2 - v[1].coeff(1, 0) * w1 - v[1].coeff(0, 1) * w2};
}

double nCofactor(const VectorField& V, const VectorField& W, Point z, double eps) {
    const Vec2 v = V(z);
    const double vv = dot(v, v);
    if (!(std::sqrt(vv) > eps)) throw StationaryPoint("V vanishes at the evaluation point");
    return dot(lieBracket(V, W, z), v) / vv;
}

double transversality(const VectorField& V, const VectorField& W, Point z) { return wedge(V(z), W(z)); }

Jet2 generalCofactorJet(const VectorField& V, const VectorField& W, Point z, int order) {
    const auto v = V.jet(z, order + 1);
    const auto w = W.jet(z, order + 1);
    const Jet2 b1 = directional(v, w[0]) - directional(w, v[0]);
    const Jet2 b2 = directional(v, w[1]) - directional(w, v[1]);
    const Jet2 vv = v[0] * v[0] + v[1] * v[1];
    if (vv.value() == 0.0) throw StationaryPoint("V vanishes at the evaluation point");
    return (b1 * v[0] + b2 * v[1]) / vv;
}

double normalizerResidual(const VectorField& V, const VectorField& W, Point z) {
    const Vec2 b = lieBracket(V, W, z);
    return norm(b - nCofactor(V, W, z) * V(z));
}

// ---------------------------------------------------------------- Hamiltonians

VectorField buildHamiltonian(const Expr& H) { return vectorField(H.derivative(1), -H.derivative(0)); }

VectorField buildUniversalNormalizer(const Expr& H) {
    const Expr hx = H.derivative(0), hy = H.derivative(1);
    const Expr g2 = pow(hx, 2) + pow(hy, 2);
    return vectorField(hx / g2, hy / g2);
}

Expr universalCofactorExpr(const Expr& H) {
    const Expr hx = H.derivative(0), hy = H.derivative(1);
    const Expr hxx = hx.derivative(0), hxy = hx.derivative(1), hyy = hy.derivative(1);
    const Expr num = (hyy - hxx) * pow(hx, 2) - 4.0 * hxy * hx * hy + (hxx - hyy) * pow(hy, 2);
    return num / pow(pow(hx, 2) + pow(hy, 2), 2);
}

NormalizerPair hamiltonianUniversalPair(const Expr& H, std::string name) {
    NormalizerPair p;
    p.name = std::move(name);
    p.kind = NormalizerKind::UniversalH;
    p.V = buildHamiltonian(H);
    p.W = buildUniversalNormalizer(H);
    p.mu = ScalarField(universalCofactorExpr(H));
    return p;
}

NormalizerPair universalPair(const VectorField& V, const Expr& H, std::string name) {
    NormalizerPair p;
    p.name = std::move(name);
    p.kind = NormalizerKind::UniversalH;
    p.V = V;
    p.W = buildUniversalNormalizer(H);
    return p;
}

// ---------------------------------------------------------------- potentials

namespace {

constexpr int kMaxLeadingOrder = 12;
constexpr int kSeriesOrder = 20;

}  // namespace

Potential::Potential(Expr L, int leadingOrder) : raw_(std::move(L)) {
    if (raw_.arity() != 1) throw PreconditionError("potential must be an expression in t");
    dRaw_ = raw_.derivative(0);
    try {
        raw0_ = raw_(0.0);
    } catch (const EvalError& e) {
        throw PreconditionError(std::string("potential is not defined at 0: ") + e.what());
    }
    const int detectOrder = leadingOrder > 0 ? leadingOrder : kMaxLeadingOrder;
    const Jet1 at0 = raw_.jet1(0.0, detectOrder + kSeriesOrder);
    int lead = leadingOrder;
    if (lead <= 0) {
        double scale = 0.0;
        for (int i = 1; i <= at0.order(); ++i) scale = std::max(scale, std::abs(at0[i]));
        for (int i = 1; i <= kMaxLeadingOrder; ++i)
            if (std::abs(at0[i]) > 1e-12 * scale) {
                lead = i;
                break;
            }
        if (lead <= 0) throw PreconditionError("potential is flat at 0");
    }
    if (lead % 2 != 0) throw PreconditionError("non-even leading order " + std::to_string(lead));
    k_ = lead / 2;
    series_.assign(static_cast<std::size_t>(kSeriesOrder + 1), 0.0);
    for (int i = 0; i <= kSeriesOrder; ++i) series_[i] = at0[lead + i];
    if (!(series_[0] > 0.0)) throw PreconditionError("leading coefficient must be positive");

    // Gamma = 2t sum a_i t^i / sum (2k + i) a_i t^i
    std::vector<double> num(series_.size()), den(series_.size());
    for (std::size_t i = 0; i < series_.size(); ++i) {
        num[i] = 2.0 * series_[i];
        den[i] = (lead + static_cast<int>(i)) * series_[i];
    }
    const auto q = seriesDivide(num, den, kSeriesOrder);
    gammaSeries_.assign(1, 0.0);
    gammaSeries_.insert(gammaSeries_.end(), q.begin(), q.end());

    if (k_ == 1) {
        Jet1 twoA(kSeriesOrder, 0.0);
        for (int i = 0; i <= kSeriesOrder; ++i) twoA[i] = 2.0 * series_[i];
        const Jet1 r = sqrt(twoA);
        rootSeries_.assign(1, 0.0);
        for (int i = 0; i <= kSeriesOrder; ++i) rootSeries_.push_back(r[i]);
    }

    // below eps the shifted value loses digits to L(0); use the series there
    eps_ = std::max(1e-4, std::pow(1e-6 * std::abs(raw0_) / series_[0], 1.0 / lead));
}

double Potential::value(double t) const { return jet(t, 0).value(); }

Jet1 Potential::jet(double t, int order) const {
    if (std::abs(t) < eps_) {
        std::vector<double> full(static_cast<std::size_t>(2 * k_), 0.0);
        full.insert(full.end(), series_.begin(), series_.end());
        return polyval(full, Jet1::variable(t, order));
    }
    Jet1 j = raw_.jet1(t, order);
    j -= raw0_;
    return j;
}

Jet1 Potential::gamma(double t, int order) const {
    if (std::abs(t) < eps_) return polyval(gammaSeries_, Jet1::variable(t, order));
    const Jet1 g = jet(t, order + 1);
    const Jet1 gp = g.differentiated();
    if (gp.value() == 0.0) throw EvalError("2L/L' is undefined where L' vanishes away from 0");
    return 2.0 * g.truncated(order) / gp;
}

double Potential::signedRoot(double t) const {
    if (k_ != 1) throw PreconditionError("signed root needs a quadratic leading term");
    if (std::abs(t) < eps_) return polyval(rootSeries_, Jet1::constant(t, 0)).value();
    const double v = value(t);
    if (v < 0.0) throw EvalError("potential is negative");
    return signum(t) * std::sqrt(2.0 * v);
}

double Potential::signedRootDerivative(double t) const {
    if (k_ != 1) throw PreconditionError("signed root needs a quadratic leading term");
    if (std::abs(t) < eps_) return polyval(rootSeries_, Jet1::variable(t, 1))[1];
    return dRaw_(t) / signedRoot(t);
}

// ---------------------------------------------------------------- separable

namespace {

Expr bindTo(const Expr& e, int index) {
    const int map[] = {index};
    return e.remap(2, map);
}

}  // namespace

SeparableSystem::SeparableSystem(Expr G, Expr F, int orderG, int orderF)
    : G_(std::make_shared<const Potential>(std::move(G), orderG)),
      F_(std::make_shared<const Potential>(std::move(F), orderF)) {
    V_ = vectorField(bindTo(F_->raw().derivative(0), 1), -bindTo(G_->raw().derivative(0), 0));
    auto g = G_;
    auto f = F_;
    Ws_.x = ScalarField([g](Point p, int n) { return Jet2::fromX(g->gamma(p.x, n), p); }, "2G/G'");
    Ws_.y = ScalarField([f](Point p, int n) { return Jet2::fromY(f->gamma(p.y, n), p); }, "2F/F'");
    muS_ = ScalarField(
        [g, f](Point p, int n) {
            const Jet1 gx = g->gamma(p.x, n + 1).differentiated();
            const Jet1 fy = f->gamma(p.y, n + 1).differentiated();
            return Jet2::fromX(gx, p) + Jet2::fromY(fy, p) - 2.0;
        },
        "Gamma' + Phi' - 2");
    muS2_ = ScalarField(
        [g, f](Point p, int n) {
            const Jet1 gx = g->gamma(p.x, n + 2);
            const Jet1 fy = f->gamma(p.y, n + 2);
            const Jet1 gx1 = gx.differentiated(), fy1 = fy.differentiated();
            const Jet1 gx2 = gx1.differentiated(), fy2 = fy1.differentiated();
            const Jet2 a = Jet2::fromX(gx1, p) + Jet2::fromY(fy1, p) - 2.0;
            return a * a + Jet2::fromX(gx * gx2, p) + Jet2::fromY(fy * fy2, p);
        },
        "(Gamma' + Phi' - 2)^2 + Gamma Gamma'' + Phi Phi''");
}

VectorField SeparableSystem::companion() const {
    if (!satisfiesSep()) throw PreconditionError("companion system needs quadratic leading terms in G and F");
    auto g = G_;
    auto f = F_;
    auto pointwise = [](auto fn) {
        return [fn](Point p, int n) {
            if (n > 0) throw PreconditionError("companion system is evaluated pointwise only");
            return Jet2::constant(fn(p), 0, p);
        };
    };
    VectorField c;
    c.x = ScalarField(pointwise([g, f](Point p) { return f->signedRoot(p.y) / g->signedRootDerivative(p.x); }),
                      "q(y)/P'(x)");
    c.y = ScalarField(pointwise([g, f](Point p) { return -g->signedRoot(p.x) / f->signedRootDerivative(p.y); }),
                      "-p(x)/Q'(y)");
    return c;
}

Expr SeparableSystem::gammaExpr() const {
    const Expr& L = G_->raw();
    return 2.0 * (L - G_->rawAtZero()) / L.derivative(0);
}

Expr SeparableSystem::phiExpr() const {
    const Expr& L = F_->raw();
    return 2.0 * (L - F_->rawAtZero()) / L.derivative(0);
}

NormalizerPair SeparableSystem::pair(std::string name) const {
    NormalizerPair p;
    p.name = std::move(name);
    p.kind = NormalizerKind::SeparableWs;
    p.V = V_;
    p.W = Ws_;
    p.mu = muS_;
    return p;
}

// ---------------------------------------------------------------- reparam

NormalizerPair buildReparamCenter(const Expr& xi, std::string name) {
    const Expr x = Expr::variable(0, 2), y = Expr::variable(1, 2);
    const Expr dxi = x * xi.derivative(0) + y * xi.derivative(1);
    NormalizerPair p;
    p.name = std::move(name);
    p.kind = NormalizerKind::Reparam;
    p.V = vectorField(y * xi, -x * xi);
    p.W = vectorField(x, y);
    p.mu = ScalarField(-dxi / xi);
    p.cFactor = ScalarField(1.0 / xi);
    return p;
}

// ---------------------------------------------------------------- jacobian maps

namespace {

struct MapJets {
    Jet2 P, Q, Px, Py, Qx, Qy;
    MapJets(const Expr& p, const Expr& q, Point z, int order)
        : P(p.jet2(z, order + 1)), Q(q.jet2(z, order + 1)) {
        Px = P.dx();
        Py = P.dy();
        Qx = Q.dx();
        Qy = Q.dy();
    }
    Jet2 delta() const { return Px * Qy - Py * Qx; }
};

}  // namespace

JacobianTriple::JacobianTriple(Expr P, Expr Q) : P_(std::move(P)), Q_(std::move(Q)) {
    const Expr p = P_, q = Q_;
    delta_ = ScalarField([p, q](Point z, int n) { return MapJets(p, q, z, n).delta(); }, "det J_Psi");
    VPsi_.x = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return m.P * m.Py + m.Q * m.Qy;
        },
        "P P_y + Q Q_y");
    VPsi_.y = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return -(m.P * m.Px + m.Q * m.Qx);
        },
        "-P P_x - Q Q_x");
    Vdelta_.x = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return (m.P * m.Py + m.Q * m.Qy) / m.delta();
        },
        "(P P_y + Q Q_y)/delta");
    Vdelta_.y = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return -(m.P * m.Px + m.Q * m.Qx) / m.delta();
        },
        "-(P P_x + Q Q_x)/delta");
    Wdelta_.x = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return (m.P * m.Qy - m.Q * m.Py) / m.delta();
        },
        "(P Q_y - Q P_y)/delta");
    Wdelta_.y = ScalarField(
        [p, q](Point z, int n) {
            const MapJets m(p, q, z, n);
            return (m.Q * m.Px - m.P * m.Qx) / m.delta();
        },
        "(-P Q_x + Q P_x)/delta");
}

Expr JacobianTriple::delta() const {
    return P_.derivative(0) * Q_.derivative(1) - P_.derivative(1) * Q_.derivative(0);
}

NormalizerPair JacobianTriple::pair(std::string name) const {
    NormalizerPair p;
    p.name = std::move(name);
    p.kind = NormalizerKind::JacobianWdelta;
    p.V = VPsi_;
    p.W = Wdelta_;
    const Expr P = P_, Q = Q_;
    p.mu = ScalarField(
        [P, Q](Point z, int n) {
            const MapJets m(P, Q, z, n + 1);
            const Jet2 d = m.delta();
            const Jet2 w1 = (m.P * m.Qy - m.Q * m.Py) / d;
            const Jet2 w2 = (m.Q * m.Px - m.P * m.Qx) / d;
            return -(w1 * d.dx() + w2 * d.dy()) / d;
        },
        "-d_W ln(delta)");
    const ScalarField delta = delta_;
    p.cFactor = ScalarField([delta](Point z, int n) { return 1.0 / delta.jet(z, n); }, "1/delta");
    return p;
}

}  // namespace perfun
