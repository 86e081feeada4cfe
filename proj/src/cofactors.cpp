#include "perfun/cofactors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perfun/errors.hpp"

namespace perfun {

namespace {

void checkOrder(int n) {
    if (n < 1) throw PreconditionError("cofactor order must be at least 1");
    if (n > kMaxCofactorOrder + 1)
        throw PreconditionError("cofactor order " + std::to_string(n) + " exceeds the supported jet order");
}

void checkRegular(const NormalizerPair& pair, Point z) {
    if (!(norm(pair.V(z)) > 1e-12)) throw StationaryPoint("cofactor requested at a stationary point of V");
}

// W . grad g, one order lower than g
Jet2 alongW(const Jet2& g, const std::array<Jet2, 2>& w) { return w[0] * g.dx() + w[1] * g.dy(); }

}  // namespace

std::vector<Jet2> muRecursiveJets(const NormalizerPair& pair, Point z, int n, int extra) {
    checkOrder(n + extra);
    checkRegular(pair, z);
    const Jet2 m = pair.cofactorJet(z, n - 1 + extra);
    std::array<Jet2, 2> w;
    if (n >= 2 || extra > 0) w = pair.W.jet(z, std::max(n - 2 + extra, 0));
    std::vector<Jet2> out{m};
    for (int j = 1; j < n; ++j) {
        const Jet2& g = out.back();
        out.push_back(g * m + alongW(g, w));
    }
    for (auto& g : out) g = g.truncated(extra);
    return out;
}

CofactorSeq muRecursive(const NormalizerPair& pair, Point z, int n) {
    CofactorSeq s{z, n, {}};
    for (const Jet2& g : muRecursiveJets(pair, z, n, 0)) s.mu.push_back(g.value());
    return s;
}

std::vector<double> directionalDerivatives(const NormalizerPair& pair, Point z, int k) {
    checkOrder(k + 1);
    checkRegular(pair, z);
    Jet2 g = pair.cofactorJet(z, k);
    std::vector<double> out{g.value()};
    if (k == 0) return out;
    const auto w = pair.W.jet(z, k - 1);
    for (int i = 0; i < k; ++i) {
        g = alongW(g, w);
        out.push_back(g.value());
    }
    return out;
}

std::vector<double> muExplicitPolynomials(const std::vector<double>& d, int n) {
    if (n > 5) throw PreconditionError("closed polynomials exist up to order 5");
    if (n < 2) return {};
    if (static_cast<int>(d.size()) < n) throw PreconditionError("need mu and its first n - 1 derivatives");
    const double m = d[0], m1 = d[1];
    std::vector<double> out{m * m + m1};
    if (n >= 3) out.push_back(m * m * m + 3 * m * m1 + d[2]);
    if (n >= 4) {
        const double m2 = d[2], m3 = d[3];
        out.push_back(std::pow(m, 4) + 6 * m * m * m1 + 4 * m * m2 + 3 * m1 * m1 + m3);
    }
    if (n >= 5) {
        const double m2 = d[2], m3 = d[3], m4 = d[4];
        out.push_back(std::pow(m, 5) + 10 * std::pow(m, 3) * m1 + 10 * m * m * m2 + 15 * m * m1 * m1 +
                      5 * m * m3 + 10 * m1 * m2 + m4);
    }
    return out;
}

double muHClosed(const Expr& H, Point z) {
    const Jet2 h = H.jet2(z, 2);
    const double hx = h.coeff(1, 0), hy = h.coeff(0, 1);
    const double hxx = 2 * h.coeff(2, 0), hxy = h.coeff(1, 1), hyy = 2 * h.coeff(0, 2);
    const double g2 = hx * hx + hy * hy;
    if (!(g2 > 1e-24)) throw StationaryPoint("critical point of H");
    return ((hyy - hxx) * hx * hx - 4 * hxy * hx * hy + (hxx - hyy) * hy * hy) / (g2 * g2);
}

double muS2Corollary9(const Potential& G, double x) {
    const Jet1 g = G.jet(x, 3);
    const double g0 = g.value(), g1 = g.derivative(1), g2 = g.derivative(2), g3 = g.derivative(3);
    if (g1 == 0.0) throw EvalError("G' vanishes");
    const double q = g1 * g1;
    return (q * q - 8 * g0 * q * g2 + 12 * g0 * g0 * g2 * g2 - 4 * g0 * g0 * g1 * g3) / (q * q);
}

double muS2Display(const SeparableSystem& sys, Point z) {
    auto part = [](const Potential& L, double t) {
        const Jet1 j = L.jet(t, 3);
        const double l = j.value(), l1 = j.derivative(1), l2 = j.derivative(2), l3 = j.derivative(3);
        if (l1 == 0.0) throw EvalError("potential derivative vanishes");
        const double q = l1 * l1;
        return std::pair{l * l2 / q, (3 * l * l * l2 * l2 - 3 * l * q * l2 - l * l * l1 * l3) / (q * q)};
    };
    const auto [g, gt] = part(sys.G(), z.x);
    const auto [f, ft] = part(sys.F(), z.y);
    return 4 * (1 + 2 * g * f + gt + ft);
}

bool isHalfSquare(const Potential& F) {
    const Jet1 j0 = F.jet(0.0, 6);
    for (int k = 0; k <= 6; ++k)
        if (std::abs(j0[k] - (k == 2 ? 0.5 : 0.0)) > 1e-13) return false;
    for (const double t : {-1.3, 0.71}) {
        const Jet1 j = F.jet(t, 3);
        if (std::abs(j[0] - t * t / 2) > 1e-13 * (1 + t * t) || std::abs(j[1] - t) > 1e-13 ||
            std::abs(j[2] - 0.5) > 1e-13 || std::abs(j[3]) > 1e-13)
            return false;
    }
    return true;
}

double muS2Closed(const SeparableSystem& sys, Point z) {
    if (isHalfSquare(sys.F()) && std::abs(sys.G().derivative(z.x)) > 1e-6) return muS2Corollary9(sys.G(), z.x);
    return sys.muS2()(z);
}

Expr xiDerivative(const HomogeneousParts& parts, int k) {
    if (parts.empty()) throw PreconditionError("xi needs at least one homogeneous part");
    Expr sum = Expr::constant(0.0, 2);
    for (const auto& [deg, e] : parts) {
        const double w = std::pow(static_cast<double>(deg), k);
        if (k > 0 && deg == 0) continue;
        sum = sum + (w == 1.0 ? e : w * e);
    }
    return sum;
}

std::vector<Expr> muXiSeq(const HomogeneousParts& parts, int n) {
    if (n > 5) throw PreconditionError("closed xi displays exist up to order 5");
    if (n < 1) throw PreconditionError("order must be at least 1");
    std::vector<Expr> X;
    for (int k = 0; k <= n; ++k) X.push_back(xiDerivative(parts, k));
    const Expr& x0 = X[0];
    const Expr& x1 = X[1];
    std::vector<Expr> out{-x1 / x0};
    if (n >= 2) out.push_back((2.0 * pow(x1, 2) - X[2] * x0) / pow(x0, 2));
    if (n >= 3) out.push_back((-6.0 * pow(x1, 3) + 6.0 * x0 * x1 * X[2] - pow(x0, 2) * X[3]) / pow(x0, 3));
    if (n >= 4)
        out.push_back((24.0 * pow(x1, 4) - 36.0 * x0 * pow(x1, 2) * X[2] + 8.0 * pow(x0, 2) * x1 * X[3] +
                       6.0 * pow(x0, 2) * pow(X[2], 2) - pow(x0, 3) * X[4]) /
                      pow(x0, 4));
    if (n >= 5)
        out.push_back((-120.0 * pow(x1, 5) + 240.0 * pow(x1, 3) * X[2] * x0 - 60.0 * pow(x1, 2) * X[3] * pow(x0, 2) -
                       90.0 * x1 * pow(X[2], 2) * pow(x0, 2) + 10.0 * x1 * X[4] * pow(x0, 3) +
                       20.0 * X[2] * X[3] * pow(x0, 3) - X[5] * pow(x0, 4)) /
                      pow(x0, 5));
    return out;
}

// ---------------------------------------------------------------- C-factor

namespace {

bool insidePolygon(const std::vector<Point>& poly, Point p) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point a = poly[i], b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

std::size_t nearestVertex(const std::vector<Point>& poly, Point p) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const double d = norm(poly[i] - p);
        if (d < bd) bd = d, best = i;
    }
    return best;
}

}  // namespace

double cFactorNumeric(const NormalizerPair& pair, Point z, const Cycle& anchorCycle, const IntegratorConfig& cfg,
                      const Region* region) {
    std::vector<CycleSample> samples = anchorCycle.samples;
    if (samples.size() < 64) samples = sampleTrajectory(pair.V, anchorCycle.anchor, anchorCycle.period, 257, cfg);
    std::vector<Point> poly;
    for (const auto& s : samples) poly.push_back(s.z);
    double diam = 0.0;
    for (const Point& p : poly) diam = std::max(diam, norm(p - poly.front()));
    if (!(diam > 0.0)) throw PreconditionError("degenerate anchor cycle");

    // bracket the crossing of the W-orbit through z with the anchor cycle
    const bool zInside = insidePolygon(poly, z);
    const Point near = poly[nearestVertex(poly, z)];
    const double first = dot(pair.W(z), near - z) >= 0.0 ? 1.0 : -1.0;
    double sigma = 0.0;
    bool bracketed = norm(near - z) < 1e-3 * diam;
    for (const double dir : {first, -first}) {
        if (bracketed) break;
        double s = 0.0;
        Point p = z;
        try {
            for (int step = 0; step < 400; ++step) {
                const double h = dir * 0.02 * diam / std::max(norm(pair.W(p)), 1e-300);
                const Point q = advanceW(pair.W, p, h, cfg, region);
                if (insidePolygon(poly, q) != zInside) {
                    double a = s, b = s + h;
                    for (int it = 0; it < 30; ++it) {
                        const double mid = 0.5 * (a + b);
                        if (insidePolygon(poly, advanceW(pair.W, z, mid, cfg, region)) != zInside) b = mid;
                        else a = mid;
                    }
                    sigma = 0.5 * (a + b);
                    bracketed = true;
                    break;
                }
                s += h;
                p = q;
            }
        } catch (const NumericalError&) {
            // this direction leaves the domain; try the other one
        } catch (const EvalError&) {
        }
    }
    if (!bracketed) throw NoReturn("the W-orbit through the point does not meet the anchor cycle");

    // Newton on phi_W(sigma, z) = phi_V(t, anchor)
    const Point w0 = advanceW(pair.W, z, sigma, cfg, region);
    double t = samples[nearestVertex(poly, w0)].t;
    const double scale = 1.0 + norm(z);
    double best = std::numeric_limits<double>::infinity(), bestSigma = sigma;
    for (int it = 0; it < 40; ++it) {
        const Point a = advanceW(pair.W, z, sigma, cfg, region);
        const Point b = flowMap(pair.V, anchorCycle.anchor, t, cfg);
        const Vec2 r = a - b;
        if (norm(r) < best) best = norm(r), bestSigma = sigma;
        if (norm(r) <= 1e-12 * scale) break;
        const Vec2 wa = pair.W(a), vb = pair.V(b);
        // [wa, -vb] (dsigma, dt) = -r
        const double det = -wa.x * vb.y + vb.x * wa.y;
        if (det == 0.0) throw NumericalError("W is tangent to the anchor cycle");
        const double ds = (-r.x * -vb.y - -vb.x * -r.y) / det;
        const double dt = (wa.x * -r.y - wa.y * -r.x) / det;
        sigma += ds;
        t += dt;
        if (std::abs(ds) <= 1e-14 * (1 + std::abs(sigma)) && std::abs(dt) <= 1e-14 * (1 + std::abs(t))) break;
    }
    if (!(best <= 1e-8 * scale)) throw NumericalError("C-factor: no convergence onto the anchor cycle");
    sigma = bestSigma;

    const auto mu = integrands({"mu"}, {[&](Point p) { return pair.cofactor(p); }});
    const PathResult path = integratePath(pair.W, z, sigma, &mu, cfg, region);
    return std::exp(-path.integrals[0]);
}

// ---------------------------------------------------------------- potentials

namespace {

struct LDerivs {
    double l, l1, l2, l3;
};

LDerivs derivs(const Expr& L, double t) {
    if (L.arity() != 1) throw PreconditionError("potential must be an expression in t");
    const Jet1 j = L.jet1(t, 3);
    return {j.value(), j.derivative(1), j.derivative(2), j.derivative(3)};
}

}  // namespace

double zeta(const Expr& L, double t) {
    const auto [l, l1, l2, l3] = derivs(L, t);
    return 2 * l * l2 * l2 - l1 * l1 * l2 - l * l1 * l3;
}

double zetaScale(const Expr& L, double t) {
    const auto [l, l1, l2, l3] = derivs(L, t);
    return std::abs(2 * l * l2 * l2) + std::abs(l1 * l1 * l2) + std::abs(l * l1 * l3);
}

double zetaLambda(const Expr& L, double t, double lambda) {
    const auto [l, l1, l2, l3] = derivs(L, t);
    return 2 * l * l * l2 * l2 + l * l1 * l1 * l2 - l * l * l1 * l3 - lambda * std::pow(l1, 4);
}

double zetaLambdaRatio(const Expr& L, double t) {
    const auto [l, l1, l2, l3] = derivs(L, t);
    if (l1 == 0.0) throw EvalError("L' vanishes");
    return (2 * l * l * l2 * l2 + l * l1 * l1 * l2 - l * l * l1 * l3) / std::pow(l1, 4);
}

double zetaDisplayJ(double a, double b, double c, double t) {
    const double t4 = std::pow(t, 4), t8 = t4 * t4, t12 = t8 * t4;
    const double num = 64 * t4 * (6 * b * c * c * t12 + (56 * a * c * c - 5 * b * b * c) * t8 + 18 * a * b * c * t4 + 3 * a * b * b);
    return num / std::pow(a + b * t4 + c * t8, 6);
}

double muFromIntegratingFactor(const JacobianTriple& triple, const Expr& rho, Point z) {
    const Jet2 d = triple.deltaField().jet(z, 1);
    const Jet2 r = rho.jet2(z, 1);
    if (!(d.value() > 0.0)) throw PreconditionError("jacobian determinant must be positive");
    if (!(r.value() > 0.0)) throw PreconditionError("inverse integrating factor must be positive");
    const Vec2 w = triple.Wdelta()(z);
    const double gx = d.coeff(1, 0) / d.value() + r.coeff(1, 0) / r.value();
    const double gy = d.coeff(0, 1) / d.value() + r.coeff(0, 1) / r.value();
    return -(w.x * gx + w.y * gy);
}

// ---------------------------------------------------------------- conditions

std::string PotentialConditionReport::verdict() const {
    if (holds) return "holds-on-samples";
    std::ostringstream os;
    os.precision(12);
    os << "violated-at(t=" << *violatedAt << ")";
    return os.str();
}

namespace {

template <class Value, class Scale>
PotentialConditionReport sampleCondition(double lo, double hi, int samples, double relTol, Value value, Scale scale) {
    if (!(hi > lo) || samples < 2) throw PreconditionError("need an interval with at least two samples");
    PotentialConditionReport r;
    r.lo = lo;
    r.hi = hi;
    r.minValue = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = lo + (hi - lo) * i / (samples - 1);
        if (std::abs(t) < 1e-12) continue;
        ++r.samples;
        const double v = value(t);
        if (v < r.minValue) r.minValue = v, r.minAt = t;
        const double s = scale(t);
        if (v < -relTol * s) {
            r.holds = false;
            const double normalized = v / s;
            if (normalized < worst) {
                worst = normalized;
                r.violatedAt = t;
                r.violatedValue = v;
            }
        }
    }
    return r;
}

}  // namespace

PotentialConditionReport conditionC(const Expr& L, double lo, double hi, int samples, double relTol) {
    return sampleCondition(
        lo, hi, samples, relTol, [&](double t) { return zeta(L, t); }, [&](double t) { return zetaScale(L, t); });
}

PotentialConditionReport conditionCLambda(const Expr& L, double lambda, double lo, double hi, int samples,
                                          double relTol) {
    auto r = sampleCondition(
        lo, hi, samples, relTol, [&](double t) { return zetaLambda(L, t, lambda); },
        [&](double t) {
            const auto [l, l1, l2, l3] = derivs(L, t);
            return std::abs(2 * l * l * l2 * l2) + std::abs(l * l1 * l1 * l2) + std::abs(l * l * l1 * l3) +
                   std::abs(lambda) * std::pow(l1, 4);
        });
    r.lambda = lambda;
    return r;
}

}  // namespace perfun
