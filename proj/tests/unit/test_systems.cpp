#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "perfun/catalog.hpp"
#include "perfun/errors.hpp"
#include "perfun/systems.hpp"

using namespace perfun;
using doctest::Approx;

namespace {

Expr xy(const char* s) { return parseExpression(s, 2); }
Expr t1(const char* s) { return parseExpression(s, 1); }

bool relClose(double a, double b, double rel, double abs = 1e-12) {
    return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST_CASE("hamiltonian vector fields") {
    const VectorField h = buildHamiltonian(xy("(x^2 + y^2)/2"));
    CHECK(h({0.3, 0.7}).x == Approx(0.7));
    CHECK(h({0.3, 0.7}).y == Approx(-0.3));
    const VectorField d = buildHamiltonian(xy("(x^2 + x^4 + y^2)/2"));
    CHECK(d({1.0, 2.0}).x == Approx(2.0));
    CHECK(d({1.0, 2.0}).y == Approx(-3.0));
    const VectorField s = buildHamiltonian(xy("sin(x)^2 + sin(y)^2"));
    const Point p{0.4, 0.9};
    CHECK(s(p).x == Approx(2 * std::sin(0.9) * std::cos(0.9)));
    CHECK(s(p).y == Approx(-2 * std::sin(0.4) * std::cos(0.4)));
}

TEST_CASE("universal normalizer") {
    const VectorField w = buildUniversalNormalizer(xy("(x^2 + y^2)/2"));
    CHECK(w({1.0, 0.0}).x == Approx(1.0));
    CHECK(w({1.0, 0.0}).y == Approx(0.0));
    const VectorField d = buildUniversalNormalizer(xy("(x^2 + x^4 + y^2)/2"));
    CHECK(d({1.0, 0.0}).x == Approx(1.0 / 3.0));
    const VectorField c = buildUniversalNormalizer(xy("x^2/2 - 2*x^3/3 + x^4/4 + y^2/2"));
    CHECK(c({0.5, 0.0}).x == Approx(8.0));
    CHECK_THROWS_AS(d({0.0, 0.0}), EvalError);
}

TEST_CASE("separable construction") {
    const SeparableSystem harm(t1("t^2/2"), t1("t^2/2"));
    CHECK(harm.Ws()({0.3, -0.2}).x == Approx(0.3));
    CHECK(harm.Ws()({0.3, -0.2}).y == Approx(-0.2));
    CHECK(harm.muS()({0.3, -0.2}) == Approx(0.0));
    CHECK(harm.muS()({0.0, 0.0}) == Approx(0.0));

    const SeparableSystem h2(t1("t^4/4"), t1("t^4/4"));
    CHECK(h2.Ws()({0.6, 0.2}).x == Approx(0.3));
    CHECK(h2.muS()({0.6, 0.2}) == Approx(-1.0));
    CHECK(h2.muS()({0.0, 0.2}) == Approx(-1.0));

    const SeparableSystem duff(t1("(t^2 + t^4)/2"), t1("t^2/2"));
    CHECK(duff.muS()({1.0, 0.0}) == Approx(-5.0 / 9.0).epsilon(1e-14));
    const Expr printed = xy("-x^2*(3 + 2*x^2)/(1 + 2*x^2)^2");
    for (double x : {-1.3, -0.2, 1e-5, 0.0, 0.01, 0.7, 2.0})
        CHECK(relClose(duff.muS()({x, 0.4}), printed({x, 0.4}), 1e-12));

    CHECK_THROWS_AS(SeparableSystem(t1("t^3"), t1("t^2/2")), PreconditionError);
    CHECK_THROWS_AS(SeparableSystem(t1("-t^2"), t1("t^2/2")), PreconditionError);
}

TEST_CASE("canonical shift and axis series") {
    // expcos: G(0) = e^-2, leading term 3e^-2/4 x^4
    const Potential g(t1("exp(cos(t)^3 - 3*cos(t))"));
    CHECK(g.leadingOrder() == 4);
    CHECK(g.leadingCoeff() == Approx(0.75 * std::exp(-2.0)).epsilon(1e-10));
    CHECK(g.value(0.0) == 0.0);
    CHECK(g.axisEps() > 1e-4);
    // Gamma continuous across the switch between series and quotient
    const double e = g.axisEps();
    const double below = g.gamma(e * (1 - 1e-9), 2)[1];
    const double above = g.gamma(e * (1 + 1e-9), 2)[1];
    CHECK(relClose(below, above, 1e-7));
    CHECK(g.gamma(0.0, 1)[1] == Approx(0.5).epsilon(1e-12));

    const Potential s(t1("sin(t)^2"));
    for (double t : {0.0, 1e-6, 0.3, -1.2}) {
        CHECK(relClose(s.gamma(t, 0).value(), std::tan(t), 1e-12, 1e-15));
        CHECK(relClose(s.signedRoot(t), std::sqrt(2.0) * std::sin(t), 1e-12, 1e-15));
        CHECK(relClose(s.signedRootDerivative(t), std::sqrt(2.0) * std::cos(t), 1e-12));
    }
}

TEST_CASE("cubic cofactor is twice the printed display") {
    const SeparableSystem cubic(t1("t^2/2 - 2*t^3/3 + t^4/4"), t1("t^2/2"));
    const Expr printed = xy("x*(3*x^2 - 9*x + 8)/(12*(1 - x)^3)");
    for (double x : {-0.6, -0.1, 0.2, 0.5, 0.9, 1.4})
        CHECK(relClose(cubic.muS()({x, 0.1}), 2.0 * printed({x, 0.1}), 1e-10));
    CHECK_THROWS_AS(cubic.Ws()({1.0, 0.0}), EvalError);
}

TEST_CASE("jacobian triples") {
    const JacobianTriple id(xy("x"), xy("y"));
    CHECK(id.deltaField()({0.3, 0.4}) == Approx(1.0));
    CHECK(id.VPsi()({0.3, 0.4}).x == Approx(0.4));
    CHECK(id.VPsi()({0.3, 0.4}).y == Approx(-0.3));
    CHECK(id.Wdelta()({0.3, 0.4}).x == Approx(0.3));
    CHECK(id.Wdelta()({0.3, 0.4}).y == Approx(0.4));

    const JacobianTriple sh(xy("x"), xy("y + x^2"));
    const Point p{0.7, -0.3};
    CHECK(sh.VPsi()(p).x == Approx(p.y + p.x * p.x));
    CHECK(sh.VPsi()(p).y == Approx(-p.x - 2 * p.x * (p.y + p.x * p.x)));

    // signed roots of sin^2 reproduce W_s = (tan x, tan y)
    const JacobianTriple sq(xy("sign(x)*sqrt(2)*sqrt(sin(x)^2)"), xy("sign(y)*sqrt(2)*sqrt(sin(y)^2)"));
    const Point q{0.4, -0.8};
    CHECK(sq.Wdelta()(q).x == Approx(std::tan(0.4)));
    CHECK(sq.Wdelta()(q).y == Approx(std::tan(-0.8)));
}

TEST_CASE("lie bracket, cofactor and transversality examples") {
    const VectorField rot = vectorField(xy("y"), xy("-x"));
    const VectorField rad = vectorField(xy("x"), xy("y"));
    CHECK(norm(lieBracket(rot, rad, {0.3, -1.1})) < 1e-15);
    CHECK(norm(lieBracket(rot, scaled(rad, 2.0), {0.3, -1.1})) < 1e-15);
    CHECK(nCofactor(rot, rad, {0.3, -1.1}) == 0.0);
    CHECK(transversality(rot, rad, {1.0, 0.0}) == Approx(1.0));
    CHECK(transversality(rot, rot, {1.0, 0.0}) == 0.0);

    const SeparableSystem duff(t1("(t^2 + t^4)/2"), t1("t^2/2"));
    const Vec2 b = lieBracket(duff.V(), duff.Ws(), {1.0, 0.0});
    CHECK(b.x == Approx(0.0));
    CHECK(b.y == Approx(5.0 / 3.0).epsilon(1e-13));
    CHECK(nCofactor(duff.V(), duff.Ws(), {1.0, 0.0}) == Approx(-5.0 / 9.0).epsilon(1e-13));
    CHECK(transversality(duff.V(), duff.Ws(), {1.0, 0.0}) == Approx(2.0));

    const NormalizerPair u = hamiltonianUniversalPair(xy("(x^2 + x^4 + y^2)/2"));
    CHECK(nCofactor(u.V, u.W, {1.0, 0.0}) == Approx(-2.0 / 3.0).epsilon(1e-13));
    CHECK(u.cofactor({1.0, 0.0}) == Approx(-2.0 / 3.0).epsilon(1e-13));
    CHECK_THROWS_AS(nCofactor(rot, rad, {0.0, 0.0}), StationaryPoint);
}

TEST_CASE("reparam center") {
    const NormalizerPair one = buildReparamCenter(xy("1 + 0*x"));
    CHECK(one.cofactor({0.4, 0.2}) == 0.0);
    const NormalizerPair rq = buildReparamCenter(xy("(x^2 + y^2) - (x^2 + y^2)^2"));
    const Point p{0.5, 0.0};
    // xi = 3/16, xi' = 2 xi_2 - 4 xi_4 = 1/2 - 1/4
    CHECK(rq.cofactor(p) == Approx(-(0.5 - 0.25) / (3.0 / 16.0)));
    CHECK(nCofactor(rq.V, rq.W, p) == Approx(rq.cofactor(p)).epsilon(1e-12));
    const NormalizerPair pos = buildReparamCenter(xy("1 - (x^4 + y^2*x^2)"));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int i = 0; i < 20; ++i) CHECK(pos.cofactor({u(rng), u(rng)}) >= 0.0);
}

namespace {

std::vector<Point> probes(std::mt19937& rng, const Region& r, int n) {
    std::uniform_real_distribution<double> ux(r.xmin, r.xmax), uy(r.ymin, r.ymax);
    std::vector<Point> out;
    while (static_cast<int>(out.size()) < n) {
        const Point p{ux(rng), uy(rng)};
        if (std::abs(p.x) > 1e-3 && std::abs(p.y) > 1e-3) out.push_back(p);
    }
    return out;
}

}  // namespace

TEST_CASE("property: catalog pairs are normalizers with consistent cofactors") {
    std::mt19937 rng(20240611);
    for (const char* name : {"harmonic", "duffing", "homog", "sinsq", "expcos", "radial-quartic", "cor10"}) {
        const SystemInstance s = buildSystem(name);
        Region r = s.region;
        if (std::string(name) == "radial-quartic") r = {-0.65, 0.65, -0.65, 0.65};
        if (std::string(name) == "expcos") r = {-3.0, 3.0, -2.0, 2.0};
        if (std::string(name) == "cor10") r = {-1.5, 1.5, -1.2, 1.2};
        if (std::string(name) == "sinsq") r = {-1.4, 1.4, -1.4, 1.4};
        for (const PairSetup* ps : {&*s.primary, &*s.universal}) {
            const NormalizerPair& pr = ps->pair;
            for (const Point p : probes(rng, r, 32)) {
                INFO(name << " " << kindName(pr.kind) << " at " << p.x << "," << p.y);
                const Vec2 b = lieBracket(pr.V, pr.W, p);
                const double mu = nCofactor(pr.V, pr.W, p);
                CHECK(norm(b - mu * pr.V(p)) <= 1e-8 * (1 + norm(b)));
                CHECK(transversality(pr.V, pr.W, p) != 0.0);
                if (pr.mu) CHECK(relClose((*pr.mu)(p), mu, 1e-8));
            }
        }
    }
}

TEST_CASE("property: rescaling and linear combinations of normalizers") {
    const SeparableSystem duff(t1("(t^2 + t^4)/2"), t1("t^2/2"));
    const VectorField& V = duff.V();
    const VectorField& W = duff.Ws();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const Expr alpha = xy("x*y + sin(y)");
    const double beta = 1.7;
    // W' = alpha V + beta W
    VectorField W2;
    const ScalarField a(alpha);
    W2.x = ScalarField([=](Point p, int n) { return a.jet(p, n) * V.x.jet(p, n) + W.x.jet(p, n) * beta; }, "comb");
    W2.y = ScalarField([=](Point p, int n) { return a.jet(p, n) * V.y.jet(p, n) + W.y.jet(p, n) * beta; }, "comb");
    for (int i = 0; i < 50; ++i) {
        const Point p{u(rng), u(rng)};
        const double mu = nCofactor(V, W, p);
        CHECK(relClose(nCofactor(V, scaled(W, 2.5), p), 2.5 * mu, 1e-12));
        const Vec2 v = V(p);
        const double dVa = v.x * alpha.derivative(0)(p) + v.y * alpha.derivative(1)(p);
        CHECK(relClose(nCofactor(V, W2, p), beta * mu + dVa, 1e-10));
        CHECK(normalizerResidual(V, W2, p) <= 1e-8 * (1 + norm(lieBracket(V, W2, p))));
    }
}

TEST_CASE("property: cofactor equals the W-derivative of ln m") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    const NormalizerPair rq = buildReparamCenter(xy("(x^2 + y^2) - (x^2 + y^2)^2 + 0.1*x^2*y"));
    const JacobianTriple jt(xy("x + 0.3*y^2"), xy("y + 0.2*x^3"));
    const NormalizerPair jp = jt.pair();
    for (const NormalizerPair* pr : {&rq, &jp}) {
        for (int i = 0; i < 40; ++i) {
            const Point p{u(rng), u(rng)};
            if (norm(p) < 0.05) continue;
            const Jet2 m = pr->cFactor->jet(p, 1);
            const Vec2 w = pr->W(p);
            const double dlnm = (w.x * m.coeff(1, 0) + w.y * m.coeff(0, 1)) / m.value();
            CHECK(relClose(nCofactor(pr->V, pr->W, p), dlnm, 1e-8, 1e-10));
            CHECK(relClose(pr->cofactor(p), dlnm, 1e-8, 1e-10));
        }
    }
}

TEST_CASE("catalog listing and parameters") {
    for (const char* n : {"harmonic", "duffing", "cubic", "homog", "sinsq", "expcos", "radial-quartic", "cor10",
                          "rational-potential", "cor11-j", "cor11-jj"})
        CHECK_NOTHROW(findCatalogEntry(n));
    CHECK_THROWS_AS(findCatalogEntry("nope"), PreconditionError);
    const auto& h = findCatalogEntry("homog");
    CHECK(parseParams(h, "k=3").at("k") == 3.0);
    CHECK(parseParams(h, "3").at("k") == 3.0);
    CHECK_THROWS_AS(parseParams(h, "q=3"), PreconditionError);
    CHECK_THROWS_AS(parseParams(h, "1,2"), PreconditionError);
    const auto& c = findCatalogEntry("cor10");
    const auto p = parseParams(c, "1,4,c=2");
    CHECK(p.at("a") == 1.0);
    CHECK(p.at("b") == 4.0);
    CHECK(p.at("c") == 2.0);
    const SystemInstance hk = buildSystem("homog", {{"k", 3.0}});
    CHECK(hk.primary->pair.cofactor({0.4, 0.7}) == Approx(-4.0 / 3.0));
    CHECK(buildSystem("cor11-j").potentialOnly);
    const SystemInstance e = buildSystem("expcos");
    CHECK(e.primary->sMin == Approx(-1.738).epsilon(1e-3));
    CHECK(e.primary->sMax == Approx(0.4238).epsilon(1e-3));
}
