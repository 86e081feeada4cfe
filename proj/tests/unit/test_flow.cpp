#include <cmath>
#include <numbers>

#include "doctest.h"
#include "perfun/catalog.hpp"
#include "perfun/errors.hpp"
#include "perfun/flow.hpp"

using namespace perfun;
using doctest::Approx;

namespace {

Expr xy(const char* s) { return parseExpression(s, 2); }
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// 4 int_0^1 dx / sqrt(2 - x^2 - x^4), 1-D adaptive quadrature at 30 digits
constexpr double kDuffingT = 4.00430952182442492;

VectorField harmonic() { return vectorField(xy("y"), xy("-x")); }

}  // namespace

TEST_CASE("harmonic period") {
    const Cycle c = integrateCycle(harmonic(), {1.0, 0.0}, {});
    CHECK(std::abs(c.period - kTwoPi) <= 1e-8);
    CHECK(c.closure < 1e-9);
    CHECK(c.samples.size() > 3);
    CHECK(c.samples.back().t == c.period);
}

TEST_CASE("radial quartic period") {
    const SystemInstance s = buildSystem("radial-quartic");
    const Cycle c = integrateCycle(s.primary->pair.V, {0.5, 0.0}, {});
    CHECK(std::abs(c.period - 32.0 * std::numbers::pi / 3.0) <= 1e-6);
}

TEST_CASE("duffing period matches the energy quadrature") {
    const SystemInstance s = buildSystem("duffing");
    const Cycle c = integrateCycle(s.primary->pair.V, {1.0, 0.0}, {});
    CHECK(std::abs(c.period - kDuffingT) <= 1e-6 * kDuffingT);
    CHECK(std::abs(c.period - kDuffingT) <= 1e-9);
}

TEST_CASE("cycle quadratures") {
    const IntegrandSet one = integrands({"one"}, {[](Point) { return 1.0; }});
    const Cycle h = cycleQuadratures(harmonic(), {1.0, 0.0}, one, {});
    CHECK(h.quadratures[0] == Approx(kTwoPi).epsilon(1e-10));

    const SystemInstance hk = buildSystem("homog", {{"k", 2.0}});
    const NormalizerPair& pr = hk.primary->pair;
    const IntegrandSet mu = integrands({"mu"}, {[&](Point p) { return pr.cofactor(p); }});
    const Cycle c = cycleQuadratures(pr.V, {1.0, 0.0}, mu, {});
    CHECK(c.quadratures[0] == Approx(-c.period).epsilon(1e-9));
}

TEST_CASE("quadrature additivity") {
    const SystemInstance d = buildSystem("duffing");
    const VectorField& V = d.primary->pair.V;
    auto f1 = [](Point p) { return p.x * p.x * std::exp(p.y); };
    auto f2 = [](Point p) { return std::sin(p.x + 2 * p.y); };
    const IntegrandSet three = integrands({"f1", "f2", "sum"}, {f1, f2, [&](Point p) { return f1(p) + f2(p); }});
    const Cycle c = cycleQuadratures(V, {0.8, 0.1}, three, {});
    CHECK(std::abs(c.quadratures[0] + c.quadratures[1] - c.quadratures[2]) <= 1e-10);
    const Cycle a = cycleQuadratures(V, {0.8, 0.1}, integrands({"f1"}, {f1}), {});
    const Cycle b = cycleQuadratures(V, {0.8, 0.1}, integrands({"f2"}, {f2}), {});
    CHECK(std::abs(a.quadratures[0] + b.quadratures[0] - c.quadratures[2]) <= 1e-9);
}

TEST_CASE("singular integrand is reported") {
    const SystemInstance cubic = buildSystem("cubic");
    const NormalizerPair& pr = cubic.primary->pair;
    const IntegrandSet mu = integrands({"mu1"}, {[&](Point p) { return pr.cofactor(p); }});
    CHECK_NOTHROW(cycleQuadratures(pr.V, {0.5, 0.0}, mu, {}));
    CHECK_THROWS_AS(cycleQuadratures(pr.V, {-0.5, 0.0}, mu, {}), IntegrandBlowup);
    // the outer cycle itself is fine
    CHECK_NOTHROW(integrateCycle(pr.V, {-0.5, 0.0}, {}));
}

TEST_CASE("cycle errors") {
    CHECK_THROWS_AS(integrateCycle(harmonic(), {0.0, 0.0}, {}), StationaryPoint);
    // saddle: no return
    IntegratorConfig cfg;
    cfg.maxTime = 50.0;
    CHECK_THROWS_AS(integrateCycle(vectorField(xy("y"), xy("x")), {1.0, 0.5}, cfg), NoReturn);
    IntegratorConfig bad;
    bad.guardFraction = 1.5;
    CHECK_THROWS_AS(integrateCycle(harmonic(), {1.0, 0.0}, bad), PreconditionError);
}

TEST_CASE("advance along normalizer orbits") {
    const IntegratorConfig cfg;
    const Point e = advanceW(vectorField(xy("x"), xy("y")), {1.0, 0.0}, 1.0, cfg);
    CHECK(e.x == Approx(std::exp(1.0)).epsilon(1e-10));
    CHECK(std::abs(e.y) < 1e-14);
    const Point e2 = advanceW(vectorField(xy("x/2"), xy("y/2")), {1.0, 0.0}, 2.0, cfg);
    CHECK(e2.x == Approx(std::exp(1.0)).epsilon(1e-10));
    const Point back = advanceW(vectorField(xy("x"), xy("y")), e, -1.0, cfg);
    CHECK(back.x == Approx(1.0).epsilon(1e-10));

    const Expr H = xy("(x^2 + x^4 + y^2)/2");
    const VectorField W = buildUniversalNormalizer(H);
    for (const Point z : {Point{0.5, 0.2}, Point{-1.0, 0.7}}) {
        const Point w = advanceW(W, z, 0.3, cfg);
        CHECK(std::abs(H(w) - H(z) - 0.3) <= 1e-6);
    }
    const Region box{-2.0, 2.0, -2.0, 2.0};
    CHECK_THROWS_AS(advanceW(vectorField(xy("x"), xy("y")), {1.0, 0.0}, 5.0, cfg, &box), RegionExit);
    CHECK_THROWS_AS(advanceW(vectorField(xy("x"), xy("y")), {0.0, 0.0}, 1.0, cfg), StationaryPoint);
}

TEST_CASE("flow map") {
    const IntegratorConfig cfg;
    const Point q = flowMap(harmonic(), {1.0, 0.0}, std::numbers::pi / 2, cfg);
    CHECK(std::abs(q.x) <= 1e-8);
    CHECK(std::abs(q.y + 1.0) <= 1e-8);
    const Point back = flowMap(harmonic(), {1.0, 0.0}, kTwoPi, cfg);
    CHECK(norm(back - Point{1.0, 0.0}) <= 1e-8);
    const SystemInstance d = buildSystem("duffing");
    const Expr& H = *d.hamiltonian;
    const Point z{1.0, 0.0};
    for (const auto& s : sampleTrajectory(d.primary->pair.V, z, kDuffingT, 9, cfg))
        CHECK(std::abs(H(s.z) - H(z)) <= 1e-8);
}

TEST_CASE("property: the period is constant along the cycle") {
    const SystemInstance d = buildSystem("duffing");
    const VectorField& V = d.primary->pair.V;
    const IntegratorConfig cfg;
    const Cycle c = integrateCycle(V, {0.9, 0.0}, cfg);
    const double tol = 2 * cfg.closureTol;
    for (std::size_t i = 1; i < c.samples.size(); i += c.samples.size() / 7) {
        const Cycle r = integrateCycle(V, c.samples[i].z, cfg, false);
        CHECK(std::abs(r.period - c.period) <= tol);
    }
}

TEST_CASE("property: time reversal keeps the period") {
    for (const char* name : {"duffing", "sinsq", "expcos"}) {
        const SystemInstance s = buildSystem(name);
        const VectorField& V = s.primary->pair.V;
        const Cycle f = integrateCycle(V, s.anchor, {}, false);
        const Cycle b = integrateCycle(reversed(V), s.anchor, {}, false);
        CHECK(std::abs(f.period - b.period) <= 1e-8 * f.period);
    }
}

TEST_CASE("property: fifth-order convergence in the step size") {
    // error ratio when halving a fixed step; a 5th-order scheme gives about 32
    double prev = 0.0;
    for (const double h : {0.2, 0.1, 0.05}) {
        IntegratorConfig cfg;
        cfg.fixedStep = h;
        const double err = std::abs(integrateCycle(harmonic(), {1.0, 0.0}, cfg, false).period - kTwoPi);
        if (prev > 0.0) CHECK(prev / err >= 8.0);
        prev = err;
    }
}
