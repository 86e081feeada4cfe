#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "perfun/catalog.hpp"
#include "perfun/cofactors.hpp"
#include "perfun/errors.hpp"

using namespace perfun;
using doctest::Approx;

namespace {

Expr xy(const char* s) { return parseExpression(s, 2); }
Expr t1(const char* s) { return parseExpression(s, 1); }

bool close(double a, double b, double rel, double abs = 1e-12) {
    return std::abs(a - b) <= std::max(rel * std::max(std::abs(a), std::abs(b)), abs);
}

NormalizerPair custom(const char* v1, const char* v2, const char* w1, const char* w2) {
    NormalizerPair p;
    p.V = vectorField(xy(v1), xy(v2));
    p.W = vectorField(xy(w1), xy(w2));
    return p;
}

// random point with both coordinates in [lo, hi] up to sign
Point offAxis(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution flip;
    return {flip(rng) ? -mag(rng) : mag(rng), flip(rng) ? -mag(rng) : mag(rng)};
}

}  // namespace

TEST_CASE("recursion examples") {
    const SystemInstance h2 = buildSystem("homog", {{"k", 2.0}});
    const CofactorSeq s = muRecursive(h2.primary->pair, {0.7, 0.3}, 3);
    REQUIRE(s.mu.size() == 3);
    CHECK(s.mu[0] == Approx(-1.0).epsilon(1e-12));
    CHECK(s.mu[1] == Approx(1.0).epsilon(1e-12));
    CHECK(s.mu[2] == Approx(-1.0).epsilon(1e-12));

    const CofactorSeq h = muRecursive(custom("y", "-x", "x", "y"), {0.4, -0.9}, 4);
    for (double m : h.mu) CHECK(std::abs(m) < 1e-14);

    const SystemInstance d = buildSystem("duffing");
    const CofactorSeq ds = muRecursive(d.primary->pair, {1.0, 0.0}, 2);
    CHECK(std::abs(ds.mu[0] + 5.0 / 9.0) <= 1e-12);
    CHECK(std::abs(ds.mu[1] - 7.0 / 27.0) <= 1e-10);
    CHECK(close(ds.mu[0], nCofactor(d.primary->pair.V, d.primary->pair.W, {1.0, 0.0}), 1e-10));

    CHECK_THROWS_AS(muRecursive(h2.primary->pair, {0.0, 0.0}, 2), StationaryPoint);
    CHECK_THROWS_AS(muRecursive(h2.primary->pair, {1.0, 0.0}, 0), PreconditionError);
    CHECK_THROWS_AS(muRecursive(h2.primary->pair, {1.0, 0.0}, 40), PreconditionError);
}

TEST_CASE("explicit polynomials") {
    auto p = muExplicitPolynomials({1.0, 0.0, 0.0}, 3);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 1.0);
    p = muExplicitPolynomials({0.0, 1.0, 0.0}, 3);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
    p = muExplicitPolynomials({2.0, 1.0, 3.0, 0.0}, 4);
    CHECK(p[2] == 67.0);
    CHECK_THROWS_AS(muExplicitPolynomials({1, 1, 1, 1, 1, 1}, 6), PreconditionError);
}

TEST_CASE("universal cofactor closed form") {
    CHECK(std::abs(muHClosed(xy("(x^2 + y^2)/2"), {0.3, -1.2})) < 1e-15);
    const Expr H = xy("(x^2 + x^4 + y^2)/2");
    CHECK(close(muHClosed(H, {1.0, 0.0}), -2.0 / 3.0, 1e-12));
    // the expanded display at (1, 0)
    CHECK(close(-6.0 * (1 + 0) / 81.0 * 9.0, -2.0 / 3.0, 1e-12));
    CHECK_THROWS_AS(muHClosed(H, {0.0, 0.0}), StationaryPoint);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const Point z = offAxis(rng, 0.1, 1.5);
        const double g1 = z.x + 2 * std::pow(z.x, 3), g2 = 1 + 6 * z.x * z.x, f1 = z.y, f2 = 1.0;
        const double sep = (f2 - g2) * (g1 * g1 - f1 * f1) / std::pow(g1 * g1 + f1 * f1, 2);
        CHECK(close(muHClosed(H, z), sep, 1e-10));
        CHECK(close(muHClosed(H, z), hamiltonianUniversalPair(H).cofactor(z), 1e-10));
    }
}

TEST_CASE("second cofactor closed forms") {
    const SystemInstance harm = buildSystem("harmonic");
    CHECK(std::abs(muS2Closed(*harm.separable, {0.4, 0.7})) < 1e-14);
    const SystemInstance d = buildSystem("duffing");
    CHECK(isHalfSquare(d.separable->F()));
    CHECK_FALSE(isHalfSquare(d.separable->G()));
    CHECK(close(muS2Closed(*d.separable, {1.0, 0.3}), 7.0 / 27.0, 1e-12));
    CHECK(close(muS2Corollary9(d.separable->G(), 1.0), 7.0 / 27.0, 1e-12));
    const SystemInstance h2 = buildSystem("homog", {{"k", 2.0}});
    CHECK(close(muS2Closed(*h2.separable, {0.4, 0.9}), 1.0, 1e-12));
    CHECK(close(muS2Closed(*h2.separable, {0.0, 0.9}), 1.0, 1e-12));
}

TEST_CASE("property: recursion matches the mu_s2 display") {
    struct Case {
        const char* name;
        std::map<std::string, double> params;
        double lo, hi;
    };
    for (const Case& c : {Case{"duffing", {}, 0.05, 1.5}, Case{"sinsq", {}, 0.05, 1.45},
                          Case{"homog", {{"k", 3.0}}, 0.1, 2.0}, Case{"expcos", {}, 0.2, 2.8}}) {
        const SystemInstance s = buildSystem(c.name, c.params);
        std::mt19937_64 rng(1234);
        int bad = 0;
        for (int i = 0; i < 100; ++i) {
            const Point z = offAxis(rng, c.lo, c.hi);
            const double rec = muRecursive(s.primary->pair, z, 2).mu[1];
            if (!close(rec, muS2Display(*s.separable, z), 1e-8)) ++bad;
            if (!close(rec, muS2Closed(*s.separable, z), 1e-8)) ++bad;
            if (!close(rec, s.separable->muS2()(z), 1e-8)) ++bad;
        }
        INFO(c.name);
        CHECK(bad == 0);
    }
}

TEST_CASE("property: the Gamma form specializes to the quartic form") {
    std::mt19937_64 rng(99);
    for (const char* name : {"duffing", "expcos", "cor10"}) {
        const SystemInstance s = buildSystem(name);
        std::uniform_real_distribution<double> xd(0.1, 1.4);
        for (int i = 0; i < 50; ++i) {
            const double x = xd(rng);
            const Point z{x, 0.37};
            CHECK(close(s.separable->muS2()(z), muS2Corollary9(s.separable->G(), x), 1e-8));
        }
    }
}

TEST_CASE("property: explicit polynomials agree with the recursion") {
    std::vector<NormalizerPair> pairs{buildSystem("radial-quartic").primary->pair,
                                      buildReparamCenter(xy("1 + x^2 + 3*x*y^2 + y^4"), "xi"),
                                      hamiltonianUniversalPair(xy("(x^2 + x^4 + y^2)/2")),
                                      buildSystem("duffing").primary->pair, buildSystem("sinsq").primary->pair};
    std::mt19937_64 rng(5);
    for (const auto& pr : pairs) {
        for (int i = 0; i < 20; ++i) {
            const Point z = offAxis(rng, 0.15, 0.6);
            const auto rec = muRecursive(pr, z, 5).mu;
            const auto poly = muExplicitPolynomials(directionalDerivatives(pr, z, 4), 5);
            for (int j = 0; j < 4; ++j) CHECK(close(poly[j], rec[j + 1], 1e-8));
        }
    }
}

TEST_CASE("xi displays") {
    const HomogeneousParts one{{0, xy("1")}};
    for (const Expr& e : muXiSeq(one, 5)) CHECK(e({0.3, 0.8}) == 0.0);

    const HomogeneousParts xi{{0, xy("1")}, {2, xy("x^2 + y^2")}};
    CHECK(xiDerivative(xi, 1)({1.0, 0.0}) == 2.0);
    CHECK(xiDerivative(xi, 2)({1.0, 0.0}) == 4.0);
    CHECK(std::abs(muXiSeq(xi, 2)[1]({1.0, 0.0})) < 1e-15);

    // quadratic form in xi_k, xi_n for xi = xi_k - xi_n
    std::mt19937_64 rng(3);
    for (const auto [k, n] : {std::pair{2, 4}, std::pair{1, 3}, std::pair{3, 5}}) {
        const Expr a = k == 2 ? xy("x^2 + 2*y^2 + x*y") : k == 1 ? xy("x + 3*y") : xy("x^3 + y^3");
        const Expr b = n == 4 ? xy("x^4 - x^2*y^2") : n == 3 ? xy("x^2*y") : xy("x^5 + x*y^4");
        const HomogeneousParts parts{{k, a}, {n, -1.0 * b}};
        for (int i = 0; i < 10; ++i) {
            const Point z = offAxis(rng, 0.1, 1.0);
            const double ak = a(z), bn = -b(z);
            const double x0 = ak + bn, x1 = k * ak + n * bn, x2 = k * k * ak + n * n * bn;
            const double num = 2 * x1 * x1 - x2 * x0;
            const double B = b(z);
            const double form = k * k * ak * ak + (k * k + n * n - 4.0 * k * n) * ak * B + n * n * B * B;
            CHECK(close(num, form, 1e-12));
            CHECK(close(muXiSeq(parts, 2)[1](z) * x0 * x0, form, 1e-10));
        }
    }
    CHECK_THROWS_AS(muXiSeq(xi, 6), PreconditionError);
}

TEST_CASE("property: xi displays agree with the recursion") {
    const HomogeneousParts parts{{0, xy("1")}, {2, xy("x^2 - x*y")}, {3, xy("y^3")}, {4, xy("-(x^2 + y^2)^2")}};
    Expr xi = parts[0].second;
    for (std::size_t i = 1; i < parts.size(); ++i) xi = xi + parts[i].second;
    const NormalizerPair pr = buildReparamCenter(xi);
    const auto seq = muXiSeq(parts, 5);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 30; ++i) {
        const Point z = offAxis(rng, 0.05, 0.5);
        const auto rec = muRecursive(pr, z, 5).mu;
        for (int j = 0; j < 5; ++j) CHECK(close(seq[j](z), rec[j], 1e-8, 1e-11));
    }
}

TEST_CASE("numerical C-factor") {
    const IntegratorConfig cfg;
    {
        const NormalizerPair pr = custom("y", "-x", "x", "y");
        const Cycle c = integrateCycle(pr.V, {1.0, 0.0}, cfg);
        CHECK(cFactorNumeric(pr, {0.3, 1.4}, c, cfg) == Approx(1.0).epsilon(1e-12));
    }
    {
        const SystemInstance h2 = buildSystem("homog", {{"k", 2.0}});
        const NormalizerPair& pr = h2.primary->pair;
        const Cycle c = integrateCycle(pr.V, {1.0, 0.0}, cfg);
        const Point z = advanceW(pr.W, {1.0, 0.0}, 1.0, cfg);
        CHECK(cFactorNumeric(pr, z, c, cfg) == Approx(std::exp(-1.0)).epsilon(1e-8));
        const Point w = advanceW(pr.W, {0.2, 0.8}, -0.4, cfg);
        // H grows like e^(2s) along W_s, so s(w) = ln(H(w)/H0)/2
        const double sw = 0.5 * std::log(h2.separable->hamiltonian(w) / 0.25);
        CHECK(cFactorNumeric(pr, w, c, cfg) == Approx(std::exp(-sw)).epsilon(1e-8));
    }
    {
        // m xi is constant along the W-orbit (a ray)
        const SystemInstance rq = buildSystem("radial-quartic");
        const NormalizerPair& pr = rq.primary->pair;
        const Cycle c = integrateCycle(pr.V, rq.anchor, cfg);
        const double th = 0.7;
        const double xi0 = 0.09 - 0.0081;
        for (const double r : {0.22, 0.3, 0.45, 0.6, 0.9}) {
            const Point z{r * std::cos(th), r * std::sin(th)};
            const double xi = r * r - std::pow(r, 4);
            CHECK(cFactorNumeric(pr, z, c, cfg) * xi == Approx(xi0).epsilon(1e-8));
        }
    }
}

TEST_CASE("property: the C-factor satisfies d_W m = mu m") {
    const IntegratorConfig cfg;
    for (const char* name : {"duffing", "sinsq", "radial-quartic", "cor10"}) {
        const SystemInstance s = buildSystem(name);
        const NormalizerPair& pr = s.primary->pair;
        const Cycle c = integrateCycle(pr.V, s.anchor, cfg);
        for (const double ds : {-0.3, 0.25}) {
            const Point z = advanceW(pr.W, flowMap(pr.V, s.anchor, 0.3 * c.period, cfg), ds, cfg);
            const double h = 1e-2;
            auto m = [&](double d) { return cFactorNumeric(pr, advanceW(pr.W, z, d, cfg), c, cfg); };
            const double dm = (-m(2 * h) + 8 * m(h) - 8 * m(-h) + m(-2 * h)) / (12 * h);
            INFO(std::string(name), " ds=", ds);
            CHECK(std::abs(dm - pr.cofactor(z) * m(0.0)) <= 1e-6);
        }
    }
}

TEST_CASE("zeta examples") {
    CHECK(std::abs(zeta(t1("t^2"), 0.7)) < 1e-14);
    CHECK(zetaLambdaRatio(t1("t^2/2"), 0.3) == Approx(1.0).epsilon(1e-14));
    CHECK(zetaLambda(t1("t^2/2"), 0.3, 1.0) == Approx(0.0).scale(1.0));
    CHECK(zetaLambda(t1("t^2/2"), 0.3, 1.1) < 0.0);
    const Expr Lj = cor11jPotential(1, 1, 1);
    CHECK(close(zeta(Lj, 1.0), 4992.0 / 729.0, 1e-13));
    CHECK(close(zetaDisplayJ(1, 1, 1, 1.0), 4992.0 / 729.0, 1e-15));
    CHECK(t1("1/(1 + t^4 + t^8)")(1.0) == Approx(1.0 / 3.0));
}

TEST_CASE("property: the expanded zeta display matches the jet evaluation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> par(0.2, 3.0), td(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double a = par(rng), b = par(rng), c = par(rng), t = td(rng);
        CHECK(close(zeta(cor11jPotential(a, b, c), t), zetaDisplayJ(a, b, c, t), 1e-8, 1e-14));
    }
}

TEST_CASE("condition (C) reports") {
    const auto sinsq = conditionC(t1("sin(t)^2"), -1.5, 1.5);
    CHECK(sinsq.holds);
    CHECK(sinsq.verdict() == "holds-on-samples");
    const auto quad = conditionC(t1("t^2/2"), -1, 1);
    CHECK(quad.holds);
    CHECK(std::abs(quad.minValue) < 1e-15);

    const auto rat = conditionC(rationalPotential(1, 1, 1), -0.5, 0.5);
    CHECK_FALSE(rat.holds);
    REQUIRE(rat.violatedAt);
    CHECK(*rat.violatedValue < 0.0);
    CHECK(std::abs(*rat.violatedAt) < 0.3);
    CHECK(rat.verdict().rfind("violated-at", 0) == 0);
    // leading behaviour near 0 is -48 a^2 b t^10
    const double t = 1e-2;
    CHECK(zeta(rationalPotential(1, 1, 1), t) / std::pow(t, 10) == Approx(-48.0).epsilon(1e-2));

    const auto lam = conditionCLambda(t1("t^2/2"), 1.0, -1, 1);
    CHECK(lam.holds);
    CHECK(*lam.lambda == 1.0);
    CHECK_FALSE(conditionCLambda(t1("t^2/2"), 1.5, -1, 1).holds);
}

TEST_CASE("cofactor from an inverse integrating factor") {
    const JacobianTriple id(xy("x"), xy("y"));
    const Point z{0.6, -0.3};
    CHECK(muFromIntegratingFactor(id, xy("1/(x^2 + y^2)"), z) == Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(muFromIntegratingFactor(id, xy("1"), z)) < 1e-15);

    const JacobianTriple duff(xy("x*sqrt(1 + x^2)"), xy("y"));
    CHECK(muFromIntegratingFactor(duff, xy("1"), {1.0, 0.0}) == Approx(-5.0 / 9.0).epsilon(1e-12));
    for (const Point p : {Point{0.4, 0.2}, Point{-1.1, 0.5}})
        CHECK(muFromIntegratingFactor(duff, xy("1"), p) == Approx(duff.pair().cofactor(p)).epsilon(1e-12));
    CHECK_THROWS_AS(muFromIntegratingFactor(id, xy("-1"), z), PreconditionError);
}

TEST_CASE("property: mu_2 is nonnegative where d_W mu is") {
    std::mt19937_64 rng(21);
    for (const char* name : {"duffing", "sinsq", "expcos", "cor10", "radial-quartic"}) {
        const SystemInstance s = buildSystem(name);
        int checked = 0;
        for (int i = 0; i < 200; ++i) {
            const Point z = offAxis(rng, 0.05, 0.9);
            const auto d = directionalDerivatives(s.primary->pair, z, 1);
            if (d[1] < 0.0) continue;
            ++checked;
            CHECK(muRecursive(s.primary->pair, z, 2).mu[1] >= 0.0);
        }
        (void)checked;
    }
}
