#include "perfun/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "perfun/catalog.hpp"
#include "perfun/errors.hpp"

namespace perfun {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string boxText(const Grid2& g) {
    return "[" + fmt(g.box.xmin) + "," + fmt(g.box.xmax) + "]x[" + fmt(g.box.ymin) + "," + fmt(g.box.ymax) + "] " +
           std::to_string(g.nx) + "x" + std::to_string(g.ny);
}

double wrapAngle(double a) {
    constexpr double pi = std::numbers::pi;
    while (a > pi) a -= 2 * pi;
    while (a <= -pi) a += 2 * pi;
    return a;
}

double segmentDistance(Point p, Point a, Point b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

}  // namespace

// ---------------------------------------------------------------- profiles

bool fdAgrees(double dInt, double dFd, double errEst) {
    return std::abs(dInt - dFd) <= std::max(1e-3 * std::abs(dInt), errEst);
}

bool DerivativeProfile::partial() const {
    return std::any_of(rows.begin(), rows.end(), [](const ProfileRow& r) { return r.blowup; });
}

bool DerivativeProfile::interiorAgrees() const {
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        for (const auto& a : rows[i].agree)
            if (a && !*a) return false;
    return true;
}

IntegrandSet cofactorIntegrands(const NormalizerPair& pair, int n) {
    IntegrandSet fs;
    for (int j = 1; j <= n; ++j) fs.names.push_back("mu" + std::to_string(j));
    fs.eval = [&pair, n](Point p, std::span<double> out) {
        const auto jets = muRecursiveJets(pair, p, n, 0);
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = jets[static_cast<std::size_t>(j)].value();
    };
    return fs;
}

RowValues periodDerivatives(const NormalizerPair& pair, Point z, int n, const IntegratorConfig& cfg) {
    const Cycle c = cycleQuadratures(pair.V, z, cofactorIntegrands(pair, n), cfg);
    return {c.period, c.quadratures};
}

namespace {

struct Stencil {
    const NormalizerPair& pair;
    Point z;
    const IntegratorConfig& cfg;
    const Region* region;

    double T(double ds) const {
        const Point p = ds == 0.0 ? z : advanceW(pair.W, z, ds, cfg, region);
        return integrateCycle(pair.V, p, cfg, false).period;
    }
};

void finiteDifferences(ProfileRow& row, const NormalizerPair& pair, int n, double h, double h3,
                       const IntegratorConfig& cfg, const Region* region) {
    const Stencil st{pair, row.z, cfg, region};
    row.dFd.assign(static_cast<std::size_t>(n), std::nullopt);
    row.fdError.assign(static_cast<std::size_t>(n), std::nullopt);
    try {
        const double t0 = st.T(0.0);
        const double eps = 50.0 * cfg.relTol * std::abs(t0) + cfg.absTol;
        const double p1 = st.T(h), m1 = st.T(-h), p2 = st.T(2 * h), m2 = st.T(-2 * h);
        const double d1 = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
        const double d1c = (p1 - m1) / (2 * h);
        row.dFd[0] = d1;
        row.fdError[0] = 5 * std::abs(d1 - d1c) + 1.5 * eps / h;
        if (n >= 2) {
            const double d2 = (-p2 + 16 * p1 - 30 * t0 + 16 * m1 - m2) / (12 * h * h);
            const double d2c = (p1 - 2 * t0 + m1) / (h * h);
            row.dFd[1] = d2;
            row.fdError[1] = 5 * std::abs(d2 - d2c) + 5.5 * eps / (h * h);
        }
        if (n >= 3) {
            const double q1 = st.T(h3), r1 = st.T(-h3), q2 = st.T(2 * h3), r2 = st.T(-2 * h3);
            const double q3 = st.T(3 * h3), r3 = st.T(-3 * h3);
            const double d3 = (-q3 + 8 * q2 - 13 * q1 + 13 * r1 - 8 * r2 + r3) / (8 * h3 * h3 * h3);
            const double d3c = (q2 - 2 * q1 + 2 * r1 - r2) / (2 * h3 * h3 * h3);
            row.dFd[2] = d3;
            row.fdError[2] = 5 * std::abs(d3 - d3c) + 5.5 * eps / (h3 * h3 * h3);
        }
    } catch (const NumericalError& e) {
        row.dFd.assign(static_cast<std::size_t>(n), std::nullopt);
        row.fdError.assign(static_cast<std::size_t>(n), std::nullopt);
        if (!row.note.empty()) row.note += "; ";
        row.note += std::string("difference stencil unavailable: ") + e.what();
    }
}

}  // namespace

DerivativeProfile derivativeProfile(const NormalizerPair& pair, Point z0, const SGrid& grid, int n,
                                    const IntegratorConfig& cfg, const ProfileOptions& opt) {
    cfg.validate();
    if (n < 1 || n > kMaxCofactorOrder) throw PreconditionError("derivative order out of range");
    if (grid.steps < 1) throw PreconditionError("grid needs at least one row");
    if (grid.steps > 1 && !(grid.sMax > grid.sMin)) throw PreconditionError("s-range must be increasing");
    DerivativeProfile prof;
    prof.pairName = pair.name;
    prof.kind = pair.kind;
    prof.order = n;
    prof.grid = grid;
    const double span = grid.span() > 0.0 ? grid.span() : 1.0;
    prof.fdStep = opt.fdStep > 0.0 ? opt.fdStep : 0.02 * span;
    prof.fdStep3 = opt.fdStep > 0.0 ? 2.5 * opt.fdStep : 0.05 * span;

    IntegratorConfig fdCfg = cfg;
    fdCfg.relTol = std::max(cfg.relTol * 1e-2, 1e-13);
    fdCfg.absTol = std::max(cfg.absTol * 1e-2, 1e-15);

    const IntegrandSet fs = cofactorIntegrands(pair, n);
    Point z = z0;
    double sPrev = 0.0;
    for (int i = 0; i < grid.steps; ++i) {
        ProfileRow row;
        row.s = grid.at(i);
        try {
            z = advanceW(pair.W, z, row.s - sPrev, cfg, opt.region);
        } catch (const NumericalError& e) {
            throw RowFailure("row " + std::to_string(i) + " (s=" + fmt(row.s) + "): " + e.what(), i, row.s);
        }
        sPrev = row.s;
        row.z = z;
        row.dInt.assign(static_cast<std::size_t>(n), std::nullopt);
        try {
            try {
                const Cycle c = cycleQuadratures(pair.V, z, fs, cfg, opt.keepOrbits);
                row.T = c.period;
                for (int j = 0; j < n; ++j) row.dInt[static_cast<std::size_t>(j)] = c.quadratures[static_cast<std::size_t>(j)];
                if (opt.keepOrbits) row.orbit = c.samples;
            } catch (const IntegrandBlowup& e) {
                row.blowup = true;
                row.note = std::string("IntegrandBlowup: ") + e.what();
                const Cycle c = integrateCycle(pair.V, z, cfg, opt.keepOrbits);
                row.T = c.period;
                if (opt.keepOrbits) row.orbit = c.samples;
            }
        } catch (const NumericalError& e) {
            throw RowFailure("row " + std::to_string(i) + " (s=" + fmt(row.s) + "): " + e.what(), i, row.s);
        }
        if (opt.finiteDifferences) finiteDifferences(row, pair, n, prof.fdStep, prof.fdStep3, fdCfg, opt.region);
        row.agree.assign(static_cast<std::size_t>(n), std::nullopt);
        for (std::size_t j = 0; j < row.dFd.size(); ++j)
            if (row.dInt[j] && row.dFd[j]) row.agree[j] = fdAgrees(*row.dInt[j], *row.dFd[j], *row.fdError[j]);
        prof.rows.push_back(std::move(row));
    }
    return prof;
}

// ---------------------------------------------------------------- critical orbits

namespace {

struct D1Eval {
    const NormalizerPair& pair;
    const IntegratorConfig& cfg;
    Point base;
    double sBase;

    Point at(double s) const { return advanceW(pair.W, base, s - sBase, cfg); }
    double d1(double s) const { return periodDerivatives(pair, at(s), 1, cfg).d[0]; }
};

CriticalOrbit refine(const D1Eval& f, double a, double b, double fa, double span) {
    CriticalOrbit o;
    o.bracketLo = a;
    o.bracketHi = b;
    while (b - a > 1e-8 * span) {
        const double m = 0.5 * (a + b);
        const double fm = f.d1(m);
        if (fm == 0.0) {
            a = b = m;
            break;
        }
        if ((fm < 0.0) == (fa < 0.0)) a = m, fa = fm;
        else b = m;
    }
    o.s = 0.5 * (a + b);
    o.z = f.at(o.s);
    const RowValues v = periodDerivatives(f.pair, o.z, 2, f.cfg);
    o.T = v.T;
    o.residual = std::abs(v.d[0]);
    o.d2 = v.d[1];
    const double tol = 1e-9 * std::max(1.0, std::abs(v.T));
    o.classification = v.d[1] > tol ? "min" : v.d[1] < -tol ? "max" : "undetermined";
    return o;
}

}  // namespace

CriticalOrbitReport locateCritical(const DerivativeProfile& profile, const NormalizerPair& pair,
                                   const IntegratorConfig& cfg) {
    CriticalOrbitReport rep;
    rep.pairName = profile.pairName;
    const auto& rows = profile.rows;
    if (rows.size() < 3) return rep;
    const double span = profile.grid.span() > 0.0 ? profile.grid.span() : 1.0;

    // sign changes between consecutive significant rows
    struct Bracket {
        std::size_t a, b;
    };
    std::vector<Bracket> br;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].dInt.empty() || !rows[i].dInt[0]) {
            last.reset();
            continue;
        }
        const double d = *rows[i].dInt[0];
        if (std::abs(d) <= 1e-9 * std::max(1.0, rows[i].T)) continue;
        if (last && ((*rows[*last].dInt[0] < 0.0) != (d < 0.0))) br.push_back({*last, i});
        last = i;
    }

    // merge brackets closer than 3 cells
    std::vector<std::vector<Bracket>> groups;
    for (const Bracket& b : br) {
        if (!groups.empty() && b.a < groups.back().back().b + 3) groups.back().push_back(b);
        else groups.push_back({b});
    }

    for (const auto& g : groups) {
        const Bracket& first = g.front();
        const D1Eval f{pair, cfg, rows[first.a].z, rows[first.a].s};
        if (g.size() == 1) {
            rep.orbits.push_back(refine(f, rows[first.a].s, rows[first.b].s, *rows[first.a].dInt[0], span));
            continue;
        }
        // one refinement round on a 4x finer grid over the cluster
        const double lo = rows[first.a].s, hi = rows[g.back().b].s;
        const int cells = 4 * static_cast<int>(g.back().b - first.a);
        std::vector<double> ss, ds;
        for (int k = 0; k <= cells; ++k) {
            ss.push_back(lo + (hi - lo) * k / cells);
            ds.push_back(f.d1(ss.back()));
        }
        std::vector<int> changes;
        for (int k = 0; k < cells; ++k)
            if ((ds[k] < 0.0) != (ds[k + 1] < 0.0)) changes.push_back(k);
        bool separated = true;
        for (std::size_t k = 1; k < changes.size(); ++k)
            if (changes[k] - changes[k - 1] < 3) separated = false;
        if (separated) {
            for (int k : changes) rep.orbits.push_back(refine(f, ss[k], ss[k + 1], ds[k], span));
        } else {
            CriticalOrbit o;
            o.bracketLo = lo;
            o.bracketHi = hi;
            o.s = 0.5 * (lo + hi);
            o.z = f.at(o.s);
            const RowValues v = periodDerivatives(pair, o.z, 1, cfg);
            o.T = v.T;
            o.residual = std::abs(v.d[0]);
            o.classification = "undetermined cluster";
            rep.orbits.push_back(o);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- certificates

std::string Certificate::verdictText() const {
    switch (verdict) {
        case Verdict::Holds: return "holds-on-samples";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Violated: {
            std::string s = "violated-at(";
            if (witness) s += fmt(witness->x) + "," + fmt(witness->y);
            if (witnessValue) s += (witness ? ";" : "") + std::string("value=") + fmt(*witnessValue);
            return s + ")";
        }
    }
    return "inconclusive";
}

Certificate certifyConditionB(const std::function<double(Point)>& h, const std::vector<Cycle>& cycles, double tol,
                              std::string kind) {
    Certificate c;
    c.kind = std::move(kind);
    c.region = std::to_string(cycles.size()) + " sampled cycles";
    int sign = 0;
    double margin = std::numeric_limits<double>::infinity();
    for (const Cycle& cy : cycles) {
        if (cy.samples.empty()) throw PreconditionError("condition (B) needs sampled cycles");
        bool nonzero = false;
        for (const CycleSample& s : cy.samples) {
            const double v = h(s.z);
            ++c.samples;
            if (std::abs(v) <= tol) {
                margin = std::min(margin, 0.0);
                continue;
            }
            nonzero = true;
            const int sv = v > 0.0 ? 1 : -1;
            if (sign == 0) sign = sv;
            if (sv != sign) {
                c.verdict = Verdict::Violated;
                c.witness = s.z;
                c.witnessValue = v;
                c.notes.push_back("sign change");
                c.margin = -std::abs(v);
                return c;
            }
            margin = std::min(margin, std::abs(v));
        }
        if (!nonzero) {
            c.verdict = Verdict::Violated;
            c.witness = cy.anchor;
            c.witnessValue = 0.0;
            c.notes.push_back("vanishes on every sample of a cycle");
            c.margin = 0.0;
            return c;
        }
    }
    c.margin = cycles.empty() ? 0.0 : margin;
    c.values["sign"] = sign;
    if (cycles.empty()) c.verdict = Verdict::Inconclusive;
    return c;
}

namespace {

template <class F>
Certificate gridSign(std::string kind, const Grid2& grid, const std::function<bool(Point)>& domain, F quantity) {
    Certificate c;
    c.kind = std::move(kind);
    c.region = boxText(grid);
    double worst = std::numeric_limits<double>::infinity();
    int skipped = 0;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const Point p{grid.box.xmin + (grid.box.xmax - grid.box.xmin) * i / std::max(grid.nx - 1, 1),
                          grid.box.ymin + (grid.box.ymax - grid.box.ymin) * j / std::max(grid.ny - 1, 1)};
            if (domain && !domain(p)) continue;
            double v, scale;
            try {
                std::tie(v, scale) = quantity(p);
            } catch (const Error&) {
                ++skipped;
                continue;
            }
            if (!std::isfinite(v)) {
                ++skipped;
                continue;
            }
            ++c.samples;
            if (v < worst) {
                worst = v;
                if (v < -1e-10 * scale) {
                    c.verdict = Verdict::Violated;
                    c.witness = p;
                    c.witnessValue = v;
                }
            }
        }
    c.values["skipped"] = skipped;
    if (c.samples == 0) {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("no evaluable samples");
        return c;
    }
    c.margin = worst;
    return c;
}

}  // namespace

Certificate certifyConvexity(const NormalizerPair& pair, const Grid2& grid, ConvexityTest test,
                             const std::function<bool(Point)>& domain) {
    Certificate c = gridSign("convexity", grid, domain, [&](Point p) {
        if (test == ConvexityTest::Mu2) {
            const auto m = muRecursive(pair, p, 2).mu;
            return std::pair{m[1], 1.0 + m[0] * m[0]};
        }
        const auto d = directionalDerivatives(pair, p, 1);
        return std::pair{d[1], 1.0 + d[0] * d[0]};
    });
    c.notes.push_back(test == ConvexityTest::Mu2 ? "sampled mu_2 >= 0" : "sampled d_W mu >= 0");
    return c;
}

Certificate certifyMonotonicity(const NormalizerPair& pair, const Grid2& grid,
                                const std::function<bool(Point)>& domain) {
    // decide the direction from the sampled signs, then certify it
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    Certificate probe = gridSign("monotonicity", grid, domain, [&](Point p) {
        const double m = pair.cofactor(p);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        return std::pair{0.0, 1.0};
    });
    if (probe.samples == 0) return probe;
    const double dir = std::abs(lo) > std::abs(hi) ? -1.0 : 1.0;
    Certificate c = gridSign("monotonicity", grid, domain, [&](Point p) {
        const double m = pair.cofactor(p);
        return std::pair{dir * m, 1.0 + std::abs(m)};
    });
    c.values["direction"] = dir;
    c.notes.push_back(dir < 0 ? "mu <= 0: T decreasing along W" : "mu >= 0: T increasing along W");
    return c;
}

Certificate certifyAtMostNMinus1(const NormalizerPair& pair, int n, const std::vector<Cycle>& cycles) {
    Certificate c = certifyConditionB([&](Point p) { return muRecursive(pair, p, n).mu.back(); }, cycles, 1e-12,
                                      "at-most-n-minus-1");
    c.values["bound"] = n - 1;
    return c;
}

Certificate certifyCorollary9(const Potential& G, double lo, double hi, int samples) {
    Certificate c;
    c.kind = "convexity";
    c.region = "x in [" + fmt(lo) + "," + fmt(hi) + "]";
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        if (std::abs(x) < 1e-12) continue;
        const Jet1 g = G.jet(x, 3);
        const double g0 = g.value(), g1 = g.derivative(1), g2 = g.derivative(2), g3 = g.derivative(3);
        const double t1 = std::pow(g1, 4), t2 = 8 * g0 * g1 * g1 * g2, t3 = 12 * g0 * g0 * g2 * g2,
                     t4 = 4 * g0 * g0 * g3 * g1;
        const double v = t1 - t2 + t3 - t4;
        ++c.samples;
        if (v < worst) {
            worst = v;
            if (v < -1e-10 * (t1 + std::abs(t2) + t3 + std::abs(t4))) {
                c.verdict = Verdict::Violated;
                c.witness = Point{x, 0.0};
                c.witnessValue = v;
            }
        }
    }
    c.margin = worst;
    c.notes.push_back("sampled G'^4 - 8GG'^2G'' + 12G^2G''^2 - 4G^2G'''G'");
    return c;
}

Certificate checkCorollary5(int k, int n, const Expr& xiK, const Expr& xiN) {
    if (!(k < n)) throw PreconditionError("degree checker needs k < n");
    if (k < 0) throw PreconditionError("degrees must be nonnegative");
    Certificate c;
    c.kind = "corollary-5";
    c.region = "unit circle, 720 samples";
    const double kd = k, nd = n;
    const double delta = (nd * nd - 6 * nd * kd + kd * kd) * (nd - kd) * (nd - kd);
    const double lower = (3 - 2 * std::sqrt(2.0)) * nd, upper = (3 + 2 * std::sqrt(2.0)) * nd;
    const bool inRange = lower <= kd && kd <= upper;
    c.values["Delta"] = delta;
    c.values["lower"] = lower;
    c.values["upper"] = upper;
    c.values["in_range"] = inRange ? 1.0 : 0.0;
    double minXiK = std::numeric_limits<double>::infinity();
    double maxXiN = -minXiK;
    for (int i = 0; i < 720; ++i) {
        const double th = 2 * std::numbers::pi * i / 720;
        const Point p{std::cos(th), std::sin(th)};
        const double vk = xiK(p);
        maxXiN = std::max(maxXiN, xiN(p));
        ++c.samples;
        if (vk < minXiK) {
            minXiK = vk;
            if (vk <= 0.0) {
                c.verdict = Verdict::Violated;
                c.witness = p;
                c.witnessValue = vk;
            }
        }
    }
    c.values["min_xi_k"] = minXiK;
    c.values["max_xi_n"] = maxXiN;
    c.margin = std::min(-delta, minXiK);
    if (c.verdict != Verdict::Violated && (!inRange || delta > 0.0)) {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("k outside [(3-2sqrt2)n, (3+2sqrt2)n]");
    }
    c.notes.push_back("uniqueness of the critical orbit is left to the numerical profile");
    return c;
}

Certificate checkCorollary8(const Expr& G, const Expr& F, Interval ig, Interval iF, Cor8Case cs, double alpha,
                            double beta) {
    Certificate c;
    c.kind = "corollary-8";
    c.region = "G on [" + fmt(ig.lo) + "," + fmt(ig.hi) + "], F on [" + fmt(iF.lo) + "," + fmt(iF.hi) + "]";
    PotentialConditionReport rg, rf;
    if (cs == Cor8Case::II) {
        rg = conditionC(G, ig.lo, ig.hi);
        rf = conditionC(F, iF.lo, iF.hi);
        c.notes.push_back("case ii: zeta >= 0 for G and F");
    } else {
        rg = conditionCLambda(G, alpha, ig.lo, ig.hi);
        rf = conditionCLambda(F, beta, iF.lo, iF.hi);
        c.values["alpha"] = alpha;
        c.values["beta"] = beta;
        c.notes.push_back("case i: zeta_alpha >= alpha G'^4, zeta_beta >= beta F'^4");
    }
    c.samples = rg.samples + rf.samples;
    c.values["min_G"] = rg.minValue;
    c.values["min_F"] = rf.minValue;
    c.margin = std::min(rg.minValue, rf.minValue);
    if (!rg.holds) {
        c.verdict = Verdict::Violated;
        c.witness = Point{*rg.violatedAt, 0.0};
        c.witnessValue = *rg.violatedValue;
        c.notes.push_back("G fails");
    } else if (!rf.holds) {
        c.verdict = Verdict::Violated;
        c.witness = Point{0.0, *rf.violatedAt};
        c.witnessValue = *rf.violatedValue;
        c.notes.push_back("F fails");
    } else if (cs == Cor8Case::I && alpha + beta - 3 < 0.0) {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("alpha + beta < 3");
    }
    return c;
}

Certificate checkCorollary10(double a, double b, double cc, const Corollary10Options& opt) {
    if (a < 0 || b < 0 || cc < 0) throw PreconditionError("a, b, c must be non-negative");
    if (a * b * cc == 0.0) throw PreconditionError("abc must be nonzero");
    Certificate c;
    c.kind = "corollary-10";
    c.region = "central strip";
    const double lhs1 = 20 * std::pow(a, 4) * cc;
    const double rhs1 = 267 * b * b * a * cc + 194 * a * a * cc * cc + 18 * std::pow(b, 4) + 90 * std::pow(a, 6) +
                        219 * std::pow(a, 3) * b * b;
    const double lhs2 = 8 * std::pow(a, 3) * cc;
    const double rhs2 = 40 * std::pow(a, 5) + 99 * a * a * b * b;
    c.values["lhs1"] = lhs1;
    c.values["rhs1"] = rhs1;
    c.values["lhs2"] = lhs2;
    c.values["rhs2"] = rhs2;
    c.margin = std::min(rhs1 - lhs1, rhs2 - lhs2);
    if (lhs1 > rhs1 || lhs2 > rhs2) {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("coefficient inequalities fail");
        return c;
    }
    if (!opt.runProfile) return c;
    const SystemInstance sys = buildSystem("cor10", {{"a", a}, {"b", b}, {"c", cc}});
    const PairSetup& ps = *sys.primary;
    ProfileOptions po;
    po.finiteDifferences = false;
    const DerivativeProfile prof =
        derivativeProfile(ps.pair, sys.anchor, {ps.sMin, ps.sMax, opt.steps}, 2, opt.cfg, po);
    const CriticalOrbitReport rep = locateCritical(prof, ps.pair, opt.cfg);
    c.values["critical_orbits"] = static_cast<double>(rep.orbits.size());
    c.samples = static_cast<int>(prof.rows.size());
    if (rep.orbits.size() == 1) {
        c.values["s_star"] = rep.orbits[0].s;
        c.values["T_star"] = rep.orbits[0].T;
        c.values["x_star"] = rep.orbits[0].z.x;
        c.notes.push_back("profile: one critical orbit (" + rep.orbits[0].classification + ")");
    } else {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("profile found " + std::to_string(rep.orbits.size()) + " critical orbits");
    }
    return c;
}

Certificate checkCorollary11(Cor11Family family, double a, double b, double cc, int k, Interval iv) {
    if (!(a > 0 && b > 0 && cc > 0)) throw PreconditionError("a, b, c must be positive");
    if (family == Cor11Family::JJ && k < 1) throw PreconditionError("k must be a positive integer");
    Certificate c;
    c.kind = "corollary-11";
    c.region = "t in [" + fmt(iv.lo) + "," + fmt(iv.hi) + "]";
    Expr L;
    double lhs, rhs;
    if (family == Cor11Family::J) {
        L = cor11jPotential(a, b, cc);
        lhs = 5 * b * b;
        rhs = 56 * a * cc;
        c.values["zeta_at_1"] = zeta(L, 1.0);
        c.values["display_at_1"] = zetaDisplayJ(a, b, cc, 1.0);
    } else {
        L = cor11jjPotential(a, b, cc, k);
        lhs = 2 * b * b * b * k;
        rhs = 108 * a * a * cc * k + 18 * a * a * cc + b * b * b;
    }
    c.values["lhs"] = lhs;
    c.values["rhs"] = rhs;
    const PotentialConditionReport r = conditionC(L, iv.lo, iv.hi);
    c.samples = r.samples;
    c.margin = r.minValue;
    c.values["min_zeta"] = r.minValue;
    if (lhs > rhs) {
        c.verdict = Verdict::Inconclusive;
        c.notes.push_back("coefficient inequality fails");
    } else if (!r.holds) {
        c.verdict = Verdict::Violated;
        c.witness = Point{*r.violatedAt, 0.0};
        c.witnessValue = *r.violatedValue;
    }
    return c;
}

Certificate checkSep(const Expr& L, Interval iv, int samples) {
    Certificate c;
    c.kind = "sep-hypothesis";
    c.region = "t in (" + fmt(iv.lo) + "," + fmt(iv.hi) + ")";
    const Jet1 j0 = L.jet1(0.0, 2);
    const double l2 = j0.derivative(2);
    c.values["L''(0)"] = l2;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= samples; ++i) {
        const double t = iv.lo + (iv.hi - iv.lo) * i / (samples + 1);
        if (std::abs(t) < 1e-12) continue;
        const double v = t * L.jet1(t, 1).derivative(1);
        ++c.samples;
        worst = std::min(worst, v / (t * t));
        if (!(v > 0.0) && c.verdict != Verdict::Violated) {
            c.verdict = Verdict::Violated;
            c.witness = Point{t, 0.0};
            c.witnessValue = v;
            c.notes.push_back("t L'(t) <= 0");
        }
    }
    c.margin = std::min(worst, l2);
    if (!(l2 > 0.0) && c.verdict != Verdict::Violated) {
        c.verdict = Verdict::Violated;
        c.witness = Point{0.0, 0.0};
        c.witnessValue = l2;
        c.notes.push_back("L''(0) = 0: leading order above 2");
    }
    return c;
}

// ---------------------------------------------------------------- separable checks

IsochronicityReport isochronicityCheck(const SeparableSystem& sys, const std::vector<Point>& points,
                                       const IntegratorConfig& cfg) {
    if (!sys.satisfiesSep()) throw PreconditionError("isochronicity check needs quadratic leading terms");
    if (points.empty()) throw PreconditionError("no sample points");
    IsochronicityReport r;
    r.points = points;
    const VectorField Vc = sys.companion();
    for (const Point& p : points) r.periods.push_back(integrateCycle(Vc, p, cfg, false).period);
    for (double t : r.periods) r.mean += t;
    r.mean /= static_cast<double>(r.periods.size());
    for (double t : r.periods) r.spread = std::max(r.spread, std::abs(t - r.mean) / r.mean);
    return r;
}

LinearizationReport linearizationCheck(const SeparableSystem& sys, const std::vector<Point>& points, double duration,
                                       const IntegratorConfig& cfg, int samples) {
    if (!sys.satisfiesSep()) throw PreconditionError("linearization check needs quadratic leading terms");
    LinearizationReport r;
    const VectorField Vc = sys.companion();
    for (const Point& p : points) {
        const double D = duration > 0.0 ? duration : integrateCycle(Vc, p, cfg, false).period;
        const auto traj = sampleTrajectory(Vc, p, D, samples + 1, cfg);
        const Vec2 u0 = sys.psi(p);
        const double r0 = dot(u0, u0);
        double prevArg = std::atan2(u0.y, u0.x);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const Point z = traj[i].z;
            const Vec2 u = sys.psi(z);
            r.radiusDrift = std::max(r.radiusDrift, std::abs(dot(u, u) - r0) / r0);
            const Vec2 v = Vc(z);
            const double du = sys.G().signedRootDerivative(z.x) * v.x;
            const double dv = sys.F().signedRootDerivative(z.y) * v.y;
            const double speed = (u.x * dv - u.y * du) / dot(u, u);
            r.angularSpeedError = std::max(r.angularSpeedError, std::abs(speed + 1.0));
            if (i > 0) {
                const double arg = std::atan2(u.y, u.x);
                const double dt = traj[i].t - traj[i - 1].t;
                r.angularSpeedError = std::max(r.angularSpeedError, std::abs(wrapAngle(arg - prevArg) / dt + 1.0));
                prevArg = arg;
            }
        }
        const double a0 = std::atan2(u0.y, u0.x);
        for (const double ds : {-0.4, -0.2, 0.2, 0.4}) {
            const Vec2 w = sys.psi(advanceW(sys.Ws(), p, ds, cfg));
            r.wsArgDrift = std::max(r.wsArgDrift, std::abs(wrapAngle(std::atan2(w.y, w.x) - a0)));
        }
    }
    return r;
}

bool InvarianceReport::matched(double periodTol, double cycleTol) const {
    return countsEqual && maxPeriodGap <= periodTol && maxCycleGap <= cycleTol;
}

InvarianceReport normalizerInvarianceCheck(const NormalizerPair& pairA, const SGrid& gridA,
                                           const NormalizerPair& pairB, const SGrid& gridB, Point z0,
                                           const IntegratorConfig& cfg) {
    ProfileOptions po;
    po.finiteDifferences = false;
    InvarianceReport r;
    r.a = locateCritical(derivativeProfile(pairA, z0, gridA, 2, cfg, po), pairA, cfg);
    r.b = locateCritical(derivativeProfile(pairB, z0, gridB, 2, cfg, po), pairB, cfg);
    r.countsEqual = r.a.orbits.size() == r.b.orbits.size();
    const std::size_t m = std::min(r.a.orbits.size(), r.b.orbits.size());
    for (std::size_t i = 0; i < m; ++i) {
        const CriticalOrbit& oa = r.a.orbits[i];
        const CriticalOrbit& ob = r.b.orbits[i];
        r.maxPeriodGap = std::max(r.maxPeriodGap, std::abs(oa.T - ob.T));
        const auto poly = sampleTrajectory(pairA.V, oa.z, oa.T, 721, cfg);
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < poly.size(); ++k) d = std::min(d, segmentDistance(ob.z, poly[k].z, poly[k + 1].z));
        r.maxCycleGap = std::max(r.maxCycleGap, d);
    }
    return r;
}

}  // namespace perfun
