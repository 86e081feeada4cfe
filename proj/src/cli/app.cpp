#include "app.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "perfun/analysis.hpp"
#include "perfun/errors.hpp"
#include "perfun/version.hpp"
#include "report.hpp"

namespace perfun::cli {

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitViolated = 4;
constexpr int kExitInconclusive = 5;

struct Common {
    std::string system;
    std::string params;
    std::string file;
    std::string sRange;
    std::string anchor;
    std::string out = "json";
    std::string normalizer = "primary";
    int order = 2;
    int steps = 21;
    std::optional<double> relTol;
    std::optional<double> absTol;
    std::uint64_t seed = 0;
    bool emitOrbits = false;
};

struct CertifyOptions {
    std::string criterion;
    std::string grid = "201,201";
    std::string xInterval;
    std::string yInterval;
    std::string test = "mu2";
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<int> k;
    std::optional<int> n;
    std::string xiK;
    std::string xiN;
    int samples = 401;
    double threshold = 1e-5;
};

void addCommon(CLI::App* sub, Common& c, bool withOut, bool withOrder) {
    sub->add_option("--system", c.system, "catalog system name");
    sub->add_option("--params", c.params, "system parameters, e.g. k=2 or 1,1,1");
    sub->add_option("--file", c.file, "JSON system configuration");
    sub->add_option("--s-range", c.sRange, "W-orbit parameter range a:b (anchor at s = 0)");
    sub->add_option("--anchor", c.anchor, "anchor point x,y");
    sub->add_option("--normalizer", c.normalizer, "primary or universal")
        ->check(CLI::IsMember({"primary", "universal"}));
    sub->add_option("--steps", c.steps, "grid rows")->check(CLI::Range(1, 100000));
    sub->add_option("--rel-tol", c.relTol, "integrator relative tolerance");
    sub->add_option("--abs-tol", c.absTol, "integrator absolute tolerance");
    sub->add_option("--seed", c.seed, "seed recorded in the report");
    if (withOut) sub->add_option("--out", c.out, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (withOrder) sub->add_option("--order", c.order, "highest derivative order n")->check(CLI::Range(1, kMaxCofactorOrder));
}

// Everything a command needs after the system is resolved.
struct Context {
    LoadedSystem sys;
    IntegratorConfig cfg;
    PairSetup setup;
    std::string normalizer;
};

Context resolve(const Common& c) {
    if (c.system.empty() == c.file.empty()) throw ConfigError("give exactly one of --system or --file");
    if (!c.file.empty() && !c.params.empty()) throw ConfigError("--params applies to catalog systems only");
    Context ctx;
    ctx.sys = c.file.empty() ? loadCatalogSystem(c.system, c.params) : loadSystemFile(c.file);
    if (!ctx.sys.integrator.empty()) applyIntegratorJson(ctx.sys.integrator, ctx.cfg);
    if (c.relTol) ctx.cfg.relTol = *c.relTol;
    if (c.absTol) ctx.cfg.absTol = *c.absTol;
    try {
        ctx.cfg.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    SystemInstance& inst = ctx.sys.inst;
    if (!c.anchor.empty()) inst.anchor = parsePoint(c.anchor);
    ctx.normalizer = c.normalizer;
    if (!inst.potentialOnly) {
        const auto& chosen = c.normalizer == "universal" ? inst.universal : inst.primary;
        if (!chosen) throw ConfigError("system has no " + c.normalizer + " normalizer");
        ctx.setup = *chosen;
        if (!c.sRange.empty()) std::tie(ctx.setup.sMin, ctx.setup.sMax) = parseRange(c.sRange);
    }
    ctx.sys.echo["anchor"] = json::array({inst.anchor.x, inst.anchor.y});
    return ctx;
}

void requireSystem(const Context& ctx) {
    if (ctx.sys.inst.potentialOnly)
        throw ConfigError("'" + ctx.sys.inst.name + "' is a potential, not a system; use certify --criterion corollary11");
}

json tolerances(const IntegratorConfig& cfg, std::optional<double> agreement = std::nullopt) {
    json t{{"rel_tol", cfg.relTol}, {"abs_tol", cfg.absTol}, {"closure_tol", cfg.closureTol},
           {"event_tol", cfg.eventTol}};
    if (agreement) t["fd_agreement_rel"] = *agreement;
    return t;
}

json baseReport(const std::string& command, const Common& c, const Context& ctx) {
    json r;
    r["tool"] = "perfun";
    r["version"] = kVersion;
    r["command"] = command;
    json cfg = ctx.sys.echo;
    cfg["normalizer"] = ctx.normalizer;
    cfg["seed"] = c.seed;
    if (!ctx.sys.inst.potentialOnly) {
        cfg["s_range_used"] = json::array({ctx.setup.sMin, ctx.setup.sMax});
        cfg["steps"] = c.steps;
    }
    r["config"] = std::move(cfg);
    return r;
}

void emit(std::ostream& out, json report, std::chrono::steady_clock::time_point t0) {
    report["timing"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    out << report.dump(2) << '\n';
}

SGrid gridOf(const Context& ctx, int steps) { return {ctx.setup.sMin, ctx.setup.sMax, steps}; }

// ---------------------------------------------------------------- catalog

int cmdCatalog(const std::string& name, bool asJson, std::ostream& out) {
    if (!name.empty()) {
        const CatalogEntry* e = nullptr;
        try {
            e = &findCatalogEntry(name);
        } catch (const PreconditionError& err) {
            throw ConfigError(err.what());
        }
        const SystemInstance inst = buildSystem(e->name);
        if (asJson) {
            json j = catalogEntryJson(*e);
            j["anchor"] = json::array({inst.anchor.x, inst.anchor.y});
            if (inst.primary) j["s_range"] = json::array({inst.primary->sMin, inst.primary->sMax});
            if (inst.universal) j["universal_s_range"] = json::array({inst.universal->sMin, inst.universal->sMax});
            j["potential_only"] = inst.potentialOnly;
            out << j.dump(2) << '\n';
            return 0;
        }
        out << e->name << "\n  " << e->description << "\n  oracle: " << e->oracle << '\n';
        if (!e->aliases.empty()) {
            out << "  aliases:";
            for (const auto& a : e->aliases) out << ' ' << a;
            out << '\n';
        }
        for (const ParamSpec& p : e->params)
            out << "  parameter " << p.name << " (default " << csvNumber(p.defaultValue)
                << (p.integer ? ", integer" : "") << ")\n";
        if (inst.potentialOnly) {
            out << "  potential only\n";
        } else {
            out << "  anchor (" << csvNumber(inst.anchor.x) << ", " << csvNumber(inst.anchor.y) << ")\n";
            out << "  s-range " << csvNumber(inst.primary->sMin) << ":" << csvNumber(inst.primary->sMax) << '\n';
        }
        return 0;
    }
    if (asJson) {
        json arr = json::array();
        for (const CatalogEntry& e : catalog()) arr.push_back(catalogEntryJson(e));
        out << json{{"systems", arr}}.dump(2) << '\n';
        return 0;
    }
    for (const CatalogEntry& e : catalog()) {
        std::string head = e.name;
        if (!e.params.empty()) {
            head += "(";
            for (std::size_t i = 0; i < e.params.size(); ++i) head += (i ? "," : "") + e.params[i].name;
            head += ")";
        }
        out << head << std::string(head.size() < 22 ? 22 - head.size() : 1, ' ') << e.description << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- analyze / validate / critical

int cmdAnalyze(const Common& c, bool fd, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const Context ctx = resolve(c);
    requireSystem(ctx);
    if (c.emitOrbits && c.out == "csv") throw ConfigError("--emit-orbits needs --out json");
    ProfileOptions po;
    po.finiteDifferences = fd;
    po.keepOrbits = c.emitOrbits;
    const DerivativeProfile p = derivativeProfile(ctx.setup.pair, ctx.sys.inst.anchor, gridOf(ctx, c.steps), c.order,
                                                  ctx.cfg, po);
    if (c.out == "csv") {
        writeProfileCsv(out, p);
        return 0;
    }
    json r = baseReport("analyze", c, ctx);
    r["config"]["order"] = c.order;
    r["tolerances"] = tolerances(ctx.cfg, 1e-3);
    r["profile"] = profileJson(p, c.emitOrbits);
    r["summary"] = {{"rows", p.rows.size()}, {"partial", p.partial()}, {"interior_agrees", p.interiorAgrees()}};
    emit(out, std::move(r), t0);
    return 0;
}

int cmdValidate(const Common& c, double tol, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    const Context ctx = resolve(c);
    requireSystem(ctx);
    const DerivativeProfile p =
        derivativeProfile(ctx.setup.pair, ctx.sys.inst.anchor, gridOf(ctx, c.steps), c.order, ctx.cfg, {});
    const std::size_t n = p.rows.size();
    const std::size_t lo = n > 2 ? 1 : 0, hi = n > 2 ? n - 1 : n;
    int compared = 0, failures = 0;
    double worstRel = 0.0, worstRatio = -1.0;
    json worst = nullptr;
    for (std::size_t i = lo; i < hi; ++i) {
        const ProfileRow& r = p.rows[i];
        for (std::size_t j = 0; j < r.dInt.size() && j < r.dFd.size(); ++j) {
            if (!r.dInt[j] || !r.dFd[j]) continue;
            ++compared;
            const double a = *r.dInt[j], b = *r.dFd[j];
            const double abs = std::abs(a - b);
            const double allowed = std::max(tol * std::abs(a), *r.fdError[j]);
            const double relErr = abs / std::max(std::abs(a), 1e-300);
            worstRel = std::max(worstRel, std::abs(a) > 0.0 ? relErr : 0.0);
            if (abs > allowed) ++failures;
            const double ratio = allowed > 0.0 ? abs / allowed : (abs > 0.0 ? INFINITY : 0.0);
            if (ratio > worstRatio) {
                worstRatio = ratio;
                worst = {{"row", i}, {"s", r.s}, {"order", j + 1}, {"D_int", a}, {"D_fd", b}, {"abs_error", abs},
                         {"rel_error", relErr}, {"fd_error", *r.fdError[j]}, {"allowed", allowed}};
            }
        }
    }
    const bool pass = failures == 0;
    json summary{{"pass", pass},
                 {"partial", p.partial()},
                 {"compared", compared},
                 {"failures", failures},
                 {"worst_relative_error", worstRel},
                 {"worst", worst},
                 {"tolerance", tol}};
    if (c.out == "csv") {
        writeProfileCsv(out, p);
        err << "validate: " << (pass ? "pass" : "fail") << (p.partial() ? " (partial)" : "") << ", " << compared
            << " comparisons, worst relative error " << csvNumber(worstRel) << '\n';
    } else {
        json r = baseReport("validate", c, ctx);
        r["config"]["order"] = c.order;
        r["tolerances"] = tolerances(ctx.cfg, tol);
        r["profile"] = profileJson(p, false);
        r["summary"] = std::move(summary);
        emit(out, std::move(r), t0);
    }
    return pass ? 0 : kExitViolated;
}

int cmdCritical(const Common& c, bool fd, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    if (c.out != "json") throw ConfigError("critical reports are JSON only");
    const Context ctx = resolve(c);
    requireSystem(ctx);
    if (c.steps < 3) throw ConfigError("critical needs at least 3 rows");
    ProfileOptions po;
    po.finiteDifferences = fd;
    const DerivativeProfile p =
        derivativeProfile(ctx.setup.pair, ctx.sys.inst.anchor, gridOf(ctx, c.steps), 2, ctx.cfg, po);
    const CriticalOrbitReport rep = locateCritical(p, ctx.setup.pair, ctx.cfg);
    json r = baseReport("critical", c, ctx);
    r["tolerances"] = tolerances(ctx.cfg);
    r["critical"] = criticalJson(rep);
    if (c.emitOrbits)
        for (std::size_t i = 0; i < rep.orbits.size(); ++i)
            r["critical"]["orbits"][i]["orbit"] =
                orbitJson(sampleTrajectory(ctx.setup.pair.V, rep.orbits[i].z, rep.orbits[i].T, 257, ctx.cfg));
    json rows = json::array();
    for (const ProfileRow& row : p.rows)
        rows.push_back({{"s", row.s}, {"T", row.T}, {"D1_int", row.dInt[0] ? json(*row.dInt[0]) : json(nullptr)}});
    r["profile"] = std::move(rows);
    r["summary"] = {{"count", rep.orbits.size()}, {"rows", p.rows.size()}, {"partial", p.partial()}};
    emit(out, std::move(r), t0);
    return 0;
}

// ---------------------------------------------------------------- certify

const SeparableSystem& separableOf(const Context& ctx, const std::string& criterion) {
    if (!ctx.sys.inst.separable) throw ConfigError(criterion + " needs a separable system");
    return *ctx.sys.inst.separable;
}

Interval intervalOr(const std::string& text, double lo, double hi) {
    if (text.empty()) return {lo, hi};
    const auto [a, b] = parseRange(text);
    return {a, b};
}

Grid2 parseGrid(const std::string& text, const Region& box) {
    const auto comma = text.find(',');
    try {
        const int nx = std::stoi(text.substr(0, comma));
        const int ny = comma == std::string::npos ? nx : std::stoi(text.substr(comma + 1));
        if (nx < 2 || ny < 2) throw ConfigError("grid needs at least 2 points per axis");
        return {box, nx, ny};
    } catch (const std::logic_error&) {
        throw ConfigError("grid must look like nx,ny");
    }
}

// points along the W-orbit at the grid rows
std::vector<Point> orbitPoints(const Context& ctx, int steps) {
    std::vector<Point> pts;
    Point z = ctx.sys.inst.anchor;
    double prev = 0.0;
    const SGrid g = gridOf(ctx, steps);
    for (int i = 0; i < g.steps; ++i) {
        z = advanceW(ctx.setup.pair.W, z, g.at(i) - prev, ctx.cfg);
        prev = g.at(i);
        pts.push_back(z);
    }
    return pts;
}

Certificate combineSep(Certificate g, const Certificate& f) {
    Certificate c = g;
    c.region = "G: " + g.region + ", F: " + f.region;
    c.samples = g.samples + f.samples;
    c.margin = std::min(g.margin, f.margin);
    c.values.clear();
    c.values["G.L''(0)"] = g.values.at("L''(0)");
    c.values["F.L''(0)"] = f.values.at("L''(0)");
    c.notes.clear();
    for (const auto& s : g.notes) c.notes.push_back("G: " + s);
    for (const auto& s : f.notes) c.notes.push_back("F: " + s);
    if (g.verdict != Verdict::Violated && f.verdict == Verdict::Violated) {
        c.verdict = Verdict::Violated;
        c.witness = Point{0.0, f.witness->x};
        c.witnessValue = f.witnessValue;
    }
    return c;
}

Certificate runCriterion(const Common& c, const CertifyOptions& o, const Context& ctx) {
    const SystemInstance& inst = ctx.sys.inst;
    const std::string& crit = o.criterion;
    const Region& rg = inst.region;

    if (crit == "corollary11") {
        if (inst.name != "cor11-j" && inst.name != "cor11-jj")
            throw ConfigError("corollary11 applies to the cor11-j and cor11-jj systems");
        const auto& p = inst.params;
        const Interval iv = intervalOr(o.xInterval, -2.0, 2.0);
        if (inst.name == "cor11-j") return checkCorollary11(Cor11Family::J, p.at("a"), p.at("b"), p.at("c"), 1, iv);
        return checkCorollary11(Cor11Family::JJ, p.at("a"), p.at("b"), p.at("c"), static_cast<int>(p.at("k")), iv);
    }
    if (crit == "corollary10") {
        if (inst.name != "cor10") throw ConfigError("corollary10 applies to the cor10 system");
        Corollary10Options co;
        co.steps = c.steps;
        co.cfg = ctx.cfg;
        return checkCorollary10(inst.params.at("a"), inst.params.at("b"), inst.params.at("c"), co);
    }
    if (crit == "corollary5") {
        int k = o.k.value_or(0), n = o.n.value_or(0);
        std::string xk = o.xiK, xn = o.xiN;
        if (inst.name == "radial-quartic") {
            if (!o.k) k = 2;
            if (!o.n) n = 4;
            if (xk.empty()) xk = "x^2 + y^2";
            if (xn.empty()) xn = "(x^2 + y^2)^2";
        }
        if (k == 0 || n == 0 || xk.empty() || xn.empty()) throw ConfigError("corollary5 needs --k, --n, --xi-k and --xi-n");
        return checkCorollary5(k, n, parseExpression(xk, 2), parseExpression(xn, 2));
    }
    requireSystem(ctx);
    if (crit == "corollary8-ii" || crit == "corollary8-i") {
        const SeparableSystem& s = separableOf(ctx, crit);
        const Interval ix = intervalOr(o.xInterval, rg.xmin, rg.xmax);
        const Interval iy = intervalOr(o.yInterval, rg.ymin, rg.ymax);
        const Cor8Case cs = crit == "corollary8-i" ? Cor8Case::I : Cor8Case::II;
        return checkCorollary8(s.G().raw(), s.F().raw(), ix, iy, cs, o.alpha, o.beta);
    }
    if (crit == "corollary9") {
        const SeparableSystem& s = separableOf(ctx, crit);
        if (!isHalfSquare(s.F())) throw ConfigError("corollary9 needs F = y^2/2");
        const Interval ix = intervalOr(o.xInterval, rg.xmin, rg.xmax);
        return certifyCorollary9(s.G(), ix.lo, ix.hi, o.samples);
    }
    if (crit == "sep") {
        const SeparableSystem& s = separableOf(ctx, crit);
        const Interval ix = intervalOr(o.xInterval, rg.xmin, rg.xmax);
        const Interval iy = intervalOr(o.yInterval, rg.ymin, rg.ymax);
        return combineSep(checkSep(s.G().raw(), ix, o.samples), checkSep(s.F().raw(), iy, o.samples));
    }
    if (crit == "convexity" || crit == "monotonicity") {
        Region box = rg;
        if (!o.xInterval.empty()) std::tie(box.xmin, box.xmax) = parseRange(o.xInterval);
        if (!o.yInterval.empty()) std::tie(box.ymin, box.ymax) = parseRange(o.yInterval);
        const Grid2 g = parseGrid(o.grid, box);
        if (crit == "monotonicity") return certifyMonotonicity(ctx.setup.pair, g);
        return certifyConvexity(ctx.setup.pair, g, o.test == "dwmu" ? ConvexityTest::DWMu : ConvexityTest::Mu2);
    }
    if (crit == "condition-B" || crit == "at-most-n-minus-1") {
        std::vector<Cycle> cycles;
        for (const Point& p : orbitPoints(ctx, c.steps)) cycles.push_back(integrateCycle(ctx.setup.pair.V, p, ctx.cfg));
        Certificate cert = certifyAtMostNMinus1(ctx.setup.pair, c.order, cycles);
        if (crit == "condition-B") cert.kind = "condition-B";
        return cert;
    }
    if (crit == "isochronicity" || crit == "linearization") {
        const SeparableSystem& s = separableOf(ctx, crit);
        if (!s.satisfiesSep()) throw ConfigError(crit + " needs quadratic leading terms in G and F");
        Context wctx = ctx;
        wctx.setup.pair = s.pair();
        const std::vector<Point> pts = orbitPoints(wctx, std::max(3, std::min(c.steps, 7)));
        Certificate cert;
        cert.kind = crit;
        cert.region = std::to_string(pts.size()) + " companion cycles";
        cert.samples = static_cast<int>(pts.size());
        if (crit == "isochronicity") {
            const IsochronicityReport rep = isochronicityCheck(s, pts, ctx.cfg);
            cert.values["spread"] = rep.spread;
            cert.values["mean_period"] = rep.mean;
            cert.values["threshold"] = o.threshold;
            cert.margin = o.threshold - rep.spread;
            if (rep.spread > o.threshold) {
                std::size_t w = 0;
                for (std::size_t i = 0; i < rep.periods.size(); ++i)
                    if (std::abs(rep.periods[i] - rep.mean) > std::abs(rep.periods[w] - rep.mean)) w = i;
                cert.verdict = Verdict::Violated;
                cert.witness = pts[w];
                cert.witnessValue = rep.periods[w];
            }
        } else {
            const LinearizationReport rep = linearizationCheck(s, pts, 0.0, ctx.cfg);
            cert.values["radius_drift"] = rep.radiusDrift;
            cert.values["angular_speed_error"] = rep.angularSpeedError;
            cert.values["ws_arg_drift"] = rep.wsArgDrift;
            cert.margin = std::min({1e-6 - rep.radiusDrift, 1e-4 - rep.angularSpeedError, 1e-6 - rep.wsArgDrift});
            if (!rep.passes()) {
                cert.verdict = Verdict::Violated;
                cert.witness = pts.front();
                cert.witnessValue = std::max({rep.radiusDrift, rep.angularSpeedError, rep.wsArgDrift});
            }
        }
        return cert;
    }
    if (crit == "invariance") {
        if (!inst.primary || !inst.universal) throw ConfigError("invariance needs both normalizers");
        const PairSetup& a = *inst.primary;
        const PairSetup& b = *inst.universal;
        const InvarianceReport rep =
            normalizerInvarianceCheck(a.pair, {a.sMin, a.sMax, c.steps}, b.pair, {b.sMin, b.sMax, c.steps}, inst.anchor,
                                      ctx.cfg);
        Certificate cert;
        cert.kind = "normalizer-invariance";
        cert.region = "primary and universal s-ranges";
        cert.samples = 2 * c.steps;
        cert.values["orbits_primary"] = static_cast<double>(rep.a.orbits.size());
        cert.values["orbits_universal"] = static_cast<double>(rep.b.orbits.size());
        cert.values["max_period_gap"] = rep.maxPeriodGap;
        cert.values["max_cycle_gap"] = rep.maxCycleGap;
        cert.margin = -rep.maxPeriodGap;
        for (std::size_t i = 0; i < rep.a.orbits.size(); ++i) {
            cert.values["T_primary_" + std::to_string(i)] = rep.a.orbits[i].T;
            if (i < rep.b.orbits.size()) cert.values["T_universal_" + std::to_string(i)] = rep.b.orbits[i].T;
        }
        if (!rep.matched()) {
            cert.verdict = Verdict::Violated;
            cert.witness = rep.a.orbits.empty() ? (rep.b.orbits.empty() ? inst.anchor : rep.b.orbits[0].z)
                                                : rep.a.orbits[0].z;
            cert.witnessValue = rep.maxPeriodGap;
        }
        return cert;
    }
    throw ConfigError("unknown criterion '" + crit + "'");
}

int cmdCertify(const Common& c, const CertifyOptions& o, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    if (c.out != "json") throw ConfigError("certificates are JSON only");
    const Context ctx = resolve(c);
    Certificate cert;
    try {
        cert = runCriterion(c, o, ctx);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    json r = baseReport("certify", c, ctx);
    r["config"]["criterion"] = o.criterion;
    r["tolerances"] = tolerances(ctx.cfg);
    r["certificate"] = certificateJson(cert);
    r["summary"] = {{"verdict", verdictName(cert.verdict)}, {"verdict_text", cert.verdictText()}};
    emit(out, std::move(r), t0);
    switch (cert.verdict) {
        case Verdict::Holds: return 0;
        case Verdict::Violated: return kExitViolated;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

}  // namespace

int runApp(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Period-function analysis of planar centers along normalizer orbits", "perfun"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string catalogName;
    bool catalogJson = false;
    auto* catalogCmd = app.add_subcommand("catalog", "list built-in systems");
    catalogCmd->add_option("name", catalogName, "show one system");
    catalogCmd->add_flag("--json", catalogJson, "machine-readable listing");

    Common ca, cv, cc, cf;
    bool noFd = false, critFd = false;
    double validateTol = 1e-3;
    CertifyOptions co;

    auto* analyze = app.add_subcommand("analyze", "derivative profile of T along the W-orbit");
    addCommon(analyze, ca, true, true);
    analyze->add_flag("--emit-orbits", ca.emitOrbits, "include sampled cycles (JSON)");
    analyze->add_flag("--no-fd", noFd, "skip the finite-difference columns");

    auto* validate = app.add_subcommand("validate", "compare integral and finite-difference derivatives");
    addCommon(validate, cv, true, true);
    validate->add_option("--tolerance", validateTol, "relative agreement tolerance")->check(CLI::PositiveNumber);

    auto* critical = app.add_subcommand("critical", "locate critical periodic orbits");
    addCommon(critical, cc, true, false);
    critical->add_flag("--emit-orbits", cc.emitOrbits, "include the sampled critical cycles");
    critical->add_flag("--fd", critFd, "also compute finite-difference columns");

    auto* certify = app.add_subcommand("certify", "sample-based certificates");
    addCommon(certify, cf, true, true);
    certify->add_option("--criterion", co.criterion, "criterion name")
        ->required()
        ->check(CLI::IsMember({"corollary5", "corollary8-i", "corollary8-ii", "corollary9", "corollary10",
                               "corollary11", "convexity", "monotonicity", "condition-B", "at-most-n-minus-1", "sep",
                               "isochronicity", "linearization", "invariance"}));
    certify->add_option("--grid", co.grid, "tensor grid nx,ny");
    certify->add_option("--x-interval", co.xInterval, "x (or t) interval a:b");
    certify->add_option("--y-interval", co.yInterval, "y interval a:b");
    certify->add_option("--test", co.test, "mu2 or dwmu")->check(CLI::IsMember({"mu2", "dwmu"}));
    certify->add_option("--alpha", co.alpha, "corollary8-i alpha");
    certify->add_option("--beta", co.beta, "corollary8-i beta");
    certify->add_option("--k", co.k, "corollary5 degree k");
    certify->add_option("--n", co.n, "corollary5 degree n");
    certify->add_option("--xi-k", co.xiK, "corollary5 homogeneous part of degree k");
    certify->add_option("--xi-n", co.xiN, "corollary5 homogeneous part of degree n");
    certify->add_option("--samples", co.samples, "samples per interval")->check(CLI::Range(3, 1000000));
    certify->add_option("--threshold", co.threshold, "isochronicity spread threshold")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (catalogCmd->parsed()) return cmdCatalog(catalogName, catalogJson, out);
        if (analyze->parsed()) return cmdAnalyze(ca, !noFd, out);
        if (validate->parsed()) return cmdValidate(cv, validateTol, out, err);
        if (critical->parsed()) return cmdCritical(cc, critFd, out);
        if (certify->parsed()) return cmdCertify(cf, co, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const RowFailure& e) {
        err << "numerical failure at row " << e.row() << " (s=" << csvNumber(e.s()) << "): " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

}  // namespace perfun::cli
