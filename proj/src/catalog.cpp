#include "perfun/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "perfun/errors.hpp"

namespace perfun {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", v);
    return buf;
}

Expr t1(const std::string& s) { return parseExpression(s, 1); }
Expr xy(const std::string& s) { return parseExpression(s, 2); }

Expr separableH(const Expr& G, const Expr& F) {
    const int toX[] = {0};
    const int toY[] = {1};
    return G.remap(2, toX) + F.remap(2, toY);
}

// s-range along W_s between two levels of the shifted Hamiltonian (H grows like e^(2s)).
std::pair<double, double> separableRange(double h0, double hLo, double hHi) {
    return {0.5 * std::log(hLo / h0), 0.5 * std::log(hHi / h0)};
}

SystemInstance separableInstance(std::string name, const Expr& G, const Expr& F, Point anchor, double hLo,
                                 double hHi, Region region, int orderG = 0, int orderF = 0) {
    SystemInstance s;
    s.name = name;
    s.separable = std::make_shared<const SeparableSystem>(G, F, orderG, orderF);
    s.hamiltonian = separableH(G, F);
    s.anchor = anchor;
    s.region = region;
    const double h0 = s.separable->hamiltonian(anchor);
    const auto [lo, hi] = separableRange(h0, hLo, hHi);
    s.primary = PairSetup{s.separable->pair(name), lo, hi};
    s.universal = PairSetup{hamiltonianUniversalPair(*s.hamiltonian, name + "/universal"), hLo - h0, hHi - h0};
    return s;
}

double param(const std::map<std::string, double>& p, const std::string& key) {
    const auto it = p.find(key);
    if (it == p.end()) throw PreconditionError("missing parameter " + key);
    return it->second;
}

std::vector<CatalogEntry> makeCatalog() {
    std::vector<CatalogEntry> c;
    const double pi = std::numbers::pi;

    c.push_back({"harmonic", {}, {}, "x' = y, y' = -x (H = (x^2 + y^2)/2)", "T = 2 pi on every cycle",
                 [](const auto&) {
                     const Expr half = t1("t^2/2");
                     const double e2 = std::exp(2.0);
                     auto s = separableInstance("harmonic", half, half, {1.0, 0.0}, 0.5, 0.5 * e2,
                                                {-5.0, 5.0, -5.0, 5.0}, 2, 2);
                     s.periodOracle = [](Point) { return 2.0 * std::numbers::pi; };
                     s.oracle = "isochronous: T = 2 pi";
                     return s;
                 }});

    c.push_back({"duffing", {}, {}, "x' = y, y' = -x - 2x^3 (H = (x^2 + x^4 + y^2)/2)",
                 "T = 4 int_0^a dx / sqrt(2h - x^2 - x^4), h = H(z)", [](const auto&) {
                     const double h0 = 1.0;
                     auto s = separableInstance("duffing", t1("(t^2 + t^4)/2"), t1("t^2/2"), {1.0, 0.0}, h0,
                                                h0 * std::exp(2.0), {-3.0, 3.0, -5.0, 5.0}, 2, 2);
                     s.oracle = "energy quadrature T = 4 int_0^a dx / sqrt(2h - x^2 - x^4)";
                     return s;
                 }});

    c.push_back({"cubic", {}, {}, "x' = y, y' = -x + 2x^2 - x^3; central region H < 1/12",
                 "mu_s diverges at x = 1; outer cycles (e.g. anchor -0.5,0) cross it", [](const auto&) {
                     const Expr G = t1("t^2/2 - 2*t^3/3 + t^4/4");
                     const double h0 = 0.125 - 2.0 * 0.125 / 3.0 + 0.0625 / 4.0;
                     auto s = separableInstance("cubic", G, t1("t^2/2"), {0.5, 0.0}, h0 * std::exp(-2.0), h0,
                                                {-3.0, 3.0, -3.0, 3.0}, 2, 2);
                     s.oracle = "no closed form; outer cycles carry a singular mu_s";
                     return s;
                 }});

    c.push_back({"homog", {}, {{"k", 2.0, true}}, "x' = y^(2k-1), y' = -x^(2k-1)",
                 "scaling law T(l z) = l^(2-2k) T(z); mu_s = 2(1-k)/k", [](const auto& p) {
                     const double kv = param(p, "k");
                     if (kv < 1.0 || kv != std::floor(kv)) throw PreconditionError("k must be a positive integer");
                     const int k = static_cast<int>(kv);
                     const Expr L = t1("t^" + std::to_string(2 * k) + "/" + std::to_string(2 * k));
                     const double h0 = 1.0 / (2 * k);
                     auto s = separableInstance("homog", L, L, {1.0, 0.0}, h0, h0 * std::exp(2.0),
                                                {-5.0, 5.0, -5.0, 5.0}, 2 * k, 2 * k);
                     s.oracle = "T(s) = T(0) exp(2(1-k)s/k) along W_s";
                     return s;
                 }});

    c.push_back({"sinsq", {}, {}, "x' = 2 sin y cos y, y' = -2 sin x cos x (G = F = sin^2)",
                 "central region: open square with vertices (+-pi/2, 0), (0, +-pi/2)", [pi](const auto&) {
                     const Expr L = t1("sin(t)^2");
                     const double s2 = std::pow(std::sin(0.5), 2);
                     auto s = separableInstance("sinsq", L, L, {0.5, 0.0}, s2 * std::exp(-1.6), s2 * std::exp(1.2),
                                                {-pi / 2, pi / 2, -pi / 2, pi / 2}, 2, 2);
                     s.oracle = "Gamma Gamma'' = 2 tan^2 x (1 + tan^2 x) >= 0";
                     return s;
                 }});

    c.push_back({"expcos", {}, {}, "x' = y, y' = -3 sin^3 x exp(cos^3 x - 3 cos x)",
                 "degenerate center; T -> infinity at O and at the boundary; one critical orbit", [pi](const auto&) {
                     const Expr G = t1("exp(cos(t)^3 - 3*cos(t))");
                     const Potential pot(G, 4);
                     auto s = separableInstance("expcos", G, t1("t^2/2"), {2.0, 0.0}, pot.value(1.0), pot.value(3.0),
                                                {-pi, pi, -4.0, 4.0}, 4, 2);
                     s.oracle = "profile between x = 1 and x = 3 on the positive x-axis";
                     return s;
                 }});

    c.push_back({"radial-quartic", {}, {}, "x' = y xi, y' = -x xi, xi = (x^2 + y^2) - (x^2 + y^2)^2",
                 "T = 2 pi / (r^2 - r^4); one critical orbit at r = 1/sqrt(2)", [](const auto&) {
                     SystemInstance s;
                     s.name = "radial-quartic";
                     const Expr xi = xy("(x^2 + y^2) - (x^2 + y^2)^2");
                     const double r0 = 0.3;
                     s.anchor = {r0, 0.0};
                     s.region = {-1.0, 1.0, -1.0, 1.0};
                     s.primary = PairSetup{buildReparamCenter(xi, "radial-quartic"), std::log(0.2 / r0),
                                           std::log(0.95 / r0)};
                     const Expr H = xy("(x^2 + y^2)/2");
                     s.hamiltonian = H;
                     const double h0 = r0 * r0 / 2;
                     s.universal = PairSetup{universalPair(s.primary->pair.V, H, "radial-quartic/universal"),
                                             0.02 - h0, 0.95 * 0.95 / 2 - h0};
                     s.periodOracle = [](Point z) {
                         const double r2 = z.x * z.x + z.y * z.y;
                         return 2.0 * std::numbers::pi / (r2 - r2 * r2);
                     };
                     s.oracle = "T = 2 pi / (r^2 - r^4)";
                     return s;
                 }});

    c.push_back({"cor10", {"rational-potential"}, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}},
                 "G = P/(1+P), P = a x^4 + b x^6 + c x^8, F = y^2/2",
                 "one critical orbit under the coefficient inequalities", [](const auto& p) {
                     const double a = param(p, "a"), b = param(p, "b"), cc = param(p, "c");
                     if (a < 0 || b < 0 || cc < 0) throw PreconditionError("a, b, c must be non-negative");
                     const Expr G = rationalPotential(a, b, cc);
                     auto s = separableInstance("cor10", G, t1("t^2/2"), {0.8, 0.0}, 0.002, 0.98,
                                                {-4.0, 4.0, -1.5, 1.5});
                     s.oracle = "T -> infinity at O and at |y| = sqrt(2)";
                     return s;
                 }});

    c.push_back({"cor11-j", {}, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}, "potential 1/(a + b t^4 + c t^8)",
                 "condition (C) under 5b^2 <= 56ac", [](const auto& p) {
                     SystemInstance s;
                     s.name = "cor11-j";
                     s.potentialOnly = true;
                     s.potential = cor11jPotential(param(p, "a"), param(p, "b"), param(p, "c"));
                     s.oracle = "zeta = 64 t^4 (6bc^2 t^12 + (56ac^2 - 5b^2c) t^8 + 18abc t^4 + 3ab^2)/(a + bt^4 + ct^8)^6";
                     return s;
                 }});

    c.push_back({"cor11-jj", {}, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"k", 1.0, true}},
                 "G = F = a t^4k / (1 + b t^2k + c t^6k)", "condition (C) under 2b^3k <= 108a^2ck + 18a^2c + b^3",
                 [](const auto& p) {
                     const double kv = param(p, "k");
                     if (kv < 1.0 || kv != std::floor(kv)) throw PreconditionError("k must be a positive integer");
                     const int k = static_cast<int>(kv);
                     const Expr L = cor11jjPotential(param(p, "a"), param(p, "b"), param(p, "c"), k);
                     const Potential pot(L, 4 * k);
                     const double h0 = pot.value(0.5);
                     auto s = separableInstance("cor11-jj", L, L, {0.5, 0.0}, h0 * std::exp(-2.0), h0,
                                                {-1.0, 1.0, -1.0, 1.0}, 4 * k, 4 * k);
                     s.potential = L;
                     s.oracle = "convex period function";
                     return s;
                 }});
    return c;
}

}  // namespace

Expr rationalPotential(double a, double b, double c) {
    const std::string P = num(a) + "*t^4 + " + num(b) + "*t^6 + " + num(c) + "*t^8";
    return t1("(" + P + ")/(1 + " + P + ")");
}

Expr cor11jPotential(double a, double b, double c) {
    return t1("1/(" + num(a) + " + " + num(b) + "*t^4 + " + num(c) + "*t^8)");
}

Expr cor11jjPotential(double a, double b, double c, int k) {
    const std::string k2 = std::to_string(2 * k), k4 = std::to_string(4 * k), k6 = std::to_string(6 * k);
    return t1(num(a) + "*t^" + k4 + "/(1 + " + num(b) + "*t^" + k2 + " + " + num(c) + "*t^" + k6 + ")");
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = makeCatalog();
    return entries;
}

const CatalogEntry& findCatalogEntry(std::string_view name) {
    for (const auto& e : catalog()) {
        if (e.name == name) return e;
        if (std::find(e.aliases.begin(), e.aliases.end(), name) != e.aliases.end()) return e;
    }
    throw PreconditionError("unknown system '" + std::string(name) + "'");
}

std::map<std::string, double> parseParams(const CatalogEntry& entry, std::string_view text) {
    std::map<std::string, double> out;
    std::size_t positional = 0;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string item(text.substr(pos, comma - pos));
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   item.end());
        pos = comma + 1;
        if (item.empty()) throw PreconditionError("empty parameter in '" + std::string(text) + "'");
        std::string key;
        std::string value = item;
        if (const auto eq = item.find('='); eq != std::string::npos) {
            key = item.substr(0, eq);
            value = item.substr(eq + 1);
            const bool known = std::any_of(entry.params.begin(), entry.params.end(),
                                           [&](const ParamSpec& p) { return p.name == key; });
            if (!known) throw PreconditionError("system '" + entry.name + "' has no parameter '" + key + "'");
        } else {
            if (positional >= entry.params.size())
                throw PreconditionError("too many parameters for system '" + entry.name + "'");
            key = entry.params[positional++].name;
        }
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size())
            throw PreconditionError("parameter '" + key + "' is not a number: " + value);
        out[key] = v;
        if (comma >= text.size()) break;
    }
    return out;
}

std::map<std::string, double> withDefaults(const CatalogEntry& entry, std::map<std::string, double> params) {
    for (const auto& p : entry.params) params.try_emplace(p.name, p.defaultValue);
    return params;
}

SystemInstance buildSystem(std::string_view name, const std::map<std::string, double>& params) {
    const CatalogEntry& e = findCatalogEntry(name);
    auto full = withDefaults(e, params);
    SystemInstance s = e.build(full);
    s.params = std::move(full);
    return s;
}

}  // namespace perfun
