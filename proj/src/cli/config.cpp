#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "perfun/errors.hpp"

namespace perfun::cli {

using nlohmann::json;

namespace {

json rangeJson(double a, double b) { return json::array({a, b}); }

json instanceEcho(const SystemInstance& s) {
    json e;
    e["system"] = s.name;
    e["params"] = s.params;
    e["anchor"] = json::array({s.anchor.x, s.anchor.y});
    if (s.primary) e["s_range"] = rangeJson(s.primary->sMin, s.primary->sMax);
    if (s.universal) e["universal_s_range"] = rangeJson(s.universal->sMin, s.universal->sMax);
    e["region"] = json::array({s.region.xmin, s.region.xmax, s.region.ymin, s.region.ymax});
    return e;
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(what + " must be finite");
    return v;
}

std::string text(const json& doc, const std::string& key) {
    const auto it = doc.find(key);
    if (it == doc.end()) throw ConfigError("missing field '" + key + "'");
    if (!it->is_string()) throw ConfigError("field '" + key + "' must be an expression string");
    return it->get<std::string>();
}

Expr parse1(const std::string& src, const std::string& var, const std::string& key) {
    try {
        return parseExpression(src, std::vector<std::string>{var});
    } catch (const ParseError&) {
        try {
            return parseExpression(src, 1);
        } catch (const ParseError& e) {
            throw ConfigError("field '" + key + "': " + e.what());
        }
    }
}

Expr parse2(const json& doc, const std::string& key) {
    try {
        return parseExpression(text(doc, key), 2);
    } catch (const ParseError& e) {
        throw ConfigError("field '" + key + "': " + e.what());
    }
}

std::pair<double, double> jsonRange(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(key + " must be [a, b]");
    const double a = number(j[0], key), b = number(j[1], key);
    if (!(b > a)) throw ConfigError(key + " must be increasing");
    return {a, b};
}

}  // namespace

std::pair<double, double> parseRange(const std::string& s) {
    // the separator is the first ':' not at the start
    const auto colon = s.find(':', 1);
    if (colon == std::string::npos) throw ConfigError("range must look like a:b, got '" + s + "'");
    try {
        std::size_t ia = 0, ib = 0;
        const std::string as = s.substr(0, colon), bs = s.substr(colon + 1);
        const double a = std::stod(as, &ia), b = std::stod(bs, &ib);
        if (ia != as.size() || ib != bs.size()) throw std::invalid_argument("trailing");
        if (!(b > a)) throw ConfigError("range must be increasing: '" + s + "'");
        return {a, b};
    } catch (const std::logic_error&) {
        throw ConfigError("range must look like a:b, got '" + s + "'");
    }
}

Point parsePoint(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ConfigError("point must look like x,y, got '" + s + "'");
    try {
        std::size_t ix = 0, iy = 0;
        const std::string xs = s.substr(0, comma), ys = s.substr(comma + 1);
        const double x = std::stod(xs, &ix), y = std::stod(ys, &iy);
        if (ix != xs.size() || iy != ys.size()) throw std::invalid_argument("trailing");
        return {x, y};
    } catch (const std::logic_error&) {
        throw ConfigError("point must look like x,y, got '" + s + "'");
    }
}

void applyIntegratorJson(const json& j, IntegratorConfig& cfg) {
    if (!j.is_object()) throw ConfigError("integrator must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "rel_tol") cfg.relTol = number(v, k);
        else if (k == "abs_tol") cfg.absTol = number(v, k);
        else if (k == "max_time") cfg.maxTime = number(v, k);
        else if (k == "closure_tol") cfg.closureTol = number(v, k);
        else if (k == "max_step") cfg.maxStep = number(v, k);
        else throw ConfigError("unknown integrator setting '" + k + "'");
    }
}

LoadedSystem loadCatalogSystem(const std::string& name, const std::string& paramsText) {
    try {
        const CatalogEntry& e = findCatalogEntry(name);
        const auto params = paramsText.empty() ? std::map<std::string, double>{} : parseParams(e, paramsText);
        LoadedSystem out;
        out.inst = buildSystem(e.name, params);
        out.echo = instanceEcho(out.inst);
        return out;
    } catch (const PreconditionError& err) {
        throw ConfigError(err.what());
    }
}

LoadedSystem loadSystemFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return loadSystemJson(doc);
}

LoadedSystem loadSystemJson(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> common{"kind", "name", "anchor", "s_range", "universal_s_range", "region",
                                              "integrator"};
    static const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> kinds{
        {"separable", {{"G", "F"}, {"orders"}}},
        {"hamiltonian", {{"H"}, {}}},
        {"reparam", {{"xi"}, {}}},
        {"jacobian", {{"P", "Q"}, {}}},
        {"custom", {{"V1", "V2"}, {"W1", "W2", "H"}}},
    };

    LoadedSystem out;
    if (doc.contains("integrator")) {
        IntegratorConfig probe;
        applyIntegratorJson(doc["integrator"], probe);
        out.integrator = doc["integrator"];
    }

    // catalog reference with overrides
    if (doc.contains("system")) {
        for (const auto& [k, v] : doc.items())
            if (k != "system" && k != "params" && k != "anchor" && k != "s_range" && k != "integrator")
                throw ConfigError("field '" + k + "' is not allowed next to 'system'");
        if (!doc["system"].is_string()) throw ConfigError("'system' must be a catalog name");
        std::string params;
        if (doc.contains("params")) {
            const json& p = doc["params"];
            if (!p.is_object()) throw ConfigError("'params' must be an object of numbers");
            for (const auto& [k, v] : p.items()) {
                std::ostringstream os;
                os.precision(17);
                os << k << "=" << number(v, "params." + k);
                params += (params.empty() ? "" : ",") + os.str();
            }
        }
        LoadedSystem cat = loadCatalogSystem(doc["system"].get<std::string>(), params);
        cat.integrator = out.integrator;
        if (doc.contains("anchor")) {
            const json& a = doc["anchor"];
            if (!a.is_array() || a.size() != 2) throw ConfigError("anchor must be [x, y]");
            cat.inst.anchor = {number(a[0], "anchor"), number(a[1], "anchor")};
        }
        if (doc.contains("s_range")) {
            if (!cat.inst.primary) throw ConfigError("system has no normalizer pair");
            const auto [a, b] = jsonRange(doc["s_range"], "s_range");
            cat.inst.primary->sMin = a;
            cat.inst.primary->sMax = b;
        }
        cat.echo = instanceEcho(cat.inst);
        if (!out.integrator.empty()) cat.echo["integrator"] = out.integrator;
        return cat;
    }

    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("missing 'kind' (or 'system')");
    const std::string kind = doc["kind"].get<std::string>();
    const auto kit = kinds.find(kind);
    if (kit == kinds.end()) throw ConfigError("unknown kind '" + kind + "'");
    const auto& [required, optional] = kit->second;
    for (const auto& [k, v] : doc.items())
        if (!common.contains(k) && !required.contains(k) && !optional.contains(k))
            throw ConfigError("field '" + k + "' is not used by kind '" + kind + "'");
    for (const auto& k : required)
        if (!doc.contains(k)) throw ConfigError("kind '" + kind + "' needs field '" + k + "'");
    if (!doc.contains("anchor")) throw ConfigError("missing 'anchor'");
    const json& a = doc["anchor"];
    if (!a.is_array() || a.size() != 2) throw ConfigError("anchor must be [x, y]");

    SystemInstance& s = out.inst;
    s.name = doc.contains("name") ? doc["name"].get<std::string>() : kind;
    s.anchor = {number(a[0], "anchor"), number(a[1], "anchor")};
    s.region = {-10.0, 10.0, -10.0, 10.0};
    if (doc.contains("region")) {
        const json& r = doc["region"];
        if (!r.is_array() || r.size() != 4) throw ConfigError("region must be [xmin, xmax, ymin, ymax]");
        s.region = {number(r[0], "region"), number(r[1], "region"), number(r[2], "region"), number(r[3], "region")};
        if (!(s.region.xmax > s.region.xmin && s.region.ymax > s.region.ymin))
            throw ConfigError("region bounds must be increasing");
    }
    auto [sa, sb] = doc.contains("s_range") ? jsonRange(doc["s_range"], "s_range") : std::pair{0.0, 1.0};

    try {
        if (kind == "separable") {
            int og = 0, of = 0;
            if (doc.contains("orders")) {
                const json& o = doc["orders"];
                if (!o.is_object()) throw ConfigError("orders must be {\"G\": k, \"F\": k}");
                for (const auto& [k, v] : o.items()) {
                    if (!v.is_number_integer() || v.get<int>() < 2 || v.get<int>() % 2)
                        throw ConfigError("orders." + k + " must be an even integer >= 2");
                    if (k == "G") og = v.get<int>();
                    else if (k == "F") of = v.get<int>();
                    else throw ConfigError("unknown order '" + k + "'");
                }
            }
            const Expr G = parse1(text(doc, "G"), "x", "G");
            const Expr F = parse1(text(doc, "F"), "y", "F");
            s.separable = std::make_shared<const SeparableSystem>(G, F, og, of);
            s.hamiltonian = G.remap(2, std::vector<int>{0}) + F.remap(2, std::vector<int>{1});
            s.primary = PairSetup{s.separable->pair(s.name), sa, sb};
            const double h0 = s.separable->hamiltonian(s.anchor);
            auto [ua, ub] = doc.contains("universal_s_range")
                                ? jsonRange(doc["universal_s_range"], "universal_s_range")
                                : std::pair{h0 * (std::exp(2 * sa) - 1), h0 * (std::exp(2 * sb) - 1)};
            s.universal = PairSetup{hamiltonianUniversalPair(*s.hamiltonian, s.name + "/universal"), ua, ub};
        } else if (kind == "hamiltonian") {
            const Expr H = parse2(doc, "H");
            s.hamiltonian = H;
            s.primary = PairSetup{hamiltonianUniversalPair(H, s.name), sa, sb};
            s.universal = s.primary;
        } else if (kind == "reparam") {
            s.primary = PairSetup{buildReparamCenter(parse2(doc, "xi"), s.name), sa, sb};
            s.hamiltonian = parseExpression("(x^2 + y^2)/2", 2);
        } else if (kind == "jacobian") {
            const JacobianTriple tri(parse2(doc, "P"), parse2(doc, "Q"));
            s.primary = PairSetup{tri.pair(s.name), sa, sb};
            s.hamiltonian = (tri.P() * tri.P() + tri.Q() * tri.Q()) / 2.0;
        } else {
            const VectorField V = vectorField(parse2(doc, "V1"), parse2(doc, "V2"));
            const bool hasW1 = doc.contains("W1"), hasW2 = doc.contains("W2");
            if (hasW1 != hasW2) throw ConfigError("W1 and W2 go together");
            if (!hasW1 && !doc.contains("H")) throw ConfigError("kind 'custom' needs W1, W2 or a first integral H");
            if (hasW1)
                s.primary = PairSetup{NormalizerPair{s.name, NormalizerKind::Custom, V,
                                                     vectorField(parse2(doc, "W1"), parse2(doc, "W2")), std::nullopt,
                                                     std::nullopt},
                                      sa, sb};
            if (doc.contains("H")) s.hamiltonian = parse2(doc, "H");
        }
        if (s.hamiltonian && !s.universal) {
            auto [ua, ub] = doc.contains("universal_s_range") ? jsonRange(doc["universal_s_range"], "universal_s_range")
                                                              : std::pair{sa, sb};
            const VectorField& V = s.primary ? s.primary->pair.V : vectorField(parse2(doc, "V1"), parse2(doc, "V2"));
            s.universal = PairSetup{universalPair(V, *s.hamiltonian, s.name + "/universal"), ua, ub};
            if (!s.primary) s.primary = s.universal;
        }
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }

    out.echo = doc;
    out.echo["anchor"] = json::array({s.anchor.x, s.anchor.y});
    out.echo["s_range"] = rangeJson(s.primary->sMin, s.primary->sMax);
    if (s.universal) out.echo["universal_s_range"] = rangeJson(s.universal->sMin, s.universal->sMax);
    return out;
}

}  // namespace perfun::cli
