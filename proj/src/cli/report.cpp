#include "report.hpp"

#include <cstdio>

namespace perfun::cli {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string csvNumber(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

const char* verdictName(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds-on-samples";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

void writeProfileCsv(std::ostream& out, const DerivativeProfile& p) {
    const int n = p.order;
    out << "s,x,y,T";
    for (const char* col : {"_int", "_fd", "_agree"})
        for (int j = 1; j <= n; ++j) out << ",D" << j << col;
    out << ",blowup\n";
    for (const ProfileRow& r : p.rows) {
        out << csvNumber(r.s) << ',' << csvNumber(r.z.x) << ',' << csvNumber(r.z.y) << ',' << csvNumber(r.T);
        for (int j = 0; j < n; ++j) {
            out << ',';
            if (r.dInt[j]) out << csvNumber(*r.dInt[j]);
        }
        for (int j = 0; j < n; ++j) {
            out << ',';
            if (j < static_cast<int>(r.dFd.size()) && r.dFd[j]) out << csvNumber(*r.dFd[j]);
        }
        for (int j = 0; j < n; ++j) {
            out << ',';
            if (j < static_cast<int>(r.agree.size()) && r.agree[j]) out << (*r.agree[j] ? 1 : 0);
        }
        out << ',' << (r.blowup ? 1 : 0) << '\n';
    }
}

json orbitJson(const std::vector<CycleSample>& samples, std::size_t maxPoints) {
    json pts = json::array();
    if (samples.empty()) return pts;
    const std::size_t stride = std::max<std::size_t>(1, (samples.size() + maxPoints - 1) / maxPoints);
    for (std::size_t i = 0; i < samples.size(); i += stride)
        pts.push_back(json::array({samples[i].t, samples[i].z.x, samples[i].z.y}));
    if ((samples.size() - 1) % stride != 0)
        pts.push_back(json::array({samples.back().t, samples.back().z.x, samples.back().z.y}));
    return pts;
}

json profileJson(const DerivativeProfile& p, bool withOrbits) {
    json j;
    j["pair"] = p.pairName;
    j["normalizer_kind"] = kindName(p.kind);
    j["order"] = p.order;
    j["s_range"] = json::array({p.grid.sMin, p.grid.sMax});
    j["steps"] = p.grid.steps;
    j["fd_step"] = p.fdStep;
    j["fd_step_d3"] = p.fdStep3;
    j["partial"] = p.partial();
    json rows = json::array();
    for (const ProfileRow& r : p.rows) {
        json row;
        row["s"] = r.s;
        row["x"] = r.z.x;
        row["y"] = r.z.y;
        row["T"] = r.T;
        json di = json::array(), df = json::array(), fe = json::array(), ag = json::array();
        for (const auto& v : r.dInt) di.push_back(opt(v));
        for (const auto& v : r.dFd) df.push_back(opt(v));
        for (const auto& v : r.fdError) fe.push_back(opt(v));
        for (const auto& v : r.agree) ag.push_back(opt(v));
        row["D_int"] = di;
        row["D_fd"] = df;
        row["fd_error"] = fe;
        row["agree"] = ag;
        row["blowup"] = r.blowup;
        if (!r.note.empty()) row["note"] = r.note;
        if (withOrbits) row["orbit"] = orbitJson(r.orbit);
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

json criticalJson(const CriticalOrbitReport& r) {
    json j;
    j["pair"] = r.pairName;
    j["count"] = r.orbits.size();
    json orbits = json::array();
    for (const CriticalOrbit& o : r.orbits) {
        json e;
        e["s"] = o.s;
        e["x"] = o.z.x;
        e["y"] = o.z.y;
        e["r"] = std::hypot(o.z.x, o.z.y);
        e["T"] = o.T;
        e["bracket"] = json::array({o.bracketLo, o.bracketHi});
        e["D1_residual"] = o.residual;
        e["D2"] = opt(o.d2);
        e["classification"] = o.classification;
        orbits.push_back(std::move(e));
    }
    j["orbits"] = std::move(orbits);
    return j;
}

json certificateJson(const Certificate& c) {
    json j;
    j["kind"] = c.kind;
    j["region"] = c.region;
    j["margin"] = c.margin;
    j["verdict"] = verdictName(c.verdict);
    j["verdict_text"] = c.verdictText();
    j["samples"] = c.samples;
    if (c.witness) j["witness"] = json::array({c.witness->x, c.witness->y});
    if (c.witnessValue) j["witness_value"] = *c.witnessValue;
    j["values"] = c.values;
    j["notes"] = c.notes;
    return j;
}

json catalogEntryJson(const CatalogEntry& e) {
    json j;
    j["name"] = e.name;
    j["aliases"] = e.aliases;
    json ps = json::array();
    for (const ParamSpec& p : e.params)
        ps.push_back({{"name", p.name}, {"default", p.defaultValue}, {"integer", p.integer}});
    j["params"] = std::move(ps);
    j["description"] = e.description;
    j["oracle"] = e.oracle;
    return j;
}

}  // namespace perfun::cli
