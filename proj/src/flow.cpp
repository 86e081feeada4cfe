#include "perfun/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "perfun/errors.hpp"

namespace perfun {

void IntegratorConfig::validate() const {
    if (!(relTol > 0.0) || !(absTol > 0.0) || !(eventTol > 0.0))
        throw PreconditionError("integrator tolerances must be positive");
    if (!(guardFraction > 0.0 && guardFraction < 1.0)) throw PreconditionError("guard fraction must lie in (0,1)");
    if (!(maxStep > 0.0) || !(maxTime > 0.0) || !(blowupCap > 0.0) || !(closureTol > 0.0))
        throw PreconditionError("integrator limits must be positive");
    if (fixedStep < 0.0) throw PreconditionError("fixed step must be non-negative");
}

IntegrandSet integrands(std::vector<std::string> names, std::vector<std::function<double(Point)>> fs) {
    if (names.size() != fs.size()) throw PreconditionError("integrand names and functions differ in count");
    IntegrandSet s;
    s.names = std::move(names);
    s.eval = [fs = std::move(fs)](Point p, std::span<double> out) {
        for (std::size_t i = 0; i < fs.size(); ++i) out[i] = fs[i](p);
    };
    return s;
}

namespace {

std::string where(Point p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " at (%.10g, %.10g)", p.x, p.y);
    return buf;
}

// z' = sign F(z), I_j' = sign f_j(z)
class Rhs {
public:
    Rhs(const VectorField& F, const IntegrandSet* fs, double sign, const IntegratorConfig& cfg)
        : F_(F), fs_(fs), sign_(sign), cap_(cfg.blowupCap) {}

    std::size_t dim() const { return 2 + (fs_ ? fs_->size() : 0); }
    std::size_t integrandCount() const { return fs_ ? fs_->size() : 0; }
    const IntegrandSet* integrands() const { return fs_; }

    void operator()(const double* y, double* dy) const {
        const Point p{y[0], y[1]};
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw StepFailure("state is not finite");
        Vec2 v;
        try {
            v = F_(p);
        } catch (const EvalError& e) {
            throw StepFailure(std::string("vector field is undefined") + where(p) + ": " + e.what());
        }
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw StepFailure("vector field is not finite" + where(p));
        dy[0] = sign_ * v.x;
        dy[1] = sign_ * v.y;
        if (!fs_ || fs_->size() == 0) return;
        std::span<double> out(dy + 2, fs_->size());
        try {
            fs_->eval(p, out);
        } catch (const EvalError& e) {
            throw IntegrandBlowup("integrand is undefined" + where(p) + ": " + e.what(), 0);
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            if (!std::isfinite(out[j]) || std::abs(out[j]) > cap_)
                throw IntegrandBlowup("integrand '" + fs_->names[j] + "' exceeds the cap" + where(p), j);
            out[j] *= sign_;
        }
    }

private:
    const VectorField& F_;
    const IntegrandSet* fs_;
    double sign_;
    double cap_;
};

// Dormand-Prince 5(4) coefficients; the system is autonomous so the nodes c_i are not needed
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
public:
    Stepper(const Rhs& f, const IntegratorConfig& cfg)
        : f_(f), cfg_(cfg), n_(f.dim()), k2_(n_), k3_(n_), k4_(n_), k5_(n_), k6_(n_), tmp_(n_), err_(n_) {}

    std::size_t dim() const { return n_; }

    // One step of size h from (y, k1 = f(y)); fills ynew and k7 = f(ynew); returns the scaled error norm.
    double attempt(const std::vector<double>& y, const std::vector<double>& k1, double h, std::vector<double>& ynew,
                   std::vector<double>& k7) {
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * a21 * k1[i];
        f_(tmp_.data(), k2_.data());
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a31 * k1[i] + a32 * k2_[i]);
        f_(tmp_.data(), k3_.data());
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a41 * k1[i] + a42 * k2_[i] + a43 * k3_[i]);
        f_(tmp_.data(), k4_.data());
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = y[i] + h * (a51 * k1[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        f_(tmp_.data(), k5_.data());
        for (std::size_t i = 0; i < n_; ++i)
            tmp_[i] = y[i] + h * (a61 * k1[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        f_(tmp_.data(), k6_.data());
        for (std::size_t i = 0; i < n_; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        f_(ynew.data(), k7.data());
        double sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            err_[i] = h * (e1 * k1[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7[i]);
            const double sk = cfg_.absTol + cfg_.relTol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = err_[i] / sk;
            sum += r * r;
        }
        const double e = std::sqrt(sum / static_cast<double>(n_));
        return std::isfinite(e) ? e : std::numeric_limits<double>::infinity();
    }

    double initialStep(const std::vector<double>& y, const std::vector<double>& f0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sk = cfg_.absTol + cfg_.relTol * std::abs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (f0[i] / sk) * (f0[i] / sk);
        }
        d0 = std::sqrt(d0 / n_);
        d1 = std::sqrt(d1 / n_);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, cfg_.maxStep);
        std::vector<double> y1(n_), f1(n_);
        for (std::size_t i = 0; i < n_; ++i) y1[i] = y[i] + h0 * f0[i];
        f_(y1.data(), f1.data());
        double d2 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sk = cfg_.absTol + cfg_.relTol * std::abs(y[i]);
            d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
        }
        d2 = std::sqrt(d2 / n_) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100 * h0, h1, cfg_.maxStep});
    }

private:
    const Rhs& f_;
    const IntegratorConfig& cfg_;
    std::size_t n_;
    std::vector<double> k2_, k3_, k4_, k5_, k6_, tmp_, err_;
};

struct StepView {
    double t0, t1;
    const std::vector<double>& y0;
    const std::vector<double>& f0;
    const std::vector<double>& y1;
    const std::vector<double>& f1;
};

// Runs accepted steps until `onStep` returns true or t reaches tEnd.
// Returns the number of accepted steps.
template <class OnStep>
std::size_t drive(const Rhs& rhs, std::vector<double>& y, double tEnd, const IntegratorConfig& cfg, OnStep onStep) {
    Stepper st(rhs, cfg);
    const std::size_t n = st.dim();
    std::vector<double> f(n), ynew(n), fnew(n);
    rhs(y.data(), f.data());
    const bool fixed = cfg.fixedStep > 0.0;
    double h = fixed ? cfg.fixedStep : st.initialStep(y, f);
    double t = 0.0;
    double facOld = 1e-4;
    constexpr double beta = 0.04, safe = 0.9, facMin = 0.2, facMax = 10.0;
    const double expo = 0.2 - 0.75 * beta;
    std::size_t accepted = 0;
    bool lastRejected = false;
    while (true) {
        if (t >= tEnd) return accepted;
        if (accepted + 1 > cfg.maxSteps) throw StepFailure("step budget exhausted");
        bool clipped = false;
        if (t + h >= tEnd) {
            h = tEnd - t;
            clipped = true;
        }
        const double err = st.attempt(y, f, h, ynew, fnew);
        if (fixed || err <= 1.0) {
            const double t1 = clipped ? tEnd : t + h;
            ++accepted;
            const StepView view{t, t1, y, f, ynew, fnew};
            const bool stop = onStep(view);
            std::swap(y, ynew);
            std::swap(f, fnew);
            t = t1;
            if (stop) return accepted;
            if (!fixed) {
                double fac = std::pow(err, expo) / std::pow(facOld, beta);
                fac = std::clamp(fac / safe, 1.0 / facMax, 1.0 / facMin);
                double hNew = h / fac;
                if (lastRejected) hNew = std::min(hNew, h);
                facOld = std::max(err, 1e-4);
                h = std::min(hNew, cfg.maxStep);
                lastRejected = false;
            }
        } else {
            const double fac = std::min(1.0 / facMin, std::pow(err, expo) / safe);
            h = h / (std::isfinite(fac) ? std::max(fac, 1.0 / facMax) : 1.0 / facMin);
            lastRejected = true;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                const IntegrandSet* fs = rhs.integrands();
                if (fs) {
                    std::size_t worst = 0;
                    for (std::size_t j = 0; j < fs->size(); ++j)
                        if (std::abs(f[2 + j]) > std::abs(f[2 + worst])) worst = j;
                    if (fs->size() > 0 && std::abs(f[2 + worst]) > 1e6)
                        throw IntegrandBlowup("step size collapsed near a singular integrand '" + fs->names[worst] +
                                                  "'" + where({y[0], y[1]}),
                                              worst);
                }
                throw StepFailure("step size collapsed" + where({y[0], y[1]}));
            }
        }
    }
}

double sectionCoord(const Section& s, const double* y) { return dot(Point{y[0], y[1]} - s.origin, s.normal); }

// cubic Hermite interpolation of component i on a step
double hermite(const StepView& v, std::size_t i, double theta) {
    const double h = v.t1 - v.t0;
    const double y0 = v.y0[i], y1 = v.y1[i];
    return (1 - theta) * y0 + theta * y1 +
           theta * (theta - 1) * ((1 - 2 * theta) * (y1 - y0) + (theta - 1) * h * v.f0[i] + theta * h * v.f1[i]);
}

Cycle runCycle(const VectorField& V, Point z0, const IntegrandSet* fs, const IntegratorConfig& cfg, bool keep) {
    cfg.validate();
    Vec2 v0;
    try {
        v0 = V(z0);
    } catch (const EvalError& e) {
        throw StationaryPoint(std::string("vector field is undefined at the anchor: ") + e.what());
    }
    const double speed = norm(v0);
    if (!(speed > cfg.stationaryEps)) throw StationaryPoint("anchor is a stationary point" + where(z0));
    Cycle c;
    c.anchor = z0;
    c.section = {z0, {v0.x / speed, v0.y / speed}};
    if (fs) c.names = fs->names;

    const Rhs rhs(V, fs, 1.0, cfg);
    std::vector<double> y(rhs.dim(), 0.0);
    y[0] = z0.x;
    y[1] = z0.y;
    if (keep) c.samples.push_back({0.0, z0});

    Stepper polish(rhs, cfg);
    std::vector<double> yStar(rhs.dim()), fStar(rhs.dim());
    bool seenDown = false;
    double tDown = 0.0;
    bool done = false;
    const double closureLimit = cfg.closureTol * (1.0 + norm(z0));
    double lastCandidateClosure = -1.0;

    c.steps = drive(rhs, y, cfg.maxTime, cfg, [&](const StepView& v) {
        const double g0 = sectionCoord(c.section, v.y0.data());
        const double g1 = sectionCoord(c.section, v.y1.data());
        if (g0 > 0.0 && g1 <= 0.0) {
            if (!seenDown) tDown = v.t0 + (v.t1 - v.t0) * g0 / (g0 - g1);
            seenDown = true;
        } else if (seenDown && g0 < 0.0 && g1 >= 0.0 && v.t1 >= cfg.guardFraction * 2.0 * tDown) {
            // bisection on the dense output
            double lo = 0.0, hi = 1.0, theta = 1.0;
            for (int it = 0; it < 200; ++it) {
                theta = 0.5 * (lo + hi);
                const double p[2] = {hermite(v, 0, theta), hermite(v, 1, theta)};
                const double g = sectionCoord(c.section, p);
                if (std::abs(g) <= cfg.eventTol || hi - lo < 1e-16) break;
                (g < 0.0 ? lo : hi) = theta;
            }
            // Newton polish with genuine steps from the step start
            const double h = v.t1 - v.t0;
            double hs = theta * h;
            for (int it = 0; it < 6; ++it) {
                polish.attempt(v.y0, v.f0, hs, yStar, fStar);
                const double g = sectionCoord(c.section, yStar.data());
                const double gd = fStar[0] * c.section.normal.x + fStar[1] * c.section.normal.y;
                if (gd == 0.0) break;
                const double dt = -g / gd;
                if (std::abs(dt) > h) break;
                hs += dt;
                if (std::abs(dt) <= 1e-15 * (1.0 + v.t0)) {
                    polish.attempt(v.y0, v.f0, hs, yStar, fStar);
                    break;
                }
            }
            const Point zs{yStar[0], yStar[1]};
            const double closure = norm(zs - z0);
            lastCandidateClosure = closure;
            if (closure <= closureLimit) {
                c.period = v.t0 + hs;
                c.closure = closure;
                for (std::size_t j = 2; j < rhs.dim(); ++j) c.quadratures.push_back(yStar[j]);
                if (keep) c.samples.push_back({c.period, zs});
                done = true;
                return true;
            }
        }
        if (keep) c.samples.push_back({v.t1, {v.y1[0], v.y1[1]}});
        if (std::abs(v.y1[0]) > cfg.blowupCap || std::abs(v.y1[1]) > cfg.blowupCap)
            throw NoReturn("trajectory escapes to infinity" + where(z0));
        return false;
    });
    if (!done) {
        std::string msg = "no return to the section within the time budget" + where(z0);
        if (lastCandidateClosure >= 0.0) msg += "; closest return missed by " + std::to_string(lastCandidateClosure);
        throw NoReturn(msg);
    }
    return c;
}

}  // namespace

Cycle integrateCycle(const VectorField& V, Point z0, const IntegratorConfig& cfg, bool keepSamples) {
    return runCycle(V, z0, nullptr, cfg, keepSamples);
}

Cycle cycleQuadratures(const VectorField& V, Point z0, const IntegrandSet& fs, const IntegratorConfig& cfg,
                       bool keepSamples) {
    return runCycle(V, z0, &fs, cfg, keepSamples);
}

PathResult integratePath(const VectorField& F, Point z, double duration, const IntegrandSet* fs,
                         const IntegratorConfig& cfg, const Region* region) {
    cfg.validate();
    PathResult r;
    r.end = z;
    r.integrals.assign(fs ? fs->size() : 0, 0.0);
    if (duration == 0.0) return r;
    Vec2 v0;
    try {
        v0 = F(z);
    } catch (const EvalError& e) {
        throw StationaryPoint(std::string("field is undefined at the start point: ") + e.what());
    }
    if (!(norm(v0) > cfg.stationaryEps)) throw StationaryPoint("start point is stationary" + where(z));
    const Rhs rhs(F, fs, duration < 0.0 ? -1.0 : 1.0, cfg);
    std::vector<double> y(rhs.dim(), 0.0);
    y[0] = z.x;
    y[1] = z.y;
    r.steps = drive(rhs, y, std::abs(duration), cfg, [&](const StepView& v) {
        if (region && !region->contains({v.y1[0], v.y1[1]}))
            throw RegionExit("orbit leaves the region" + where({v.y1[0], v.y1[1]}));
        return false;
    });
    r.end = {y[0], y[1]};
    for (std::size_t j = 2; j < rhs.dim(); ++j) r.integrals[j - 2] = y[j];
    return r;
}

Point advanceW(const VectorField& W, Point z, double ds, const IntegratorConfig& cfg, const Region* region) {
    return integratePath(W, z, ds, nullptr, cfg, region).end;
}

Point flowMap(const VectorField& V, Point z, double t, const IntegratorConfig& cfg) {
    return integratePath(V, z, t, nullptr, cfg).end;
}

std::vector<CycleSample> sampleTrajectory(const VectorField& V, Point z, double duration, int count,
                                          const IntegratorConfig& cfg) {
    if (count < 2) throw PreconditionError("need at least two samples");
    std::vector<CycleSample> out;
    out.push_back({0.0, z});
    const double dt = duration / (count - 1);
    for (int i = 1; i < count; ++i) {
        z = flowMap(V, z, dt, cfg);
        out.push_back({i * dt, z});
    }
    return out;
}

}  // namespace perfun
